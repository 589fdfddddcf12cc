#include <doctest.h>

#include <sstream>

#include "pairaudit/dataset.hpp"

using namespace pairaudit;

namespace {

LabelSet binary_labels() { return LabelSet{{"0", "1"}}; }

ParseSchema tsv_schema() {
    ParseSchema schema;
    schema.s1 = ColumnRef::parse("s1");
    schema.s2 = ColumnRef::parse("s2");
    schema.label = ColumnRef::parse("label");
    return schema;
}

std::vector<PairRecord> parse_text(const std::string& text, PairFormat format, const ParseSchema& schema,
                                   const LabelSet& labels) {
    std::istringstream in(text);
    LabelMap map{&labels, {}};
    return parse_pairs(in, format, schema, map, Split::train);
}

}  // namespace

TEST_CASE("tsv row maps directly onto a record") {
    const LabelSet labels = binary_labels();
    const auto records =
        parse_text("s1\ts2\tlabel\nhow to cook rice\thow do I cook rice\t1\n", PairFormat::tsv,
                   tsv_schema(), labels);
    REQUIRE(records.size() == 1);
    CHECK(records[0].pair_id == 0);
    CHECK(records[0].s1_text == "how to cook rice");
    CHECK(records[0].s2_text == "how do I cook rice");
    CHECK(records[0].label == 1);
    CHECK(records[0].split == Split::train);
}

TEST_CASE("empty data section gives an empty list") {
    const LabelSet labels = binary_labels();
    CHECK(parse_text("s1\ts2\tlabel\n", PairFormat::tsv, tsv_schema(), labels).empty());
    CHECK(parse_text("", PairFormat::tsv, tsv_schema(), labels).empty());
}

TEST_CASE("missing column is fatal with the row number") {
    const LabelSet labels = binary_labels();
    CHECK_THROWS_WITH_AS(parse_text("s1\ts2\tlabel\na\tb\t1\nc\td\n", PairFormat::tsv, tsv_schema(), labels),
                         doctest::Contains("row 3"), DataError);
}

TEST_CASE("unmapped label is fatal and names the offender") {
    const LabelSet labels = binary_labels();
    CHECK_THROWS_WITH_AS(parse_text("s1\ts2\tlabel\na\tb\tmaybe\n", PairFormat::tsv, tsv_schema(), labels),
                         doctest::Contains("maybe"), DataError);
}

TEST_CASE("label aliases map raw values onto the declared set") {
    const LabelSet labels{{"not_duplicate", "duplicate"}};
    LabelMap map{&labels, {{"0", "not_duplicate"}, {"1", "duplicate"}}};
    std::istringstream in("s1\ts2\tlabel\na\tb\t1\n");
    const auto records = parse_pairs(in, PairFormat::tsv, tsv_schema(), map, Split::test);
    REQUIRE(records.size() == 1);
    CHECK(records[0].label == 1);
    CHECK(records[0].split == Split::test);
}

TEST_CASE("csv quoting round trip and malformed quote offset") {
    const LabelSet labels = binary_labels();
    const auto records = parse_text("s1,s2,label\n\"a, b\",\"say \"\"hi\"\"\",1\n", PairFormat::csv,
                                    tsv_schema(), labels);
    REQUIRE(records.size() == 1);
    CHECK(records[0].s1_text == "a, b");
    CHECK(records[0].s2_text == "say \"hi\"");

    CHECK_THROWS_WITH_AS(parse_text("s1,s2,label\n\"open,b,1\n", PairFormat::csv, tsv_schema(), labels),
                         doctest::Contains("byte offset"), DataError);
    CHECK_THROWS_WITH_AS(parse_text("s1,s2,label\n\"a\"x,b,1\n", PairFormat::csv, tsv_schema(), labels),
                         doctest::Contains("byte offset"), DataError);
}

TEST_CASE("jsonl keys, split column and numeric labels") {
    const LabelSet labels = binary_labels();
    ParseSchema schema = tsv_schema();
    schema.split = ColumnRef::parse("split");
    const std::string text =
        R"({"s1": "a", "s2": "b", "label": 1, "split": "train"})"
        "\n"
        R"({"s1": "c", "s2": "d", "label": "0", "split": "test"})"
        "\n";
    const auto records = parse_text(text, PairFormat::jsonl, schema, labels);
    REQUIRE(records.size() == 2);
    CHECK(records[0].label == 1);
    CHECK(records[0].split == Split::train);
    CHECK(records[1].label == 0);
    CHECK(records[1].split == Split::test);

    CHECK_THROWS_WITH_AS(parse_text(R"({"s1": "a", "label": 1})" "\n", PairFormat::jsonl, schema, labels),
                         doctest::Contains("s2"), DataError);
}

TEST_CASE("positional schema without header") {
    const LabelSet labels = binary_labels();
    ParseSchema schema;
    schema.s1 = ColumnRef::parse("0");
    schema.s2 = ColumnRef::parse("1");
    schema.label = ColumnRef::parse("2");
    schema.header = false;
    const auto records = parse_text("a\tb\t1\nc\td\t0\n", PairFormat::tsv, schema, labels);
    REQUIRE(records.size() == 2);
    CHECK(records[0].s1_text == "a");
    CHECK(records[1].label == 0);
}

TEST_CASE("interning assigns ids by first appearance and counts occurrences") {
    std::vector<PairRecord> records{
        {0, "a", "b", 1, Split::train, "", ""},
        {1, "b", "c", 0, Split::train, "", ""},
    };
    const SentenceTable table = intern_sentences(records);
    REQUIRE(table.size() == 3);
    CHECK(table.id_of.at("a") == 0);
    CHECK(table.id_of.at("b") == 1);
    CHECK(table.id_of.at("c") == 2);
    CHECK(table.occurrence_count[table.id_of.at("b")] == 2);

    std::uint64_t total = 0;
    for (auto c : table.occurrence_count) total += c;
    CHECK(total == 2 * records.size());
}

TEST_CASE("self-pair interns one id with occurrence 2") {
    std::vector<PairRecord> records{{0, "a", "a", 1, Split::train, "", ""}};
    const SentenceTable table = intern_sentences(records);
    REQUIRE(table.size() == 1);
    CHECK(table.occurrence_count[0] == 2);
}

TEST_CASE("normalization flags change sentence identity") {
    std::vector<PairRecord> records{{0, "  Rice  ", "rice", 1, Split::train, "", ""}};
    CHECK(intern_sentences(records).size() == 2);

    NormalizeOptions norm;
    norm.trim = true;
    norm.lowercase = true;
    CHECK(intern_sentences(records, norm).size() == 1);

    // combining acute on 'e' composes to the precomposed form
    std::vector<PairRecord> accents{{0, "caf\x65\xcc\x81", "caf\xc3\xa9", 1, Split::train, "", ""}};
    CHECK(intern_sentences(accents).size() == 2);
    NormalizeOptions nfc;
    nfc.nfc = true;
    CHECK(intern_sentences(accents, nfc).size() == 1);
}

TEST_CASE("self-pair dataset covers every distinct sentence with the positive label") {
    std::vector<PairRecord> records{
        {0, "a", "b", 0, Split::train, "", ""},
        {1, "b", "c", 0, Split::train, "", ""},
    };
    const SentenceTable table = intern_sentences(records);
    const auto selfs = make_self_pair_dataset(table, 1);
    REQUIRE(selfs.size() == 3);
    for (const auto& rec : selfs) {
        CHECK(rec.s1_text == rec.s2_text);
        CHECK(rec.label == 1);
    }

    const SentenceTable empty_table = intern_sentences({});
    CHECK(make_self_pair_dataset(empty_table, 1).empty());
}

TEST_CASE("parse -> serialize -> parse is the identity on records") {
    const LabelSet labels = binary_labels();
    Rng rng(20240817);
    for (PairFormat format : {PairFormat::tsv, PairFormat::csv, PairFormat::jsonl}) {
        std::vector<PairRecord> records;
        for (std::size_t i = 0; i < 40; ++i) {
            PairRecord rec;
            rec.pair_id = i;
            auto random_text = [&](bool allow_specials) {
                std::string s;
                const std::size_t len = rng.next_index(12);
                const std::string alphabet = allow_specials ? "abc ,\"xyz" : "abc xyz";
                for (std::size_t k = 0; k < len; ++k) s += alphabet[rng.next_index(alphabet.size())];
                return s;
            };
            // tsv cannot carry tabs/newlines; csv and jsonl must round-trip
            // quotes and commas
            rec.s1_text = random_text(format != PairFormat::tsv);
            rec.s2_text = random_text(format != PairFormat::tsv);
            rec.label = static_cast<int>(rng.next_index(2));
            rec.split = static_cast<Split>(rng.next_index(3));
            records.push_back(rec);
        }
        std::ostringstream out;
        serialize_pairs(out, records, labels, format);
        std::istringstream in(out.str());
        LabelMap map{&labels, {}};
        ParseSchema schema = canonical_schema();
        const auto reparsed = parse_pairs(in, format, schema, map, Split::train);
        REQUIRE(reparsed.size() == records.size());
        for (std::size_t i = 0; i < records.size(); ++i) {
            CAPTURE(format_name(format));
            CAPTURE(i);
            CHECK(reparsed[i] == records[i]);
        }
    }
}

TEST_CASE("interning is order-deterministic for identical bytes") {
    const LabelSet labels = binary_labels();
    const std::string text = "s1\ts2\tlabel\nx\ty\t1\ny\tz\t0\nx\tz\t1\n";
    const auto a = parse_text(text, PairFormat::tsv, tsv_schema(), labels);
    const auto b = parse_text(text, PairFormat::tsv, tsv_schema(), labels);
    const SentenceTable ta = intern_sentences(a);
    const SentenceTable tb = intern_sentences(b);
    REQUIRE(ta.size() == tb.size());
    CHECK(ta.text_of == tb.text_of);
    CHECK(ta.occurrence_count == tb.occurrence_count);
}
