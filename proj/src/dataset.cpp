#include "pairaudit/dataset.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

namespace pairaudit {

namespace {

using nlohmann::json;

struct Row {
    std::vector<std::string> fields;
    std::size_t row_number = 0;  // 1-based data row
};

class DelimitedReader {
public:
    DelimitedReader(std::istream& in, char delim, bool quoted) : in_(in), delim_(delim), quoted_(quoted) {}

    // Reads one record (possibly spanning lines when quoted). Returns false at EOF.
    bool next(Row& row) {
        row.fields.clear();
        int c = in_.peek();
        if (c == EOF) return false;
        row.row_number = ++rows_read_;
        std::string field;
        bool in_quotes = false;
        bool field_was_quoted = false;
        for (;;) {
            c = in_.get();
            ++offset_;
            if (c == EOF) {
                if (in_quotes) {
                    throw DataError("malformed quoting: unterminated quote at byte offset " +
                                    std::to_string(quote_open_offset_));
                }
                row.fields.push_back(std::move(field));
                return true;
            }
            const char ch = static_cast<char>(c);
            if (in_quotes) {
                if (ch == '"') {
                    if (in_.peek() == '"') {
                        in_.get();
                        ++offset_;
                        field += '"';
                    } else {
                        in_quotes = false;
                    }
                } else {
                    field += ch;
                }
                continue;
            }
            if (quoted_ && ch == '"') {
                if (!field.empty() || field_was_quoted) {
                    throw DataError("malformed quoting: quote inside unquoted field at byte offset " +
                                    std::to_string(offset_ - 1));
                }
                in_quotes = true;
                field_was_quoted = true;
                quote_open_offset_ = offset_ - 1;
                continue;
            }
            if (ch == delim_) {
                row.fields.push_back(std::move(field));
                field.clear();
                field_was_quoted = false;
                continue;
            }
            if (ch == '\n') {
                if (!field.empty() && field.back() == '\r') field.pop_back();
                row.fields.push_back(std::move(field));
                return true;
            }
            if (field_was_quoted && !field.empty()) {
                // text after a closing quote
                throw DataError("malformed quoting: unexpected character after closing quote at byte offset " +
                                std::to_string(offset_ - 1));
            }
            field += ch;
        }
    }

private:
    std::istream& in_;
    char delim_;
    bool quoted_;
    std::size_t offset_ = 0;
    std::size_t rows_read_ = 0;
    std::size_t quote_open_offset_ = 0;
};

int resolve_column(const ColumnRef& ref, const std::vector<std::string>& header, bool has_header,
                   const char* what) {
    if (ref.by_index()) return ref.index;
    if (!has_header) {
        throw UsageError(std::string("schema: column `") + ref.name + "` for " + what +
                         " is a name but the file has no header; use a numeric index");
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == ref.name) return static_cast<int>(i);
    }
    throw DataError(std::string("missing column `") + ref.name + "` for " + what + " in header");
}

const std::string& field_at(const Row& row, int col, const char* what) {
    if (col < 0 || static_cast<std::size_t>(col) >= row.fields.size()) {
        throw DataError(std::string("missing column for ") + what + " at data row " +
                        std::to_string(row.row_number));
    }
    return row.fields[static_cast<std::size_t>(col)];
}

std::string json_field(const json& obj, const ColumnRef& ref, std::size_t row_number, const char* what) {
    const std::string key = ref.by_index() ? std::to_string(ref.index) : ref.name;
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw DataError(std::string("missing key `") + key + "` for " + what + " at data row " +
                        std::to_string(row_number));
    }
    if (it->is_string()) return it->get<std::string>();
    return it->dump();  // numbers/bools keep their literal form
}

Split resolve_split(const std::string& value, const SplitValueMap& map, std::size_t row_number) {
    auto s = map.lookup(value);
    if (!s) {
        throw DataError("unknown split value `" + value + "` at data row " + std::to_string(row_number));
    }
    return *s;
}

void csv_write_field(std::ostream& out, const std::string& field) {
    const bool needs_quote = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quote) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

void tsv_write_field(std::ostream& out, const std::string& field) {
    if (field.find_first_of("\t\n\r") != std::string::npos) {
        throw DataError("tsv serialization cannot represent a field containing tab or newline");
    }
    out << field;
}

}  // namespace

int LabelMap::resolve(const std::string& raw) const {
    std::string name = raw;
    auto it = aliases.find(raw);
    if (it != aliases.end()) name = it->second;
    const int idx = labels->index_of(name);
    if (idx < 0) {
        throw DataError("unmapped label value: `" + raw + "` (declared labels: " +
                        join_strings(labels->names, ", ") + ")");
    }
    return idx;
}

PairFormat parse_format_name(const std::string& name) {
    if (name == "tsv") return PairFormat::tsv;
    if (name == "csv") return PairFormat::csv;
    if (name == "jsonl") return PairFormat::jsonl;
    throw UsageError("unknown format `" + name + "` (expected tsv, csv or jsonl)");
}

const char* format_name(PairFormat f) {
    switch (f) {
        case PairFormat::tsv: return "tsv";
        case PairFormat::csv: return "csv";
        case PairFormat::jsonl: return "jsonl";
    }
    return "?";
}

ColumnRef ColumnRef::parse(const std::string& spec) {
    ColumnRef ref;
    if (!spec.empty() && std::all_of(spec.begin(), spec.end(), [](unsigned char c) { return std::isdigit(c); })) {
        ref.index = std::stoi(spec);
    } else {
        ref.name = spec;
    }
    return ref;
}

std::optional<Split> SplitValueMap::lookup(const std::string& value) const {
    if (value == train) return Split::train;
    if (value == validation) return Split::validation;
    if (value == test) return Split::test;
    return std::nullopt;
}

std::vector<PairRecord> parse_pairs(std::istream& in, PairFormat format, const ParseSchema& schema,
                                    const LabelMap& label_map, Split default_split,
                                    std::size_t first_pair_id) {
    std::vector<PairRecord> records;

    if (format == PairFormat::jsonl) {
        std::string line;
        std::size_t row_number = 0;
        while (std::getline(in, line)) {
            ++row_number;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            json obj;
            try {
                obj = json::parse(line);
            } catch (const json::parse_error& e) {
                throw DataError("invalid JSON at data row " + std::to_string(row_number) + ": " + e.what());
            }
            PairRecord rec;
            rec.pair_id = first_pair_id + records.size();
            rec.s1_text = json_field(obj, schema.s1, row_number, "s1");
            rec.s2_text = json_field(obj, schema.s2, row_number, "s2");
            rec.label = label_map.resolve(json_field(obj, schema.label, row_number, "label"));
            rec.split = schema.split
                            ? resolve_split(json_field(obj, *schema.split, row_number, "split"),
                                            schema.split_values, row_number)
                            : default_split;
            auto optional_field = [&](const std::optional<ColumnRef>& ref) -> std::string {
                if (!ref) return {};
                const std::string key = ref->by_index() ? std::to_string(ref->index) : ref->name;
                auto it = obj.find(key);
                if (it == obj.end()) return {};
                return it->is_string() ? it->get<std::string>() : it->dump();
            };
            rec.s1_pos = optional_field(schema.s1_pos);
            rec.s2_pos = optional_field(schema.s2_pos);
            records.push_back(std::move(rec));
        }
        return records;
    }

    const char delim = format == PairFormat::tsv ? '\t' : ',';
    const bool quoted = format == PairFormat::csv;
    DelimitedReader reader(in, delim, quoted);

    Row row;
    std::vector<std::string> header;
    if (schema.header) {
        if (!reader.next(row)) return records;  // empty file: no data section
        header = row.fields;
    }
    const int col_s1 = resolve_column(schema.s1, header, schema.header, "s1");
    const int col_s2 = resolve_column(schema.s2, header, schema.header, "s2");
    const int col_label = resolve_column(schema.label, header, schema.header, "label");
    const int col_split = schema.split ? resolve_column(*schema.split, header, schema.header, "split") : -1;
    const int col_s1_pos = schema.s1_pos ? resolve_column(*schema.s1_pos, header, schema.header, "s1_pos") : -1;
    const int col_s2_pos = schema.s2_pos ? resolve_column(*schema.s2_pos, header, schema.header, "s2_pos") : -1;

    while (reader.next(row)) {
        if (row.fields.size() == 1 && row.fields[0].empty()) continue;  // blank line
        PairRecord rec;
        rec.pair_id = first_pair_id + records.size();
        rec.s1_text = field_at(row, col_s1, "s1");
        rec.s2_text = field_at(row, col_s2, "s2");
        rec.label = label_map.resolve(field_at(row, col_label, "label"));
        rec.split = col_split >= 0
                        ? resolve_split(field_at(row, col_split, "split"), schema.split_values, row.row_number)
                        : default_split;
        if (col_s1_pos >= 0) rec.s1_pos = field_at(row, col_s1_pos, "s1_pos");
        if (col_s2_pos >= 0) rec.s2_pos = field_at(row, col_s2_pos, "s2_pos");
        records.push_back(std::move(rec));
    }
    return records;
}

ParseSchema canonical_schema() {
    ParseSchema schema;
    schema.s1.name = "s1";
    schema.s2.name = "s2";
    schema.label.name = "label";
    schema.split = ColumnRef{"split", -1};
    schema.header = true;
    return schema;
}

void serialize_pairs(std::ostream& out, const std::vector<PairRecord>& records, const LabelSet& labels,
                     PairFormat format) {
    if (format == PairFormat::jsonl) {
        for (const auto& rec : records) {
            json obj;
            obj["s1"] = rec.s1_text;
            obj["s2"] = rec.s2_text;
            obj["label"] = labels.names.at(static_cast<std::size_t>(rec.label));
            obj["split"] = split_name(rec.split);
            out << obj.dump() << '\n';
        }
        return;
    }
    const char delim = format == PairFormat::tsv ? '\t' : ',';
    auto write_field = [&](const std::string& f) {
        if (format == PairFormat::csv)
            csv_write_field(out, f);
        else
            tsv_write_field(out, f);
    };
    out << "s1" << delim << "s2" << delim << "label" << delim << "split" << '\n';
    for (const auto& rec : records) {
        write_field(rec.s1_text);
        out << delim;
        write_field(rec.s2_text);
        out << delim;
        write_field(labels.names.at(static_cast<std::size_t>(rec.label)));
        out << delim;
        out << split_name(rec.split) << '\n';
    }
}

std::uint32_t SentenceTable::require_id(const std::string& raw_text) const {
    const std::string key = normalization.any() ? normalize_sentence(raw_text, normalization) : raw_text;
    auto it = id_of.find(key);
    if (it == id_of.end()) throw DataError("sentence not interned: " + raw_text);
    return it->second;
}

SentenceTable intern_sentences(const std::vector<PairRecord>& records, const NormalizeOptions& norm) {
    SentenceTable table;
    table.normalization = norm;
    auto add = [&](const std::string& raw) {
        std::string key = norm.any() ? normalize_sentence(raw, norm) : raw;
        if (key.empty()) ++table.empty_sentence_occurrences;
        auto [it, inserted] = table.id_of.try_emplace(std::move(key), static_cast<std::uint32_t>(table.text_of.size()));
        if (inserted) {
            table.text_of.push_back(it->first);
            table.occurrence_count.push_back(0);
        }
        ++table.occurrence_count[it->second];
    };
    for (const auto& rec : records) {
        add(rec.s1_text);
        add(rec.s2_text);
    }
    return table;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> pair_node_ids(const std::vector<PairRecord>& records,
                                                                   const SentenceTable& table) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    out.reserve(records.size());
    for (const auto& rec : records) {
        out.emplace_back(table.require_id(rec.s1_text), table.require_id(rec.s2_text));
    }
    return out;
}

std::vector<PairRecord> make_self_pair_dataset(const SentenceTable& table, int positive_label) {
    std::vector<PairRecord> out;
    out.reserve(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        PairRecord rec;
        rec.pair_id = i;
        rec.s1_text = table.text_of[i];
        rec.s2_text = table.text_of[i];
        rec.label = positive_label;
        rec.split = Split::test;
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace pairaudit
