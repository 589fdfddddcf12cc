#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "pairaudit/common.hpp"
#include "pairaudit/text_norm.hpp"

namespace pairaudit {

// Declared label set. Order is declaration order and is the tie-break order for
// the majority baseline and argmax prediction.
struct LabelSet {
    std::vector<std::string> names;

    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i);
        return -1;
    }
    std::size_t size() const { return names.size(); }
};

struct PairRecord {
    std::size_t pair_id = 0;  // ordinal index across the loaded dataset
    std::string s1_text;
    std::string s2_text;
    int label = -1;  // index into LabelSet
    Split split = Split::train;
    // optional pre-tagged POS (space separated coarse tags, aligned with
    // whitespace tokens); empty when the input carries none
    std::string s1_pos;
    std::string s2_pos;

    bool operator==(const PairRecord&) const = default;
};

// Raw label string -> declared label index. Identity over declared names by
// default, plus explicit aliases.
struct LabelMap {
    const LabelSet* labels = nullptr;
    std::unordered_map<std::string, std::string> aliases;

    int resolve(const std::string& raw) const;
};

enum class PairFormat { tsv, csv, jsonl };

PairFormat parse_format_name(const std::string& name);
const char* format_name(PairFormat f);

// Column (tsv/csv) or key (jsonl) reference. A numeric `index` addresses
// position for header-less files; otherwise `name` is looked up in the header
// row / JSON object.
struct ColumnRef {
    std::string name;
    int index = -1;

    bool by_index() const { return index >= 0; }
    static ColumnRef parse(const std::string& spec);
};

struct SplitValueMap {
    std::string train = "train";
    std::string validation = "validation";
    std::string test = "test";

    std::optional<Split> lookup(const std::string& value) const;
};

struct ParseSchema {
    ColumnRef s1;
    ColumnRef s2;
    ColumnRef label;
    std::optional<ColumnRef> split;   // absent -> default_split applies
    std::optional<ColumnRef> s1_pos;  // optional pre-tagged POS columns
    std::optional<ColumnRef> s2_pos;
    bool header = true;  // tsv/csv only
    SplitValueMap split_values;
};

// Parses one delimited/JSON-lines source. pair_ids are assigned sequentially
// starting at `first_pair_id`, in file order.
//
// Fatal conditions (DataError): referenced column missing (reported with the
// 1-based data row number), label string not covered by the map (reported with
// the offending value), malformed CSV quoting (reported with the byte offset).
std::vector<PairRecord> parse_pairs(std::istream& in, PairFormat format, const ParseSchema& schema,
                                    const LabelMap& label_map, Split default_split,
                                    std::size_t first_pair_id = 0);

// Canonical serialization (columns s1, s2, label, split in all formats); the
// inverse of parse_pairs under the canonical schema.
void serialize_pairs(std::ostream& out, const std::vector<PairRecord>& records, const LabelSet& labels,
                     PairFormat format);
ParseSchema canonical_schema();

struct SentenceTable {
    std::unordered_map<std::string, std::uint32_t> id_of;
    std::vector<std::string> text_of;               // id -> normalized sentence
    std::vector<std::uint64_t> occurrence_count;    // appearances in either pair slot
    std::size_t empty_sentence_occurrences = 0;     // surfaced in audit reports
    NormalizeOptions normalization;

    std::size_t size() const { return text_of.size(); }
    std::uint32_t require_id(const std::string& raw_text) const;
};

// Ids are assigned by first appearance (s1 before s2, records in order), so the
// same bytes always produce the same table.
SentenceTable intern_sentences(const std::vector<PairRecord>& records, const NormalizeOptions& norm = {});

// Node ids of every record's (s1, s2) under the table's normalization.
std::vector<std::pair<std::uint32_t, std::uint32_t>> pair_node_ids(const std::vector<PairRecord>& records,
                                                                   const SentenceTable& table);

// One (s, s) pair per distinct sentence, labeled with the positive class.
std::vector<PairRecord> make_self_pair_dataset(const SentenceTable& table, int positive_label);

}  // namespace pairaudit
