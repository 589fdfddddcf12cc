#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pairaudit/common.hpp"

namespace pairaudit {

// Flat `key = value` configuration file.
//
//   # comment
//   format = tsv
//   col.s1 = question1
//   label_map.0 = not_duplicate
//
// Keys are case-sensitive. Values keep interior whitespace; surrounding
// whitespace is stripped. Later assignments override earlier ones.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(const std::string& text);
    static KeyValueConfig parse_file(const std::string& path);

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    bool get_bool(const std::string& key, bool fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;  // comma separated
    std::vector<double> get_double_list(const std::string& key) const;

    // all keys beginning with `prefix.`, with the prefix stripped; sorted
    std::vector<std::pair<std::string, std::string>> entries_with_prefix(const std::string& prefix) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace pairaudit
