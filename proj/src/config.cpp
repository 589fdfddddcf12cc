#include "pairaudit/config.hpp"

#include <algorithm>
#include <cctype>

namespace pairaudit {

namespace {

std::string strip(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
    KeyValueConfig cfg;
    std::size_t line_no = 0;
    for (const auto& raw_line : split_string(text, '\n')) {
        ++line_no;
        std::string line = raw_line;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = strip(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line " + std::to_string(line_no) + ": expected `key = value`, got: " + stripped);
        }
        const std::string key = strip(stripped.substr(0, eq));
        const std::string value = strip(stripped.substr(eq + 1));
        if (key.empty()) {
            throw UsageError("config line " + std::to_string(line_no) + ": empty key");
        }
        cfg.entries_[key] = value;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    try {
        return parse(read_text_file(path));
    } catch (const DataError& e) {
        throw UsageError(e.what());
    }
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

void KeyValueConfig::set(const std::string& key, const std::string& value) { entries_[key] = value; }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

std::string KeyValueConfig::require_string(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw UsageError("config: missing required key `" + key + "`");
    return it->second;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw UsageError("config: key `" + key + "` is not a boolean: " + it->second);
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw UsageError("config: key `" + key + "` is not an integer: " + it->second);
    }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw UsageError("config: key `" + key + "` is not a number: " + it->second);
    }
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return {};
    std::vector<std::string> out;
    for (auto& part : split_string(it->second, ',')) {
        std::string p = strip(part);
        if (!p.empty()) out.push_back(std::move(p));
    }
    return out;
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : get_list(key)) {
        try {
            out.push_back(std::stod(s));
        } catch (const std::exception&) {
            throw UsageError("config: key `" + key + "` has a non-numeric element: " + s);
        }
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> KeyValueConfig::entries_with_prefix(const std::string& prefix) const {
    std::vector<std::pair<std::string, std::string>> out;
    const std::string full = prefix + ".";
    for (const auto& [k, v] : entries_) {
        if (k.size() > full.size() && k.compare(0, full.size(), full) == 0) {
            out.emplace_back(k.substr(full.size()), v);
        }
    }
    return out;
}

}  // namespace pairaudit
