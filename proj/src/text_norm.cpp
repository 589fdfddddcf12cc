#include "pairaudit/text_norm.hpp"

#include <array>
#include <cctype>
#include <cstdint>
#include <vector>

namespace pairaudit {

namespace {

// Latin-1 Supplement canonical compositions: (base letter, combining mark) ->
// precomposed code point. Marks: U+0300 grave, U+0301 acute, U+0302 circumflex,
// U+0303 tilde, U+0308 diaeresis, U+030A ring above, U+0327 cedilla.
struct Composition {
    char32_t base;
    char32_t mark;
    char32_t composed;
};

constexpr Composition kCompositions[] = {
    {U'A', 0x0300, 0x00C0}, {U'A', 0x0301, 0x00C1}, {U'A', 0x0302, 0x00C2},
    {U'A', 0x0303, 0x00C3}, {U'A', 0x0308, 0x00C4}, {U'A', 0x030A, 0x00C5},
    {U'C', 0x0327, 0x00C7},
    {U'E', 0x0300, 0x00C8}, {U'E', 0x0301, 0x00C9}, {U'E', 0x0302, 0x00CA}, {U'E', 0x0308, 0x00CB},
    {U'I', 0x0300, 0x00CC}, {U'I', 0x0301, 0x00CD}, {U'I', 0x0302, 0x00CE}, {U'I', 0x0308, 0x00CF},
    {U'N', 0x0303, 0x00D1},
    {U'O', 0x0300, 0x00D2}, {U'O', 0x0301, 0x00D3}, {U'O', 0x0302, 0x00D4},
    {U'O', 0x0303, 0x00D5}, {U'O', 0x0308, 0x00D6},
    {U'U', 0x0300, 0x00D9}, {U'U', 0x0301, 0x00DA}, {U'U', 0x0302, 0x00DB}, {U'U', 0x0308, 0x00DC},
    {U'Y', 0x0301, 0x00DD},
    {U'a', 0x0300, 0x00E0}, {U'a', 0x0301, 0x00E1}, {U'a', 0x0302, 0x00E2},
    {U'a', 0x0303, 0x00E3}, {U'a', 0x0308, 0x00E4}, {U'a', 0x030A, 0x00E5},
    {U'c', 0x0327, 0x00E7},
    {U'e', 0x0300, 0x00E8}, {U'e', 0x0301, 0x00E9}, {U'e', 0x0302, 0x00EA}, {U'e', 0x0308, 0x00EB},
    {U'i', 0x0300, 0x00EC}, {U'i', 0x0301, 0x00ED}, {U'i', 0x0302, 0x00EE}, {U'i', 0x0308, 0x00EF},
    {U'n', 0x0303, 0x00F1},
    {U'o', 0x0300, 0x00F2}, {U'o', 0x0301, 0x00F3}, {U'o', 0x0302, 0x00F4},
    {U'o', 0x0303, 0x00F5}, {U'o', 0x0308, 0x00F6},
    {U'u', 0x0300, 0x00F9}, {U'u', 0x0301, 0x00FA}, {U'u', 0x0302, 0x00FB}, {U'u', 0x0308, 0x00FC},
    {U'y', 0x0301, 0x00FD}, {U'y', 0x0308, 0x00FF},
};

bool lookup_composition(char32_t base, char32_t mark, char32_t& out) {
    for (const auto& c : kCompositions) {
        if (c.base == base && c.mark == mark) {
            out = c.composed;
            return true;
        }
    }
    return false;
}

// Decodes one UTF-8 code point at `i`. Returns false (and leaves `cp` unset)
// on invalid sequences, in which case the caller copies the raw byte.
bool decode_utf8(const std::string& s, std::size_t i, char32_t& cp, std::size_t& len) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        cp = b0;
        len = 1;
        return true;
    }
    auto cont = [&](std::size_t k) { return k < s.size() && (byte(k) & 0xC0) == 0x80; };
    if ((b0 & 0xE0) == 0xC0 && cont(i + 1)) {
        cp = (char32_t(b0 & 0x1F) << 6) | (byte(i + 1) & 0x3F);
        len = 2;
        return cp >= 0x80;
    }
    if ((b0 & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
        cp = (char32_t(b0 & 0x0F) << 12) | (char32_t(byte(i + 1) & 0x3F) << 6) | (byte(i + 2) & 0x3F);
        len = 3;
        return cp >= 0x800;
    }
    if ((b0 & 0xF8) == 0xF0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
        cp = (char32_t(b0 & 0x07) << 18) | (char32_t(byte(i + 1) & 0x3F) << 12) |
             (char32_t(byte(i + 2) & 0x3F) << 6) | (byte(i + 3) & 0x3F);
        len = 4;
        return cp >= 0x10000 && cp <= 0x10FFFF;
    }
    return false;
}

void encode_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

std::string compose_latin1(const std::string& s) {
    // Decode into (code point, raw bytes) items so invalid bytes survive intact.
    struct Item {
        char32_t cp;
        bool valid;
        std::string raw;
    };
    std::vector<Item> items;
    items.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        char32_t cp = 0;
        std::size_t len = 1;
        if (decode_utf8(s, i, cp, len)) {
            items.push_back({cp, true, s.substr(i, len)});
            i += len;
        } else {
            items.push_back({0, false, s.substr(i, 1)});
            i += 1;
        }
    }
    std::string out;
    out.reserve(s.size());
    for (std::size_t k = 0; k < items.size(); ++k) {
        if (items[k].valid && k + 1 < items.size() && items[k + 1].valid) {
            char32_t composed = 0;
            if (lookup_composition(items[k].cp, items[k + 1].cp, composed)) {
                encode_utf8(composed, out);
                ++k;
                continue;
            }
        }
        out += items[k].raw;
    }
    return out;
}

}  // namespace

std::string normalize_sentence(const std::string& text, const NormalizeOptions& opts) {
    if (!opts.any()) return text;
    std::string s = text;
    if (opts.nfc) s = compose_latin1(s);
    if (opts.lowercase) {
        for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (opts.trim) {
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        s = s.substr(b, e - b);
    }
    return s;
}

}  // namespace pairaudit
