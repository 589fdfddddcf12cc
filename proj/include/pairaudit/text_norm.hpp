#pragma once

#include <string>

namespace pairaudit {

// Controls how sentence strings are canonicalized before interning. All off by
// default: identity is the exact byte string.
struct NormalizeOptions {
    bool trim = false;       // strip ASCII whitespace at both ends
    bool lowercase = false;  // ASCII A-Z only
    // Canonical composition of combining marks into precomposed letters.
    // Coverage is the Latin-1 Supplement repertoire (A..y + grave/acute/
    // circumflex/tilde/diaeresis/ring/cedilla); other sequences pass through
    // unchanged. Invalid UTF-8 bytes pass through unchanged as well.
    bool nfc = false;

    bool any() const { return trim || lowercase || nfc; }
};

std::string normalize_sentence(const std::string& text, const NormalizeOptions& opts);

}  // namespace pairaudit
