#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pairaudit/features.hpp"

namespace pairaudit {

enum class PosTag : int { noun = 0, verb = 1, adj = 2, adv = 3, other = 4 };

struct TokenizedSentence {
    std::vector<std::string> tokens;
    std::vector<PosTag> pos;  // empty, or aligned 1:1 with tokens

    bool has_pos() const { return !pos.empty(); }
};

struct TokenizerOptions {
    bool lowercase = true;  // applied before splitting
};

// Whitespace tokenizer; POS left empty.
TokenizedSentence tokenize(const std::string& text, const TokenizerOptions& opts = {});

// Pluggable tagger: token -> coarse tag.
using PosTagger = std::function<PosTag(const std::string&)>;

// Bundled rule tagger. Function words from a fixed lexicon tag as `other`;
// otherwise the longest matching suffix decides:
//   -ly                                          -> adv
//   -ing -ed -ize -ise -ify -ate                 -> verb
//   -ous -ful -ive -able -ible -al -ic -ish -less -> adj
//   -tion -sion -ness -ment -ity -ance -ence -ship -ism -ist -er -or -> noun
// and anything else is a noun.
PosTag rule_pos_tag(const std::string& token);

// Applies a tagger to every token (overwriting existing tags).
void tag_sentence(TokenizedSentence& sentence, const PosTagger& tagger);

// Parses a pre-tagged string ("noun verb other ...") aligned with the tokens;
// throws DataError on length mismatch or unknown tag names.
std::vector<PosTag> parse_pos_tags(const std::string& tags, std::size_t n_tokens);

// Individual n-gram BLEU: modified n-gram precision times brevity penalty.
// A hypothesis shorter than n tokens scores 0; a zero-match precision is
// smoothed to 1e-9.
double bleu_n(const TokenizedSentence& hypothesis, const TokenizedSentence& reference, int n);

// The 15 content features:
//   [0..3]  BLEU-1..4 (s1 as hypothesis by default)
//   [4]     |len(s1) - len(s2)|
//   [5..14] overlap count and percentage over all tokens, nouns, verbs,
//           adjectives, adverbs (percentage = |intersection| / |union| of the
//           category-restricted token sets; 0 when the union is empty)
// Tokens missing POS contribute to the all-token group only.
std::array<double, 15> unlexicalized_features(const TokenizedSentence& s1, const TokenizedSentence& s2,
                                              bool s2_as_hypothesis = false);

const std::vector<std::string>& unlexicalized_feature_names();

}  // namespace pairaudit
