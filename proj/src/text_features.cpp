#include "pairaudit/text_features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "pairaudit/common.hpp"

namespace pairaudit {

namespace {

const std::unordered_set<std::string>& function_words() {
    static const std::unordered_set<std::string> words = {
        "the",  "a",     "an",    "and",   "or",    "but",   "if",    "of",    "to",    "in",   "on",
        "at",   "by",    "for",   "with",  "from",  "as",    "is",    "are",   "was",   "were", "be",
        "been", "being", "am",    "do",    "does",  "did",   "have",  "has",   "had",   "will", "would",
        "can",  "could", "should", "shall", "may",  "might", "must",  "not",   "no",    "nor",  "so",
        "i",    "you",   "he",    "she",   "it",    "we",    "they",  "me",    "him",   "her",  "us",
        "them", "my",    "your",  "his",   "its",   "our",   "their", "this",  "that",  "these",
        "those", "there", "here",  "what",  "which", "who",   "whom",  "whose", "when",  "where",
        "why",  "how",   "than",  "then",  "because", "while", "about", "into", "over", "under",
    };
    return words;
}

const std::unordered_set<std::string>& adverb_words() {
    static const std::unordered_set<std::string> words = {
        "very", "quite", "too", "also", "always", "never", "often", "really", "still",
        "just", "now", "again", "soon", "almost", "already", "yet",
    };
    return words;
}

bool ends_with(const std::string& s, const char* suffix) {
    const std::size_t n = std::char_traits<char>::length(suffix);
    return s.size() > n && s.compare(s.size() - n, n, suffix) == 0;
}

}  // namespace

TokenizedSentence tokenize(const std::string& text, const TokenizerOptions& opts) {
    TokenizedSentence out;
    std::string token;
    auto flush = [&] {
        if (!token.empty()) {
            out.tokens.push_back(std::move(token));
            token.clear();
        }
    };
    for (char raw : text) {
        const unsigned char c = static_cast<unsigned char>(raw);
        if (std::isspace(c)) {
            flush();
        } else {
            token += opts.lowercase ? static_cast<char>(std::tolower(c)) : raw;
        }
    }
    flush();
    return out;
}

PosTag rule_pos_tag(const std::string& token) {
    if (function_words().count(token)) return PosTag::other;
    if (adverb_words().count(token)) return PosTag::adv;
    if (ends_with(token, "ly")) return PosTag::adv;
    for (const char* s : {"ing", "ed", "ize", "ise", "ify", "ate"})
        if (ends_with(token, s)) return PosTag::verb;
    for (const char* s : {"ous", "ful", "ive", "able", "ible", "al", "ic", "ish", "less"})
        if (ends_with(token, s)) return PosTag::adj;
    return PosTag::noun;
}

void tag_sentence(TokenizedSentence& sentence, const PosTagger& tagger) {
    sentence.pos.resize(sentence.tokens.size());
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) sentence.pos[i] = tagger(sentence.tokens[i]);
}

std::vector<PosTag> parse_pos_tags(const std::string& tags, std::size_t n_tokens) {
    std::vector<PosTag> out;
    for (const auto& t : split_string(tags, ' ')) {
        if (t.empty()) continue;
        if (t == "noun") out.push_back(PosTag::noun);
        else if (t == "verb") out.push_back(PosTag::verb);
        else if (t == "adj") out.push_back(PosTag::adj);
        else if (t == "adv") out.push_back(PosTag::adv);
        else if (t == "other") out.push_back(PosTag::other);
        else throw DataError("unknown POS tag `" + t + "` (expected noun/verb/adj/adv/other)");
    }
    if (out.size() != n_tokens) {
        throw DataError("POS tags not aligned with tokens: " + std::to_string(out.size()) + " tags for " +
                        std::to_string(n_tokens) + " tokens");
    }
    return out;
}

double bleu_n(const TokenizedSentence& hypothesis, const TokenizedSentence& reference, int n) {
    if (n < 1 || n > 4) throw std::invalid_argument("bleu_n: n must be in 1..4");
    const std::size_t hlen = hypothesis.tokens.size();
    const std::size_t rlen = reference.tokens.size();
    if (hlen < static_cast<std::size_t>(n)) return 0.0;

    auto ngram_counts = [n](const std::vector<std::string>& toks) {
        std::unordered_map<std::string, int> counts;
        for (std::size_t i = 0; i + n <= toks.size(); ++i) {
            std::string key;
            for (int j = 0; j < n; ++j) {
                if (j) key += '\x1f';
                key += toks[i + j];
            }
            ++counts[key];
        }
        return counts;
    };

    const auto hyp_counts = ngram_counts(hypothesis.tokens);
    const auto ref_counts = ngram_counts(reference.tokens);
    std::uint64_t matched = 0;
    std::uint64_t total = 0;
    for (const auto& [gram, count] : hyp_counts) {
        total += static_cast<std::uint64_t>(count);
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) matched += static_cast<std::uint64_t>(std::min(count, it->second));
    }
    const double precision =
        matched == 0 ? 1e-9 : static_cast<double>(matched) / static_cast<double>(total);
    const double brevity =
        hlen >= rlen ? 1.0 : std::exp(1.0 - static_cast<double>(rlen) / static_cast<double>(hlen));
    return precision * brevity;
}

const std::vector<std::string>& unlexicalized_feature_names() {
    static const std::vector<std::string> names = {
        "bleu_1", "bleu_2", "bleu_3", "bleu_4", "len_diff",
        "overlap_all_count", "overlap_all_pct",
        "overlap_noun_count", "overlap_noun_pct",
        "overlap_verb_count", "overlap_verb_pct",
        "overlap_adj_count", "overlap_adj_pct",
        "overlap_adv_count", "overlap_adv_pct",
    };
    return names;
}

std::array<double, 15> unlexicalized_features(const TokenizedSentence& s1, const TokenizedSentence& s2,
                                              bool s2_as_hypothesis) {
    std::array<double, 15> out{};
    const TokenizedSentence& hyp = s2_as_hypothesis ? s2 : s1;
    const TokenizedSentence& ref = s2_as_hypothesis ? s1 : s2;
    for (int n = 1; n <= 4; ++n) out[static_cast<std::size_t>(n - 1)] = bleu_n(hyp, ref, n);

    const double l1 = static_cast<double>(s1.tokens.size());
    const double l2 = static_cast<double>(s2.tokens.size());
    out[4] = std::fabs(l1 - l2);

    // token sets restricted to: everything, then each POS category
    auto category_set = [](const TokenizedSentence& s, int category) {
        std::set<std::string> set;
        for (std::size_t i = 0; i < s.tokens.size(); ++i) {
            if (category < 0) {
                set.insert(s.tokens[i]);
            } else if (s.has_pos() && s.pos[i] == static_cast<PosTag>(category)) {
                set.insert(s.tokens[i]);
            }
        }
        return set;
    };

    const int categories[5] = {-1, static_cast<int>(PosTag::noun), static_cast<int>(PosTag::verb),
                               static_cast<int>(PosTag::adj), static_cast<int>(PosTag::adv)};
    for (std::size_t k = 0; k < 5; ++k) {
        const auto a = category_set(s1, categories[k]);
        const auto b = category_set(s2, categories[k]);
        std::size_t common = 0;
        for (const auto& t : a) common += b.count(t);
        const std::size_t uni = a.size() + b.size() - common;
        out[5 + 2 * k] = static_cast<double>(common);
        out[6 + 2 * k] = uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
    }
    return out;
}

}  // namespace pairaudit
