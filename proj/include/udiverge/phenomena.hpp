#pragma once

// Heuristic detectors for Arabic constructions without an English parallel:
// dual number, passive voice, the cognate accusative (maf'ul mutlaq) and
// long verb-adposition distances. All operate on a single parsed sentence.

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "udiverge/conllu.hpp"
#include "udiverge/utf8.hpp"

namespace udiverge {

enum class Phenomenon { dual, passive, cognate_accusative, verb_adp_distance, feature };

inline std::string_view phenomenon_name(Phenomenon p) {
    switch (p) {
        case Phenomenon::dual: return "dual";
        case Phenomenon::passive: return "passive";
        case Phenomenon::cognate_accusative: return "cognate_accusative";
        case Phenomenon::verb_adp_distance: return "verb_adp_distance";
        case Phenomenon::feature: return "feature";
    }
    return "feature";
}

struct PhenomenonHit {
    std::string sentence_id;
    Phenomenon phenomenon = Phenomenon::feature;
    std::vector<int> token_indices; // 1-based
    std::string detail;

    bool operator==(const PhenomenonHit&) const = default;
};

// One hit per token whose feats contain key=value. Number=Dual and
// Voice=Pass map onto their named phenomena; anything else is a generic
// feature hit. Passive hits carry the token's UPOS as detail, since UD
// marks both passive verbs and passive participial nouns with Voice=Pass.
inline std::vector<PhenomenonHit> detect_feature(const Sentence& s, const std::string& key,
                                                 const std::string& value) {
    Phenomenon kind = Phenomenon::feature;
    if (key == "Number" && value == "Dual") kind = Phenomenon::dual;
    if (key == "Voice" && value == "Pass") kind = Phenomenon::passive;
    std::vector<PhenomenonHit> hits;
    for (const Token& t : s.tokens) {
        auto v = t.feat(key);
        if (v && *v == value) {
            std::string detail = kind == Phenomenon::passive ? t.upos : key + "=" + value;
            hits.push_back({s.id, kind, {t.index}, std::move(detail)});
        }
    }
    return hits;
}

// Flags ADP tokens far from the verb they attach under. An adposition
// counts when its head chain reaches the verb in at most two steps
// (adp -> verb, or adp -> noun -> verb) and the linear token distance is
// at least min_distance. token_indices = {verb, adposition}, detail = the
// distance.
inline std::vector<PhenomenonHit> verb_adposition_distance(const Sentence& s, int min_distance = 4) {
    if (min_distance < 1) throw std::invalid_argument("verb_adposition_distance: min_distance must be >= 1");
    std::vector<PhenomenonHit> hits;
    for (const Token& v : s.tokens) {
        if (v.upos != "VERB") continue;
        for (const Token& a : s.tokens) {
            if (a.upos != "ADP" || a.head == 0) continue;
            bool attached = a.head == v.index;
            if (!attached) {
                const Token* mid = s.token_at(a.head);
                attached = mid && mid->head == v.index;
            }
            if (!attached) continue;
            int distance = a.index > v.index ? a.index - v.index : v.index - a.index;
            if (distance >= min_distance)
                hits.push_back({s.id, Phenomenon::verb_adp_distance, {v.index, a.index}, std::to_string(distance)});
        }
    }
    return hits;
}

struct CognateOptions {
    std::size_t min_subsequence = 3;
    double min_coverage = 0.75; // of the shorter skeleton
    // Letters removed when reducing a lemma to its consonantal skeleton:
    // the classical Arabic affix-letter inventory plus hamza and ta-marbuta
    // variants.
    std::u32string affix_chars = U"سألتمونيهاءآإة";
};

namespace detail {

inline std::u32string skeleton(std::string_view lemma, const CognateOptions& options) {
    std::u32string out;
    for (char32_t cp : utf8::decode(lemma)) {
        if (utf8::is_arabic_diacritic(cp)) continue;
        if (options.affix_chars.find(cp) != std::u32string::npos) continue;
        out.push_back(cp);
    }
    return out;
}

inline std::u32string longest_common_subsequence(const std::u32string& a, const std::u32string& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<std::size_t>> dp(n + 1, std::vector<std::size_t>(m + 1, 0));
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= m; ++j)
            dp[i][j] = a[i - 1] == b[j - 1] ? dp[i - 1][j - 1] + 1 : std::max(dp[i - 1][j], dp[i][j - 1]);
    std::u32string out;
    std::size_t i = n, j = m;
    while (i > 0 && j > 0) {
        if (a[i - 1] == b[j - 1]) {
            out.push_back(a[i - 1]);
            --i;
            --j;
        } else if (dp[i - 1][j] >= dp[i][j - 1]) {
            --i;
        } else {
            --j;
        }
    }
    std::reverse(out.begin(), out.end());
    return out;
}

} // namespace detail

// Verbal noun echoing its governing verb's root: for each VERB and each
// NOUN dependent in obj/obl relation, compare lemma skeletons and report a
// hit when they share a subsequence of min_subsequence letters covering
// min_coverage of the shorter skeleton. A lemma-skeleton heuristic, not a
// root extractor; precision is tunable via the options.
inline std::vector<PhenomenonHit> detect_cognate_accusative(const Sentence& s, const CognateOptions& options = {}) {
    std::vector<PhenomenonHit> hits;
    for (const Token& v : s.tokens) {
        if (v.upos != "VERB") continue;
        for (const Token& d : s.tokens) {
            if (d.upos != "NOUN" || d.head != v.index) continue;
            auto rel = strip_subtype(d.deprel);
            if (rel != "obj" && rel != "obl") continue;
            auto sv = detail::skeleton(v.lemma, options);
            auto sd = detail::skeleton(d.lemma, options);
            if (sv.empty() || sd.empty()) continue;
            auto shared = detail::longest_common_subsequence(sv, sd);
            std::size_t shorter = std::min(sv.size(), sd.size());
            if (shared.size() < options.min_subsequence) continue;
            if (static_cast<double>(shared.size()) < options.min_coverage * static_cast<double>(shorter)) continue;
            hits.push_back({s.id, Phenomenon::cognate_accusative, {v.index, d.index}, utf8::encode(shared)});
        }
    }
    return hits;
}

} // namespace udiverge
