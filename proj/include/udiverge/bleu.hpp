#pragma once

// Self-contained sentence-level BLEU: clipped n-gram precisions, brevity
// penalty, configurable order/weights, and an epsilon-floor smoothing
// option for zero-match orders. Scores are always in [0, 1].
//
// The effective reference length is the shortest reference. This keeps the
// score monotone in the reference set (more references never lower it),
// which corpus-growth workflows rely on.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "udiverge/utf8.hpp"

namespace udiverge {

enum class Smoothing { none, epsilon_floor };

struct BleuConfig {
    int max_n = 4;
    // Empty means uniform 1/max_n; otherwise exactly max_n nonnegative
    // values summing to 1.
    std::vector<double> weights;
    Smoothing smoothing = Smoothing::epsilon_floor;
    double epsilon = 0.1; // substitute numerator for zero-match orders

    std::vector<double> resolved_weights() const {
        if (max_n < 1) throw std::invalid_argument("bleu: max_n must be >= 1");
        if (epsilon <= 0.0 || epsilon > 1.0) throw std::invalid_argument("bleu: epsilon must be in (0, 1]");
        if (weights.empty())
            return std::vector<double>(static_cast<std::size_t>(max_n), 1.0 / static_cast<double>(max_n));
        if (weights.size() != static_cast<std::size_t>(max_n))
            throw std::invalid_argument("bleu: expected " + std::to_string(max_n) + " weights");
        double sum = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw std::invalid_argument("bleu: weights must be nonnegative");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("bleu: weights must sum to 1");
        return weights;
    }
};

struct NgramPrecision {
    long long clipped = 0;
    long long total = 0;

    bool operator==(const NgramPrecision&) const = default;
};

struct BleuScore {
    double score = 0.0;
    std::vector<NgramPrecision> precisions; // orders 1..max_n
    double bp = 0.0;
    long long candidate_length = 0;
    long long effective_reference_length = 0;
};

enum class TokenizeMode { whitespace, whitespace_punct };

// whitespace: split on Unicode whitespace runs. whitespace_punct: also
// peel leading/trailing punctuation codepoints into their own tokens.
inline std::vector<std::string> tokenize(std::string_view text, TokenizeMode mode = TokenizeMode::whitespace) {
    std::vector<std::string> tokens;
    std::u32string cps = utf8::decode(text);
    std::size_t i = 0;
    while (i < cps.size()) {
        while (i < cps.size() && utf8::is_space(cps[i])) ++i;
        if (i >= cps.size()) break;
        std::size_t j = i;
        while (j < cps.size() && !utf8::is_space(cps[j])) ++j;
        std::u32string word = cps.substr(i, j - i);
        i = j;
        if (mode == TokenizeMode::whitespace) {
            tokens.push_back(utf8::encode(word));
            continue;
        }
        std::size_t lead = 0;
        while (lead < word.size() && utf8::is_punct(word[lead])) ++lead;
        std::size_t trail = word.size();
        while (trail > lead && utf8::is_punct(word[trail - 1])) --trail;
        for (std::size_t k = 0; k < lead; ++k) tokens.push_back(utf8::encode(word.substr(k, 1)));
        if (trail > lead) tokens.push_back(utf8::encode(word.substr(lead, trail - lead)));
        for (std::size_t k = trail; k < word.size(); ++k) tokens.push_back(utf8::encode(word.substr(k, 1)));
    }
    return tokens;
}

namespace detail {

// Length-prefixed concatenation; tokens may contain any bytes.
inline std::string ngram_key(std::span<const std::string> tokens, std::size_t begin, std::size_t n) {
    std::string key;
    for (std::size_t k = 0; k < n; ++k) {
        const std::string& t = tokens[begin + k];
        std::uint32_t len = static_cast<std::uint32_t>(t.size());
        key.append(reinterpret_cast<const char*>(&len), sizeof(len));
        key.append(t);
    }
    return key;
}

inline std::unordered_map<std::string, long long> ngram_counts(std::span<const std::string> tokens, std::size_t n) {
    std::unordered_map<std::string, long long> counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) ++counts[ngram_key(tokens, i, n)];
    return counts;
}

} // namespace detail

// Clipped matches and total candidate n-grams of order n: each distinct
// candidate n-gram is credited at most its maximum count in any single
// reference.
inline NgramPrecision modified_precision(std::span<const std::string> candidate,
                                         const std::vector<std::vector<std::string>>& references, int n) {
    if (n < 1) throw std::invalid_argument("modified_precision: n must be >= 1");
    NgramPrecision p;
    auto un = static_cast<std::size_t>(n);
    p.total = candidate.size() >= un ? static_cast<long long>(candidate.size() - un + 1) : 0;
    if (p.total == 0) return p;
    auto cand_counts = detail::ngram_counts(candidate, un);
    std::vector<std::unordered_map<std::string, long long>> ref_counts;
    ref_counts.reserve(references.size());
    for (const auto& ref : references) ref_counts.push_back(detail::ngram_counts(ref, un));
    for (const auto& [gram, count] : cand_counts) {
        long long best = 0;
        for (const auto& rc : ref_counts) {
            auto it = rc.find(gram);
            if (it != rc.end() && it->second > best) best = it->second;
        }
        p.clipped += std::min(count, best);
    }
    return p;
}

// bp = 1 when the candidate is at least as long as the shortest reference,
// exp(1 - r/c) otherwise; an empty candidate scores 0 outright.
inline std::pair<double, long long> brevity_penalty(long long candidate_length,
                                                    const std::vector<std::vector<std::string>>& references) {
    if (references.empty()) throw std::invalid_argument("brevity_penalty: no references");
    if (candidate_length < 0) throw std::invalid_argument("brevity_penalty: negative candidate length");
    long long r = static_cast<long long>(references.front().size());
    for (const auto& ref : references) r = std::min(r, static_cast<long long>(ref.size()));
    if (candidate_length == 0) return {0.0, r};
    if (candidate_length >= r) return {1.0, r};
    return {std::exp(1.0 - static_cast<double>(r) / static_cast<double>(candidate_length)), r};
}

inline BleuScore sentence_bleu(std::span<const std::string> candidate,
                               const std::vector<std::vector<std::string>>& references,
                               const BleuConfig& cfg = {}) {
    if (references.empty()) throw std::invalid_argument("sentence_bleu: no references");
    for (const auto& ref : references)
        if (ref.empty()) throw std::invalid_argument("sentence_bleu: empty reference");
    std::vector<double> weights = cfg.resolved_weights();

    BleuScore out;
    out.candidate_length = static_cast<long long>(candidate.size());
    auto [bp, eff] = brevity_penalty(out.candidate_length, references);
    out.bp = bp;
    out.effective_reference_length = eff;
    out.precisions.reserve(static_cast<std::size_t>(cfg.max_n));

    double weighted_log = 0.0;
    double retained_weight = 0.0;
    bool zero_order = false;
    for (int n = 1; n <= cfg.max_n; ++n) {
        NgramPrecision p = modified_precision(candidate, references, n);
        out.precisions.push_back(p);
        if (p.total == 0) continue; // order impossible for this candidate: dropped, weights renormalized
        double w = weights[static_cast<std::size_t>(n - 1)];
        retained_weight += w;
        if (p.clipped == 0) {
            if (cfg.smoothing == Smoothing::none) {
                zero_order = true;
                continue;
            }
            weighted_log += w * std::log(cfg.epsilon / static_cast<double>(p.total));
        } else {
            weighted_log += w * std::log(static_cast<double>(p.clipped) / static_cast<double>(p.total));
        }
    }
    if (zero_order || out.candidate_length == 0 || retained_weight <= 0.0) {
        out.score = 0.0;
        return out;
    }
    out.score = out.bp * std::exp(weighted_log / retained_weight);
    return out;
}

inline BleuScore sentence_bleu(const std::vector<std::string>& candidate,
                               const std::vector<std::vector<std::string>>& references,
                               const BleuConfig& cfg = {}) {
    return sentence_bleu(std::span<const std::string>(candidate), references, cfg);
}

inline double mean_sentence_bleu(const std::vector<BleuScore>& scores) {
    if (scores.empty()) throw std::invalid_argument("mean_sentence_bleu: empty score list");
    double sum = 0.0;
    for (const BleuScore& s : scores) sum += s.score;
    return sum / static_cast<double>(scores.size());
}

} // namespace udiverge
