#pragma once

// Challenge-set scoring against a whole-corpus baseline and the final
// per-phenomenon report. Per-sentence scores are computed once and shared
// between the baseline and every set, so a sentence always carries the
// same score wherever it appears.

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "udiverge/bleu.hpp"
#include "udiverge/challenge.hpp"
#include "udiverge/conllu.hpp"
#include "udiverge/error.hpp"

namespace udiverge {

enum class Verdict { challenging, not_challenging, undetermined };

inline std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::challenging: return "challenging";
        case Verdict::not_challenging: return "not_challenging";
        case Verdict::undetermined: return "undetermined";
    }
    return "undetermined";
}

struct PhenomenonScore {
    std::string rule_name;
    std::optional<double> mean_bleu; // absent iff the set is empty
    long long sentence_count = 0;
    Verdict verdict = Verdict::undetermined;
};

struct ScoreOptions {
    BleuConfig bleu;
    TokenizeMode tokenize = TokenizeMode::whitespace;
    int jobs = 1; // worker threads; the result does not depend on it
};

struct EvaluationReport {
    double baseline_mean = 0.0;
    long long baseline_count = 0;
    std::vector<PhenomenonScore> rows;
    ScoreOptions config_echo;
    double margin = 0.02;
};

using TextMap = std::map<std::string, std::string>;
using ScoreMap = std::map<std::string, BleuScore>;

namespace detail {

inline const std::string& lookup_text(const TextMap& texts, const std::string& id, std::string_view what,
                                      std::string_view context) {
    auto it = texts.find(id);
    if (it == texts.end())
        throw validation_error("no " + std::string(what) + " for sentence '" + id + "'" +
                               (context.empty() ? "" : " (" + std::string(context) + ")"));
    return it->second;
}

} // namespace detail

// Scores every id once. Work may fan out over threads; results are keyed
// and merged in id order, so the map is identical for any job count.
inline ScoreMap score_sentences(const std::vector<std::string>& ids, const TextMap& candidates,
                                const TextMap& references, const ScoreOptions& options,
                                std::string_view context = "") {
    std::vector<const std::string*> cand_texts(ids.size());
    std::vector<const std::string*> ref_texts(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        cand_texts[i] = &detail::lookup_text(candidates, ids[i], "candidate", context);
        ref_texts[i] = &detail::lookup_text(references, ids[i], "reference", context);
    }
    std::vector<BleuScore> scores(ids.size());
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto cand = tokenize(*cand_texts[i], options.tokenize);
            auto ref = tokenize(*ref_texts[i], options.tokenize);
            scores[i] = sentence_bleu(cand, {std::move(ref)}, options.bleu);
        }
    };
    int jobs = options.jobs;
    if (jobs < 1) jobs = 1;
    if (jobs == 1 || ids.size() < 2) {
        worker(0, ids.size());
    } else {
        std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), ids.size());
        std::vector<std::thread> threads;
        threads.reserve(n_threads);
        std::size_t chunk = (ids.size() + n_threads - 1) / n_threads;
        for (std::size_t t = 0; t < n_threads; ++t) {
            std::size_t begin = t * chunk;
            std::size_t end = std::min(begin + chunk, ids.size());
            if (begin >= end) break;
            threads.emplace_back(worker, begin, end);
        }
        for (auto& th : threads) th.join();
    }
    ScoreMap out;
    for (std::size_t i = 0; i < ids.size(); ++i) out.emplace(ids[i], scores[i]);
    return out;
}

inline std::vector<PhenomenonScore> score_challenge_sets(const std::vector<ChallengeSet>& sets,
                                                         const TextMap& candidates, const TextMap& references,
                                                         const ScoreOptions& options = {}) {
    std::vector<PhenomenonScore> rows;
    rows.reserve(sets.size());
    for (const ChallengeSet& set : sets) {
        PhenomenonScore row;
        row.rule_name = set.rule.name;
        row.sentence_count = static_cast<long long>(set.matches.size());
        if (!set.matches.empty()) {
            std::vector<std::string> ids;
            ids.reserve(set.matches.size());
            for (const RuleMatch& m : set.matches) ids.push_back(m.sentence_id);
            ScoreMap scores = score_sentences(ids, candidates, references, options, "set '" + set.rule.name + "'");
            double sum = 0.0;
            for (const std::string& id : ids) sum += scores.at(id).score;
            row.mean_bleu = sum / static_cast<double>(ids.size());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::pair<double, long long> compute_baseline(const ParallelCorpus& c, const TextMap& candidates,
                                                     const TextMap& references, const ScoreOptions& options = {}) {
    if (c.pairs.empty()) throw std::invalid_argument("compute_baseline: empty corpus");
    std::vector<std::string> ids;
    ids.reserve(c.pairs.size());
    for (const auto& pair : c.pairs) ids.push_back(pair.first.id);
    ScoreMap scores = score_sentences(ids, candidates, references, options, "baseline");
    double sum = 0.0;
    for (const std::string& id : ids) sum += scores.at(id).score;
    return {sum / static_cast<double>(ids.size()), static_cast<long long>(ids.size())};
}

// challenging iff mean <= baseline - margin; comparison on unrounded means.
inline std::vector<PhenomenonScore> apply_verdicts(std::vector<PhenomenonScore> rows, double baseline_mean,
                                                   double margin = 0.02) {
    if (margin < 0.0) throw std::invalid_argument("apply_verdicts: margin must be >= 0");
    for (PhenomenonScore& row : rows) {
        if (!row.mean_bleu) {
            row.verdict = Verdict::undetermined;
        } else if (*row.mean_bleu <= baseline_mean - margin) {
            row.verdict = Verdict::challenging;
        } else {
            row.verdict = Verdict::not_challenging;
        }
    }
    return rows;
}

enum class ReportFormat { tsv, markdown };

namespace detail {

inline std::string fixed9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

} // namespace detail

// Columns: rule, mean (9 decimals), count, verdict; baseline line last;
// rows in input order.
inline std::string render_report(const EvaluationReport& r, ReportFormat format = ReportFormat::tsv) {
    std::string out;
    auto row = [&](std::string_view rule, std::string_view mean, std::string_view count, std::string_view verdict) {
        if (format == ReportFormat::tsv) {
            out += rule;
            out += '\t';
            out += mean;
            out += '\t';
            out += count;
            out += '\t';
            out += verdict;
            out += '\n';
        } else {
            out += "| ";
            out += rule;
            out += " | ";
            out += mean;
            out += " | ";
            out += count;
            out += " | ";
            out += verdict;
            out += " |\n";
        }
    };
    row("rule", "mean_bleu", "sentences", "verdict");
    if (format == ReportFormat::markdown) out += "|---|---|---|---|\n";
    for (const PhenomenonScore& p : r.rows)
        row(p.rule_name, p.mean_bleu ? detail::fixed9(*p.mean_bleu) : "-", std::to_string(p.sentence_count),
            verdict_name(p.verdict));
    row("baseline", detail::fixed9(r.baseline_mean), std::to_string(r.baseline_count), "-");
    return out;
}

struct ReportOptions {
    ScoreOptions score;
    ExtractOptions extract;
    double margin = 0.02;
};

// The whole pipeline: extract challenge sets, score the corpus baseline,
// score each set from the same per-sentence score pool, apply verdicts.
inline EvaluationReport build_report(const ParallelCorpus& corpus, const AlignmentSet& alignments,
                                     const std::vector<DivergenceRule>& rules, const TextMap& candidates,
                                     const TextMap& references, const ReportOptions& options = {}) {
    ValidationReport validation = validate_alignments(alignments, corpus);
    if (!validation.passed())
        throw validation_error("alignment validation failed:\n" + validation.to_string());

    std::vector<ChallengeSet> sets = extract(corpus, alignments, rules, options.extract);

    std::vector<std::string> ids;
    ids.reserve(corpus.pairs.size());
    for (const auto& pair : corpus.pairs) ids.push_back(pair.first.id);
    ScoreMap scores = score_sentences(ids, candidates, references, options.score, "baseline");

    EvaluationReport report;
    report.config_echo = options.score;
    report.margin = options.margin;
    report.baseline_count = static_cast<long long>(ids.size());
    double sum = 0.0;
    for (const std::string& id : ids) sum += scores.at(id).score;
    report.baseline_mean = ids.empty() ? 0.0 : sum / static_cast<double>(ids.size());

    std::vector<PhenomenonScore> rows;
    rows.reserve(sets.size());
    for (const ChallengeSet& set : sets) {
        PhenomenonScore row;
        row.rule_name = set.rule.name;
        row.sentence_count = static_cast<long long>(set.matches.size());
        if (!set.matches.empty()) {
            double set_sum = 0.0;
            for (const RuleMatch& m : set.matches) {
                auto it = scores.find(m.sentence_id);
                if (it == scores.end())
                    throw validation_error("no score for sentence '" + m.sentence_id + "' (set '" +
                                           set.rule.name + "')");
                set_sum += it->second.score;
            }
            row.mean_bleu = set_sum / static_cast<double>(set.matches.size());
        }
        rows.push_back(std::move(row));
    }
    report.rows = apply_verdicts(std::move(rows), report.baseline_mean, options.margin);
    return report;
}

} // namespace udiverge
