#pragma once

// Cross-lingual confusion matrices over aligned label pairs, row-percentage
// normalization and divergence hotspot queries.
//
// Axis ordering is part of the TSV contract: UPOS axes are the closed
// 17-tag set in alphabetical order with NONE last; DEPREL axes are the
// observed labels plus NONE, ordered by marginal frequency descending,
// ties broken lexicographically.

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "udiverge/alignment.hpp"
#include "udiverge/conllu.hpp"
#include "udiverge/error.hpp"

namespace udiverge {

struct MatrixSpec {
    Dimension dimension = Dimension::upos;
    bool strip_subtypes = false; // DEPREL only; ignored for UPOS
    bool content_only = false;
    bool include_partial = false;
    std::set<std::string> content_upos = default_content_upos();
};

using CountTable = std::map<std::pair<std::string, std::string>, long long>;

struct ConfusionMatrix {
    MatrixSpec spec;
    std::vector<std::string> source_labels;
    std::vector<std::string> target_labels;
    std::vector<std::vector<long long>> counts; // [source][target]

    static ConfusionMatrix from_counts(MatrixSpec spec, const CountTable& table);

    long long total() const {
        long long sum = 0;
        for (const auto& row : counts)
            for (long long v : row) sum += v;
        return sum;
    }

    long long at(std::string_view source, std::string_view target) const {
        auto si = index_of(source_labels, source);
        auto ti = index_of(target_labels, target);
        if (si < 0 || ti < 0) return 0;
        return counts[static_cast<std::size_t>(si)][static_cast<std::size_t>(ti)];
    }

    std::vector<long long> row_totals() const {
        std::vector<long long> totals(source_labels.size(), 0);
        for (std::size_t i = 0; i < counts.size(); ++i)
            for (long long v : counts[i]) totals[i] += v;
        return totals;
    }

    CountTable to_table() const {
        CountTable table;
        for (std::size_t i = 0; i < source_labels.size(); ++i)
            for (std::size_t j = 0; j < target_labels.size(); ++j)
                if (counts[i][j] != 0) table[{source_labels[i], target_labels[j]}] = counts[i][j];
        return table;
    }

  private:
    static long index_of(const std::vector<std::string>& labels, std::string_view label) {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return static_cast<long>(i);
        return -1;
    }
};

namespace detail {

inline std::vector<std::string> upos_axis() {
    std::vector<std::string> axis;
    axis.reserve(upos_tags().size() + 1);
    for (auto tag : upos_tags()) axis.emplace_back(tag);
    axis.emplace_back(kNoneLabel);
    return axis;
}

// Observed labels ordered by marginal frequency descending, then
// lexicographically; NONE is always present.
inline std::vector<std::string> deprel_axis(const CountTable& table, bool source_side) {
    std::map<std::string, long long> freq;
    freq[std::string(kNoneLabel)] = 0;
    for (const auto& [cell, count] : table) freq[source_side ? cell.first : cell.second] += count;
    std::vector<std::pair<std::string, long long>> items(freq.begin(), freq.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> axis;
    axis.reserve(items.size());
    for (auto& [label, _] : items) axis.push_back(std::move(label));
    return axis;
}

} // namespace detail

inline ConfusionMatrix ConfusionMatrix::from_counts(MatrixSpec spec, const CountTable& table) {
    ConfusionMatrix m;
    if (spec.dimension == Dimension::upos) {
        m.source_labels = detail::upos_axis();
        m.target_labels = detail::upos_axis();
        for (const auto& [cell, _] : table) {
            if ((cell.first != kNoneLabel && !is_upos(cell.first)) ||
                (cell.second != kNoneLabel && !is_upos(cell.second)))
                throw validation_error("label '" + cell.first + "'/'" + cell.second +
                                       "' is not a universal POS tag");
        }
    } else {
        m.source_labels = detail::deprel_axis(table, true);
        m.target_labels = detail::deprel_axis(table, false);
    }
    m.spec = std::move(spec);
    m.counts.assign(m.source_labels.size(), std::vector<long long>(m.target_labels.size(), 0));
    std::map<std::string_view, std::size_t> si, ti;
    for (std::size_t i = 0; i < m.source_labels.size(); ++i) si[m.source_labels[i]] = i;
    for (std::size_t j = 0; j < m.target_labels.size(); ++j) ti[m.target_labels[j]] = j;
    for (const auto& [cell, count] : table) m.counts[si.at(cell.first)][ti.at(cell.second)] += count;
    return m;
}

// Aggregates labeled pairs over every corpus pair admitted by the spec.
// Sentences with no alignment entry contribute all-NONE mass; sentences
// flagged partial are skipped unless include_partial.
inline ConfusionMatrix build_confusion(const ParallelCorpus& c, const AlignmentSet& a, const MatrixSpec& spec) {
    ValidationReport report = validate_alignments(a, c);
    if (!report.passed())
        throw validation_error("alignment validation failed:\n" + report.to_string());

    CountTable table;
    static const SentenceAlignment empty_alignment{};
    for (const auto& [src, tgt] : c.pairs) {
        const SentenceAlignment* sa = a.find(src.id);
        if (!sa) sa = &empty_alignment;
        if (sa->coverage == Coverage::partial && !spec.include_partial) continue;
        for (auto& rec : labeled_pairs(src, tgt, *sa, spec.dimension, spec.strip_subtypes,
                                       spec.content_only, spec.content_upos))
            ++table[std::move(rec)];
    }
    return ConfusionMatrix::from_counts(spec, table);
}

// Unrounded percentages; rows with zero total stay all-zero.
inline std::vector<std::vector<double>> row_percentages(const ConfusionMatrix& m) {
    std::vector<std::vector<double>> out(m.counts.size());
    auto totals = m.row_totals();
    for (std::size_t i = 0; i < m.counts.size(); ++i) {
        out[i].assign(m.counts[i].size(), 0.0);
        if (totals[i] == 0) continue;
        for (std::size_t j = 0; j < m.counts[i].size(); ++j)
            out[i][j] = 100.0 * static_cast<double>(m.counts[i][j]) / static_cast<double>(totals[i]);
    }
    return out;
}

struct Hotspot {
    std::string source_label;
    std::string target_label;
    long long count = 0;
    double row_percent = 0.0;

    bool operator==(const Hotspot&) const = default;
};

struct HotspotThresholds {
    double min_percent = 8.0;
    long long min_count = 50;
    bool exclude_diagonal = true;
};

// Cells meeting both thresholds (percent compared unrounded), sorted by
// count descending, ties by source then target label.
inline std::vector<Hotspot> hotspots(const ConfusionMatrix& m, const HotspotThresholds& t = {}) {
    std::vector<Hotspot> out;
    auto percents = row_percentages(m);
    for (std::size_t i = 0; i < m.source_labels.size(); ++i) {
        for (std::size_t j = 0; j < m.target_labels.size(); ++j) {
            if (t.exclude_diagonal && m.source_labels[i] == m.target_labels[j]) continue;
            long long count = m.counts[i][j];
            if (count < t.min_count || percents[i][j] < t.min_percent) continue;
            out.push_back({m.source_labels[i], m.target_labels[j], count, percents[i][j]});
        }
    }
    std::sort(out.begin(), out.end(), [](const Hotspot& a, const Hotspot& b) {
        if (a.count != b.count) return a.count > b.count;
        if (a.source_label != b.source_label) return a.source_label < b.source_label;
        return a.target_label < b.target_label;
    });
    return out;
}

enum class MatrixMode { counts, percentages };

namespace detail {

inline std::string percent_1dp(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

} // namespace detail

// Header row of target labels, one row per source label. Percentages carry
// exactly one decimal digit; counts are plain integers.
inline std::string export_matrix_tsv(const ConfusionMatrix& m, MatrixMode mode) {
    std::string out;
    for (const std::string& t : m.target_labels) {
        out += '\t';
        out += t;
    }
    out += '\n';
    auto percents = mode == MatrixMode::percentages ? row_percentages(m) : std::vector<std::vector<double>>{};
    for (std::size_t i = 0; i < m.source_labels.size(); ++i) {
        out += m.source_labels[i];
        for (std::size_t j = 0; j < m.target_labels.size(); ++j) {
            out += '\t';
            out += mode == MatrixMode::counts ? std::to_string(m.counts[i][j]) : detail::percent_1dp(percents[i][j]);
        }
        out += '\n';
    }
    return out;
}

// Reads a counts TSV as written by export_matrix_tsv, keeping the file's
// axis order.
inline ConfusionMatrix parse_counts_tsv(std::string_view text, MatrixSpec spec = {}) {
    ConfusionMatrix m;
    m.spec = std::move(spec);
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        std::string_view line = text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
        start = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        auto cols = detail::split(line, '\t');
        if (m.target_labels.empty()) {
            if (cols.size() < 2 || !cols[0].empty())
                throw parse_error("expected matrix header starting with an empty cell", line_no);
            for (std::size_t j = 1; j < cols.size(); ++j) m.target_labels.emplace_back(cols[j]);
            continue;
        }
        if (cols.size() != m.target_labels.size() + 1)
            throw parse_error("row has " + std::to_string(cols.size() - 1) + " cells, expected " +
                                  std::to_string(m.target_labels.size()),
                              line_no);
        m.source_labels.emplace_back(cols[0]);
        std::vector<long long> row;
        row.reserve(m.target_labels.size());
        for (std::size_t j = 1; j < cols.size(); ++j)
            row.push_back(detail::parse_int(cols[j], "count", line_no));
        m.counts.push_back(std::move(row));
    }
    if (m.target_labels.empty()) throw parse_error("empty matrix document");
    return m;
}

inline ConfusionMatrix transpose(const ConfusionMatrix& m) {
    ConfusionMatrix out;
    out.spec = m.spec;
    out.source_labels = m.target_labels;
    out.target_labels = m.source_labels;
    out.counts.assign(out.source_labels.size(), std::vector<long long>(out.target_labels.size(), 0));
    for (std::size_t i = 0; i < m.counts.size(); ++i)
        for (std::size_t j = 0; j < m.counts[i].size(); ++j) out.counts[j][i] = m.counts[i][j];
    return out;
}

} // namespace udiverge
