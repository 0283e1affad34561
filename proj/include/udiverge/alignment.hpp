#pragma once

// Token-level word alignments between paired sentences.
//
// File format, one sentence per line:
//
//     <sent_id> <TAB> i-j [i-j ...] [!partial]
//
// NOTE: indices are 1-BASED and refer to CoNLL-U token ids, unlike Pharaoh
// alignment files which count from 0. `#` starts a comment line; blank lines
// are ignored. Repeated sent_id lines merge their links. The `!partial`
// marker flags a sentence whose tagging is incomplete; such sentences are
// excluded from matrix building and extraction unless explicitly included.
// A line's sent_id names the *source* sentence of the pair.

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "udiverge/conllu.hpp"
#include "udiverge/error.hpp"

namespace udiverge {

struct AlignmentLink {
    int src_index = 0; // 1-based
    int tgt_index = 0; // 1-based
    auto operator<=>(const AlignmentLink&) const = default;
};

enum class Coverage { full, partial };

struct SentenceAlignment {
    std::string sentence_id;
    std::vector<AlignmentLink> links; // sorted by (src, tgt), unique
    Coverage coverage = Coverage::full;

    bool operator==(const SentenceAlignment&) const = default;
};

struct AlignmentSet {
    std::map<std::string, SentenceAlignment> by_sentence;

    const SentenceAlignment* find(std::string_view id) const {
        auto it = by_sentence.find(std::string(id));
        return it == by_sentence.end() ? nullptr : &it->second;
    }

    bool operator==(const AlignmentSet&) const = default;
};

inline AlignmentSet parse_alignments(std::string_view text) {
    AlignmentSet set;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        std::string_view line = text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
        start = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;

        auto tab = line.find('\t');
        if (tab == std::string_view::npos || tab == 0)
            throw parse_error("expected '<sent_id><TAB>i-j ...'", line_no);
        std::string id(line.substr(0, tab));
        std::string_view rest = line.substr(tab + 1);

        SentenceAlignment& sa = set.by_sentence[id];
        sa.sentence_id = id;

        bool saw_marker = false;
        bool saw_pair = false;
        for (auto tok : detail::split(rest, ' ')) {
            tok = detail::trim(tok);
            if (tok.empty()) continue;
            if (saw_marker) throw parse_error("'!partial' must be the last token", line_no);
            if (tok == "!partial") {
                sa.coverage = Coverage::partial;
                saw_marker = true;
                continue;
            }
            auto dash = tok.find('-');
            if (dash == std::string_view::npos || !detail::all_digits(tok.substr(0, dash)) ||
                !detail::all_digits(tok.substr(dash + 1)))
                throw parse_error("malformed link '" + std::string(tok) + "' (expected i-j)", line_no);
            AlignmentLink link{detail::parse_int(tok.substr(0, dash), "source index", line_no),
                               detail::parse_int(tok.substr(dash + 1), "target index", line_no)};
            if (link.src_index < 1 || link.tgt_index < 1)
                throw parse_error("link indices are 1-based, got '" + std::string(tok) + "'", line_no);
            auto pos = std::lower_bound(sa.links.begin(), sa.links.end(), link);
            if (pos != sa.links.end() && *pos == link)
                throw validation_error("duplicate link " + std::to_string(link.src_index) + "-" +
                                           std::to_string(link.tgt_index) + " for sentence '" + id + "'",
                                       line_no);
            sa.links.insert(pos, link);
            saw_pair = true;
        }
        if (!saw_pair && !saw_marker) throw parse_error("no links on line", line_no);
    }
    return set;
}

inline std::string serialize_alignments(const AlignmentSet& set) {
    std::string out;
    for (const auto& [id, sa] : set.by_sentence) {
        out += id;
        out += '\t';
        bool first = true;
        for (const AlignmentLink& l : sa.links) {
            if (!first) out += ' ';
            first = false;
            out += std::to_string(l.src_index);
            out += '-';
            out += std::to_string(l.tgt_index);
        }
        if (sa.coverage == Coverage::partial) {
            if (!first) out += ' ';
            out += "!partial";
        }
        out += '\n';
    }
    return out;
}

struct ValidationItem {
    enum class Severity { error, warning };
    Severity severity = Severity::error;
    std::string sentence_id;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationItem> items;

    bool passed() const {
        for (const auto& it : items)
            if (it.severity == ValidationItem::Severity::error) return false;
        return true;
    }

    std::size_t error_count() const {
        std::size_t n = 0;
        for (const auto& it : items)
            if (it.severity == ValidationItem::Severity::error) ++n;
        return n;
    }

    std::string to_string() const {
        std::string out;
        for (const auto& it : items) {
            out += it.severity == ValidationItem::Severity::error ? "error: " : "warning: ";
            out += it.message;
            out += '\n';
        }
        return out;
    }
};

// Checks links against the paired sentences: unknown sentence ids and
// out-of-range indices are errors; a corpus sentence with no alignment
// entry is only a warning.
inline ValidationReport validate_alignments(const AlignmentSet& a, const ParallelCorpus& c) {
    ValidationReport report;
    std::map<std::string_view, const std::pair<Sentence, Sentence>*> by_id;
    for (const auto& pair : c.pairs) by_id.emplace(pair.first.id, &pair);

    for (const auto& [id, sa] : a.by_sentence) {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            report.items.push_back({ValidationItem::Severity::error, id,
                                    "alignment for unknown sentence '" + id + "'"});
            continue;
        }
        const auto& [src, tgt] = *it->second;
        for (const AlignmentLink& l : sa.links) {
            if (l.src_index > static_cast<int>(src.tokens.size()) ||
                l.tgt_index > static_cast<int>(tgt.tokens.size())) {
                report.items.push_back(
                    {ValidationItem::Severity::error, id,
                     "sentence '" + id + "': link " + std::to_string(l.src_index) + "-" +
                         std::to_string(l.tgt_index) + " out of range (source has " +
                         std::to_string(src.tokens.size()) + " tokens, target has " +
                         std::to_string(tgt.tokens.size()) + ")"});
            }
        }
    }
    for (const auto& pair : c.pairs) {
        if (!a.by_sentence.count(pair.first.id))
            report.items.push_back({ValidationItem::Severity::warning, pair.first.id,
                                    "sentence '" + pair.first.id + "' has no alignment entry"});
    }
    return report;
}

// One record per link carrying the chosen dimension's labels, then one
// (label, NONE) per unaligned source token and one (NONE, label) per
// unaligned target token. The content filter applies to the unaligned
// records only; links always count.
inline std::vector<std::pair<std::string, std::string>> labeled_pairs(
    const Sentence& src, const Sentence& tgt, const SentenceAlignment& sa, Dimension dimension,
    bool strip, bool content_only, const std::set<std::string>& content_upos = default_content_upos()) {
    auto label_of = [&](const Token& t) -> std::string {
        if (dimension == Dimension::upos) return t.upos;
        return std::string(strip ? strip_subtype(t.deprel) : std::string_view(t.deprel));
    };

    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(sa.links.size() + src.tokens.size() + tgt.tokens.size());
    std::vector<bool> src_aligned(src.tokens.size(), false);
    std::vector<bool> tgt_aligned(tgt.tokens.size(), false);

    for (const AlignmentLink& l : sa.links) {
        const Token* s = src.token_at(l.src_index);
        const Token* t = tgt.token_at(l.tgt_index);
        if (!s || !t)
            throw validation_error("sentence '" + src.id + "': link " + std::to_string(l.src_index) + "-" +
                                   std::to_string(l.tgt_index) + " out of range");
        src_aligned[static_cast<std::size_t>(l.src_index - 1)] = true;
        tgt_aligned[static_cast<std::size_t>(l.tgt_index - 1)] = true;
        out.emplace_back(label_of(*s), label_of(*t));
    }
    auto passes = [&](const Token& t) { return !content_only || content_upos.count(t.upos) > 0; };
    for (const Token& t : src.tokens)
        if (!src_aligned[static_cast<std::size_t>(t.index - 1)] && passes(t))
            out.emplace_back(label_of(t), std::string(kNoneLabel));
    for (const Token& t : tgt.tokens)
        if (!tgt_aligned[static_cast<std::size_t>(t.index - 1)] && passes(t))
            out.emplace_back(std::string(kNoneLabel), label_of(t));
    return out;
}

} // namespace udiverge
