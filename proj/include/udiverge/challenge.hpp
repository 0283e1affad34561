#pragma once

// Declarative divergence rules and challenge-set extraction.
//
// A rule names a (dimension, source label, target label) pair; a sentence
// pair joins a rule's challenge set when at least one alignment link carries
// those labels on both sides.
//
// Rules file, one rule per line:
//
//     <name> <TAB> UPOS|DEPREL <TAB> <source label> <TAB> <target label>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "udiverge/alignment.hpp"
#include "udiverge/conllu.hpp"
#include "udiverge/error.hpp"

namespace udiverge {

struct DivergenceRule {
    std::string name;
    Dimension dimension = Dimension::upos;
    std::string source_label;
    std::string target_label;

    bool operator==(const DivergenceRule&) const = default;
};

struct RuleMatch {
    std::string sentence_id;
    std::vector<AlignmentLink> pairs; // the links whose labels matched

    bool operator==(const RuleMatch&) const = default;
};

struct ChallengeSet {
    DivergenceRule rule;
    std::vector<RuleMatch> matches; // corpus order, one entry per sentence
};

// The six divergences surfaced by the English-Arabic confusion matrices.
inline std::vector<DivergenceRule> preset_rules() {
    return {
        {"obl2nmod", Dimension::deprel, "obl", "nmod"},
        {"amod2nmod", Dimension::deprel, "amod", "nmod"},
        {"aux2verb", Dimension::upos, "AUX", "VERB"},
        {"obj2nmod", Dimension::deprel, "obj", "nmod"},
        {"verb2noun", Dimension::upos, "VERB", "NOUN"},
        {"xcomp2obl", Dimension::deprel, "xcomp", "obl"},
    };
}

// Labels compare exactly and case-sensitively; deprels are compared after
// subtype stripping when strip is set (UPOS rules ignore strip).
inline std::optional<RuleMatch> sentence_matches(const Sentence& src, const Sentence& tgt,
                                                 const SentenceAlignment& sa, const DivergenceRule& rule,
                                                 bool strip = true) {
    RuleMatch match;
    match.sentence_id = src.id;
    for (const AlignmentLink& l : sa.links) {
        const Token* s = src.token_at(l.src_index);
        const Token* t = tgt.token_at(l.tgt_index);
        if (!s || !t)
            throw validation_error("sentence '" + src.id + "': link " + std::to_string(l.src_index) + "-" +
                                   std::to_string(l.tgt_index) + " out of range");
        bool hit;
        if (rule.dimension == Dimension::upos) {
            hit = s->upos == rule.source_label && t->upos == rule.target_label;
        } else {
            auto sl = strip ? strip_subtype(s->deprel) : std::string_view(s->deprel);
            auto tl = strip ? strip_subtype(t->deprel) : std::string_view(t->deprel);
            hit = sl == rule.source_label && tl == rule.target_label;
        }
        if (hit) match.pairs.push_back(l);
    }
    if (match.pairs.empty()) return std::nullopt;
    return match;
}

struct ExtractOptions {
    bool strip_subtypes = true;
    bool include_partial = false;
    std::size_t min_links = 1; // links required for a sentence to qualify
};

inline std::vector<ChallengeSet> extract(const ParallelCorpus& c, const AlignmentSet& a,
                                         const std::vector<DivergenceRule>& rules,
                                         const ExtractOptions& options = {}) {
    std::vector<ChallengeSet> sets;
    sets.reserve(rules.size());
    for (const DivergenceRule& rule : rules) sets.push_back({rule, {}});
    for (const auto& [src, tgt] : c.pairs) {
        const SentenceAlignment* sa = a.find(src.id);
        if (!sa) continue;
        if (sa->coverage == Coverage::partial && !options.include_partial) continue;
        for (std::size_t r = 0; r < rules.size(); ++r) {
            auto match = sentence_matches(src, tgt, *sa, rules[r], options.strip_subtypes);
            if (match && match->pairs.size() >= options.min_links)
                sets[r].matches.push_back(std::move(*match));
        }
    }
    return sets;
}

inline std::vector<DivergenceRule> parse_rules_file(std::string_view text) {
    std::vector<DivergenceRule> rules;
    std::set<std::string> names;
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
        if (cols.size() != 4)
            throw parse_error("expected '<name><TAB><UPOS|DEPREL><TAB><source><TAB><target>'", line_no);
        DivergenceRule rule;
        rule.name = std::string(cols[0]);
        if (cols[1] == "UPOS")
            rule.dimension = Dimension::upos;
        else if (cols[1] == "DEPREL")
            rule.dimension = Dimension::deprel;
        else
            throw parse_error("unknown dimension '" + std::string(cols[1]) + "' (expected UPOS or DEPREL)", line_no);
        rule.source_label = std::string(cols[2]);
        rule.target_label = std::string(cols[3]);
        if (rule.name.empty() || rule.source_label.empty() || rule.target_label.empty())
            throw parse_error("rule fields must be nonempty", line_no);
        if (!names.insert(rule.name).second)
            throw validation_error("duplicate rule name '" + rule.name + "'", line_no);
        rules.push_back(std::move(rule));
    }
    return rules;
}

// TSV rows `rule<TAB>sent_id<TAB>i-j i-j ...`, sets in rule order, matches
// in corpus order.
inline std::string challenge_sets_tsv(const std::vector<ChallengeSet>& sets) {
    std::string out;
    for (const ChallengeSet& set : sets) {
        for (const RuleMatch& m : set.matches) {
            out += set.rule.name;
            out += '\t';
            out += m.sentence_id;
            out += '\t';
            bool first = true;
            for (const AlignmentLink& l : m.pairs) {
                if (!first) out += ' ';
                first = false;
                out += std::to_string(l.src_index);
                out += '-';
                out += std::to_string(l.tgt_index);
            }
            out += '\n';
        }
    }
    return out;
}

} // namespace udiverge
