#pragma once

// CoNLL-U reading, writing and parallel-corpus pairing.
//
// Input is the standard 10-column tab-separated format. Multiword-token
// range lines ("1-2") and empty-node lines ("5.1") are dropped from the
// token sequence, so token indices are always the contiguous range 1..N
// and alignment indices refer to that range.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "udiverge/error.hpp"

namespace udiverge {

inline constexpr std::string_view kNoneLabel = "NONE";

// The closed UD v2 universal POS set, alphabetical.
inline const std::array<std::string_view, 17>& upos_tags() {
    static const std::array<std::string_view, 17> tags = {
        "ADJ", "ADP", "ADV",  "AUX",   "CCONJ", "DET",   "INTJ", "NOUN", "NUM",
        "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};
    return tags;
}

inline bool is_upos(std::string_view tag) {
    const auto& tags = upos_tags();
    return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

// Which token label a statistic is computed over.
enum class Dimension { upos, deprel };

inline std::string_view dimension_name(Dimension d) {
    return d == Dimension::upos ? "UPOS" : "DEPREL";
}

// Returns the relation without its ":"-separated subtype ("nmod:poss" -> "nmod").
inline std::string_view strip_subtype(std::string_view deprel) {
    auto pos = deprel.find(':');
    return pos == std::string_view::npos ? deprel : deprel.substr(0, pos);
}

struct Token {
    int index = 0; // 1-based position in the sentence
    std::string form;
    std::string lemma;
    std::string upos;
    std::map<std::string, std::string> feats;
    int head = 0; // 0 = root
    std::string deprel;
    // Columns carried through verbatim; not interpreted.
    std::string xpos = "_";
    std::string deps = "_";
    std::string misc = "_";

    bool operator==(const Token&) const = default;

    std::optional<std::string_view> feat(std::string_view key) const {
        auto it = feats.find(std::string(key));
        if (it == feats.end()) return std::nullopt;
        return std::string_view(it->second);
    }
};

struct Sentence {
    std::string id;
    std::vector<Token> tokens;
    std::string text;                   // "# text" metadata, may be empty
    std::vector<std::string> comments;  // all comment lines, verbatim

    // 1-based lookup; nullptr when out of range.
    const Token* token_at(int index) const {
        if (index < 1 || index > static_cast<int>(tokens.size())) return nullptr;
        return &tokens[static_cast<std::size_t>(index - 1)];
    }

    bool operator==(const Sentence& o) const {
        return id == o.id && tokens == o.tokens && text == o.text;
    }
};

struct Treebank {
    std::vector<Sentence> sentences;
    std::string language;
    std::vector<std::string> warnings; // non-fatal irregularities found while parsing

    bool operator==(const Treebank& o) const {
        return sentences == o.sentences && language == o.language;
    }
};

struct ParseOptions {
    // When true, a sentence whose root count differs from one is an error
    // instead of a warning. Real PUD data contains occasional irregularities,
    // so the default is lenient.
    bool strict_single_root = false;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

inline int parse_int(std::string_view s, std::string_view what, std::size_t line) {
    bool neg = false;
    std::string_view digits = s;
    if (!digits.empty() && digits.front() == '-') {
        neg = true;
        digits.remove_prefix(1);
    }
    if (!all_digits(digits) || digits.size() > 9)
        throw parse_error(std::string(what) + " is not an integer: '" + std::string(s) + "'", line);
    int v = 0;
    for (char c : digits) v = v * 10 + (c - '0');
    return neg ? -v : v;
}

inline std::map<std::string, std::string> parse_feats(std::string_view col, std::size_t line) {
    std::map<std::string, std::string> feats;
    if (col == "_" || col.empty()) return feats;
    for (auto item : split(col, '|')) {
        auto eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw parse_error("malformed feature '" + std::string(item) + "'", line);
        std::string key(item.substr(0, eq));
        std::string value(item.substr(eq + 1));
        if (!feats.emplace(std::move(key), std::move(value)).second)
            throw validation_error("duplicate feature key '" + std::string(item.substr(0, eq)) + "'", line);
    }
    return feats;
}

} // namespace detail

inline Treebank parse_conllu(std::string_view text, std::string language = "",
                             const ParseOptions& options = {}) {
    Treebank tb;
    tb.language = std::move(language);
    std::set<std::string> seen_ids;

    Sentence current;
    bool in_sentence = false;
    std::size_t line_no = 0;

    auto finalize = [&](std::size_t at_line) {
        if (!in_sentence) return;
        for (std::size_t i = 0; i < current.tokens.size(); ++i) {
            const Token& t = current.tokens[i];
            if (t.index != static_cast<int>(i) + 1)
                throw validation_error("sentence '" + current.id + "': token indices are not contiguous (expected " +
                                           std::to_string(i + 1) + ", found " + std::to_string(t.index) + ")",
                                       at_line);
            if (t.head > static_cast<int>(current.tokens.size()))
                throw validation_error("sentence '" + current.id + "': token " + std::to_string(t.index) +
                                           " has head " + std::to_string(t.head) + " beyond sentence end",
                                       at_line);
        }
        if (current.id.empty()) current.id = std::to_string(tb.sentences.size() + 1);
        if (!seen_ids.insert(current.id).second)
            throw validation_error("duplicate sent_id '" + current.id + "'", at_line);
        int roots = 0;
        for (const Token& t : current.tokens)
            if (t.head == 0) ++roots;
        if (roots != 1) {
            std::string msg = "sentence '" + current.id + "' has " + std::to_string(roots) + " root tokens";
            if (options.strict_single_root) throw validation_error(msg, at_line);
            tb.warnings.push_back(msg);
        }
        tb.sentences.push_back(std::move(current));
        current = Sentence{};
        in_sentence = false;
    };

    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        std::string_view line = text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        bool last = nl == std::string_view::npos;
        start = last ? text.size() + 1 : nl + 1;
        if (last && line.empty()) break;

        if (line.empty()) {
            finalize(line_no);
            continue;
        }
        if (line.front() == '#') {
            in_sentence = true;
            current.comments.emplace_back(line);
            std::string_view body = detail::trim(line.substr(1));
            if (body.rfind("sent_id", 0) == 0) {
                auto rest = detail::trim(body.substr(7));
                if (!rest.empty() && rest.front() == '=') current.id = std::string(detail::trim(rest.substr(1)));
            } else if (body.rfind("text", 0) == 0) {
                auto rest = detail::trim(body.substr(4));
                if (!rest.empty() && rest.front() == '=') current.text = std::string(detail::trim(rest.substr(1)));
            }
            continue;
        }

        auto cols = detail::split(line, '\t');
        if (cols.size() != 10)
            throw parse_error("expected 10 tab-separated columns, found " + std::to_string(cols.size()), line_no);
        in_sentence = true;

        std::string_view id_col = cols[0];
        if (id_col.find('-') != std::string_view::npos) {
            // Multiword-token range line: contributes no Token.
            auto dash = id_col.find('-');
            if (!detail::all_digits(id_col.substr(0, dash)) || !detail::all_digits(id_col.substr(dash + 1)))
                throw parse_error("malformed token id '" + std::string(id_col) + "'", line_no);
            continue;
        }
        if (id_col.find('.') != std::string_view::npos) {
            // Empty node line: dropped as well.
            auto dot = id_col.find('.');
            if (!detail::all_digits(id_col.substr(0, dot)) || !detail::all_digits(id_col.substr(dot + 1)))
                throw parse_error("malformed token id '" + std::string(id_col) + "'", line_no);
            continue;
        }
        if (!detail::all_digits(id_col))
            throw parse_error("malformed token id '" + std::string(id_col) + "'", line_no);

        Token t;
        t.index = detail::parse_int(id_col, "token id", line_no);
        t.form = std::string(cols[1]);
        t.lemma = std::string(cols[2]);
        t.upos = std::string(cols[3]);
        t.xpos = std::string(cols[4]);
        t.feats = detail::parse_feats(cols[5], line_no);
        t.head = detail::parse_int(cols[6], "head", line_no);
        t.deprel = std::string(cols[7]);
        t.deps = std::string(cols[8]);
        t.misc = std::string(cols[9]);

        if (t.index < 1) throw parse_error("token id must be >= 1", line_no);
        if (t.head < 0) throw parse_error("head must be >= 0", line_no);
        if (t.head == t.index)
            throw validation_error("token " + std::to_string(t.index) + " is its own head", line_no);
        if (!is_upos(t.upos))
            throw validation_error("'" + t.upos + "' is not a universal POS tag", line_no);
        current.tokens.push_back(std::move(t));
    }
    finalize(line_no);
    return tb;
}

inline std::string serialize_conllu(const Treebank& tb) {
    std::string out;
    for (const Sentence& s : tb.sentences) {
        if (!s.comments.empty()) {
            for (const std::string& c : s.comments) {
                out += c;
                out += '\n';
            }
        } else {
            out += "# sent_id = " + s.id + "\n";
            if (!s.text.empty()) out += "# text = " + s.text + "\n";
        }
        for (const Token& t : s.tokens) {
            out += std::to_string(t.index);
            out += '\t';
            out += t.form.empty() ? "_" : t.form;
            out += '\t';
            out += t.lemma.empty() ? "_" : t.lemma;
            out += '\t';
            out += t.upos;
            out += '\t';
            out += t.xpos.empty() ? "_" : t.xpos;
            out += '\t';
            if (t.feats.empty()) {
                out += '_';
            } else {
                bool first = true;
                for (const auto& [k, v] : t.feats) {
                    if (!first) out += '|';
                    first = false;
                    out += k;
                    out += '=';
                    out += v;
                }
            }
            out += '\t';
            out += std::to_string(t.head);
            out += '\t';
            out += t.deprel.empty() ? "_" : t.deprel;
            out += '\t';
            out += t.deps.empty() ? "_" : t.deps;
            out += '\t';
            out += t.misc.empty() ? "_" : t.misc;
            out += '\n';
        }
        out += '\n';
    }
    return out;
}

struct ParallelCorpus {
    std::vector<std::pair<Sentence, Sentence>> pairs;
};

enum class PairMode { by_id, by_position };

inline ParallelCorpus pair_corpora(const Treebank& src, const Treebank& tgt, PairMode mode = PairMode::by_id) {
    ParallelCorpus corpus;
    if (mode == PairMode::by_position) {
        if (src.sentences.size() != tgt.sentences.size())
            throw validation_error("pairing failed: " + std::to_string(src.sentences.size()) +
                                   " source sentences vs " + std::to_string(tgt.sentences.size()) + " target sentences");
        corpus.pairs.reserve(src.sentences.size());
        for (std::size_t i = 0; i < src.sentences.size(); ++i)
            corpus.pairs.emplace_back(src.sentences[i], tgt.sentences[i]);
        return corpus;
    }
    std::map<std::string_view, const Sentence*> by_id;
    for (const Sentence& s : tgt.sentences) by_id.emplace(s.id, &s);
    std::vector<std::string> missing_in_tgt;
    std::set<std::string_view> used;
    corpus.pairs.reserve(src.sentences.size());
    for (const Sentence& s : src.sentences) {
        auto it = by_id.find(s.id);
        if (it == by_id.end()) {
            missing_in_tgt.push_back(s.id);
            continue;
        }
        used.insert(s.id);
        corpus.pairs.emplace_back(s, *it->second);
    }
    std::vector<std::string> missing_in_src;
    for (const Sentence& s : tgt.sentences)
        if (!used.count(s.id)) missing_in_src.push_back(s.id);
    if (!missing_in_tgt.empty() || !missing_in_src.empty()) {
        std::ostringstream msg;
        msg << "pairing failed:";
        for (const auto& id : missing_in_tgt) msg << " '" << id << "' missing from target;";
        for (const auto& id : missing_in_src) msg << " '" << id << "' missing from source;";
        throw validation_error(msg.str());
    }
    return corpus;
}

inline const std::set<std::string>& default_content_upos() {
    static const std::set<std::string> s = {"NOUN", "PROPN", "VERB", "ADJ", "ADV", "NUM", "PRON"};
    return s;
}

inline std::vector<Token> content_tokens(const Sentence& s, const std::set<std::string>& content_upos) {
    if (content_upos.empty()) throw std::invalid_argument("content_tokens: empty content UPOS set");
    std::vector<Token> out;
    for (const Token& t : s.tokens)
        if (content_upos.count(t.upos)) out.push_back(t);
    return out;
}

} // namespace udiverge
