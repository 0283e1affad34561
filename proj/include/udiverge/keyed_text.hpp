#pragma once

// Sentence text files for scoring: either keyed `sent_id<TAB>text` lines or
// plain line-aligned text. A document is keyed iff every nonblank line
// contains a tab; positional lines get ids "1".."N".

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "udiverge/conllu.hpp"
#include "udiverge/error.hpp"

namespace udiverge {

struct KeyedLines {
    std::vector<std::pair<std::string, std::string>> entries;
    bool keyed = false;
};

inline KeyedLines parse_keyed_lines(std::string_view text) {
    std::vector<std::string> raw;
    std::size_t start = 0;
    bool keyed = true;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        std::string_view line = text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
        start = nl == std::string_view::npos ? text.size() : nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line.find('\t') == std::string_view::npos) keyed = false;
        raw.emplace_back(line);
    }
    KeyedLines out;
    out.keyed = keyed && !raw.empty();
    out.entries.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (out.keyed) {
            auto tab = raw[i].find('\t');
            out.entries.emplace_back(raw[i].substr(0, tab), raw[i].substr(tab + 1));
        } else {
            out.entries.emplace_back(std::to_string(i + 1), raw[i]);
        }
    }
    return out;
}

inline std::map<std::string, std::string> to_map(const KeyedLines& lines) {
    std::map<std::string, std::string> out;
    for (const auto& [id, text] : lines.entries)
        if (!out.emplace(id, text).second) throw validation_error("duplicate sentence id '" + id + "'");
    return out;
}

// Positional documents are mapped onto the given ids (counts must agree);
// keyed documents are returned as-is.
inline std::map<std::string, std::string> keyed_for_ids(const KeyedLines& lines,
                                                        const std::vector<std::string>& ids) {
    if (lines.keyed) return to_map(lines);
    if (lines.entries.size() != ids.size())
        throw validation_error("positional document has " + std::to_string(lines.entries.size()) +
                               " lines but " + std::to_string(ids.size()) + " sentences are expected");
    std::map<std::string, std::string> out;
    for (std::size_t i = 0; i < ids.size(); ++i) out[ids[i]] = lines.entries[i].second;
    return out;
}

// Reference texts from a parsed treebank: `# text` when present, otherwise
// the space-joined token forms.
inline std::map<std::string, std::string> references_from_treebank(const Treebank& tb) {
    std::map<std::string, std::string> out;
    for (const Sentence& s : tb.sentences) {
        if (!s.text.empty()) {
            out[s.id] = s.text;
            continue;
        }
        std::string joined;
        for (const Token& t : s.tokens) {
            if (!joined.empty()) joined += ' ';
            joined += t.form;
        }
        out[s.id] = joined;
    }
    return out;
}

} // namespace udiverge
