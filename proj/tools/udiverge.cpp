// udiverge: extract syntactic-divergence challenge sets from parallel UD
// treebanks and evaluate MT output on them.
//
// Exit codes: 0 success, 1 usage/IO/parse error, 2 validation/data error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "udiverge/alignment.hpp"
#include "udiverge/bleu.hpp"
#include "udiverge/challenge.hpp"
#include "udiverge/confusion.hpp"
#include "udiverge/conllu.hpp"
#include "udiverge/keyed_text.hpp"
#include "udiverge/phenomena.hpp"
#include "udiverge/report.hpp"

namespace {

using namespace udiverge;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    out << content;
}

// Every data output starts with a canonical echo of the effective flags.
class ArgsEcho {
  public:
    explicit ArgsEcho(std::string subcommand) : line_("# udiverge " + std::move(subcommand)) {}

    ArgsEcho& add(std::string_view key, std::string_view value) {
        line_ += ' ';
        line_ += key;
        line_ += '=';
        line_ += value;
        return *this;
    }
    ArgsEcho& add(std::string_view key, bool value) { return add(key, value ? "true" : "false"); }
    ArgsEcho& add(std::string_view key, long long value) { return add(key, std::to_string(value)); }
    ArgsEcho& add(std::string_view key, double value) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%g", value);
        return add(key, buf);
    }

    std::string str() const { return line_ + "\n"; }

  private:
    std::string line_;
};

struct CorpusArgs {
    std::string source_path;
    std::string target_path;
    std::string alignments_path;
    std::string pair_mode = "id";
    bool strict_root = false;
};

void add_corpus_options(CLI::App* cmd, CorpusArgs& args) {
    cmd->add_option("-s,--source", args.source_path, "source treebank (CoNLL-U)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("-t,--target", args.target_path, "target treebank (CoNLL-U)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("-a,--alignments", args.alignments_path, "word alignment file (1-based i-j pairs)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--pair-mode", args.pair_mode, "sentence pairing mode (default: id)")
        ->check(CLI::IsMember({"id", "position"}));
    cmd->add_flag("--strict-root", args.strict_root, "treat a root count other than one as an error");
}

struct LoadedCorpus {
    Treebank source;
    Treebank target;
    ParallelCorpus corpus;
    AlignmentSet alignments;
};

LoadedCorpus load_corpus(const CorpusArgs& args) {
    ParseOptions popt;
    popt.strict_single_root = args.strict_root;
    LoadedCorpus out;
    out.source = parse_conllu(read_file(args.source_path), "source", popt);
    out.target = parse_conllu(read_file(args.target_path), "target", popt);
    for (const auto& tb : {&out.source, &out.target})
        for (const std::string& w : tb->warnings) std::cerr << "warning: " << w << "\n";
    out.corpus = pair_corpora(out.source, out.target,
                              args.pair_mode == "position" ? PairMode::by_position : PairMode::by_id);
    out.alignments = parse_alignments(read_file(args.alignments_path));
    return out;
}

struct BleuArgs {
    int max_n = 4;
    std::string weights_csv;
    std::string smoothing = "epsilon";
    double epsilon = 0.1;
    std::string tokenize_mode = "whitespace";
};

void add_bleu_options(CLI::App* cmd, BleuArgs& args) {
    cmd->add_option("--max-n", args.max_n, "maximum n-gram order (default: 4)")->check(CLI::PositiveNumber);
    cmd->add_option("--weights", args.weights_csv, "comma-separated n-gram weights (default: uniform)");
    cmd->add_option("--smoothing", args.smoothing, "zero-match handling (default: epsilon)")
        ->check(CLI::IsMember({"none", "epsilon"}));
    cmd->add_option("--epsilon", args.epsilon, "smoothing numerator (default: 0.1)");
    cmd->add_option("--tokenize", args.tokenize_mode, "tokenization mode (default: whitespace)")
        ->check(CLI::IsMember({"whitespace", "whitespace-punct"}));
}

BleuConfig make_bleu_config(const BleuArgs& args) {
    BleuConfig cfg;
    cfg.max_n = args.max_n;
    cfg.smoothing = args.smoothing == "none" ? Smoothing::none : Smoothing::epsilon_floor;
    cfg.epsilon = args.epsilon;
    if (!args.weights_csv.empty()) {
        for (auto part : detail::split(args.weights_csv, ',')) {
            try {
                cfg.weights.push_back(std::stod(std::string(detail::trim(part))));
            } catch (const std::exception&) {
                throw std::invalid_argument("bad weight '" + std::string(part) + "'");
            }
        }
    }
    cfg.resolved_weights(); // validate now
    return cfg;
}

TokenizeMode make_tokenize_mode(const BleuArgs& args) {
    return args.tokenize_mode == "whitespace-punct" ? TokenizeMode::whitespace_punct : TokenizeMode::whitespace;
}

void echo_bleu(ArgsEcho& echo, const BleuArgs& args) {
    echo.add("max_n", static_cast<long long>(args.max_n))
        .add("weights", args.weights_csv.empty() ? "uniform" : args.weights_csv)
        .add("smoothing", args.smoothing)
        .add("epsilon", args.epsilon)
        .add("tokenize", args.tokenize_mode);
}

std::vector<DivergenceRule> load_rules(const std::string& rules_path, bool presets) {
    if (presets) return preset_rules();
    return parse_rules_file(read_file(rules_path));
}

int cmd_validate(const CorpusArgs& args) {
    LoadedCorpus data = load_corpus(args);
    ValidationReport report = validate_alignments(data.alignments, data.corpus);
    std::cerr << report.to_string();
    if (!report.passed()) {
        std::cerr << "validation failed (" << report.error_count() << " errors)\n";
        return 2;
    }
    std::cerr << "validation passed (" << data.corpus.pairs.size() << " sentence pairs, "
              << data.alignments.by_sentence.size() << " alignment entries)\n";
    return 0;
}

int cmd_confusion(const CorpusArgs& corpus_args, const MatrixSpec& spec, const std::string& mode,
                  bool do_transpose, bool do_hotspots, const HotspotThresholds& thresholds,
                  const std::string& out_path) {
    LoadedCorpus data = load_corpus(corpus_args);
    ConfusionMatrix m = build_confusion(data.corpus, data.alignments, spec);
    if (do_transpose) m = transpose(m);

    ArgsEcho echo("confusion");
    echo.add("source", corpus_args.source_path)
        .add("target", corpus_args.target_path)
        .add("alignments", corpus_args.alignments_path)
        .add("dimension", spec.dimension == Dimension::upos ? "upos" : "deprel")
        .add("mode", mode)
        .add("strip_subtypes", spec.strip_subtypes)
        .add("content_only", spec.content_only)
        .add("include_partial", spec.include_partial)
        .add("transpose", do_transpose);

    std::string body;
    if (do_hotspots) {
        echo.add("min_percent", thresholds.min_percent)
            .add("min_count", thresholds.min_count)
            .add("exclude_diagonal", thresholds.exclude_diagonal);
        body = "source\ttarget\tcount\trow_percent\n";
        for (const Hotspot& h : hotspots(m, thresholds))
            body += h.source_label + "\t" + h.target_label + "\t" + std::to_string(h.count) + "\t" +
                    detail::percent_1dp(h.row_percent) + "\n";
    } else {
        body = export_matrix_tsv(m, mode == "counts" ? MatrixMode::counts : MatrixMode::percentages);
    }
    write_output(out_path, echo.str() + body);
    return 0;
}

int cmd_extract(const CorpusArgs& corpus_args, const std::string& rules_path, bool presets,
                const ExtractOptions& options, const std::string& out_path) {
    LoadedCorpus data = load_corpus(corpus_args);
    ValidationReport report = validate_alignments(data.alignments, data.corpus);
    if (!report.passed()) throw validation_error("alignment validation failed:\n" + report.to_string());
    std::vector<DivergenceRule> rules = load_rules(rules_path, presets);
    std::vector<ChallengeSet> sets = extract(data.corpus, data.alignments, rules, options);

    ArgsEcho echo("extract");
    echo.add("source", corpus_args.source_path)
        .add("target", corpus_args.target_path)
        .add("alignments", corpus_args.alignments_path)
        .add("rules", presets ? "presets" : rules_path)
        .add("strip_subtypes", options.strip_subtypes)
        .add("include_partial", options.include_partial)
        .add("min_links", static_cast<long long>(options.min_links));
    write_output(out_path, echo.str() + challenge_sets_tsv(sets));
    return 0;
}

int cmd_bleu(const std::string& candidates_path, const std::vector<std::string>& reference_paths,
             const BleuArgs& bleu_args, const std::string& out_path) {
    BleuConfig cfg = make_bleu_config(bleu_args);
    TokenizeMode tok = make_tokenize_mode(bleu_args);

    KeyedLines cand_lines = parse_keyed_lines(read_file(candidates_path));
    if (cand_lines.entries.empty()) throw validation_error("candidate file is empty");
    std::vector<std::string> ids;
    ids.reserve(cand_lines.entries.size());
    for (const auto& [id, _] : cand_lines.entries) ids.push_back(id);

    std::vector<TextMap> refs;
    refs.reserve(reference_paths.size());
    for (const std::string& path : reference_paths)
        refs.push_back(keyed_for_ids(parse_keyed_lines(read_file(path)), ids));

    ArgsEcho echo("bleu");
    echo.add("candidates", candidates_path);
    for (const std::string& path : reference_paths) echo.add("references", path);
    echo_bleu(echo, bleu_args);

    std::string body;
    std::vector<BleuScore> scores;
    scores.reserve(ids.size());
    for (const auto& [id, text] : cand_lines.entries) {
        std::vector<std::vector<std::string>> ref_tokens;
        ref_tokens.reserve(refs.size());
        for (const TextMap& r : refs) {
            auto it = r.find(id);
            if (it == r.end()) throw validation_error("no reference for sentence '" + id + "'");
            ref_tokens.push_back(tokenize(it->second, tok));
        }
        BleuScore s = sentence_bleu(tokenize(text, tok), ref_tokens, cfg);
        body += id + "\t" + detail::fixed9(s.score) + "\n";
        scores.push_back(std::move(s));
    }
    body += "mean\t" + detail::fixed9(mean_sentence_bleu(scores)) + "\n";
    write_output(out_path, echo.str() + body);
    return 0;
}

int cmd_detect(const std::string& treebank_path, int min_distance,
               const std::vector<std::string>& extra_features, const CognateOptions& cognate,
               const std::string& out_path) {
    Treebank tb = parse_conllu(read_file(treebank_path), "target");
    for (const std::string& w : tb.warnings) std::cerr << "warning: " << w << "\n";

    std::vector<std::pair<std::string, std::string>> features = {{"Number", "Dual"}, {"Voice", "Pass"}};
    for (const std::string& f : extra_features) {
        auto eq = f.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == f.size())
            throw std::invalid_argument("bad --feature '" + f + "' (expected KEY=VALUE)");
        features.emplace_back(f.substr(0, eq), f.substr(eq + 1));
    }

    ArgsEcho echo("detect");
    echo.add("treebank", treebank_path).add("min_distance", static_cast<long long>(min_distance));
    for (const auto& [k, v] : features) echo.add("feature", k + "=" + v);
    echo.add("cognate_min_subsequence", static_cast<long long>(cognate.min_subsequence))
        .add("cognate_min_coverage", cognate.min_coverage);

    std::string body = "phenomenon\tsent_id\tindices\tdetail\n";
    auto emit = [&](const std::vector<PhenomenonHit>& hits) {
        for (const PhenomenonHit& h : hits) {
            body += std::string(phenomenon_name(h.phenomenon));
            body += '\t';
            body += h.sentence_id;
            body += '\t';
            bool first = true;
            for (int idx : h.token_indices) {
                if (!first) body += ' ';
                first = false;
                body += std::to_string(idx);
            }
            body += '\t';
            body += h.detail;
            body += '\n';
        }
    };
    for (const Sentence& s : tb.sentences) {
        for (const auto& [key, value] : features) emit(detect_feature(s, key, value));
        emit(detect_cognate_accusative(s, cognate));
        emit(verb_adposition_distance(s, min_distance));
    }
    write_output(out_path, echo.str() + body);
    return 0;
}

int cmd_report(const CorpusArgs& corpus_args, const std::string& rules_path, bool presets,
               const std::string& candidates_path, const BleuArgs& bleu_args, const ExtractOptions& extract_options,
               double margin, int jobs, const std::string& format, const std::string& out_path) {
    LoadedCorpus data = load_corpus(corpus_args);
    std::vector<DivergenceRule> rules = load_rules(rules_path, presets);

    std::vector<std::string> ids;
    ids.reserve(data.corpus.pairs.size());
    TextMap references;
    for (const auto& [src, tgt] : data.corpus.pairs) {
        ids.push_back(src.id);
        if (!tgt.text.empty()) {
            references[src.id] = tgt.text;
        } else {
            std::string joined;
            for (const Token& t : tgt.tokens) {
                if (!joined.empty()) joined += ' ';
                joined += t.form;
            }
            references[src.id] = joined;
        }
    }
    TextMap candidates = keyed_for_ids(parse_keyed_lines(read_file(candidates_path)), ids);

    ReportOptions options;
    options.score.bleu = make_bleu_config(bleu_args);
    options.score.tokenize = make_tokenize_mode(bleu_args);
    options.score.jobs = jobs;
    options.extract = extract_options;
    options.margin = margin;
    EvaluationReport report = build_report(data.corpus, data.alignments, rules, candidates, references, options);

    ArgsEcho echo("report");
    echo.add("source", corpus_args.source_path)
        .add("target", corpus_args.target_path)
        .add("alignments", corpus_args.alignments_path)
        .add("rules", presets ? "presets" : rules_path)
        .add("candidates", candidates_path);
    echo_bleu(echo, bleu_args);
    echo.add("margin", margin)
        .add("strip_subtypes", extract_options.strip_subtypes)
        .add("include_partial", extract_options.include_partial)
        .add("min_links", static_cast<long long>(extract_options.min_links))
        .add("format", format);
    write_output(out_path, echo.str() +
                               render_report(report, format == "markdown" ? ReportFormat::markdown
                                                                          : ReportFormat::tsv));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"syntactic-divergence challenge sets from parallel UD treebanks"};
    app.require_subcommand(1);

    CorpusArgs corpus_args;
    BleuArgs bleu_args;
    std::string out_path;
    std::string rules_path;
    bool presets = false;

    auto* validate = app.add_subcommand("validate", "check treebanks, pairing and alignments");
    add_corpus_options(validate, corpus_args);

    auto* confusion = app.add_subcommand("confusion", "emit a cross-lingual confusion matrix or its hotspots");
    MatrixSpec spec;
    std::string dimension = "upos";
    std::string matrix_mode = "counts";
    bool do_transpose = false;
    bool do_hotspots = false;
    HotspotThresholds thresholds;
    bool include_diagonal = false;
    add_corpus_options(confusion, corpus_args);
    confusion->add_option("--dimension", dimension, "label dimension (default: upos)")
        ->check(CLI::IsMember({"upos", "deprel"}));
    confusion->add_option("--mode", matrix_mode, "cell rendering (default: counts)")
        ->check(CLI::IsMember({"counts", "percent"}));
    confusion->add_flag("--strip-subtypes", spec.strip_subtypes, "strip ':' subtypes from deprels");
    confusion->add_flag("--content-only", spec.content_only, "restrict unaligned records to content words");
    confusion->add_flag("--include-partial", spec.include_partial, "include partially tagged sentences");
    confusion->add_flag("--transpose", do_transpose, "swap source/target axes");
    confusion->add_flag("--hotspots", do_hotspots, "emit divergence hotspots instead of the matrix");
    confusion->add_option("--min-percent", thresholds.min_percent, "hotspot row-percent threshold (default: 8)");
    confusion->add_option("--min-count", thresholds.min_count, "hotspot count threshold (default: 50)");
    confusion->add_flag("--include-diagonal", include_diagonal, "let diagonal cells qualify as hotspots");
    confusion->add_option("-o,--out", out_path, "write output to a file instead of stdout");

    auto* extract_cmd = app.add_subcommand("extract", "materialize challenge sets for divergence rules");
    ExtractOptions extract_options;
    bool no_strip = false;
    add_corpus_options(extract_cmd, corpus_args);
    extract_cmd->add_option("--rules", rules_path, "rules file")->check(CLI::ExistingFile);
    extract_cmd->add_flag("--presets", presets, "use the six built-in divergence rules");
    extract_cmd->add_flag("--no-strip-subtypes", no_strip, "match deprels with subtypes intact");
    extract_cmd->add_flag("--include-partial", extract_options.include_partial,
                          "include partially tagged sentences");
    extract_cmd->add_option("--min-links", extract_options.min_links,
                            "matching links needed per sentence (default: 1)");
    extract_cmd->add_option("-o,--out", out_path, "write output to a file instead of stdout");

    auto* bleu_cmd = app.add_subcommand("bleu", "score candidate sentences against references");
    std::string candidates_path;
    std::vector<std::string> reference_paths;
    bleu_cmd->add_option("-c,--candidates", candidates_path, "candidate sentences (keyed or line-aligned)")
        ->required()
        ->check(CLI::ExistingFile);
    bleu_cmd->add_option("-r,--references", reference_paths, "reference sentence file(s)")
        ->required()
        ->check(CLI::ExistingFile);
    add_bleu_options(bleu_cmd, bleu_args);
    bleu_cmd->add_option("-o,--out", out_path, "write output to a file instead of stdout");

    auto* detect = app.add_subcommand("detect", "run phenomenon detectors over a single treebank");
    std::string treebank_path;
    int min_distance = 4;
    std::vector<std::string> extra_features;
    CognateOptions cognate;
    detect->add_option("-T,--treebank", treebank_path, "treebank to scan (CoNLL-U)")
        ->required()
        ->check(CLI::ExistingFile);
    detect->add_option("--min-distance", min_distance, "verb-adposition distance threshold (default: 4)")
        ->check(CLI::PositiveNumber);
    detect->add_option("--feature", extra_features, "extra KEY=VALUE feature queries");
    detect->add_option("--cognate-min-subsequence", cognate.min_subsequence,
                       "shared-skeleton length threshold (default: 3)");
    detect->add_option("--cognate-min-coverage", cognate.min_coverage,
                       "shared fraction of the shorter skeleton (default: 0.75)");
    detect->add_option("-o,--out", out_path, "write output to a file instead of stdout");

    auto* report_cmd = app.add_subcommand("report", "score challenge sets against the corpus baseline");
    double margin = 0.02;
    int jobs = 1;
    std::string format = "tsv";
    add_corpus_options(report_cmd, corpus_args);
    report_cmd->add_option("--rules", rules_path, "rules file")->check(CLI::ExistingFile);
    report_cmd->add_flag("--presets", presets, "use the six built-in divergence rules");
    report_cmd->add_option("-c,--candidates", candidates_path, "candidate translations (keyed or line-aligned)")
        ->required()
        ->check(CLI::ExistingFile);
    add_bleu_options(report_cmd, bleu_args);
    report_cmd->add_option("--margin", margin, "verdict margin below the baseline (default: 0.02)");
    report_cmd->add_flag("--no-strip-subtypes", no_strip, "match deprels with subtypes intact");
    report_cmd->add_flag("--include-partial", extract_options.include_partial,
                         "include partially tagged sentences");
    report_cmd->add_option("--min-links", extract_options.min_links,
                           "matching links needed per sentence (default: 1)");
    report_cmd->add_option("-j,--jobs", jobs, "worker threads (output is identical for any value)")
        ->check(CLI::PositiveNumber);
    report_cmd->add_option("--format", format, "output format (default: tsv)")
        ->check(CLI::IsMember({"tsv", "markdown"}));
    report_cmd->add_option("-o,--out", out_path, "write output to a file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        extract_options.strip_subtypes = !no_strip;
        thresholds.exclude_diagonal = !include_diagonal;
        if ((extract_cmd->parsed() || report_cmd->parsed()) && !presets && rules_path.empty()) {
            std::cerr << "error: provide --rules FILE or --presets\n";
            return 1;
        }
        if (validate->parsed()) return cmd_validate(corpus_args);
        if (confusion->parsed()) {
            spec.dimension = dimension == "deprel" ? Dimension::deprel : Dimension::upos;
            return cmd_confusion(corpus_args, spec, matrix_mode, do_transpose, do_hotspots, thresholds, out_path);
        }
        if (extract_cmd->parsed()) return cmd_extract(corpus_args, rules_path, presets, extract_options, out_path);
        if (bleu_cmd->parsed()) return cmd_bleu(candidates_path, reference_paths, bleu_args, out_path);
        if (detect->parsed()) return cmd_detect(treebank_path, min_distance, extra_features, cognate, out_path);
        if (report_cmd->parsed())
            return cmd_report(corpus_args, rules_path, presets, candidates_path, bleu_args, extract_options,
                              margin, jobs, format, out_path);
        return 1;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
