// citemb command-line pipeline: extract citing sentences from JATS-like XML,
// train per-year citation embeddings, align them, and report change scores.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "citemb/align.hpp"
#include "citemb/change.hpp"
#include "citemb/config.hpp"
#include "citemb/corpus.hpp"
#include "citemb/errors.hpp"
#include "citemb/model_io.hpp"
#include "citemb/preprocess.hpp"
#include "citemb/query.hpp"
#include "citemb/sgns.hpp"
#include "citemb/vocab.hpp"

namespace fs = std::filesystem;
using namespace citemb;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path spans_dir(const PipelineConfig& cfg) { return fs::path(cfg.work_dir) / "spans"; }
fs::path sentences_dir(const PipelineConfig& cfg) { return fs::path(cfg.work_dir) / "sentences"; }
fs::path models_dir(const PipelineConfig& cfg) { return fs::path(cfg.work_dir) / "models"; }
fs::path aligned_dir(const PipelineConfig& cfg) { return fs::path(cfg.work_dir) / "aligned"; }

std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& extension) {
    std::vector<fs::path> files;
    if (!fs::exists(dir)) return files;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == extension)
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

PhraseDict load_phrase_dict(const PipelineConfig& cfg) {
    if (cfg.phrase_dict.empty()) return {};
    return PhraseDict::load_file(cfg.phrase_dict);
}

// ---- extract ----

int cmd_extract(const PipelineConfig& cfg) {
    if (cfg.corpus_dir.empty()) throw ConfigError("corpus_dir is not set");
    const fs::path corpus(cfg.corpus_dir);
    if (!fs::exists(corpus) || !fs::is_directory(corpus))
        throw Error("corpus directory unreadable: " + corpus.string());

    const auto files = sorted_files(corpus, ".xml");
    if (files.empty()) {
        std::cerr << "warning: no *.xml documents under " << corpus.string() << "\n";
        return kExitOk;
    }

    std::map<int, std::vector<CitingSpan>> spans_by_year;
    std::map<int, std::pair<std::size_t, std::size_t>> year_counts; // pubs, pubs with citations
    std::size_t skipped = 0;

    for (const auto& file : files) {
        try {
            const RawDocument doc = parse_document(read_file(file));
            auto spans = extract_citing_spans(doc);
            auto& counts = year_counts[doc.pub_year];
            ++counts.first;
            if (!spans.empty()) {
                ++counts.second;
                auto& bucket = spans_by_year[doc.pub_year];
                for (auto& s : spans) bucket.push_back(std::move(s));
            }
        } catch (const Error& e) {
            std::cerr << "skip " << file.string() << ": " << e.what() << "\n";
            ++skipped;
        }
    }

    fs::create_directories(spans_dir(cfg));
    for (const auto& [year, spans] : spans_by_year) {
        const fs::path out_path = spans_dir(cfg) / (std::to_string(year) + ".tsv");
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw Error("cannot write " + out_path.string());
        write_spans_tsv(out, spans);
    }

    std::cout << "Year\tPublications\tPublications with citations\n";
    for (const auto& [year, counts] : year_counts)
        std::cout << year << '\t' << counts.first << '\t' << counts.second << '\n';
    if (skipped) std::cout << "Skipped files: " << skipped << '\n';
    return kExitOk;
}

// ---- train ----

int train_year(const PipelineConfig& cfg, int year) {
    const fs::path span_path = spans_dir(cfg) / (std::to_string(year) + ".tsv");
    if (!fs::exists(span_path)) throw Error("no span file for year: " + span_path.string());

    std::ifstream in(span_path, std::ios::binary);
    if (!in) throw Error("cannot open " + span_path.string());
    const auto spans = read_spans_tsv(in);

    const PhraseDict dict = load_phrase_dict(cfg);
    AcronymSet acronyms;
    const AcronymSet* acronyms_ptr = nullptr;
    if (cfg.norm.preserve_acronyms) {
        acronyms = collect_acronyms(spans, cfg.norm);
        acronyms_ptr = &acronyms;
    }
    const auto sentences = run_preprocess(spans, dict, cfg.norm, acronyms_ptr);
    if (sentences.empty()) throw EmptyCorpus();

    fs::create_directories(sentences_dir(cfg));
    {
        const fs::path sent_path = sentences_dir(cfg) / (std::to_string(year) + ".txt");
        std::ofstream out(sent_path, std::ios::binary);
        if (!out) throw Error("cannot write " + sent_path.string());
        write_sentences(out, sentences);
    }

    const Vocabulary vocab =
        Vocabulary::build(sentences, cfg.min_count_word, cfg.min_count_citation);
    TrainStats stats;
    const EmbeddingModel model = train(sentences, vocab, cfg.train, year, &stats);

    fs::create_directories(models_dir(cfg));
    const fs::path model_path = models_dir(cfg) / (std::to_string(year) + ".cemb");
    write_model_file(model_path.string(), model);

    std::cout << year << ": " << sentences.size() << " sentences, |V|=" << vocab.size() << ", "
              << stats.scheduled_pairs << " pairs -> " << model_path.string() << '\n';
    return kExitOk;
}

int cmd_train_all(const PipelineConfig& cfg) {
    const auto files = sorted_files(spans_dir(cfg), ".tsv");
    if (files.empty()) throw Error("no span files under " + spans_dir(cfg).string());
    for (const auto& file : files) {
        const std::string stem = file.stem().string();
        int year = 0;
        try {
            year = std::stoi(stem);
        } catch (const std::exception&) {
            std::cerr << "skip " << file.string() << ": not a year-named span file\n";
            continue;
        }
        train_year(cfg, year);
    }
    return kExitOk;
}

// ---- align ----

std::vector<EmbeddingModel> load_models(const fs::path& dir) {
    std::vector<EmbeddingModel> models;
    for (const auto& file : sorted_files(dir, ".cemb"))
        models.push_back(read_model_file(file.string()));
    std::sort(models.begin(), models.end(),
              [](const EmbeddingModel& a, const EmbeddingModel& b) { return a.period < b.period; });
    return models;
}

int cmd_align(const PipelineConfig& cfg) {
    auto models = load_models(models_dir(cfg));
    if (models.size() < 2)
        throw Error("alignment needs at least two trained models under "
                    + models_dir(cfg).string());

    AlignOptions opts;
    opts.centering = cfg.centering;
    opts.anchor_min_count = cfg.anchor_min_count;
    const AlignedSeries series = align_series(std::move(models), opts);

    fs::create_directories(aligned_dir(cfg));
    for (std::size_t i = 0; i < series.models.size(); ++i) {
        const int year = series.periods[i];
        write_model_file((aligned_dir(cfg) / (std::to_string(year) + ".cemb")).string(),
                         series.models[i]);
        const fs::path rot_path = aligned_dir(cfg) / ("R_" + std::to_string(year) + ".txt");
        std::ofstream out(rot_path, std::ios::binary);
        if (!out) throw Error("cannot write " + rot_path.string());
        write_rotation(out, series.rotations[i]);
    }
    std::cout << "aligned " << series.models.size() << " models into frame "
              << series.periods.back() << '\n';
    return kExitOk;
}

// ---- scoring and reports ----

AlignedSeries load_aligned_series(const PipelineConfig& cfg, bool require_two = true) {
    auto models = load_models(aligned_dir(cfg));
    if (models.empty() || (require_two && models.size() < 2))
        throw Error("no aligned models under " + aligned_dir(cfg).string() + "; run align first");
    AlignedSeries series;
    for (auto& m : models) {
        series.periods.push_back(m.period);
        series.rotations.push_back(Rotation::identity(m.dim));
        series.models.push_back(std::move(m));
    }
    return series;
}

fs::path scores_path(const PipelineConfig& cfg) { return fs::path(cfg.work_dir) / "scores.csv"; }

std::vector<ChangeRecord> load_records(const PipelineConfig& cfg) {
    std::ifstream in(scores_path(cfg), std::ios::binary);
    if (!in) throw Error("cannot open " + scores_path(cfg).string() + "; run score first");
    return read_scores_csv(in);
}

template <typename WriteFn>
void write_workdir_file(const PipelineConfig& cfg, const std::string& name, WriteFn&& fn) {
    fs::create_directories(cfg.work_dir);
    const fs::path path = fs::path(cfg.work_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    fn(out);
    std::cout << path.string() << '\n';
}

int cmd_score(const PipelineConfig& cfg) {
    const AlignedSeries series = load_aligned_series(cfg);
    ScoreOptions opts;
    opts.cumulative_citations = cfg.cumulative_citations;
    const auto records = compute_change_records(series, opts);
    write_workdir_file(cfg, "scores.csv",
                       [&](std::ostream& out) { write_scores_csv(out, records); });
    return kExitOk;
}

int cmd_stats(const PipelineConfig& cfg) {
    const auto records = load_records(cfg);
    const auto stats = yearly_stats(records, cfg.thresholds, cfg.strict_threshold);
    write_workdir_file(cfg, "stats.csv", [&](std::ostream& out) { write_stats_csv(out, stats); });
    return kExitOk;
}

int cmd_rank(const PipelineConfig& cfg) {
    const auto records = load_records(cfg);
    std::int32_t from = cfg.rank_from;
    std::int32_t to = cfg.rank_to;
    if (from == 0 || to == 0) {
        if (records.empty()) throw Error("no change records to rank");
        const auto [min_it, max_it] =
            std::minmax_element(records.begin(), records.end(),
                                [](const auto& a, const auto& b) { return a.year < b.year; });
        if (from == 0) from = min_it->year;
        if (to == 0) to = max_it->year;
    }
    if (from > to) throw ConfigError("rank window start exceeds end");
    const auto entries = rank_by_avg(records, from, to, cfg.rank_min_years, cfg.rank_top);
    write_workdir_file(cfg, "rank.csv", [&](std::ostream& out) { write_rank_csv(out, entries); });
    return kExitOk;
}

int cmd_hist(const PipelineConfig& cfg) {
    const auto records = load_records(cfg);
    const auto bins = histogram(records, cfg.hist_bin);
    write_workdir_file(cfg, "hist.csv",
                       [&](std::ostream& out) { write_histogram_csv(out, bins); });
    return kExitOk;
}

int cmd_neighbors(const PipelineConfig& cfg, const std::string& token, int year, std::size_t k,
                  const std::string& kind) {
    std::optional<TokenKind> filter;
    if (kind == "word") filter = TokenKind::Word;
    else if (kind == "citation") filter = TokenKind::Citation;
    else if (!kind.empty()) throw ConfigError("--kind must be word or citation");

    fs::path model_path = aligned_dir(cfg) / (std::to_string(year) + ".cemb");
    if (!fs::exists(model_path)) model_path = models_dir(cfg) / (std::to_string(year) + ".cemb");
    if (!fs::exists(model_path)) throw Error("no model for year " + std::to_string(year));
    const EmbeddingModel model = read_model_file(model_path.string());

    // Accept a bare citation id as the token.
    std::string surface = token;
    if (!model.vocab.id_of(surface)) {
        if (const auto cid = CitationId::parse(token)) {
            const std::string alt = cid->token_surface();
            if (model.vocab.id_of(alt)) surface = alt;
        }
    }

    for (const auto& n : nearest(model, surface, k, filter))
        std::cout << n.surface << '\t' << (n.kind == TokenKind::Citation ? "citation" : "word")
                  << '\t' << format_g6(n.similarity) << '\n';
    return kExitOk;
}

int cmd_report(const PipelineConfig& cfg, const std::string& pub, int from, int to) {
    const auto cid = CitationId::parse(pub);
    if (!cid) throw ConfigError("--pub must be a pmid, pmcid:N, meta:KEY or bare PMID digits");
    if (from > to) throw ConfigError("report window start exceeds end");

    const AlignedSeries series = load_aligned_series(cfg, /*require_two=*/false);
    const auto records = load_records(cfg);

    const std::string surface = cid->token_surface();
    bool present_somewhere = false;
    for (int year = from; year <= to && !present_somewhere; ++year)
        if (const EmbeddingModel* m = series.model_for(year))
            present_somewhere = m->vocab.id_of(surface).has_value();
    if (!present_somewhere) throw UnknownToken(surface);

    const RoleReport report = role_report(series, records, *cid, from, to, cfg.n_words);

    std::string name = "report_" + cid->to_string() + ".tsv";
    std::replace(name.begin(), name.end(), ':', '_');
    write_workdir_file(cfg, name, [&](std::ostream& out) { write_report_tsv(out, report); });
    write_report_tsv(std::cout, report);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"citemb: temporal citation embeddings over citing sentences.\n"
                 "Pipeline: extract -> train/train-all -> align -> score -> "
                 "stats/rank/hist/neighbors/report."};
    app.footer("Exit codes: 0 success, 1 usage or configuration error, 2 data error\n"
               "(unreadable corpus, missing span/model/score files, empty corpus,\n"
               "no shared vocabulary between periods, unknown token).\n"
               "Every configuration key can be given as --key value; flags override\n"
               "the --config file.");

    std::string config_path;
    app.add_option("--config", config_path, "key=value configuration file");

    std::map<std::string, std::string> overrides;
    std::map<std::string, CLI::Option*> override_opts;
    for (const auto& key : config_keys())
        override_opts[key] = app.add_option("--" + key, overrides[key]);
    // spec'd global aliases
    std::string workdir_alias;
    auto* workdir_opt = app.add_option("--workdir", workdir_alias, "alias for --work_dir");

    auto* sc_extract = app.add_subcommand("extract", "parse XML corpus into per-year span files");
    auto* sc_train = app.add_subcommand("train", "train one year's embedding model");
    int train_year_arg = 0;
    sc_train->add_option("--year", train_year_arg, "year to train")->required();
    auto* sc_train_all = app.add_subcommand("train-all", "train every year with a span file");
    auto* sc_align = app.add_subcommand("align", "align trained models into one frame");
    auto* sc_score = app.add_subcommand("score", "compute per-publication change scores");
    auto* sc_stats = app.add_subcommand("stats", "yearly grouped mean/SD/N of change scores");
    auto* sc_rank = app.add_subcommand("rank", "top-k publications by average change score");
    int rank_from = 0, rank_to = 0;
    std::size_t rank_top = 0;
    sc_rank->add_option("--from", rank_from, "window start year");
    sc_rank->add_option("--to", rank_to, "window end year");
    auto* rank_top_opt = sc_rank->add_option("--top", rank_top, "number of entries");
    auto* sc_hist = app.add_subcommand("hist", "histogram of change scores");
    double hist_bin = 0.0;
    auto* hist_bin_opt = sc_hist->add_option("--bin", hist_bin, "bin width");
    auto* sc_neighbors = app.add_subcommand("neighbors", "nearest neighbors of a token");
    std::string nb_token, nb_kind;
    int nb_year = 0;
    std::size_t nb_k = 10;
    sc_neighbors->add_option("--token", nb_token, "query token or citation id")->required();
    sc_neighbors->add_option("--year", nb_year, "model year")->required();
    sc_neighbors->add_option("--k", nb_k, "neighbor count");
    sc_neighbors->add_option("--kind", nb_kind, "filter: word or citation");
    auto* sc_report = app.add_subcommand("report", "per-year role report for one publication");
    std::string report_pub;
    int report_from = 0, report_to = 0;
    sc_report->add_option("--pub", report_pub, "publication id")->required();
    sc_report->add_option("--from", report_from, "first year")->required();
    sc_report->add_option("--to", report_to, "last year")->required();

    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        PipelineConfig cfg;
        if (!config_path.empty()) cfg = load_config_file(config_path);
        if (workdir_opt->count() > 0) cfg.work_dir = workdir_alias;
        for (const auto& [key, opt] : override_opts)
            if (opt->count() > 0) apply_config_kv(cfg, key, overrides[key]);
        finalize_config(cfg);

        if (sc_rank->parsed()) {
            if (rank_from != 0) cfg.rank_from = rank_from;
            if (rank_to != 0) cfg.rank_to = rank_to;
            if (rank_top_opt->count() > 0) cfg.rank_top = rank_top;
        }
        if (sc_hist->parsed() && hist_bin_opt->count() > 0) cfg.hist_bin = hist_bin;

        if (sc_extract->parsed()) return cmd_extract(cfg);
        if (sc_train->parsed()) return train_year(cfg, train_year_arg);
        if (sc_train_all->parsed()) return cmd_train_all(cfg);
        if (sc_align->parsed()) return cmd_align(cfg);
        if (sc_score->parsed()) return cmd_score(cfg);
        if (sc_stats->parsed()) return cmd_stats(cfg);
        if (sc_rank->parsed()) return cmd_rank(cfg);
        if (sc_hist->parsed()) return cmd_hist(cfg);
        if (sc_neighbors->parsed()) return cmd_neighbors(cfg, nb_token, nb_year, nb_k, nb_kind);
        if (sc_report->parsed()) return cmd_report(cfg, report_pub, report_from, report_to);
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
}
