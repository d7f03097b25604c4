#include "citemb/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>

#include "citemb/errors.hpp"

namespace citemb {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_bool(const std::string& key, const std::string& value) {
    std::string v = value;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + value + "'");
}

template <typename T>
T parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return static_cast<T>(x);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double x = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
}

std::vector<std::uint64_t> parse_u64_list(const std::string& key, const std::string& value) {
    std::vector<std::uint64_t> out;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_int<std::uint64_t>(key, item));
    }
    if (out.empty()) throw ConfigError(key + ": expected a comma-separated integer list");
    return out;
}

} // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "corpus_dir",     "work_dir",          "phrase_dict",       "abbrev_list",
        "url_replace",    "dash_removal",      "number_replace",    "lowercase",
        "preserve_acronyms", "phrase_merge",
        "min_count_word", "min_count_citation",
        "dim",            "window",            "negatives",         "epochs",
        "lr_start",       "lr_end",            "subsample_t",       "seed",
        "workers",
        "centering",      "anchor_min_count",
        "thresholds",     "strict_threshold",  "cumulative_citations",
        "rank_from",      "rank_to",           "rank_top",          "rank_min_years",
        "n_words",        "hist_bin",
    };
    return keys;
}

void apply_config_kv(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "corpus_dir") cfg.corpus_dir = value;
    else if (key == "work_dir") cfg.work_dir = value;
    else if (key == "phrase_dict") cfg.phrase_dict = value;
    else if (key == "abbrev_list") cfg.abbrev_list = value;
    else if (key == "url_replace") cfg.norm.url_replace = parse_bool(key, value);
    else if (key == "dash_removal") cfg.norm.dash_removal = parse_bool(key, value);
    else if (key == "number_replace") cfg.norm.number_replace = parse_bool(key, value);
    else if (key == "lowercase") cfg.norm.lowercase = parse_bool(key, value);
    else if (key == "preserve_acronyms") cfg.norm.preserve_acronyms = parse_bool(key, value);
    else if (key == "phrase_merge") cfg.norm.phrase_merge = parse_bool(key, value);
    else if (key == "min_count_word") cfg.min_count_word = parse_int<std::uint64_t>(key, value);
    else if (key == "min_count_citation")
        cfg.min_count_citation = parse_int<std::uint64_t>(key, value);
    else if (key == "dim") cfg.train.dim = parse_int<std::uint32_t>(key, value);
    else if (key == "window") cfg.train.window = parse_int<std::uint32_t>(key, value);
    else if (key == "negatives") cfg.train.negatives = parse_int<std::uint32_t>(key, value);
    else if (key == "epochs") cfg.train.epochs = parse_int<std::uint32_t>(key, value);
    else if (key == "lr_start") cfg.train.lr_start = parse_double(key, value);
    else if (key == "lr_end") cfg.train.lr_end = parse_double(key, value);
    else if (key == "subsample_t") cfg.train.subsample_t = parse_double(key, value);
    else if (key == "seed") cfg.train.seed = parse_int<std::uint64_t>(key, value);
    else if (key == "workers") cfg.train.workers = parse_int<std::uint32_t>(key, value);
    else if (key == "centering") cfg.centering = parse_bool(key, value);
    else if (key == "anchor_min_count")
        cfg.anchor_min_count = parse_int<std::uint64_t>(key, value);
    else if (key == "thresholds") cfg.thresholds = parse_u64_list(key, value);
    else if (key == "strict_threshold") cfg.strict_threshold = parse_bool(key, value);
    else if (key == "cumulative_citations") cfg.cumulative_citations = parse_bool(key, value);
    else if (key == "rank_from") cfg.rank_from = parse_int<std::int32_t>(key, value);
    else if (key == "rank_to") cfg.rank_to = parse_int<std::int32_t>(key, value);
    else if (key == "rank_top") cfg.rank_top = parse_int<std::size_t>(key, value);
    else if (key == "rank_min_years") cfg.rank_min_years = parse_int<std::uint32_t>(key, value);
    else if (key == "n_words") cfg.n_words = parse_int<std::size_t>(key, value);
    else if (key == "hist_bin") cfg.hist_bin = parse_double(key, value);
    else throw ConfigError("unknown configuration key: " + key);
}

PipelineConfig load_config(std::istream& in) {
    PipelineConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        apply_config_kv(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

PipelineConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return load_config(in);
}

void finalize_config(PipelineConfig& cfg) {
    if (!cfg.abbrev_list.empty()) cfg.norm.abbreviations = load_abbreviations(cfg.abbrev_list);
}

} // namespace citemb
