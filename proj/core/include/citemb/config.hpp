#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "citemb/align.hpp"
#include "citemb/preprocess.hpp"
#include "citemb/sgns.hpp"

namespace citemb {

// Flat key=value pipeline configuration. Every key can be overridden by a
// same-named command-line flag (the flag wins).
struct PipelineConfig {
    std::string corpus_dir;
    std::string work_dir = "work";
    std::string phrase_dict;
    std::string abbrev_list;

    NormConfig norm;

    std::uint64_t min_count_word = 5;
    std::uint64_t min_count_citation = 1;

    TrainConfig train;

    bool centering = true;
    std::uint64_t anchor_min_count = 1;

    std::vector<std::uint64_t> thresholds = {20, 50, 100};
    bool strict_threshold = true;
    bool cumulative_citations = false;

    std::int32_t rank_from = 0;
    std::int32_t rank_to = 0;
    std::size_t rank_top = 5;
    std::uint32_t rank_min_years = 1;

    std::size_t n_words = 8;
    double hist_bin = 0.01;
};

// Applies one key=value setting. Throws ConfigError on unknown keys or
// unparsable values.
void apply_config_kv(PipelineConfig& cfg, const std::string& key, const std::string& value);

// '#' comments and blank lines are ignored.
PipelineConfig load_config(std::istream& in);
PipelineConfig load_config_file(const std::string& path);

// Loads the abbreviation list named by abbrev_list (if any) into the norm
// rules. Call after all overrides are applied.
void finalize_config(PipelineConfig& cfg);

// All recognized keys, for --help and validation.
const std::vector<std::string>& config_keys();

} // namespace citemb
