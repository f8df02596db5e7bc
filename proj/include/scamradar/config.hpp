#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "scamradar/forest.hpp"

namespace scamradar {

// Everything the pipeline subcommands need. A config file (flat TOML subset:
// [section], key = value, # comments) fills it first; CLI flags win.
struct PipelineConfig {
    std::filesystem::path data_dir;  // expands to the standard file names below
    std::filesystem::path tokens, pools, events, transfers, official, prices;
    std::filesystem::path user_labels;  // optional
    std::filesystem::path keywords;     // optional
    std::filesystem::path truth;        // optional, generator ground truth
    std::filesystem::path out_dir = "out";

    std::vector<std::string> extra_valuable;  // addresses beyond the default set

    Hyperparams classifier;
    int folds = 10;

    double drain_fraction = 0.9;
    int min_group = 2;
    int min_occurrences = 5;
    double tracked_liquidity_usd = 1.0;

    uint64_t seed = 42;
    unsigned jobs = 1;

    // Fills any unset input path from data_dir; optional files resolve only
    // when present on disk.
    void resolve_paths();
    void validate() const;  // throws ConfigError
};

PipelineConfig load_config_file(const std::filesystem::path& path);  // throws ConfigError

}  // namespace scamradar
