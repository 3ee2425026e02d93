#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "headlinecast/eval.hpp"
#include "headlinecast/eventstudy.hpp"
#include "headlinecast/forest.hpp"
#include "headlinecast/rae.hpp"

namespace hcast::pipeline {

/// Everything one end-to-end run needs. Defaults mirror the documented
/// baseline configuration; the two model seeds derive from `seed` unless
/// set explicitly.
struct PipelineConfig {
    std::filesystem::path headlines_path;
    std::filesystem::path prices_path;
    std::filesystem::path market_path;
    std::filesystem::path out_dir; // HEADLINECAST_OUT overrides at run time

    int min_df = 3;          // forest vocabulary floor
    int window = 60;         // market-model estimation days
    double tau = 0.01;       // direction threshold on abnormal returns
    double penny_floor = 5.0;
    eventstudy::ArMode ar_mode = eventstudy::ArMode::market_model;
    double train_fraction = 0.8;
    std::uint64_t seed = 42;

    std::filesystem::path stopword_path; // empty = compiled-in list
    /// The sequence model sees function words by default; enabling this
    /// trains it on the same stopword-filtered tokens the forest uses.
    bool rae_filter_stopwords = false;

    forest::ForestConfig forest;
    rae::RaeConfig rae;
    std::optional<std::uint64_t> forest_seed; // default seed + 1
    std::optional<std::uint64_t> rae_seed;    // default seed + 2
};

/// Strictly parsed JSON config: unknown keys anywhere are a ConfigError.
/// Relative paths resolve against the working directory.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Sample attrition per stage, echoed into the run manifest.
struct PipelineCounts {
    int headlines_in = 0;
    int dropped_empty_tokens = 0;   // nothing left to featurize
    int ar_failures = 0;            // no abnormal return computable
    int market_model_fallbacks = 0; // zero-variance window, market-adjusted used
    int excluded_below_floor = 0;
    int excluded_missing_price = 0;
    int labeled_kept = 0;           // after the penny filter, steady included
    int steady_dropped = 0;
    int n_train = 0;
    int n_test = 0;
};

struct PipelineResult {
    PipelineCounts counts;
    eval::MetricsReport forest_metrics;
    eval::MetricsReport rae_metrics;
    eval::ComparisonReport comparison;
    std::filesystem::path out_dir; // where the artifacts landed
};

/// Runs ingest -> tokenize -> label -> split -> train both models ->
/// predict -> evaluate -> compare, writing every intermediate artifact
/// plus manifest.json into out_dir. A .lock file guards the directory
/// against concurrent runs. Identical configs produce byte-identical
/// artifacts; no artifact embeds a timestamp.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Canonical JSON echo of a config (seeds resolved), and the FNV-1a 64-bit
/// hash of that echo used as the run fingerprint.
nlohmann::json config_to_json(const PipelineConfig& config);
std::string fnv1a64_hex(std::string_view bytes);

nlohmann::json metrics_to_json(const eval::MetricsReport& report);
nlohmann::json comparison_to_json(const eval::ComparisonReport& report,
                                  const std::string& baseline_name,
                                  const std::string& challenger_name);

} // namespace hcast::pipeline
