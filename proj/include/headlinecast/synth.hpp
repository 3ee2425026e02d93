#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "headlinecast/corpus.hpp"
#include "headlinecast/eventstudy.hpp"

namespace hcast::synth {

/// Recipe for a synthetic benchmark corpus: headlines with planted
/// direction signals in their wording, plus price series whose event-day
/// moves realize those directions.
struct SyntheticSpec {
    int n_headlines = 2000;
    int signal_terms_per_class = 20;
    int neutral_terms = 100;
    /// Probability that a signal token is drawn from the pool of the
    /// headline's own class rather than the opposite one. 1.0 makes
    /// titles perfectly separable; values must stay above coin-flip.
    double signal_strength = 0.9;
    Date start = Date::from_ymd(2004, 1, 2);
    Date end = Date::from_ymd(2011, 6, 30);
    double volatility = 0.005; // daily return noise, market and idiosyncratic
    double jump = 0.05;        // event-day move magnitude
    double tau = 0.01;         // labeling threshold the jump must clear
    int n_isins = 50;
    int history_days = 80;     // trading days generated before `start`
    std::uint64_t seed = 7;
};

/// Generated term pools, exposed so tests can reason about separability.
struct TermPools {
    std::vector<std::string> up;
    std::vector<std::string> down;
    std::vector<std::string> neutral;
};

TermPools term_pools(const SyntheticSpec& spec);

/// Throws ConfigError on out-of-range fields, including jump <= tau (the
/// planted moves could then label opposite to the planted class).
void validate(const SyntheticSpec& spec);

struct SyntheticCorpus {
    std::vector<corpus::Headline> headlines; // chronological, ids H000001..
    eventstudy::PriceStore prices;
    eventstudy::PriceSeries market;
    /// One entry per headline; direction is the planted class and
    /// abnormal_return the nominal signed jump.
    std::vector<eventstudy::LabeledSample> planted;
};

/// Deterministic for a fixed spec: every draw comes from one seeded
/// generator in a documented order (market walk, event schedule, per-isin
/// price paths, titles).
SyntheticCorpus generate(const SyntheticSpec& spec);

/// Writes headlines.jsonl, prices.csv, market.csv, planted_labels.jsonl
/// into `dir` (created if missing). Byte-identical for the same spec.
void write_corpus(const std::filesystem::path& dir, const SyntheticCorpus& corpus);

} // namespace hcast::synth
