#include "headlinecast/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <unordered_map>

#include <fcntl.h>
#include <unistd.h>

#include <fmt/format.h>

#include "headlinecast/corpus.hpp"
#include "headlinecast/errors.hpp"
#include "headlinecast/io.hpp"
#include "headlinecast/jsonio.hpp"
#include "headlinecast/model_io.hpp"

namespace hcast::pipeline {
namespace {

using nlohmann::json;

// Recoverable failures gain the stage name without changing their
// category, so exit codes survive the wrapping.
template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", name, e.what()));
    } catch (const TrainError& e) {
        throw TrainError(fmt::format("{}: {}", name, e.what()));
    } catch (const DataError& e) {
        throw DataError(fmt::format("{}: {}", name, e.what()));
    }
}

/// Exclusive-create lock file removed on scope exit. A leftover lock from
/// a crashed run must be deleted by hand, which is the point.
class OutDirLock {
public:
    explicit OutDirLock(const std::filesystem::path& dir) : path_(dir / ".lock") {
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw ConfigError(fmt::format(
                "output directory {} is locked by another run (delete {} if stale)",
                dir.string(), path_.string()));
    }
    OutDirLock(const OutDirLock&) = delete;
    OutDirLock& operator=(const OutDirLock&) = delete;
    ~OutDirLock() {
        if (fd_ >= 0) {
            ::close(fd_);
            std::error_code ec;
            std::filesystem::remove(path_, ec);
        }
    }

private:
    std::filesystem::path path_;
    int fd_ = -1;
};

void validate_config(const PipelineConfig& cfg) {
    if (cfg.headlines_path.empty()) throw ConfigError("headlines path is required");
    if (cfg.prices_path.empty()) throw ConfigError("prices path is required");
    if (cfg.market_path.empty()) throw ConfigError("market path is required");
    if (cfg.out_dir.empty()) throw ConfigError("out_dir is required");
    if (cfg.min_df < 1) throw ConfigError(fmt::format("min_df must be >= 1, got {}", cfg.min_df));
    if (cfg.window < 2) throw ConfigError(fmt::format("window must be >= 2, got {}", cfg.window));
    if (cfg.tau < 0.0) throw ConfigError(fmt::format("tau must be >= 0, got {}", cfg.tau));
    if (cfg.penny_floor < 0.0)
        throw ConfigError(fmt::format("penny_floor must be >= 0, got {}", cfg.penny_floor));
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
        throw ConfigError(
            fmt::format("train_fraction must lie in (0, 1), got {}", cfg.train_fraction));
}

int direction_class(eventstudy::Direction d) {
    return d == eventstudy::Direction::down ? 0 : 1;
}

const std::vector<std::string>& class_names() {
    static const std::vector<std::string> names = {"down", "up"};
    return names;
}

json per_class_json(const eval::MetricsReport& report) {
    json arr = json::array();
    for (const eval::PerClassMetrics& pc : report.per_class)
        arr.push_back(json{{"precision", pc.precision}, {"recall", pc.recall}});
    return arr;
}

std::string ar_mode_name(eventstudy::ArMode mode) {
    return mode == eventstudy::ArMode::market_model ? "market_model" : "market_adjusted";
}

eventstudy::ArMode ar_mode_from_name(const std::string& name) {
    if (name == "market_model") return eventstudy::ArMode::market_model;
    if (name == "market_adjusted") return eventstudy::ArMode::market_adjusted;
    throw ConfigError(fmt::format("unknown ar_mode \"{}\"", name));
}

rae::Activation activation_from_name(const std::string& name) {
    if (name == "sigmoid") return rae::Activation::sigmoid;
    if (name == "tanh") return rae::Activation::tanh;
    throw ConfigError(fmt::format("unknown activation \"{}\"", name));
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const char* where) {
    for (const auto& [key, value] : j.items()) {
        if (std::find_if(known.begin(), known.end(),
                         [&](const char* k) { return key == k; }) == known.end())
            throw ConfigError(fmt::format("unknown key \"{}\" in {}", key, where));
    }
}

forest::ForestConfig parse_forest_config(const json& j, std::optional<std::uint64_t>& seed_out) {
    reject_unknown_keys(j, {"n_trees", "mtry", "max_depth", "min_leaf", "seed", "bootstrap"},
                        "forest config");
    forest::ForestConfig cfg;
    if (j.contains("n_trees")) cfg.n_trees = j["n_trees"].get<int>();
    if (j.contains("mtry")) cfg.mtry = j["mtry"].get<int>();
    if (j.contains("max_depth")) cfg.max_depth = j["max_depth"].get<int>();
    if (j.contains("min_leaf")) cfg.min_leaf = j["min_leaf"].get<int>();
    if (j.contains("seed")) seed_out = j["seed"].get<std::uint64_t>();
    if (j.contains("bootstrap")) cfg.bootstrap = j["bootstrap"].get<bool>();
    return cfg;
}

rae::RaeConfig parse_rae_config(const json& j, std::optional<std::uint64_t>& seed_out) {
    reject_unknown_keys(j,
                        {"dim", "iterations", "learning_rate", "alpha", "seed", "init_stddev",
                         "activation", "train_unknown"},
                        "rae config");
    rae::RaeConfig cfg;
    if (j.contains("dim")) cfg.dim = j["dim"].get<int>();
    if (j.contains("iterations")) cfg.iterations = j["iterations"].get<int>();
    if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
    if (j.contains("seed")) seed_out = j["seed"].get<std::uint64_t>();
    if (j.contains("init_stddev")) cfg.init_stddev = j["init_stddev"].get<double>();
    if (j.contains("activation")) cfg.activation = activation_from_name(j["activation"].get<std::string>());
    if (j.contains("train_unknown")) cfg.train_unknown = j["train_unknown"].get<bool>();
    return cfg;
}

} // namespace

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    json j;
    try {
        j = jsonio::load_file(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what()); // unreadable config is a config problem
    }
    if (!j.is_object()) throw ConfigError(fmt::format("{} is not a JSON object", path.string()));
    reject_unknown_keys(j,
                        {"headlines", "prices", "market", "out_dir", "min_df", "window", "tau",
                         "penny_floor", "ar_mode", "train_fraction", "seed", "stopwords",
                         "rae_filter_stopwords", "forest", "rae"},
                        "pipeline config");
    PipelineConfig cfg;
    if (j.contains("headlines")) cfg.headlines_path = j["headlines"].get<std::string>();
    if (j.contains("prices")) cfg.prices_path = j["prices"].get<std::string>();
    if (j.contains("market")) cfg.market_path = j["market"].get<std::string>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("min_df")) cfg.min_df = j["min_df"].get<int>();
    if (j.contains("window")) cfg.window = j["window"].get<int>();
    if (j.contains("tau")) cfg.tau = j["tau"].get<double>();
    if (j.contains("penny_floor")) cfg.penny_floor = j["penny_floor"].get<double>();
    if (j.contains("ar_mode")) cfg.ar_mode = ar_mode_from_name(j["ar_mode"].get<std::string>());
    if (j.contains("train_fraction")) cfg.train_fraction = j["train_fraction"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("stopwords")) cfg.stopword_path = j["stopwords"].get<std::string>();
    if (j.contains("rae_filter_stopwords"))
        cfg.rae_filter_stopwords = j["rae_filter_stopwords"].get<bool>();
    if (j.contains("forest")) cfg.forest = parse_forest_config(j["forest"], cfg.forest_seed);
    if (j.contains("rae")) cfg.rae = parse_rae_config(j["rae"], cfg.rae_seed);
    return cfg;
}

json config_to_json(const PipelineConfig& config) {
    const std::uint64_t forest_seed = config.forest_seed.value_or(config.seed + 1);
    const std::uint64_t rae_seed = config.rae_seed.value_or(config.seed + 2);
    return json{
        {"headlines", config.headlines_path.string()},
        {"prices", config.prices_path.string()},
        {"market", config.market_path.string()},
        {"out_dir", config.out_dir.string()},
        {"min_df", config.min_df},
        {"window", config.window},
        {"tau", config.tau},
        {"penny_floor", config.penny_floor},
        {"ar_mode", ar_mode_name(config.ar_mode)},
        {"train_fraction", config.train_fraction},
        {"seed", config.seed},
        {"stopwords", config.stopword_path.string()},
        {"rae_filter_stopwords", config.rae_filter_stopwords},
        {"forest",
         {{"n_trees", config.forest.n_trees},
          {"mtry", config.forest.mtry},
          {"max_depth", config.forest.max_depth},
          {"min_leaf", config.forest.min_leaf},
          {"seed", forest_seed},
          {"bootstrap", config.forest.bootstrap}}},
        {"rae",
         {{"dim", config.rae.dim},
          {"iterations", config.rae.iterations},
          {"learning_rate", config.rae.learning_rate},
          {"alpha", config.rae.alpha},
          {"seed", rae_seed},
          {"init_stddev", config.rae.init_stddev},
          {"activation", config.rae.activation == rae::Activation::sigmoid ? "sigmoid" : "tanh"},
          {"train_unknown", config.rae.train_unknown}}}};
}

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", hash);
}

json metrics_to_json(const eval::MetricsReport& report) {
    return json{{"accuracy", report.accuracy}, {"precision", report.precision},
                {"recall", report.recall},     {"f1", report.f1},
                {"n", report.n},               {"class_names", report.class_names},
                {"per_class", per_class_json(report)}};
}

json comparison_to_json(const eval::ComparisonReport& report, const std::string& baseline_name,
                        const std::string& challenger_name) {
    return json{{"baseline_name", baseline_name},
                {"challenger_name", challenger_name},
                {"baseline", metrics_to_json(report.baseline)},
                {"challenger", metrics_to_json(report.challenger)},
                {"improvement",
                 {{"accuracy", report.accuracy_improvement},
                  {"precision", report.precision_improvement},
                  {"recall", report.recall_improvement},
                  {"f1", report.f1_improvement}}}};
}

PipelineResult run_pipeline(const PipelineConfig& config_in) {
    PipelineConfig config = config_in;
    if (const char* env_out = std::getenv("HEADLINECAST_OUT"); env_out && *env_out)
        config.out_dir = env_out;
    stage("config", [&] { validate_config(config); });
    config.forest.seed = config.forest_seed.value_or(config.seed + 1);
    config.rae.seed = config.rae_seed.value_or(config.seed + 2);

    std::filesystem::create_directories(config.out_dir);
    OutDirLock lock(config.out_dir);
    const std::filesystem::path& out = config.out_dir;

    PipelineResult result;
    result.out_dir = out;
    PipelineCounts& counts = result.counts;

    // --- ingest ---------------------------------------------------------
    std::vector<corpus::Headline> headlines;
    eventstudy::PriceStore prices;
    eventstudy::PriceSeries market;
    stage("ingest", [&] {
        headlines = io::load_headlines(config.headlines_path);
        prices = io::load_prices(config.prices_path);
        market = io::load_market(config.market_path);
    });
    counts.headlines_in = static_cast<int>(headlines.size());

    // --- tokenize -------------------------------------------------------
    // The forest always trains on stopword-filtered tokens; the sequence
    // model keeps function words unless configured otherwise. Headlines
    // with nothing left to featurize are dropped from both tracks.
    std::vector<corpus::TokenSequence> forest_tokens;
    std::vector<corpus::TokenSequence> rae_tokens;
    stage("tokenize", [&] {
        const corpus::StopwordSet stopwords = config.stopword_path.empty()
                                                  ? corpus::default_stopwords()
                                                  : io::load_stopword_file(config.stopword_path);
        static const corpus::StopwordSet no_stopwords;
        const corpus::StopwordSet& rae_stopwords =
            config.rae_filter_stopwords ? stopwords : no_stopwords;
        std::vector<corpus::Headline> kept;
        for (const corpus::Headline& h : headlines) {
            auto rf = corpus::tokenize(h.title, stopwords);
            auto ra = corpus::tokenize(h.title, rae_stopwords);
            if (rf.empty() || ra.empty()) {
                ++counts.dropped_empty_tokens;
                continue;
            }
            forest_tokens.push_back({h.id, std::move(rf)});
            rae_tokens.push_back({h.id, std::move(ra)});
            kept.push_back(h);
        }
        headlines = std::move(kept);
        if (headlines.empty()) throw DataError("every headline tokenized to nothing");
        io::save_tokens(out / "tokens_rf.jsonl", forest_tokens);
        io::save_tokens(out / "tokens_rae.jsonl", rae_tokens);
    });

    // --- label ----------------------------------------------------------
    std::vector<eventstudy::LabeledSample> samples;
    stage("label", [&] {
        for (const corpus::Headline& h : headlines) {
            auto series = prices.find(h.isin);
            if (series == prices.end())
                throw DataError(fmt::format("no price series for isin {} (headline {})", h.isin, h.id));
            eventstudy::AbnormalReturn ar;
            try {
                ar = eventstudy::abnormal_return_detail(series->second, market, h.timestamp,
                                                        config.window, config.ar_mode);
            } catch (const DataError&) {
                ++counts.ar_failures;
                continue;
            }
            if (ar.fell_back) ++counts.market_model_fallbacks;
            eventstudy::LabeledSample s;
            s.headline_id = h.id;
            s.event_date = h.timestamp;
            s.isin = h.isin;
            s.abnormal_return = ar.value;
            s.direction = eventstudy::label_direction(ar.value, config.tau);
            samples.push_back(std::move(s));
        }
        if (samples.empty()) throw DataError("no headline yielded an abnormal return");

        auto filtered = eventstudy::filter_penny_stocks(samples, prices, config.penny_floor);
        counts.excluded_below_floor = filtered.excluded_below_floor;
        counts.excluded_missing_price = filtered.excluded_missing_price;
        samples = std::move(filtered.kept);
        counts.labeled_kept = static_cast<int>(samples.size());
        io::save_labeled(out / "labeled.jsonl", samples);

        std::vector<eventstudy::LabeledSample> moved;
        for (eventstudy::LabeledSample& s : samples) {
            if (s.direction == eventstudy::Direction::steady)
                ++counts.steady_dropped;
            else
                moved.push_back(std::move(s));
        }
        samples = std::move(moved);
        if (samples.empty()) throw DataError("every labeled sample was steady");
    });

    // --- split ----------------------------------------------------------
    eventstudy::SplitIndex split;
    stage("split", [&] {
        split = eventstudy::chronological_split(samples, config.train_fraction);
        io::save_split(out / "split.json", split);
    });
    counts.n_train = static_cast<int>(split.train_ids.size());
    counts.n_test = static_cast<int>(split.test_ids.size());

    std::unordered_map<std::string, const eventstudy::LabeledSample*> by_id;
    for (const eventstudy::LabeledSample& s : samples) by_id.emplace(s.headline_id, &s);
    std::unordered_map<std::string, const std::vector<std::string>*> forest_tokens_by_id;
    for (const corpus::TokenSequence& seq : forest_tokens)
        forest_tokens_by_id.emplace(seq.headline_id, &seq.tokens);
    std::unordered_map<std::string, const std::vector<std::string>*> rae_tokens_by_id;
    for (const corpus::TokenSequence& seq : rae_tokens)
        rae_tokens_by_id.emplace(seq.headline_id, &seq.tokens);

    auto label_of = [&](const std::string& id) { return direction_class(by_id.at(id)->direction); };

    // --- train the forest ------------------------------------------------
    // Vocabulary and idf weights come from the training split alone; test
    // rows are weighted with the training idf and unseen terms drop out.
    model_io::ForestBundle bundle;
    std::shared_ptr<const corpus::Vocabulary> vocab;
    stage("train-forest", [&] {
        std::vector<corpus::TokenSequence> train_seqs;
        std::vector<int> train_labels;
        train_seqs.reserve(split.train_ids.size());
        for (const std::string& id : split.train_ids) {
            train_seqs.push_back({id, *forest_tokens_by_id.at(id)});
            train_labels.push_back(label_of(id));
        }
        vocab = std::make_shared<const corpus::Vocabulary>(
            corpus::build_vocabulary(train_seqs, config.min_df));
        const auto dtm = corpus::tfidf_transform(corpus::count_matrix(train_seqs, vocab));
        bundle.model = forest::train_forest(dtm, train_labels, config.forest);
        bundle.class_names = class_names();
        bundle.vocab = *vocab;
        bundle.weighting = corpus::Weighting::tfidf;
        model_io::save_forest(out / "model_rf.json", bundle);
    });

    // --- train the autoencoder -------------------------------------------
    rae::RaeModel rae_model;
    stage("train-rae", [&] {
        std::vector<corpus::TokenSequence> train_seqs;
        std::vector<int> train_labels;
        train_seqs.reserve(split.train_ids.size());
        for (const std::string& id : split.train_ids) {
            train_seqs.push_back({id, *rae_tokens_by_id.at(id)});
            train_labels.push_back(label_of(id));
        }
        rae_model = rae::train_rae(train_seqs, train_labels, config.rae, class_names());
        model_io::save_rae(out / "model_rae.json", rae_model);
        model_io::write_loss_csv(out / "rae_loss.csv", rae_model.loss_history);
    });

    // --- predict ----------------------------------------------------------
    std::vector<io::Prediction> forest_preds;
    std::vector<io::Prediction> rae_preds;
    stage("predict", [&] {
        for (const std::string& id : split.test_ids) {
            const auto row = corpus::tfidf_row(
                corpus::count_row(*forest_tokens_by_id.at(id), *vocab), *vocab);
            const auto fp = forest::predict_forest(bundle.model, row);
            forest_preds.push_back({id, class_names()[fp.predicted], fp.vote_fractions});

            const auto rp = rae::predict_rae(rae_model, *rae_tokens_by_id.at(id));
            rae_preds.push_back({id, class_names()[rp.predicted], rp.probabilities});
        }
        if (forest_preds.size() != rae_preds.size())
            throw TrainError("prediction sets diverged between the two models");
        io::save_predictions(out / "preds_rf.jsonl", forest_preds);
        io::save_predictions(out / "preds_rae.jsonl", rae_preds);
    });

    // --- evaluate and compare ---------------------------------------------
    stage("evaluate", [&] {
        std::vector<int> truth;
        std::vector<int> from_forest;
        std::vector<int> from_rae;
        truth.reserve(split.test_ids.size());
        for (std::size_t i = 0; i < split.test_ids.size(); ++i) {
            truth.push_back(label_of(split.test_ids[i]));
            from_forest.push_back(forest_preds[i].predicted == "up" ? 1 : 0);
            from_rae.push_back(rae_preds[i].predicted == "up" ? 1 : 0);
        }
        result.forest_metrics = eval::metrics_from_confusion(
            eval::confusion_matrix(truth, from_forest, 2, class_names()));
        result.rae_metrics = eval::metrics_from_confusion(
            eval::confusion_matrix(truth, from_rae, 2, class_names()));
        result.comparison = eval::comparison_report(result.forest_metrics, result.rae_metrics);

        jsonio::write_file(out / "metrics_rf.json", metrics_to_json(result.forest_metrics));
        jsonio::write_file(out / "metrics_rae.json", metrics_to_json(result.rae_metrics));
        jsonio::write_file(out / "comparison.json",
                           comparison_to_json(result.comparison, "forest", "autoencoder"));
        std::ofstream table(out / "comparison.txt", std::ios::binary);
        if (!table) throw DataError(fmt::format("cannot write {}", (out / "comparison.txt").string()));
        table << eval::format_comparison_table(result.comparison, "forest", "autoencoder");
    });

    // --- manifest -----------------------------------------------------------
    stage("manifest", [&] {
        const json config_echo = config_to_json(config);
        json manifest{
            {"artifacts",
             {"comparison.json", "comparison.txt", "labeled.jsonl", "manifest.json",
              "metrics_rae.json", "metrics_rf.json", "model_rae.json", "model_rf.json",
              "preds_rae.jsonl", "preds_rf.jsonl", "rae_loss.csv", "split.json",
              "tokens_rae.jsonl", "tokens_rf.jsonl"}},
            {"config", config_echo},
            {"config_hash", fnv1a64_hex(jsonio::canonical_dump(config_echo))},
            {"counts",
             {{"headlines_in", counts.headlines_in},
              {"dropped_empty_tokens", counts.dropped_empty_tokens},
              {"ar_failures", counts.ar_failures},
              {"market_model_fallbacks", counts.market_model_fallbacks},
              {"excluded_below_floor", counts.excluded_below_floor},
              {"excluded_missing_price", counts.excluded_missing_price},
              {"labeled_kept", counts.labeled_kept},
              {"steady_dropped", counts.steady_dropped},
              {"n_train", counts.n_train},
              {"n_test", counts.n_test}}},
            {"rae_stopword_filtered", config.rae_filter_stopwords},
            {"seed", config.seed}};
        jsonio::write_file(out / "manifest.json", manifest);
    });

    return result;
}

} // namespace hcast::pipeline
