// headlinecast command line: synthetic corpora, preprocessing, event-study
// labeling, model training, scoring, and the end-to-end pipeline.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "headlinecast/corpus.hpp"
#include "headlinecast/errors.hpp"
#include "headlinecast/eval.hpp"
#include "headlinecast/eventstudy.hpp"
#include "headlinecast/forest.hpp"
#include "headlinecast/io.hpp"
#include "headlinecast/jsonio.hpp"
#include "headlinecast/model_io.hpp"
#include "headlinecast/pipeline.hpp"
#include "headlinecast/rae.hpp"
#include "headlinecast/synth.hpp"

namespace {

using namespace hcast;

const std::vector<std::string>& class_names() {
    static const std::vector<std::string> names = {"down", "up"};
    return names;
}

int direction_class(eventstudy::Direction d) {
    return d == eventstudy::Direction::down ? 0 : 1;
}

Date parse_date_flag(const std::string& text, const char* flag) {
    const auto date = Date::try_parse(text);
    if (!date) throw ConfigError(fmt::format("{}: \"{}\" is not a YYYY-MM-DD date", flag, text));
    return *date;
}

eventstudy::ArMode parse_ar_mode(const std::string& name) {
    if (name == "market_model") return eventstudy::ArMode::market_model;
    if (name == "market_adjusted") return eventstudy::ArMode::market_adjusted;
    throw ConfigError(fmt::format("unknown ar mode \"{}\"", name));
}

corpus::StopwordSet stopwords_for(const std::string& path, bool keep_stopwords) {
    if (keep_stopwords) return {};
    if (path.empty()) return corpus::default_stopwords();
    return io::load_stopword_file(path);
}

/// Joins tokens and labeled samples on headline id, keeping only up/down
/// samples (steady rows cannot train a direction model). Order follows
/// `ids` when given, the labeled file otherwise.
struct TrainingData {
    std::vector<corpus::TokenSequence> sequences;
    std::vector<int> labels;
    int steady_dropped = 0;
};

TrainingData join_training_data(const std::vector<corpus::TokenSequence>& tokens,
                                const std::vector<eventstudy::LabeledSample>& labeled,
                                const std::vector<std::string>* ids) {
    std::unordered_map<std::string, const std::vector<std::string>*> tokens_by_id;
    for (const corpus::TokenSequence& seq : tokens) tokens_by_id.emplace(seq.headline_id, &seq.tokens);

    std::unordered_map<std::string, const eventstudy::LabeledSample*> sample_by_id;
    for (const eventstudy::LabeledSample& s : labeled) sample_by_id.emplace(s.headline_id, &s);

    std::vector<std::string> order;
    if (ids) {
        order = *ids;
    } else {
        order.reserve(labeled.size());
        for (const eventstudy::LabeledSample& s : labeled) order.push_back(s.headline_id);
    }

    TrainingData data;
    for (const std::string& id : order) {
        auto sample = sample_by_id.find(id);
        if (sample == sample_by_id.end())
            throw DataError(fmt::format("id {} has no labeled sample", id));
        if (sample->second->direction == eventstudy::Direction::steady) {
            ++data.steady_dropped;
            continue;
        }
        auto toks = tokens_by_id.find(id);
        if (toks == tokens_by_id.end()) throw DataError(fmt::format("id {} has no tokens", id));
        data.sequences.push_back({id, *toks->second});
        data.labels.push_back(direction_class(sample->second->direction));
    }
    if (data.sequences.empty()) throw DataError("no usable training samples after joining");
    return data;
}

void note_steady(int dropped) {
    if (dropped > 0) fmt::print(stderr, "dropped {} steady samples\n", dropped);
}

/// Reads a document-term triplet file back into rows against a vocabulary.
std::vector<std::pair<std::string, corpus::SparseRow>> load_dtm_rows(
    const std::filesystem::path& path, const corpus::Vocabulary& vocab) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
    std::vector<std::pair<std::string, corpus::SparseRow>> rows;
    std::unordered_map<std::string, std::size_t> row_of;
    std::string line;
    int line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (!saw_header) {
            saw_header = true;
            if (line.rfind("doc_id,", 0) == 0) continue; // header row
        }
        const auto first = line.find(',');
        const auto second = line.find(',', first + 1);
        if (first == std::string::npos || second == std::string::npos)
            throw DataError(fmt::format("{}:{}: expected doc_id,term,weight", path.string(), line_no));
        const std::string doc_id = line.substr(0, first);
        const std::string term = line.substr(first + 1, second - first - 1);
        const std::string weight_text = line.substr(second + 1);
        const auto col = vocab.index_of(term);
        if (!col)
            throw DataError(
                fmt::format("{}:{}: term \"{}\" is not in the model vocabulary", path.string(),
                            line_no, term));
        double weight = 0.0;
        try {
            std::size_t used = 0;
            weight = std::stod(weight_text, &used);
            if (used != weight_text.size()) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw DataError(fmt::format("{}:{}: bad weight \"{}\"", path.string(), line_no, weight_text));
        }
        auto [it, inserted] = row_of.try_emplace(doc_id, rows.size());
        if (inserted) rows.push_back({doc_id, {}});
        rows[it->second].second.emplace_back(*col, weight);
    }
    if (rows.empty()) throw DataError(fmt::format("{} holds no rows", path.string()));
    for (auto& [id, row] : rows)
        std::sort(row.begin(), row.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    return rows;
}

// --- subcommand bodies ----------------------------------------------------

struct SynthArgs {
    synth::SyntheticSpec spec;
    std::string out;
    std::string start = "2004-01-02";
    std::string end = "2011-06-30";
};

void run_synth(SynthArgs& args) {
    args.spec.start = parse_date_flag(args.start, "--start");
    args.spec.end = parse_date_flag(args.end, "--end");
    const auto corpus = synth::generate(args.spec);
    synth::write_corpus(args.out, corpus);
    fmt::print("wrote {} headlines across {} securities to {}\n", corpus.headlines.size(),
               corpus.prices.size(), args.out);
}

struct PreprocessArgs {
    std::string headlines, out, stopword_path;
    bool keep_stopwords = false;
};

void run_preprocess(const PreprocessArgs& args) {
    const auto headlines = io::load_headlines(args.headlines);
    const auto stopwords = stopwords_for(args.stopword_path, args.keep_stopwords);
    std::vector<corpus::TokenSequence> sequences;
    int dropped = 0;
    for (const corpus::Headline& h : headlines) {
        auto tokens = corpus::tokenize(h.title, stopwords);
        if (tokens.empty()) {
            ++dropped;
            continue;
        }
        sequences.push_back({h.id, std::move(tokens)});
    }
    if (sequences.empty()) throw DataError("every headline tokenized to nothing");
    io::save_tokens(args.out, sequences);
    fmt::print("tokenized {} headlines ({} dropped as empty) into {}\n", sequences.size(), dropped,
               args.out);
}

struct LabelArgs {
    std::string headlines, prices, market, out;
    int window = 60;
    double tau = 0.01;
    double penny_floor = 5.0;
    std::string ar_mode = "market_model";
};

void run_label(const LabelArgs& args) {
    const auto headlines = io::load_headlines(args.headlines);
    const auto prices = io::load_prices(args.prices);
    const auto market = io::load_market(args.market);
    const auto mode = parse_ar_mode(args.ar_mode);

    std::vector<eventstudy::LabeledSample> samples;
    int ar_failures = 0;
    int fallbacks = 0;
    for (const corpus::Headline& h : headlines) {
        auto series = prices.find(h.isin);
        if (series == prices.end())
            throw DataError(fmt::format("no price series for isin {} (headline {})", h.isin, h.id));
        eventstudy::AbnormalReturn ar;
        try {
            ar = eventstudy::abnormal_return_detail(series->second, market, h.timestamp,
                                                    args.window, mode);
        } catch (const DataError&) {
            ++ar_failures;
            continue;
        }
        if (ar.fell_back) ++fallbacks;
        samples.push_back({h.id, h.timestamp, h.isin, ar.value,
                           eventstudy::label_direction(ar.value, args.tau)});
    }
    if (samples.empty()) throw DataError("no headline yielded an abnormal return");
    const auto filtered = eventstudy::filter_penny_stocks(samples, prices, args.penny_floor);
    io::save_labeled(args.out, filtered.kept);
    fmt::print(
        "labeled {} events into {} ({} without abnormal return, {} fallbacks, {} below {} floor, "
        "{} without prior close)\n",
        filtered.kept.size(), args.out, ar_failures, fallbacks, filtered.excluded_below_floor,
        args.penny_floor, filtered.excluded_missing_price);
}

struct SplitArgs {
    std::string labeled, out;
    double fraction = 0.8;
};

void run_split(const SplitArgs& args) {
    auto samples = io::load_labeled(args.labeled);
    std::erase_if(samples, [](const eventstudy::LabeledSample& s) {
        return s.direction == eventstudy::Direction::steady;
    });
    const auto split = eventstudy::chronological_split(samples, args.fraction);
    io::save_split(args.out, split);
    fmt::print("split {} samples into {} train / {} test (boundary {})\n", samples.size(),
               split.train_ids.size(), split.test_ids.size(), split.boundary_date.to_string());
}

struct TrainRfArgs {
    std::string tokens, labeled, split, out;
    int min_df = 3;
    forest::ForestConfig config;
};

void run_train_rf(const TrainRfArgs& args) {
    const auto tokens = io::load_tokens(args.tokens);
    const auto labeled = io::load_labeled(args.labeled);
    std::vector<std::string> train_ids;
    const std::vector<std::string>* ids = nullptr;
    if (!args.split.empty()) {
        train_ids = io::load_split(args.split).train_ids;
        ids = &train_ids;
    }
    const TrainingData data = join_training_data(tokens, labeled, ids);
    note_steady(data.steady_dropped);

    auto vocab = std::make_shared<const corpus::Vocabulary>(
        corpus::build_vocabulary(data.sequences, args.min_df));
    const auto dtm = corpus::tfidf_transform(corpus::count_matrix(data.sequences, vocab));

    model_io::ForestBundle bundle;
    bundle.model = forest::train_forest(dtm, data.labels, args.config);
    bundle.class_names = class_names();
    bundle.vocab = *vocab;
    bundle.weighting = corpus::Weighting::tfidf;
    model_io::save_forest(args.out, bundle);
    fmt::print("trained {} trees on {} samples x {} terms into {}\n", bundle.model.trees.size(),
               data.sequences.size(), vocab->size(), args.out);
}

struct TrainRaeArgs {
    std::string tokens, labeled, split, out, loss_csv;
    rae::RaeConfig config;
};

void run_train_rae(const TrainRaeArgs& args) {
    const auto tokens = io::load_tokens(args.tokens);
    const auto labeled = io::load_labeled(args.labeled);
    std::vector<std::string> train_ids;
    const std::vector<std::string>* ids = nullptr;
    if (!args.split.empty()) {
        train_ids = io::load_split(args.split).train_ids;
        ids = &train_ids;
    }
    const TrainingData data = join_training_data(tokens, labeled, ids);
    note_steady(data.steady_dropped);

    const auto model = rae::train_rae(data.sequences, data.labels, args.config, class_names());
    model_io::save_rae(args.out, model);
    if (!args.loss_csv.empty()) model_io::write_loss_csv(args.loss_csv, model.loss_history);
    fmt::print("trained autoencoder on {} samples ({} terms, {} iterations) into {}\n",
               data.sequences.size(), model.embeddings.terms.size(),
               model.loss_history.size(), args.out);
}

struct PredictArgs {
    std::string model, tokens, dtm, out;
};

void run_predict(const PredictArgs& args) {
    if (args.tokens.empty() == args.dtm.empty())
        throw ConfigError("pass exactly one of --tokens or --dtm");

    std::vector<io::Prediction> predictions;
    const auto kind = model_io::sniff_model(args.model);
    if (kind == model_io::ModelKind::forest) {
        const auto bundle = model_io::load_forest(args.model);
        if (!args.dtm.empty()) {
            for (const auto& [doc_id, row] : load_dtm_rows(args.dtm, bundle.vocab)) {
                const auto fp = forest::predict_forest(bundle.model, row);
                predictions.push_back({doc_id, bundle.class_names[fp.predicted], fp.vote_fractions});
            }
        } else {
            for (const corpus::TokenSequence& seq : io::load_tokens(args.tokens)) {
                auto row = corpus::count_row(seq.tokens, bundle.vocab);
                if (bundle.weighting == corpus::Weighting::tfidf)
                    row = corpus::tfidf_row(row, bundle.vocab);
                const auto fp = forest::predict_forest(bundle.model, row);
                predictions.push_back(
                    {seq.headline_id, bundle.class_names[fp.predicted], fp.vote_fractions});
            }
        }
    } else {
        if (!args.dtm.empty())
            throw ConfigError("--dtm rows cannot drive a sequence model; pass --tokens");
        const auto model = model_io::load_rae(args.model);
        for (const corpus::TokenSequence& seq : io::load_tokens(args.tokens)) {
            const auto rp = rae::predict_rae(model, seq.tokens);
            predictions.push_back({seq.headline_id, model.class_names[rp.predicted], rp.probabilities});
        }
    }
    if (predictions.empty()) throw DataError("nothing to predict");
    io::save_predictions(args.out, predictions);
    fmt::print("scored {} samples into {}\n", predictions.size(), args.out);
}

struct EvaluateArgs {
    std::string preds, labeled, out;
};

void run_evaluate(const EvaluateArgs& args) {
    const auto predictions = io::load_predictions(args.preds);
    const auto labeled = io::load_labeled(args.labeled);
    std::unordered_map<std::string, const eventstudy::LabeledSample*> sample_by_id;
    for (const eventstudy::LabeledSample& s : labeled) sample_by_id.emplace(s.headline_id, &s);

    std::vector<int> truth;
    std::vector<int> predicted;
    for (const io::Prediction& p : predictions) {
        auto sample = sample_by_id.find(p.id);
        if (sample == sample_by_id.end())
            throw DataError(fmt::format("prediction id {} has no labeled sample", p.id));
        if (sample->second->direction == eventstudy::Direction::steady)
            throw DataError(fmt::format("id {} is labeled steady; score only up/down samples", p.id));
        truth.push_back(direction_class(sample->second->direction));
        if (p.predicted != "down" && p.predicted != "up")
            throw DataError(fmt::format("id {} has unknown predicted class \"{}\"", p.id, p.predicted));
        predicted.push_back(p.predicted == "up" ? 1 : 0);
    }
    const auto report = eval::metrics_from_confusion(
        eval::confusion_matrix(truth, predicted, 2, class_names()));
    jsonio::write_file(args.out, pipeline::metrics_to_json(report));
    fmt::print("{}", eval::format_metrics_table(report));
}

struct CompareArgs {
    std::string baseline, challenger, out, table;
    std::string baseline_name = "forest";
    std::string challenger_name = "autoencoder";
};

eval::MetricsReport metrics_from_file(const std::filesystem::path& path) {
    const auto j = jsonio::load_file(path);
    eval::MetricsReport report;
    try {
        report.accuracy = j.at("accuracy").get<double>();
        report.precision = j.at("precision").get<double>();
        report.recall = j.at("recall").get<double>();
        report.f1 = j.at("f1").get<double>();
        report.n = j.at("n").get<std::int64_t>();
        report.class_names = j.at("class_names").get<std::vector<std::string>>();
        for (const auto& pc : j.at("per_class"))
            report.per_class.push_back(
                {pc.at("precision").get<double>(), pc.at("recall").get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("{}: {}", path.string(), e.what()));
    }
    return report;
}

void run_compare(const CompareArgs& args) {
    const auto baseline = metrics_from_file(args.baseline);
    const auto challenger = metrics_from_file(args.challenger);
    const auto report = eval::comparison_report(baseline, challenger);
    const auto table = eval::format_comparison_table(report, args.baseline_name, args.challenger_name);
    if (!args.out.empty())
        jsonio::write_file(args.out,
                           pipeline::comparison_to_json(report, args.baseline_name, args.challenger_name));
    if (!args.table.empty()) {
        std::ofstream out(args.table, std::ios::binary);
        if (!out) throw DataError(fmt::format("cannot write {}", args.table));
        out << table;
    }
    fmt::print("{}", table);
}

struct RunArgs {
    std::string config_path;
    std::string headlines, prices, market, out, stopwords, ar_mode;
    double tau = -1.0, penny_floor = -1.0, train_fraction = -1.0;
    int min_df = -1, window = -1, trees = -1, rae_iterations = -1, rae_dim = -1;
    double rae_lr = -1.0, rae_alpha = -1.0;
    std::int64_t seed = -1;
    bool rae_filter_stopwords = false;
};

void run_run(const RunArgs& args) {
    pipeline::PipelineConfig config;
    if (!args.config_path.empty()) config = pipeline::load_pipeline_config(args.config_path);
    if (!args.headlines.empty()) config.headlines_path = args.headlines;
    if (!args.prices.empty()) config.prices_path = args.prices;
    if (!args.market.empty()) config.market_path = args.market;
    if (!args.out.empty()) config.out_dir = args.out;
    if (!args.stopwords.empty()) config.stopword_path = args.stopwords;
    if (!args.ar_mode.empty()) config.ar_mode = parse_ar_mode(args.ar_mode);
    if (args.tau >= 0.0) config.tau = args.tau;
    if (args.penny_floor >= 0.0) config.penny_floor = args.penny_floor;
    if (args.train_fraction >= 0.0) config.train_fraction = args.train_fraction;
    if (args.min_df >= 0) config.min_df = args.min_df;
    if (args.window >= 0) config.window = args.window;
    if (args.trees >= 0) config.forest.n_trees = args.trees;
    if (args.rae_iterations >= 0) config.rae.iterations = args.rae_iterations;
    if (args.rae_dim >= 0) config.rae.dim = args.rae_dim;
    if (args.rae_lr >= 0.0) config.rae.learning_rate = args.rae_lr;
    if (args.rae_alpha >= 0.0) config.rae.alpha = args.rae_alpha;
    if (args.seed >= 0) config.seed = static_cast<std::uint64_t>(args.seed);
    if (args.rae_filter_stopwords) config.rae_filter_stopwords = true;

    const auto result = pipeline::run_pipeline(config);
    const auto& c = result.counts;
    fmt::print("pipeline finished: {} headlines in, {} labeled, {} train / {} test\n",
               c.headlines_in, c.labeled_kept, c.n_train, c.n_test);
    fmt::print("  dropped: {} empty-token, {} no abnormal return, {} below penny floor, "
               "{} missing prior close, {} steady\n",
               c.dropped_empty_tokens, c.ar_failures, c.excluded_below_floor,
               c.excluded_missing_price, c.steady_dropped);
    if (c.market_model_fallbacks > 0)
        fmt::print("  {} events used the market-adjusted fallback\n", c.market_model_fallbacks);
    fmt::print("{}", eval::format_comparison_table(result.comparison, "forest", "autoencoder"));
    fmt::print("artifacts in {}\n", result.out_dir.string());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"direction-of-move text models over disclosure headlines"};
    app.require_subcommand(1);

    // synth
    auto synth_args = std::make_shared<SynthArgs>();
    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic benchmark corpus");
    synth_cmd->add_option("--out", synth_args->out, "output directory")->required();
    synth_cmd->add_option("--n-headlines", synth_args->spec.n_headlines, "events to generate");
    synth_cmd->add_option("--signal-terms", synth_args->spec.signal_terms_per_class,
                          "signal words per class");
    synth_cmd->add_option("--neutral-terms", synth_args->spec.neutral_terms, "neutral filler words");
    synth_cmd->add_option("--signal-strength", synth_args->spec.signal_strength,
                          "own-class probability per signal token, in (0.5, 1]");
    synth_cmd->add_option("--start", synth_args->start, "first event day (YYYY-MM-DD)");
    synth_cmd->add_option("--end", synth_args->end, "last event day (YYYY-MM-DD)");
    synth_cmd->add_option("--volatility", synth_args->spec.volatility, "daily return noise");
    synth_cmd->add_option("--jump", synth_args->spec.jump, "event-day move magnitude");
    synth_cmd->add_option("--tau", synth_args->spec.tau, "labeling threshold the jump must clear");
    synth_cmd->add_option("--isins", synth_args->spec.n_isins, "number of securities");
    synth_cmd->add_option("--history-days", synth_args->spec.history_days,
                          "trading days generated before the first event day");
    synth_cmd->add_option("--seed", synth_args->spec.seed, "generator seed");
    synth_cmd->callback([synth_args] { run_synth(*synth_args); });

    // preprocess
    auto pre_args = std::make_shared<PreprocessArgs>();
    CLI::App* pre_cmd = app.add_subcommand("preprocess", "tokenize headline titles");
    pre_cmd->add_option("--headlines", pre_args->headlines, "headlines JSONL")->required();
    pre_cmd->add_option("--out", pre_args->out, "tokens JSONL to write")->required();
    pre_cmd->add_option("--stopwords", pre_args->stopword_path,
                        "stopword file (default: compiled-in list)");
    pre_cmd->add_flag("--keep-stopwords", pre_args->keep_stopwords, "skip stopword removal");
    pre_cmd->callback([pre_args] { run_preprocess(*pre_args); });

    // label
    auto label_args = std::make_shared<LabelArgs>();
    CLI::App* label_cmd = app.add_subcommand("label", "label events by abnormal return");
    label_cmd->add_option("--headlines", label_args->headlines, "headlines JSONL")->required();
    label_cmd->add_option("--prices", label_args->prices, "per-security prices CSV")->required();
    label_cmd->add_option("--market", label_args->market, "market index CSV")->required();
    label_cmd->add_option("--out", label_args->out, "labeled JSONL to write")->required();
    label_cmd->add_option("--window", label_args->window, "market-model estimation days");
    label_cmd->add_option("--tau", label_args->tau, "direction threshold");
    label_cmd->add_option("--penny-floor", label_args->penny_floor,
                          "drop events whose prior close is below this");
    label_cmd->add_option("--ar-mode", label_args->ar_mode, "market_model or market_adjusted");
    label_cmd->callback([label_args] { run_label(*label_args); });

    // split
    auto split_args = std::make_shared<SplitArgs>();
    CLI::App* split_cmd = app.add_subcommand("split", "chronological train/test partition");
    split_cmd->add_option("--labeled", split_args->labeled, "labeled JSONL")->required();
    split_cmd->add_option("--out", split_args->out, "split JSON to write")->required();
    split_cmd->add_option("--fraction", split_args->fraction, "train fraction in (0, 1)");
    split_cmd->callback([split_args] { run_split(*split_args); });

    // train-rf
    auto rf_args = std::make_shared<TrainRfArgs>();
    CLI::App* rf_cmd = app.add_subcommand("train-rf", "train the bagged-trees baseline");
    rf_cmd->add_option("--tokens", rf_args->tokens, "tokens JSONL")->required();
    rf_cmd->add_option("--labeled", rf_args->labeled, "labeled JSONL")->required();
    rf_cmd->add_option("--split", rf_args->split, "split JSON; trains on its train ids");
    rf_cmd->add_option("--out", rf_args->out, "model JSON to write")->required();
    rf_cmd->add_option("--min-df", rf_args->min_df, "vocabulary document-frequency floor");
    rf_cmd->add_option("--trees", rf_args->config.n_trees, "number of trees");
    rf_cmd->add_option("--mtry", rf_args->config.mtry, "features per node (0 = ceil(sqrt(d)))");
    rf_cmd->add_option("--max-depth", rf_args->config.max_depth, "depth cap (0 = unlimited)");
    rf_cmd->add_option("--min-leaf", rf_args->config.min_leaf, "minimum samples per leaf");
    rf_cmd->add_option("--seed", rf_args->config.seed, "training seed");
    rf_cmd->add_flag("!--no-bootstrap", rf_args->config.bootstrap,
                     "train each tree on all rows instead of a bootstrap sample");
    rf_cmd->callback([rf_args] { run_train_rf(*rf_args); });

    // train-rae
    auto rae_args = std::make_shared<TrainRaeArgs>();
    CLI::App* rae_cmd = app.add_subcommand("train-rae", "train the recursive autoencoder");
    rae_cmd->add_option("--tokens", rae_args->tokens, "tokens JSONL")->required();
    rae_cmd->add_option("--labeled", rae_args->labeled, "labeled JSONL")->required();
    rae_cmd->add_option("--split", rae_args->split, "split JSON; trains on its train ids");
    rae_cmd->add_option("--out", rae_args->out, "model JSON to write")->required();
    rae_cmd->add_option("--loss-csv", rae_args->loss_csv, "also write per-iteration loss CSV");
    rae_cmd->add_option("--dim", rae_args->config.dim, "embedding size");
    rae_cmd->add_option("--iterations", rae_args->config.iterations, "full-batch steps");
    rae_cmd->add_option("--learning-rate", rae_args->config.learning_rate, "step size");
    rae_cmd->add_option("--alpha", rae_args->config.alpha,
                        "reconstruction weight in [0, 1]; classification gets 1 - alpha");
    rae_cmd->add_option("--seed", rae_args->config.seed, "training seed");
    rae_cmd->callback([rae_args] { run_train_rae(*rae_args); });

    // predict
    auto predict_args = std::make_shared<PredictArgs>();
    CLI::App* predict_cmd = app.add_subcommand("predict", "score samples with a trained model");
    predict_cmd->add_option("--model", predict_args->model, "model JSON (kind is sniffed)")
        ->required();
    predict_cmd->add_option("--tokens", predict_args->tokens, "tokens JSONL to score");
    predict_cmd->add_option("--dtm", predict_args->dtm,
                            "pre-weighted doc_id,term,weight rows (tree model only)");
    predict_cmd->add_option("--out", predict_args->out, "predictions JSONL to write")->required();
    predict_cmd->callback([predict_args] { run_predict(*predict_args); });

    // evaluate
    auto eval_args = std::make_shared<EvaluateArgs>();
    CLI::App* eval_cmd = app.add_subcommand("evaluate", "score predictions against labels");
    eval_cmd->add_option("--preds", eval_args->preds, "predictions JSONL")->required();
    eval_cmd->add_option("--labeled", eval_args->labeled, "labeled JSONL")->required();
    eval_cmd->add_option("--out", eval_args->out, "metrics JSON to write")->required();
    eval_cmd->callback([eval_args] { run_evaluate(*eval_args); });

    // compare
    auto compare_args = std::make_shared<CompareArgs>();
    CLI::App* compare_cmd = app.add_subcommand("compare", "baseline vs challenger metrics");
    compare_cmd->add_option("--baseline", compare_args->baseline, "baseline metrics JSON")
        ->required();
    compare_cmd->add_option("--challenger", compare_args->challenger, "challenger metrics JSON")
        ->required();
    compare_cmd->add_option("--out", compare_args->out, "comparison JSON to write");
    compare_cmd->add_option("--table", compare_args->table, "also write the text table here");
    compare_cmd->add_option("--baseline-name", compare_args->baseline_name, "baseline row label");
    compare_cmd->add_option("--challenger-name", compare_args->challenger_name,
                            "challenger row label");
    compare_cmd->callback([compare_args] { run_compare(*compare_args); });

    // run
    auto run_args = std::make_shared<RunArgs>();
    CLI::App* run_cmd = app.add_subcommand("run", "end-to-end pipeline");
    run_cmd->add_option("--config", run_args->config_path, "pipeline config JSON");
    run_cmd->add_option("--headlines", run_args->headlines, "headlines JSONL");
    run_cmd->add_option("--prices", run_args->prices, "per-security prices CSV");
    run_cmd->add_option("--market", run_args->market, "market index CSV");
    run_cmd->add_option("--out", run_args->out,
                        "output directory (HEADLINECAST_OUT overrides)");
    run_cmd->add_option("--stopwords", run_args->stopwords, "stopword file");
    run_cmd->add_option("--ar-mode", run_args->ar_mode, "market_model or market_adjusted");
    run_cmd->add_option("--tau", run_args->tau, "direction threshold");
    run_cmd->add_option("--penny-floor", run_args->penny_floor, "prior-close floor");
    run_cmd->add_option("--train-fraction", run_args->train_fraction, "train share in (0, 1)");
    run_cmd->add_option("--min-df", run_args->min_df, "vocabulary document-frequency floor");
    run_cmd->add_option("--window", run_args->window, "market-model estimation days");
    run_cmd->add_option("--trees", run_args->trees, "forest size");
    run_cmd->add_option("--rae-dim", run_args->rae_dim, "autoencoder embedding size");
    run_cmd->add_option("--rae-iterations", run_args->rae_iterations, "autoencoder steps");
    run_cmd->add_option("--rae-learning-rate", run_args->rae_lr, "autoencoder step size");
    run_cmd->add_option("--rae-alpha", run_args->rae_alpha, "autoencoder loss blend");
    run_cmd->add_option("--seed", run_args->seed, "pipeline seed (models derive theirs)");
    run_cmd->add_flag("--rae-filter-stopwords", run_args->rae_filter_stopwords,
                      "train the autoencoder on stopword-filtered tokens too");
    run_cmd->callback([run_args] { run_run(*run_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return 2;
    } catch (const DataError& e) {
        fmt::print(stderr, "data error: {}\n", e.what());
        return 3;
    } catch (const TrainError& e) {
        fmt::print(stderr, "training error: {}\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
