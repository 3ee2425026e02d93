// Python bindings for the headline direction models. The module exposes the
// operations the CLI is built from: tokenization, tf-idf, abnormal returns
// and direction labels, both classifiers, metrics, the synthetic-corpus
// generator, and the end-to-end pipeline.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "headlinecast/corpus.hpp"
#include "headlinecast/errors.hpp"
#include "headlinecast/eval.hpp"
#include "headlinecast/eventstudy.hpp"
#include "headlinecast/forest.hpp"
#include "headlinecast/model_io.hpp"
#include "headlinecast/pipeline.hpp"
#include "headlinecast/rae.hpp"
#include "headlinecast/synth.hpp"

namespace py = pybind11;
using namespace hcast;

namespace {

corpus::StopwordSet stopwords_from(const std::optional<std::vector<std::string>>& words) {
    if (!words) return corpus::default_stopwords();
    return corpus::StopwordSet(words->begin(), words->end());
}

std::vector<corpus::TokenSequence> sequences_from(
    const std::vector<std::vector<std::string>>& docs) {
    std::vector<corpus::TokenSequence> seqs;
    seqs.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i)
        seqs.push_back({fmt::format("D{:06d}", i), docs[i]});
    return seqs;
}

std::vector<std::string> default_class_names(const std::vector<int>& labels) {
    int n_classes = 0;
    for (const int label : labels) n_classes = std::max(n_classes, label + 1);
    std::vector<std::string> names;
    for (int k = 0; k < n_classes; ++k) names.push_back(fmt::format("class{}", k));
    return names;
}

py::dict metrics_to_dict(const eval::MetricsReport& m) {
    py::list per_class;
    for (const auto& c : m.per_class) {
        py::dict entry;
        entry["precision"] = c.precision;
        entry["recall"] = c.recall;
        per_class.append(entry);
    }
    py::dict d;
    d["accuracy"] = m.accuracy;
    d["precision"] = m.precision;
    d["recall"] = m.recall;
    d["f1"] = m.f1;
    d["n"] = m.n;
    d["class_names"] = m.class_names;
    d["per_class"] = per_class;
    return d;
}

eventstudy::PriceSeries series_from(const std::string& isin,
                                    const std::vector<std::pair<std::string, double>>& closes) {
    eventstudy::PriceSeries series;
    series.isin = isin;
    for (const auto& [day, close] : closes)
        series.observations.emplace_back(Date::parse(day), close);
    series.validate();
    return series;
}

eventstudy::ArMode ar_mode_from(const std::string& name) {
    if (name == "market_model") return eventstudy::ArMode::market_model;
    if (name == "market_adjusted") return eventstudy::ArMode::market_adjusted;
    throw ConfigError(fmt::format("unknown ar_mode \"{}\"", name));
}

rae::Activation activation_from(const std::string& name) {
    if (name == "sigmoid") return rae::Activation::sigmoid;
    if (name == "tanh") return rae::Activation::tanh;
    throw ConfigError(fmt::format("unknown activation \"{}\" (use sigmoid or tanh)", name));
}

/// Bagged trees over tf-idf rows, carrying the training vocabulary so raw
/// token lists can be scored directly.
struct PyTextForest {
    model_io::ForestBundle bundle;

    static PyTextForest train(const std::vector<std::vector<std::string>>& docs,
                              const std::vector<int>& labels, int min_df, int n_trees, int mtry,
                              int max_depth, int min_leaf, std::uint64_t seed, bool bootstrap,
                              std::vector<std::string> class_names) {
        const auto seqs = sequences_from(docs);
        auto vocab = std::make_shared<const corpus::Vocabulary>(
            corpus::build_vocabulary(seqs, min_df));
        const auto dtm = corpus::tfidf_transform(corpus::count_matrix(seqs, vocab));

        forest::ForestConfig config;
        config.n_trees = n_trees;
        config.mtry = mtry;
        config.max_depth = max_depth;
        config.min_leaf = min_leaf;
        config.seed = seed;
        config.bootstrap = bootstrap;

        PyTextForest self;
        self.bundle.model = forest::train_forest(dtm, labels, config);
        self.bundle.class_names =
            class_names.empty() ? default_class_names(labels) : std::move(class_names);
        if (self.bundle.class_names.size() !=
            static_cast<std::size_t>(self.bundle.model.n_classes))
            throw ConfigError(fmt::format("expected {} class names, got {}",
                                          self.bundle.model.n_classes,
                                          self.bundle.class_names.size()));
        self.bundle.vocab = *vocab;
        self.bundle.weighting = corpus::Weighting::tfidf;
        return self;
    }

    std::pair<std::string, std::vector<double>> predict(
        const std::vector<std::string>& tokens) const {
        auto row = corpus::count_row(tokens, bundle.vocab);
        if (bundle.weighting == corpus::Weighting::tfidf)
            row = corpus::tfidf_row(row, bundle.vocab);
        const auto p = forest::predict_forest(bundle.model, row);
        return {bundle.class_names.at(static_cast<std::size_t>(p.predicted)), p.vote_fractions};
    }

    void save(const std::filesystem::path& path) const { model_io::save_forest(path, bundle); }
    static PyTextForest load(const std::filesystem::path& path) {
        return {model_io::load_forest(path)};
    }
};

/// The chain autoencoder with per-node softmax, trained by full-batch
/// gradient descent.
struct PySequenceAutoencoder {
    rae::RaeModel model;

    static PySequenceAutoencoder train(const std::vector<std::vector<std::string>>& docs,
                                       const std::vector<int>& labels, int dim, int iterations,
                                       double learning_rate, double alpha, std::uint64_t seed,
                                       double init_stddev, const std::string& activation,
                                       bool train_unknown,
                                       std::vector<std::string> class_names) {
        rae::RaeConfig config;
        config.dim = dim;
        config.iterations = iterations;
        config.learning_rate = learning_rate;
        config.alpha = alpha;
        config.seed = seed;
        config.init_stddev = init_stddev;
        config.activation = activation_from(activation);
        config.train_unknown = train_unknown;
        return {rae::train_rae(sequences_from(docs), labels, config, std::move(class_names))};
    }

    std::pair<std::string, std::vector<double>> predict(
        const std::vector<std::string>& tokens) const {
        const auto p = rae::predict_rae(model, tokens);
        return {model.class_names.at(static_cast<std::size_t>(p.predicted)), p.probabilities};
    }

    void save(const std::filesystem::path& path) const { model_io::save_rae(path, model); }
    static PySequenceAutoencoder load(const std::filesystem::path& path) {
        return {model_io::load_rae(path)};
    }
};

py::dict run_pipeline_file(const std::filesystem::path& config_path) {
    const auto config = pipeline::load_pipeline_config(config_path);
    const auto result = pipeline::run_pipeline(config);

    py::dict counts;
    counts["headlines_in"] = result.counts.headlines_in;
    counts["dropped_empty_tokens"] = result.counts.dropped_empty_tokens;
    counts["ar_failures"] = result.counts.ar_failures;
    counts["market_model_fallbacks"] = result.counts.market_model_fallbacks;
    counts["excluded_below_floor"] = result.counts.excluded_below_floor;
    counts["excluded_missing_price"] = result.counts.excluded_missing_price;
    counts["labeled_kept"] = result.counts.labeled_kept;
    counts["steady_dropped"] = result.counts.steady_dropped;
    counts["n_train"] = result.counts.n_train;
    counts["n_test"] = result.counts.n_test;

    py::dict improvements;
    improvements["accuracy"] = result.comparison.accuracy_improvement;
    improvements["precision"] = result.comparison.precision_improvement;
    improvements["recall"] = result.comparison.recall_improvement;
    improvements["f1"] = result.comparison.f1_improvement;

    py::dict d;
    d["out_dir"] = result.out_dir.string();
    d["counts"] = counts;
    d["forest_metrics"] = metrics_to_dict(result.forest_metrics);
    d["autoencoder_metrics"] = metrics_to_dict(result.rae_metrics);
    d["improvements"] = improvements;
    return d;
}

py::dict write_synthetic_corpus(const std::filesystem::path& out_dir, int n_headlines,
                                double signal_strength, const std::string& start,
                                const std::string& end, double volatility, double jump,
                                double tau, int n_isins, int history_days, std::uint64_t seed,
                                int signal_terms, int neutral_terms) {
    synth::SyntheticSpec spec;
    spec.n_headlines = n_headlines;
    spec.signal_strength = signal_strength;
    spec.start = Date::parse(start);
    spec.end = Date::parse(end);
    spec.volatility = volatility;
    spec.jump = jump;
    spec.tau = tau;
    spec.n_isins = n_isins;
    spec.history_days = history_days;
    spec.seed = seed;
    spec.signal_terms_per_class = signal_terms;
    spec.neutral_terms = neutral_terms;

    const auto corpus = synth::generate(spec);
    synth::write_corpus(out_dir, corpus);

    py::dict d;
    d["out_dir"] = out_dir.string();
    d["headlines"] = static_cast<int>(corpus.headlines.size());
    d["isins"] = static_cast<int>(corpus.prices.size());
    d["trading_days"] = static_cast<int>(corpus.market.observations.size());
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "direction-of-move text models over disclosure headlines";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const DataError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const TrainError& e) {
            PyErr_SetString(PyExc_RuntimeError, e.what());
        }
    });

    m.def(
        "tokenize",
        [](std::string_view title, const std::optional<std::vector<std::string>>& stopwords) {
            return corpus::tokenize(title, stopwords_from(stopwords));
        },
        py::arg("title"), py::arg("stopwords") = std::nullopt,
        "Lowercased letter-run tokens of a title; digit-bearing tokens and "
        "stopwords are dropped. stopwords=None uses the built-in list, an "
        "explicit list (possibly empty) replaces it.");

    m.def("default_stopwords", [] { return corpus::default_stopword_list(); },
          "The stopword list compiled into the library, sorted.");

    m.def(
        "tfidf",
        [](const std::vector<std::vector<std::string>>& docs, int min_df) {
            const auto seqs = sequences_from(docs);
            auto vocab = std::make_shared<const corpus::Vocabulary>(
                corpus::build_vocabulary(seqs, min_df));
            const auto dtm = corpus::tfidf_transform(corpus::count_matrix(seqs, vocab));
            return std::make_pair(vocab->terms, dtm.rows);
        },
        py::arg("docs"), py::arg("min_df") = 1,
        "tf-idf weights tf * ln(N / df) over tokenized documents. Returns "
        "(terms, rows) where each row holds (term_index, weight) pairs.");

    m.def(
        "abnormal_return",
        [](const std::vector<std::pair<std::string, double>>& stock,
           const std::vector<std::pair<std::string, double>>& market,
           const std::string& event_date, int window, const std::string& mode) {
            return eventstudy::abnormal_return(series_from("STOCK", stock),
                                               series_from("MARKET", market),
                                               Date::parse(event_date), window,
                                               ar_mode_from(mode));
        },
        py::arg("stock"), py::arg("market"), py::arg("event_date"), py::arg("window") = 60,
        py::arg("mode") = "market_model",
        "Event-day abnormal return from two (date, close) series. "
        "mode is market_model (OLS over `window` prior shared trading days, "
        "falling back to market_adjusted on a flat window) or market_adjusted.");

    m.def(
        "label_direction",
        [](double ar, double tau) {
            return eventstudy::to_string(eventstudy::label_direction(ar, tau));
        },
        py::arg("abnormal_return"), py::arg("tau"),
        "'up' when ar > tau, 'down' when ar < -tau, 'steady' otherwise.");

    m.def(
        "metrics",
        [](const std::vector<int>& truth, const std::vector<int>& predicted, int n_classes,
           std::vector<std::string> class_names) {
            return metrics_to_dict(eval::metrics_from_confusion(
                eval::confusion_matrix(truth, predicted, n_classes, std::move(class_names))));
        },
        py::arg("truth"), py::arg("predicted"), py::arg("n_classes"),
        py::arg("class_names") = std::vector<std::string>{},
        "Accuracy plus macro-averaged precision, recall, and F1 (F1 computed "
        "from the macro averages).");

    m.def("relative_improvement", &eval::relative_improvement, py::arg("baseline"),
          py::arg("challenger"), "(challenger - baseline) / baseline.");

    m.def("round_half_up", &eval::round_half_up, py::arg("value"), py::arg("decimals"),
          "Half-away-from-zero rounding used for displayed figures.");

    py::class_<PyTextForest>(m, "TextForest",
                             "Bagged CART trees over tf-idf rows; carries its training "
                             "vocabulary so raw token lists can be scored.")
        .def_static("train", &PyTextForest::train, py::arg("docs"), py::arg("labels"),
                    py::arg("min_df") = 1, py::arg("n_trees") = 200, py::arg("mtry") = 0,
                    py::arg("max_depth") = 0, py::arg("min_leaf") = 1, py::arg("seed") = 1,
                    py::arg("bootstrap") = true,
                    py::arg("class_names") = std::vector<std::string>{})
        .def("predict", &PyTextForest::predict, py::arg("tokens"),
             "Returns (class_name, vote_fractions).")
        .def("save", &PyTextForest::save, py::arg("path"))
        .def_static("load", &PyTextForest::load, py::arg("path"))
        .def_property_readonly("class_names",
                               [](const PyTextForest& f) { return f.bundle.class_names; })
        .def_property_readonly("vocabulary",
                               [](const PyTextForest& f) { return f.bundle.vocab.terms; })
        .def_property_readonly("n_trees", [](const PyTextForest& f) {
            return static_cast<int>(f.bundle.model.trees.size());
        });

    py::class_<PySequenceAutoencoder>(m, "SequenceAutoencoder",
                                      "Chain autoencoder with a per-node softmax, trained by "
                                      "full-batch gradient descent.")
        .def_static("train", &PySequenceAutoencoder::train, py::arg("docs"), py::arg("labels"),
                    py::arg("dim") = 40, py::arg("iterations") = 70,
                    py::arg("learning_rate") = 0.05, py::arg("alpha") = 0.2, py::arg("seed") = 1,
                    py::arg("init_stddev") = 0.1, py::arg("activation") = "sigmoid",
                    py::arg("train_unknown") = false,
                    py::arg("class_names") = std::vector<std::string>{})
        .def("predict", &PySequenceAutoencoder::predict, py::arg("tokens"),
             "Returns (class_name, class_probabilities) from the root softmax.")
        .def("save", &PySequenceAutoencoder::save, py::arg("path"))
        .def_static("load", &PySequenceAutoencoder::load, py::arg("path"))
        .def_property_readonly("loss_history",
                               [](const PySequenceAutoencoder& a) { return a.model.loss_history; })
        .def_property_readonly("class_names",
                               [](const PySequenceAutoencoder& a) { return a.model.class_names; })
        .def_property_readonly("dim", [](const PySequenceAutoencoder& a) {
            return a.model.embeddings.dim;
        });

    m.def("run_pipeline_file", &run_pipeline_file, py::arg("config_path"),
          "Runs the end-to-end pipeline from a JSON config file and returns "
          "counts, per-model metrics, and the output directory.");

    m.def("write_synthetic_corpus", &write_synthetic_corpus, py::arg("out_dir"),
          py::arg("n_headlines") = 2000, py::arg("signal_strength") = 0.9,
          py::arg("start") = "2004-01-02", py::arg("end") = "2011-06-30",
          py::arg("volatility") = 0.005, py::arg("jump") = 0.05, py::arg("tau") = 0.01,
          py::arg("n_isins") = 50, py::arg("history_days") = 80, py::arg("seed") = 7,
          py::arg("signal_terms") = 20, py::arg("neutral_terms") = 100,
          "Generates a planted-signal benchmark corpus (headlines.jsonl, "
          "prices.csv, market.csv, planted_labels.jsonl) into out_dir.");
}
