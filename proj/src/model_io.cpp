#include "headlinecast/model_io.hpp"

#include <fstream>

#include <fmt/format.h>

#include "headlinecast/errors.hpp"
#include "headlinecast/jsonio.hpp"

namespace hcast::model_io {
namespace {

using nlohmann::json;

constexpr const char* kForestFormat = "headlinecast-forest";
constexpr const char* kRaeFormat = "headlinecast-rae";
constexpr int kFormatVersion = 1;

const json& require(const json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end()) throw DataError(fmt::format("{}: missing key \"{}\"", where, key));
    return *it;
}

void check_header(const json& j, const char* expected_format, const char* where) {
    const std::string format = require(j, "format", where).get<std::string>();
    if (format != expected_format)
        throw DataError(
            fmt::format("{}: expected format \"{}\", found \"{}\"", where, expected_format, format));
    const int version = require(j, "version", where).get<int>();
    if (version != kFormatVersion)
        throw DataError(
            fmt::format("{}: expected version {}, found {}", where, kFormatVersion, version));
}

json matrix_to_json(const rae::Mat& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

rae::Mat matrix_from_json(const json& j, const char* where) {
    if (!j.is_array()) throw DataError(fmt::format("{}: expected an array of rows", where));
    const auto n_rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index n_cols = -1;
    rae::Mat m;
    for (Eigen::Index r = 0; r < n_rows; ++r) {
        const json& row = j[r];
        if (!row.is_array()) throw DataError(fmt::format("{}: row {} is not an array", where, r));
        if (n_cols < 0) {
            n_cols = static_cast<Eigen::Index>(row.size());
            m.resize(n_rows, n_cols);
        } else if (static_cast<Eigen::Index>(row.size()) != n_cols) {
            throw DataError(fmt::format("{}: ragged rows ({} vs {})", where, row.size(), n_cols));
        }
        for (Eigen::Index c = 0; c < n_cols; ++c) m(r, c) = row[c].get<double>();
    }
    if (n_cols < 0) m.resize(0, 0);
    return m;
}

json vector_to_json(const rae::Vec& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

rae::Vec vector_from_json(const json& j, const char* where) {
    if (!j.is_array()) throw DataError(fmt::format("{}: expected an array", where));
    rae::Vec v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

json vocab_to_json(const corpus::Vocabulary& vocab) {
    return json{{"terms", vocab.terms}, {"doc_freq", vocab.doc_freq}, {"n_docs", vocab.n_docs}};
}

corpus::Vocabulary vocab_from_json(const json& j) {
    corpus::Vocabulary vocab;
    vocab.terms = require(j, "terms", "vocab").get<std::vector<std::string>>();
    vocab.doc_freq = require(j, "doc_freq", "vocab").get<std::vector<int>>();
    vocab.n_docs = require(j, "n_docs", "vocab").get<int>();
    if (vocab.terms.size() != vocab.doc_freq.size())
        throw DataError(fmt::format("vocab: {} terms but {} document frequencies",
                                    vocab.terms.size(), vocab.doc_freq.size()));
    return vocab;
}

json tree_to_json(const forest::Tree& tree) {
    json nodes = json::array();
    for (const forest::TreeNode& node : tree.nodes) {
        if (node.is_leaf) {
            nodes.push_back(json{{"counts", node.class_counts}});
        } else {
            nodes.push_back(json{{"feature", node.feature},
                                 {"threshold", node.threshold},
                                 {"left", node.left},
                                 {"right", node.right}});
        }
    }
    return nodes;
}

forest::Tree tree_from_json(const json& j, int tree_index) {
    forest::Tree tree;
    tree.nodes.reserve(j.size());
    for (const json& jn : j) {
        forest::TreeNode node;
        if (jn.contains("counts")) {
            node.is_leaf = true;
            node.class_counts = jn.at("counts").get<std::vector<std::int64_t>>();
        } else {
            node.is_leaf = false;
            const auto where = fmt::format("tree {}", tree_index);
            node.feature = require(jn, "feature", where.c_str()).get<int>();
            node.threshold = require(jn, "threshold", where.c_str()).get<double>();
            node.left = require(jn, "left", where.c_str()).get<int>();
            node.right = require(jn, "right", where.c_str()).get<int>();
        }
        tree.nodes.push_back(std::move(node));
    }
    return tree;
}

std::string weighting_name(corpus::Weighting w) {
    return w == corpus::Weighting::tfidf ? "tfidf" : "raw_counts";
}

corpus::Weighting weighting_from_name(const std::string& name) {
    if (name == "tfidf") return corpus::Weighting::tfidf;
    if (name == "raw_counts") return corpus::Weighting::raw_counts;
    throw DataError(fmt::format("unknown weighting \"{}\"", name));
}

std::string activation_name(rae::Activation a) {
    return a == rae::Activation::sigmoid ? "sigmoid" : "tanh";
}

rae::Activation activation_from_name(const std::string& name) {
    if (name == "sigmoid") return rae::Activation::sigmoid;
    if (name == "tanh") return rae::Activation::tanh;
    throw DataError(fmt::format("unknown activation \"{}\"", name));
}

} // namespace

json forest_to_json(const ForestBundle& bundle) {
    const forest::ForestConfig& cfg = bundle.model.config;
    json trees = json::array();
    for (const forest::Tree& tree : bundle.model.trees) trees.push_back(tree_to_json(tree));
    return json{{"format", kForestFormat},
                {"version", kFormatVersion},
                {"config",
                 {{"n_trees", cfg.n_trees},
                  {"mtry", cfg.mtry},
                  {"max_depth", cfg.max_depth},
                  {"min_leaf", cfg.min_leaf},
                  {"seed", cfg.seed},
                  {"bootstrap", cfg.bootstrap}}},
                {"n_classes", bundle.model.n_classes},
                {"class_names", bundle.class_names},
                {"feature_dim", bundle.model.feature_dim},
                {"weighting", weighting_name(bundle.weighting)},
                {"vocab", vocab_to_json(bundle.vocab)},
                {"trees", std::move(trees)}};
}

ForestBundle forest_from_json(const json& j) {
    check_header(j, kForestFormat, "forest model");
    ForestBundle bundle;
    const json& jc = require(j, "config", "forest model");
    bundle.model.config.n_trees = require(jc, "n_trees", "forest config").get<int>();
    bundle.model.config.mtry = require(jc, "mtry", "forest config").get<int>();
    bundle.model.config.max_depth = require(jc, "max_depth", "forest config").get<int>();
    bundle.model.config.min_leaf = require(jc, "min_leaf", "forest config").get<int>();
    bundle.model.config.seed = require(jc, "seed", "forest config").get<std::uint64_t>();
    bundle.model.config.bootstrap = require(jc, "bootstrap", "forest config").get<bool>();
    bundle.model.n_classes = require(j, "n_classes", "forest model").get<int>();
    bundle.class_names = require(j, "class_names", "forest model").get<std::vector<std::string>>();
    bundle.model.feature_dim = require(j, "feature_dim", "forest model").get<int>();
    bundle.weighting = weighting_from_name(require(j, "weighting", "forest model").get<std::string>());
    bundle.vocab = vocab_from_json(require(j, "vocab", "forest model"));
    const json& jt = require(j, "trees", "forest model");
    bundle.model.trees.reserve(jt.size());
    for (std::size_t t = 0; t < jt.size(); ++t)
        bundle.model.trees.push_back(tree_from_json(jt[t], static_cast<int>(t)));
    return bundle;
}

json rae_to_json(const rae::RaeModel& model) {
    const rae::RaeConfig& cfg = model.config;
    return json{{"format", kRaeFormat},
                {"version", kFormatVersion},
                {"config",
                 {{"dim", cfg.dim},
                  {"iterations", cfg.iterations},
                  {"learning_rate", cfg.learning_rate},
                  {"alpha", cfg.alpha},
                  {"seed", cfg.seed},
                  {"init_stddev", cfg.init_stddev},
                  {"activation", activation_name(cfg.activation)},
                  {"train_unknown", cfg.train_unknown}}},
                {"class_names", model.class_names},
                {"terms", model.embeddings.terms},
                {"embeddings", matrix_to_json(model.embeddings.vectors)},
                {"unk", vector_to_json(model.embeddings.unk)},
                {"W", matrix_to_json(model.encoder.W)},
                {"b", vector_to_json(model.encoder.b)},
                {"W_dec", matrix_to_json(model.encoder.W_dec)},
                {"b_dec", vector_to_json(model.encoder.b_dec)},
                {"W_cls", matrix_to_json(model.softmax.W_cls)},
                {"b_cls", vector_to_json(model.softmax.b_cls)},
                {"loss_history", model.loss_history}};
}

rae::RaeModel rae_from_json(const json& j) {
    check_header(j, kRaeFormat, "autoencoder model");
    rae::RaeModel model;
    const json& jc = require(j, "config", "autoencoder model");
    model.config.dim = require(jc, "dim", "autoencoder config").get<int>();
    model.config.iterations = require(jc, "iterations", "autoencoder config").get<int>();
    model.config.learning_rate = require(jc, "learning_rate", "autoencoder config").get<double>();
    model.config.alpha = require(jc, "alpha", "autoencoder config").get<double>();
    model.config.seed = require(jc, "seed", "autoencoder config").get<std::uint64_t>();
    model.config.init_stddev = require(jc, "init_stddev", "autoencoder config").get<double>();
    model.config.activation =
        activation_from_name(require(jc, "activation", "autoencoder config").get<std::string>());
    model.config.train_unknown = require(jc, "train_unknown", "autoencoder config").get<bool>();

    model.class_names = require(j, "class_names", "autoencoder model").get<std::vector<std::string>>();
    model.embeddings.terms = require(j, "terms", "autoencoder model").get<std::vector<std::string>>();
    model.embeddings.dim = model.config.dim;
    model.embeddings.vectors = matrix_from_json(require(j, "embeddings", "autoencoder model"), "embeddings");
    model.embeddings.unk = vector_from_json(require(j, "unk", "autoencoder model"), "unk");
    model.encoder.W = matrix_from_json(require(j, "W", "autoencoder model"), "W");
    model.encoder.b = vector_from_json(require(j, "b", "autoencoder model"), "b");
    model.encoder.W_dec = matrix_from_json(require(j, "W_dec", "autoencoder model"), "W_dec");
    model.encoder.b_dec = vector_from_json(require(j, "b_dec", "autoencoder model"), "b_dec");
    model.softmax.W_cls = matrix_from_json(require(j, "W_cls", "autoencoder model"), "W_cls");
    model.softmax.b_cls = vector_from_json(require(j, "b_cls", "autoencoder model"), "b_cls");
    model.softmax.n_classes = static_cast<int>(model.softmax.b_cls.size());
    model.loss_history = require(j, "loss_history", "autoencoder model").get<std::vector<double>>();

    const auto n_terms = static_cast<Eigen::Index>(model.embeddings.terms.size());
    if (model.embeddings.vectors.rows() != n_terms)
        throw DataError(fmt::format("autoencoder model: {} terms but {} embedding rows", n_terms,
                                    model.embeddings.vectors.rows()));
    return model;
}

void save_forest(const std::filesystem::path& path, const ForestBundle& bundle) {
    jsonio::write_file(path, forest_to_json(bundle));
}

ForestBundle load_forest(const std::filesystem::path& path) {
    return forest_from_json(jsonio::load_file(path));
}

void save_rae(const std::filesystem::path& path, const rae::RaeModel& model) {
    jsonio::write_file(path, rae_to_json(model));
}

rae::RaeModel load_rae(const std::filesystem::path& path) {
    return rae_from_json(jsonio::load_file(path));
}

ModelKind sniff_model(const std::filesystem::path& path) {
    const json j = jsonio::load_file(path);
    const std::string format = require(j, "format", path.string().c_str()).get<std::string>();
    if (format == kForestFormat) return ModelKind::forest;
    if (format == kRaeFormat) return ModelKind::rae;
    throw DataError(fmt::format("{}: unrecognized model format \"{}\"", path.string(), format));
}

void write_loss_csv(const std::filesystem::path& path, const std::vector<double>& losses) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
    out << "iteration,loss\n";
    for (std::size_t i = 0; i < losses.size(); ++i)
        out << fmt::format("{},{:.17g}\n", i, losses[i]);
    if (!out) throw DataError(fmt::format("short write to {}", path.string()));
}

} // namespace hcast::model_io
