#include "headlinecast/rae.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "headlinecast/errors.hpp"
#include "headlinecast/rng.hpp"

namespace hcast::rae {
namespace {

// Floor for probabilities entering a log; keeps the loss finite if a class
// probability underflows during aggressive training.
constexpr double kMinProb = 1e-300;

Vec activate(const Vec& z, Activation act) {
    if (act == Activation::sigmoid) return sigmoid(z);
    return z.array().tanh().matrix();
}

// Derivative expressed through the activation value v = act(z).
Vec activation_deriv(const Vec& v, Activation act) {
    if (act == Activation::sigmoid) return v.cwiseProduct(Vec::Ones(v.size()) - v);
    return (1.0 - v.array().square()).matrix();
}

Vec softmax_logits(const Vec& logits) {
    const double mx = logits.maxCoeff();
    Vec e = (logits.array() - mx).exp().matrix();
    return e / e.sum();
}

Vec leaf_vector(int term_index, const EmbeddingTable& emb) {
    if (term_index < 0) return emb.unk;
    return emb.vectors.row(term_index).transpose();
}

// Full forward pass from embedding-row indices; the only chain state the
// rest of this file trusts is leaf_terms, everything else is derived here.
RaeChain forward_chain(const std::vector<int>& leaf_terms, const RaeModel& model) {
    if (leaf_terms.empty()) throw DataError("cannot build a chain from an empty token sequence");

    RaeChain chain;
    chain.leaf_terms = leaf_terms;
    chain.leaves.reserve(leaf_terms.size());
    for (int idx : leaf_terms) chain.leaves.push_back(leaf_vector(idx, model.embeddings));

    const Activation act = model.config.activation;
    const auto n = chain.leaves.size();
    chain.nodes.reserve(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Vec& left = i == 0 ? chain.leaves[0] : chain.nodes[i - 1].code;
        const Vec& right = chain.leaves[i + 1];
        ChainNode node;
        node.concat.resize(left.size() + right.size());
        node.concat << left, right;
        node.code = activate(model.encoder.W * node.concat + model.encoder.b, act);
        node.decoded = activate(model.encoder.W_dec * node.code + model.encoder.b_dec, act);
        node.probs = classify_node(node.code, model.softmax);
        chain.nodes.push_back(std::move(node));
    }
    chain.root_probs =
        chain.nodes.empty() ? classify_node(chain.leaves[0], model.softmax) : chain.nodes.back().probs;
    return chain;
}

double cross_entropy(const Vec& probs, int label) {
    return -std::log(std::max(probs[label], kMinProb));
}

// alpha * sum(reconstruction) + (1 - alpha) * sum(cross-entropy) for one
// chain, with the two sums also reported separately.
struct ChainLoss {
    double reconstruction = 0.0;
    double classification = 0.0;
};

ChainLoss chain_loss(const RaeChain& chain, int label) {
    ChainLoss parts;
    if (chain.nodes.empty()) {
        parts.classification = cross_entropy(chain.root_probs, label);
        return parts;
    }
    for (const ChainNode& node : chain.nodes) {
        parts.reconstruction += 0.5 * (node.concat - node.decoded).squaredNorm();
        parts.classification += cross_entropy(node.probs, label);
    }
    return parts;
}

void check_labels(const std::vector<RaeChain>& chains, const std::vector<int>& labels,
                  int n_classes) {
    if (chains.size() != labels.size())
        throw DataError(fmt::format("chain/label count mismatch: {} chains vs {} labels",
                                    chains.size(), labels.size()));
    for (int y : labels)
        if (y < 0 || y >= n_classes)
            throw DataError(fmt::format("label {} outside [0, {})", y, n_classes));
}

RaeGradients zero_gradients(const RaeModel& model) {
    RaeGradients g;
    g.W = Mat::Zero(model.encoder.W.rows(), model.encoder.W.cols());
    g.b = Vec::Zero(model.encoder.b.size());
    g.W_dec = Mat::Zero(model.encoder.W_dec.rows(), model.encoder.W_dec.cols());
    g.b_dec = Vec::Zero(model.encoder.b_dec.size());
    g.W_cls = Mat::Zero(model.softmax.W_cls.rows(), model.softmax.W_cls.cols());
    g.b_cls = Vec::Zero(model.softmax.b_cls.size());
    g.embeddings = Mat::Zero(model.embeddings.vectors.rows(), model.embeddings.vectors.cols());
    g.unk = Vec::Zero(model.embeddings.unk.size());
    return g;
}

void add_leaf_gradient(RaeGradients& g, int term_index, const Vec& grad) {
    if (term_index < 0)
        g.unk += grad;
    else
        g.embeddings.row(term_index) += grad.transpose();
}

} // namespace

Vec sigmoid(const Vec& z) {
    Vec out(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = sigmoid_scalar(z[i]);
    return out;
}

double sigmoid_scalar(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

int EmbeddingTable::index_of(std::string_view term) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), term);
    if (it == terms.end() || *it != term) return -1;
    return static_cast<int>(it - terms.begin());
}

Vec encode_pair(const Vec& left, const Vec& right, const EncoderParams& enc, Activation act) {
    Vec concat(left.size() + right.size());
    concat << left, right;
    return activate(enc.W * concat + enc.b, act);
}

std::pair<Vec, Vec> decode_pair(const Vec& code, const EncoderParams& enc, Activation act) {
    Vec full = activate(enc.W_dec * code + enc.b_dec, act);
    const Eigen::Index half = full.size() / 2;
    return {full.head(half), full.tail(full.size() - half)};
}

double reconstruction_error(const Vec& x_left, const Vec& x_right, const Vec& z_left,
                            const Vec& z_right) {
    return 0.5 * ((x_left - z_left).squaredNorm() + (x_right - z_right).squaredNorm());
}

Vec classify_node(const Vec& code, const SoftmaxParams& softmax) {
    return softmax_logits(softmax.W_cls * code + softmax.b_cls);
}

RaeChain build_chain(const std::vector<std::string>& tokens, const RaeModel& model) {
    std::vector<int> leaf_terms;
    leaf_terms.reserve(tokens.size());
    for (const std::string& tok : tokens) leaf_terms.push_back(model.embeddings.index_of(tok));
    return forward_chain(leaf_terms, model);
}

double total_loss(const std::vector<RaeChain>& chains, const std::vector<int>& labels,
                  const RaeModel& model) {
    const LossParts parts = loss_parts(chains, labels, model);
    const double alpha = model.config.alpha;
    return alpha * parts.reconstruction + (1.0 - alpha) * parts.classification;
}

LossParts loss_parts(const std::vector<RaeChain>& chains, const std::vector<int>& labels,
                     const RaeModel& model) {
    check_labels(chains, labels, model.softmax.n_classes);
    if (chains.empty()) throw DataError("loss over zero chains is undefined");
    LossParts acc;
    for (std::size_t i = 0; i < chains.size(); ++i) {
        const RaeChain fresh = forward_chain(chains[i].leaf_terms, model);
        const ChainLoss cl = chain_loss(fresh, labels[i]);
        acc.reconstruction += cl.reconstruction;
        acc.classification += cl.classification;
    }
    acc.reconstruction /= static_cast<double>(chains.size());
    acc.classification /= static_cast<double>(chains.size());
    return acc;
}

RaeGradients compute_gradients(const std::vector<RaeChain>& chains, const std::vector<int>& labels,
                               const RaeModel& model) {
    check_labels(chains, labels, model.softmax.n_classes);
    if (chains.empty()) throw DataError("gradient over zero chains is undefined");

    const double alpha = model.config.alpha;
    const Activation act = model.config.activation;
    const Eigen::Index dim = model.embeddings.dim;
    RaeGradients g = zero_gradients(model);
    double loss_sum = 0.0;

    for (std::size_t s = 0; s < chains.size(); ++s) {
        const RaeChain chain = forward_chain(chains[s].leaf_terms, model);
        const int y = labels[s];
        const ChainLoss cl = chain_loss(chain, y);
        loss_sum += alpha * cl.reconstruction + (1.0 - alpha) * cl.classification;

        if (chain.nodes.empty()) {
            // Lone token: the embedding itself is the classified code.
            Vec delta_u = (1.0 - alpha) * chain.root_probs;
            delta_u[y] -= 1.0 - alpha;
            g.W_cls += delta_u * chain.leaves[0].transpose();
            g.b_cls += delta_u;
            add_leaf_gradient(g, chain.leaf_terms[0], model.softmax.W_cls.transpose() * delta_u);
            continue;
        }

        // Walk the chain root-to-leaves; `carry` is the loss gradient
        // flowing into the current node's code from the node above it.
        Vec carry = Vec::Zero(dim);
        for (int i = static_cast<int>(chain.nodes.size()) - 1; i >= 0; --i) {
            const ChainNode& node = chain.nodes[i];

            Vec delta_u = (1.0 - alpha) * node.probs;
            delta_u[y] -= 1.0 - alpha;
            g.W_cls += delta_u * node.code.transpose();
            g.b_cls += delta_u;

            Vec delta_t =
                (alpha * (node.decoded - node.concat)).cwiseProduct(activation_deriv(node.decoded, act));
            g.W_dec += delta_t * node.code.transpose();
            g.b_dec += delta_t;

            Vec grad_code = model.softmax.W_cls.transpose() * delta_u +
                            model.encoder.W_dec.transpose() * delta_t + carry;
            Vec delta_s = grad_code.cwiseProduct(activation_deriv(node.code, act));
            g.W += delta_s * node.concat.transpose();
            g.b += delta_s;

            // The concatenation is both encoder input and reconstruction
            // target, hence the extra alpha * (concat - decoded) term.
            Vec grad_concat =
                model.encoder.W.transpose() * delta_s + alpha * (node.concat - node.decoded);
            add_leaf_gradient(g, chain.leaf_terms[i + 1], grad_concat.tail(dim));
            if (i == 0)
                add_leaf_gradient(g, chain.leaf_terms[0], grad_concat.head(dim));
            else
                carry = grad_concat.head(dim);
        }
    }

    const double inv_s = 1.0 / static_cast<double>(chains.size());
    g.W *= inv_s;
    g.b *= inv_s;
    g.W_dec *= inv_s;
    g.b_dec *= inv_s;
    g.W_cls *= inv_s;
    g.b_cls *= inv_s;
    g.embeddings *= inv_s;
    g.unk *= inv_s;
    g.loss = loss_sum * inv_s;
    return g;
}

RaeGradients numeric_gradient(const std::vector<RaeChain>& chains, const std::vector<int>& labels,
                              const RaeModel& model, double epsilon) {
    if (!(epsilon > 0.0)) throw ConfigError(fmt::format("epsilon must be positive, got {}", epsilon));
    check_labels(chains, labels, model.softmax.n_classes);
    if (chains.empty()) throw DataError("gradient over zero chains is undefined");

    RaeModel probe = model;
    RaeGradients g = zero_gradients(model);
    g.loss = total_loss(chains, labels, model);

    auto central_diff = [&](double& coord, double& out) {
        const double orig = coord;
        coord = orig + epsilon;
        const double up = total_loss(chains, labels, probe);
        coord = orig - epsilon;
        const double down = total_loss(chains, labels, probe);
        coord = orig;
        out = (up - down) / (2.0 * epsilon);
    };
    auto diff_matrix = [&](Mat& coords, Mat& out) {
        for (Eigen::Index r = 0; r < coords.rows(); ++r)
            for (Eigen::Index c = 0; c < coords.cols(); ++c) central_diff(coords(r, c), out(r, c));
    };
    auto diff_vector = [&](Vec& coords, Vec& out) {
        for (Eigen::Index i = 0; i < coords.size(); ++i) central_diff(coords[i], out[i]);
    };

    diff_matrix(probe.encoder.W, g.W);
    diff_vector(probe.encoder.b, g.b);
    diff_matrix(probe.encoder.W_dec, g.W_dec);
    diff_vector(probe.encoder.b_dec, g.b_dec);
    diff_matrix(probe.softmax.W_cls, g.W_cls);
    diff_vector(probe.softmax.b_cls, g.b_cls);
    diff_matrix(probe.embeddings.vectors, g.embeddings);
    diff_vector(probe.embeddings.unk, g.unk);
    return g;
}

namespace {

void validate_config(const RaeConfig& config) {
    if (config.dim < 1) throw ConfigError(fmt::format("embedding dim must be >= 1, got {}", config.dim));
    if (config.iterations < 0)
        throw ConfigError(fmt::format("iterations must be >= 0, got {}", config.iterations));
    if (!(config.learning_rate > 0.0))
        throw ConfigError(fmt::format("learning rate must be positive, got {}", config.learning_rate));
    if (!(config.alpha >= 0.0 && config.alpha <= 1.0))
        throw ConfigError(fmt::format("alpha must lie in [0, 1], got {}", config.alpha));
    if (!(config.init_stddev > 0.0))
        throw ConfigError(fmt::format("init stddev must be positive, got {}", config.init_stddev));
}

void clip_rows(Mat& m) { m = m.cwiseMax(0.01).cwiseMin(0.99); }

double clipped(double v) { return std::clamp(v, 0.01, 0.99); }

} // namespace

RaeModel train_rae(const std::vector<corpus::TokenSequence>& sequences,
                   const std::vector<int>& labels, RaeConfig config,
                   std::vector<std::string> class_names) {
    validate_config(config);
    if (sequences.empty()) throw DataError("no training sequences");
    if (sequences.size() != labels.size())
        throw DataError(fmt::format("sequence/label count mismatch: {} sequences vs {} labels",
                                    sequences.size(), labels.size()));
    for (const corpus::TokenSequence& seq : sequences)
        if (seq.tokens.empty())
            throw DataError(fmt::format("headline {} has no tokens", seq.headline_id));

    int n_classes = 0;
    for (int y : labels) {
        if (y < 0) throw DataError(fmt::format("negative class label {}", y));
        n_classes = std::max(n_classes, y + 1);
    }
    if (std::adjacent_find(labels.begin(), labels.end(), std::not_equal_to<>()) == labels.end())
        throw TrainError("degenerate labels: training needs at least 2 distinct classes");
    if (!class_names.empty() && static_cast<int>(class_names.size()) != n_classes)
        throw ConfigError(fmt::format("{} class names for {} classes", class_names.size(), n_classes));
    if (class_names.empty())
        for (int k = 0; k < n_classes; ++k) class_names.push_back(fmt::format("class{}", k));

    const auto vocab = corpus::build_vocabulary(sequences, 1);
    const int dim = config.dim;
    const bool sig = config.activation == Activation::sigmoid;
    const double emb_mean = sig ? 0.5 : 0.0;

    RaeModel model;
    model.config = config;
    model.class_names = std::move(class_names);
    model.embeddings.dim = dim;
    model.embeddings.terms = vocab.terms;
    model.embeddings.init_mean = emb_mean;
    model.embeddings.init_stddev = config.init_stddev;

    // Deterministic draw order: embedding rows (term order), the unknown
    // vector, then W, W_dec, W_cls row by row. Biases start at zero.
    Rng rng(config.seed);
    const auto n_terms = static_cast<Eigen::Index>(vocab.terms.size());
    model.embeddings.vectors.resize(n_terms, dim);
    for (Eigen::Index r = 0; r < n_terms; ++r)
        for (int c = 0; c < dim; ++c) {
            const double v = rng.normal(emb_mean, config.init_stddev);
            model.embeddings.vectors(r, c) = sig ? clipped(v) : v;
        }
    model.embeddings.unk.resize(dim);
    for (int c = 0; c < dim; ++c) {
        const double v = rng.normal(emb_mean, config.init_stddev);
        model.embeddings.unk[c] = sig ? clipped(v) : v;
    }
    auto init_weights = [&](Eigen::Index rows, Eigen::Index cols) {
        Mat m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.normal(0.0, 0.01);
        return m;
    };
    model.encoder.W = init_weights(dim, 2 * dim);
    model.encoder.b = Vec::Zero(dim);
    model.encoder.W_dec = init_weights(2 * dim, dim);
    model.encoder.b_dec = Vec::Zero(2 * dim);
    model.softmax.W_cls = init_weights(n_classes, dim);
    model.softmax.b_cls = Vec::Zero(n_classes);
    model.softmax.n_classes = n_classes;

    // The token -> row mapping never changes during training, so chains
    // carry only their leaf indices; each step re-runs the forward pass
    // against the current parameters.
    std::vector<RaeChain> chains(sequences.size());
    for (std::size_t s = 0; s < sequences.size(); ++s) {
        chains[s].leaf_terms.reserve(sequences[s].tokens.size());
        for (const std::string& tok : sequences[s].tokens)
            chains[s].leaf_terms.push_back(model.embeddings.index_of(tok));
    }

    model.loss_history.reserve(config.iterations);
    const double lr = config.learning_rate;
    for (int it = 0; it < config.iterations; ++it) {
        const RaeGradients g = compute_gradients(chains, labels, model);
        model.loss_history.push_back(g.loss);
        model.encoder.W -= lr * g.W;
        model.encoder.b -= lr * g.b;
        model.encoder.W_dec -= lr * g.W_dec;
        model.encoder.b_dec -= lr * g.b_dec;
        model.softmax.W_cls -= lr * g.W_cls;
        model.softmax.b_cls -= lr * g.b_cls;
        model.embeddings.vectors -= lr * g.embeddings;
        if (config.train_unknown) model.embeddings.unk -= lr * g.unk;
        if (sig) {
            clip_rows(model.embeddings.vectors);
            if (config.train_unknown)
                model.embeddings.unk = model.embeddings.unk.cwiseMax(0.01).cwiseMin(0.99);
        }
    }
    return model;
}

RaePrediction predict_rae(const RaeModel& model, const std::vector<std::string>& tokens) {
    const RaeChain chain = build_chain(tokens, model);
    RaePrediction pred;
    pred.probabilities.assign(chain.root_probs.data(), chain.root_probs.data() + chain.root_probs.size());
    pred.predicted = 0;
    for (int k = 1; k < static_cast<int>(pred.probabilities.size()); ++k)
        if (pred.probabilities[k] > pred.probabilities[pred.predicted]) pred.predicted = k;
    return pred;
}

} // namespace hcast::rae
