#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "headlinecast/corpus.hpp"

namespace hcast::rae {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Componentwise 1/(1+exp(-z)), evaluated branch-wise so large |z| neither
/// overflows nor loses the sign.
Vec sigmoid(const Vec& z);
double sigmoid_scalar(double z);

enum class Activation { sigmoid, tanh };

/// Per-term word vectors of length dim, trained jointly with the network.
/// In sigmoid mode every component is kept inside [0.01, 0.99] after each
/// update so vectors stay valid reconstruction targets for the sigmoid
/// decoder; tanh mode leaves them unconstrained.
struct EmbeddingTable {
    int dim = 0;
    std::vector<std::string> terms; // lexicographic; row r of `vectors` is terms[r]
    Mat vectors;                    // |terms| x dim
    Vec unk;                        // used for out-of-vocabulary tokens
    double init_mean = 0.5;
    double init_stddev = 0.1;

    int index_of(std::string_view term) const; // -1 when unknown
};

/// Encoder f(a) = act(W a + b) from concatenated children (2l) to a code
/// (l), and decoder f'(p) = act(W_dec p + b_dec) back to 2l.
struct EncoderParams {
    Mat W;     // l x 2l
    Vec b;     // l
    Mat W_dec; // 2l x l
    Vec b_dec; // 2l
};

/// Per-node classifier: softmax over W_cls * code + b_cls. The bias is an
/// addition over the forced-through-origin form; zeroing it recovers that
/// form exactly.
struct SoftmaxParams {
    Mat W_cls; // K x l
    Vec b_cls; // K
    int n_classes = 0;
};

struct RaeConfig {
    int dim = 40;
    int iterations = 70;
    double learning_rate = 0.05;
    double alpha = 0.2; // blend: alpha * reconstruction + (1 - alpha) * classification
    std::uint64_t seed = 1;
    double init_stddev = 0.1; // embedding initialization spread
    Activation activation = Activation::sigmoid;
    bool train_unknown = false; // update the unk vector when it appears in training
};

struct RaeModel {
    EmbeddingTable embeddings;
    EncoderParams encoder;
    SoftmaxParams softmax;
    RaeConfig config;
    std::vector<double> loss_history; // one entry per completed iteration
    std::vector<std::string> class_names;
};

/// One autoencoder step of the chain. Node i combines the previous code
/// (or the first word vector) with word vector i+1.
struct ChainNode {
    Vec concat;    // [left; right], 2l
    Vec code;      // l
    Vec decoded;   // 2l, reconstruction of concat
    Vec probs;     // K, softmax over the code
};

/// Forward evaluation of one headline: n leaves, max(n-1, 0) internal
/// nodes. A single-token chain has no internal node; its root code is the
/// embedding itself.
struct RaeChain {
    std::vector<int> leaf_terms; // embedding row per token, -1 = unk
    std::vector<Vec> leaves;
    std::vector<ChainNode> nodes;
    Vec root_probs; // class probabilities at the root code

    const Vec& root_code() const { return nodes.empty() ? leaves.front() : nodes.back().code; }
};

Vec encode_pair(const Vec& left, const Vec& right, const EncoderParams& enc, Activation act);
std::pair<Vec, Vec> decode_pair(const Vec& code, const EncoderParams& enc, Activation act);

/// 0.5 * (|x_left - z_left|^2 + |x_right - z_right|^2).
double reconstruction_error(const Vec& x_left, const Vec& x_right, const Vec& z_left,
                            const Vec& z_right);

/// Softmax probabilities of a code, max-subtracted for stability.
Vec classify_node(const Vec& code, const SoftmaxParams& softmax);

/// Builds the full chain for one headline. Throws DataError on empty input.
RaeChain build_chain(const std::vector<std::string>& tokens, const RaeModel& model);

/// Mean over chains of alpha * (sum of per-node reconstruction errors) +
/// (1 - alpha) * (sum of per-node cross-entropies). Every internal node is
/// a classification point; a single-token chain classifies its embedding.
/// Re-evaluates each chain from its leaf indices under `model`, so it stays
/// meaningful for perturbed parameters.
double total_loss(const std::vector<RaeChain>& chains, const std::vector<int>& labels,
                  const RaeModel& model);

/// Reconstruction and classification sums reported separately;
/// total_loss = alpha * reconstruction + (1 - alpha) * classification.
struct LossParts {
    double reconstruction = 0.0;
    double classification = 0.0;
};
LossParts loss_parts(const std::vector<RaeChain>& chains, const std::vector<int>& labels,
                     const RaeModel& model);

/// Gradients of total_loss for every parameter, embeddings included. The
/// gradient of a word vector aggregates every chain position where the
/// word occurs; words absent from the batch have zero rows.
struct RaeGradients {
    Mat W, W_dec, W_cls;
    Vec b, b_dec, b_cls;
    Mat embeddings; // |terms| x dim
    Vec unk;
    double loss = 0.0; // total_loss at the evaluation point
};

/// Backpropagation through the chain structure. Like total_loss, only the
/// leaf indices of each chain are consumed; activations are recomputed
/// against `model` so the returned gradients always match its parameters.
RaeGradients compute_gradients(const std::vector<RaeChain>& chains, const std::vector<int>& labels,
                               const RaeModel& model);

/// Central finite differences (L(t+e) - L(t-e)) / 2e per coordinate.
/// Verification oracle for compute_gradients; embedding clipping is not
/// applied to perturbed values. Throws ConfigError when epsilon <= 0.
RaeGradients numeric_gradient(const std::vector<RaeChain>& chains, const std::vector<int>& labels,
                              const RaeModel& model, double epsilon);

/// Gaussian-initialized model over the distinct terms of `sequences`
/// (embeddings at N(0.5, init_stddev) clipped to [0.01, 0.99] in sigmoid
/// mode, N(0, init_stddev) in tanh mode; weights at N(0, 0.01); zero
/// biases), then full-batch gradient descent for exactly config.iterations
/// steps. Deterministic for a fixed seed.
RaeModel train_rae(const std::vector<corpus::TokenSequence>& sequences,
                   const std::vector<int>& labels, RaeConfig config,
                   std::vector<std::string> class_names = {});

struct RaePrediction {
    int predicted = 0;
    std::vector<double> probabilities;
};

/// Argmax of the root-code softmax; ties go to the lowest class index.
/// The decoder parameters are never consulted.
RaePrediction predict_rae(const RaeModel& model, const std::vector<std::string>& tokens);

} // namespace hcast::rae
