#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "headlinecast/errors.hpp"
#include "headlinecast/rae.hpp"
#include "oracles.hpp"

using namespace hcast;
using corpus::TokenSequence;

namespace {

std::vector<TokenSequence> tiny_corpus() {
    return {
        {"H1", {"profit", "rises", "sharply"}},
        {"H2", {"loss", "widens"}},
        {"H3", {"profit", "beats", "forecast", "again"}},
        {"H4", {"loss", "deepens", "amid", "weak", "demand"}},
        {"H5", {"dividend"}}, // single token: classified without any merge
        {"H6", {"profit", "up"}},
    };
}

const std::vector<int> tiny_labels{1, 0, 1, 0, 1, 1};

rae::RaeModel tiny_model(double alpha, rae::Activation act, std::uint64_t seed = 11) {
    rae::RaeConfig config;
    config.dim = 4;
    config.iterations = 0; // initialization only
    config.alpha = alpha;
    config.seed = seed;
    config.activation = act;
    return rae::train_rae(tiny_corpus(), tiny_labels, config);
}

bool vec_eq(const rae::Vec& a, const rae::Vec& b) {
    return a.size() == b.size() && (a.size() == 0 || (a - b).cwiseAbs().maxCoeff() == 0.0);
}

bool mat_eq(const rae::Mat& a, const rae::Mat& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           (a.size() == 0 || (a - b).cwiseAbs().maxCoeff() == 0.0);
}

double max_rel_err(const rae::RaeGradients& got, const rae::RaeGradients& want) {
    double worst = 0.0;
    const auto scan_mat = [&](const rae::Mat& a, const rae::Mat& b) {
        for (Eigen::Index r = 0; r < a.rows(); ++r)
            for (Eigen::Index c = 0; c < a.cols(); ++c) {
                const double denom = std::max({1.0, std::fabs(a(r, c)), std::fabs(b(r, c))});
                worst = std::max(worst, std::fabs(a(r, c) - b(r, c)) / denom);
            }
    };
    const auto scan_vec = [&](const rae::Vec& a, const rae::Vec& b) {
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            const double denom = std::max({1.0, std::fabs(a(i)), std::fabs(b(i))});
            worst = std::max(worst, std::fabs(a(i) - b(i)) / denom);
        }
    };
    scan_mat(got.W, want.W);
    scan_mat(got.W_dec, want.W_dec);
    scan_mat(got.W_cls, want.W_cls);
    scan_vec(got.b, want.b);
    scan_vec(got.b_dec, want.b_dec);
    scan_vec(got.b_cls, want.b_cls);
    scan_mat(got.embeddings, want.embeddings);
    scan_vec(got.unk, want.unk);
    return worst;
}

} // namespace

TEST_CASE("logistic squashing is stable and symmetric") {
    CHECK(rae::sigmoid_scalar(0.0) == 0.5);
    CHECK(rae::sigmoid_scalar(1000.0) == doctest::Approx(1.0));
    CHECK(rae::sigmoid_scalar(-1000.0) == doctest::Approx(0.0));
    CHECK(std::isfinite(rae::sigmoid_scalar(-1000.0)));

    rae::Vec z(3);
    z << -2.0, 0.0, 2.0;
    const rae::Vec s = rae::sigmoid(z);
    const rae::Vec s_neg = rae::sigmoid(-z);
    for (int i = 0; i < 3; ++i) {
        CHECK(s(i) + s_neg(i) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(s(i) > 0.0);
        CHECK(s(i) < 1.0);
    }
}

TEST_CASE("a chain folds the sequence left to right") {
    const auto model = tiny_model(0.2, rae::Activation::sigmoid);
    const auto chain = rae::build_chain({"profit", "rises", "sharply", "again"}, model);
    REQUIRE(chain.leaves.size() == 4);
    REQUIRE(chain.nodes.size() == 3);

    // Node 0 merges the first two word vectors; node i>0 merges the previous
    // code with the next word vector.
    const int l = model.config.dim;
    CHECK(vec_eq(chain.nodes[0].concat.head(l), chain.leaves[0]));
    CHECK(vec_eq(chain.nodes[0].concat.tail(l), chain.leaves[1]));
    CHECK(vec_eq(chain.nodes[1].concat.head(l), chain.nodes[0].code));
    CHECK(vec_eq(chain.nodes[1].concat.tail(l), chain.leaves[2]));
    CHECK(vec_eq(chain.nodes[2].concat.head(l), chain.nodes[1].code));
    CHECK(vec_eq(chain.nodes[2].concat.tail(l), chain.leaves[3]));
    CHECK(vec_eq(chain.root_code(), chain.nodes[2].code));

    // Every node carries a probability vector and a reconstruction.
    for (const auto& node : chain.nodes) {
        CHECK(node.probs.size() == 2);
        CHECK(node.probs.sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(node.decoded.size() == 2 * l);
    }
    CHECK(vec_eq(chain.root_probs, chain.nodes.back().probs));
}

TEST_CASE("a single-token chain classifies the word vector directly") {
    const auto model = tiny_model(0.2, rae::Activation::sigmoid);
    const auto chain = rae::build_chain({"dividend"}, model);
    CHECK(chain.nodes.empty());
    CHECK(vec_eq(chain.root_code(), chain.leaves.front()));
    CHECK(chain.root_probs.size() == 2);

    CHECK_THROWS_WITH_AS(rae::build_chain({}, model), doctest::Contains("empty"), DataError);
}

TEST_CASE("unknown words fall back to the shared vector") {
    const auto model = tiny_model(0.2, rae::Activation::sigmoid);
    const auto chain = rae::build_chain({"entirely", "novel", "words"}, model);
    for (const int term : chain.leaf_terms) CHECK(term == -1);
    for (const auto& leaf : chain.leaves) CHECK(vec_eq(leaf, model.embeddings.unk));
}

TEST_CASE("the objective splits into reconstruction and classification parts") {
    const auto sequences = tiny_corpus();
    for (const double alpha : {0.0, 0.2, 1.0}) {
        CAPTURE(alpha);
        const auto model = tiny_model(alpha, rae::Activation::sigmoid);
        std::vector<rae::RaeChain> chains;
        for (const auto& seq : sequences) chains.push_back(rae::build_chain(seq.tokens, model));

        const double total = rae::total_loss(chains, tiny_labels, model);
        const auto parts = rae::loss_parts(chains, tiny_labels, model);
        CHECK(total == doctest::Approx(alpha * parts.reconstruction +
                                       (1.0 - alpha) * parts.classification)
                           .epsilon(1e-12));
        CHECK(parts.reconstruction >= 0.0);
        CHECK(parts.classification > 0.0);
    }
}

TEST_CASE("the objective matches a plain-loop recomputation") {
    const auto sequences = tiny_corpus();
    std::vector<std::vector<std::string>> token_lists;
    for (const auto& seq : sequences) token_lists.push_back(seq.tokens);

    for (const auto act : {rae::Activation::sigmoid, rae::Activation::tanh}) {
        for (const double alpha : {0.0, 0.2, 1.0}) {
            CAPTURE(alpha);
            const auto model = tiny_model(alpha, act);
            std::vector<rae::RaeChain> chains;
            for (const auto& seq : sequences) chains.push_back(rae::build_chain(seq.tokens, model));
            const double got = rae::total_loss(chains, tiny_labels, model);
            const double want = oracles::rae_loss_by_hand(token_lists, tiny_labels, model);
            CHECK(got == doctest::Approx(want).epsilon(1e-9));
        }
    }
}

TEST_CASE("class scores ignore a constant shift of the logits") {
    const auto model = tiny_model(0.2, rae::Activation::sigmoid);
    const auto chain = rae::build_chain({"profit", "rises"}, model);

    rae::SoftmaxParams shifted = model.softmax;
    shifted.b_cls.array() += 123.0;
    const rae::Vec p0 = rae::classify_node(chain.root_code(), model.softmax);
    const rae::Vec p1 = rae::classify_node(chain.root_code(), shifted);
    for (Eigen::Index k = 0; k < p0.size(); ++k)
        CHECK(p0(k) == doctest::Approx(p1(k)).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central finite differences") {
    const auto sequences = tiny_corpus();
    // "aurora" is out of vocabulary, exercising the shared-unknown path.
    std::vector<TokenSequence> with_oov = sequences;
    with_oov.push_back({"H7", {"aurora", "profit"}});
    std::vector<int> labels = tiny_labels;
    labels.push_back(0);

    for (const auto act : {rae::Activation::sigmoid, rae::Activation::tanh}) {
        for (const double alpha : {0.0, 0.2, 1.0}) {
            CAPTURE(alpha);
            CAPTURE(act == rae::Activation::sigmoid ? "sigmoid" : "tanh");
            rae::RaeConfig config;
            config.dim = 4;
            config.iterations = 0;
            config.alpha = alpha;
            config.seed = 29;
            config.activation = act;
            config.train_unknown = true;
            const auto model = rae::train_rae(with_oov, labels, config);

            std::vector<rae::RaeChain> chains;
            for (const auto& seq : with_oov) chains.push_back(rae::build_chain(seq.tokens, model));

            const auto analytic = rae::compute_gradients(chains, labels, model);
            const auto numeric = rae::numeric_gradient(chains, labels, model, 1e-6);
            CHECK(max_rel_err(analytic, numeric) < 1e-6);
            CHECK(analytic.loss == doctest::Approx(rae::total_loss(chains, labels, model))
                                       .epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(
        [&] {
            const auto model = tiny_model(0.2, rae::Activation::sigmoid);
            std::vector<rae::RaeChain> chains{rae::build_chain({"profit"}, model)};
            rae::numeric_gradient(chains, {1}, model, 0.0);
        }(),
        ConfigError);
}

TEST_CASE("training runs the requested number of steps and lowers the loss") {
    rae::RaeConfig config;
    config.dim = 6;
    config.iterations = 40;
    config.learning_rate = 0.5;
    config.seed = 3;
    const auto model = rae::train_rae(tiny_corpus(), tiny_labels, config);
    REQUIRE(model.loss_history.size() == 40);
    CHECK(model.loss_history.back() < model.loss_history.front());
    CHECK(model.class_names == std::vector<std::string>{"class0", "class1"});

    // Sigmoid mode keeps word vectors inside the decodable box.
    CHECK(model.embeddings.vectors.minCoeff() >= 0.01);
    CHECK(model.embeddings.vectors.maxCoeff() <= 0.99);

    // Bit-for-bit repeatable.
    const auto again = rae::train_rae(tiny_corpus(), tiny_labels, config);
    CHECK(model.loss_history == again.loss_history);
    CHECK(mat_eq(model.encoder.W, again.encoder.W));
    CHECK(mat_eq(model.embeddings.vectors, again.embeddings.vectors));
}

TEST_CASE("the first recorded loss is the untrained objective") {
    rae::RaeConfig config;
    config.dim = 5;
    config.seed = 13;
    config.iterations = 0;
    const auto initial = rae::train_rae(tiny_corpus(), tiny_labels, config);
    CHECK(initial.loss_history.empty());

    std::vector<rae::RaeChain> chains;
    for (const auto& seq : tiny_corpus()) chains.push_back(rae::build_chain(seq.tokens, initial));
    const double untrained = rae::total_loss(chains, tiny_labels, initial);

    config.iterations = 3;
    const auto trained = rae::train_rae(tiny_corpus(), tiny_labels, config);
    REQUIRE(trained.loss_history.size() == 3);
    CHECK(trained.loss_history.front() == doctest::Approx(untrained).epsilon(1e-12));
}

TEST_CASE("prediction reads the root probabilities") {
    rae::RaeConfig config;
    config.dim = 6;
    config.iterations = 150;
    config.learning_rate = 0.5;
    config.seed = 3;
    const auto model = rae::train_rae(tiny_corpus(), tiny_labels, config);

    // The training sentences themselves should be solidly learned.
    int correct = 0;
    const auto sequences = tiny_corpus();
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        const auto p = rae::predict_rae(model, sequences[i].tokens);
        REQUIRE(p.probabilities.size() == 2);
        CHECK(p.probabilities[0] + p.probabilities[1] == doctest::Approx(1.0).epsilon(1e-9));
        if (p.predicted == tiny_labels[i]) ++correct;
    }
    CHECK(correct >= 5);

    // Unknown-word-only input still yields a defined answer.
    const auto p = rae::predict_rae(model, {"wholly", "unseen"});
    CHECK((p.predicted == 0 || p.predicted == 1));
}

TEST_CASE("prediction ties break to the lowest class index") {
    auto model = tiny_model(0.2, rae::Activation::sigmoid);
    model.softmax.W_cls.setZero();
    model.softmax.b_cls.setZero(); // all logits equal: probabilities tie exactly
    const auto p = rae::predict_rae(model, {"profit", "rises"});
    CHECK(p.predicted == 0);
    CHECK(p.probabilities[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("training rejects inconsistent inputs") {
    rae::RaeConfig config;
    config.dim = 3;
    config.iterations = 1;

    CHECK_THROWS_AS(rae::train_rae({}, {}, config), DataError);
    CHECK_THROWS_AS(rae::train_rae(tiny_corpus(), {1, 0}, config), DataError);
    CHECK_THROWS_WITH_AS(rae::train_rae({{"A", {"a"}}, {"B", {}}}, {0, 1}, config),
                         doctest::Contains("no tokens"), DataError);
    CHECK_THROWS_WITH_AS(rae::train_rae({{"A", {"a"}}, {"B", {"b"}}}, {1, 1}, config),
                         doctest::Contains("degenerate labels"), TrainError);
    CHECK_THROWS_AS(rae::train_rae({{"A", {"a"}}, {"B", {"b"}}}, {0, -1}, config), DataError);

    rae::RaeConfig bad = config;
    bad.dim = 0;
    CHECK_THROWS_AS(rae::train_rae(tiny_corpus(), tiny_labels, bad), ConfigError);
    bad = config;
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(rae::train_rae(tiny_corpus(), tiny_labels, bad), ConfigError);
    bad = config;
    bad.alpha = 1.5;
    CHECK_THROWS_AS(rae::train_rae(tiny_corpus(), tiny_labels, bad), ConfigError);
    bad = config;
    bad.iterations = -1;
    CHECK_THROWS_AS(rae::train_rae(tiny_corpus(), tiny_labels, bad), ConfigError);
    CHECK_THROWS_AS(rae::train_rae(tiny_corpus(), tiny_labels, config, {"only-one"}), ConfigError);
}

TEST_CASE("tanh mode leaves word vectors unconstrained") {
    rae::RaeConfig config;
    config.dim = 4;
    config.iterations = 25;
    config.learning_rate = 0.5;
    config.seed = 7;
    config.activation = rae::Activation::tanh;
    const auto model = rae::train_rae(tiny_corpus(), tiny_labels, config);
    CHECK(model.loss_history.back() < model.loss_history.front());
    // Centered initialization: some components must be negative.
    CHECK(model.embeddings.vectors.minCoeff() < 0.0);
}
