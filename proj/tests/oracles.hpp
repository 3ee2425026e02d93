#pragma once

// Reference implementations the test suites check the library against.
// Each one recomputes a result by the most direct route available (dense
// loops, textbook formulas, exhaustive search) and deliberately shares no
// code with the implementation under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "headlinecast/rae.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// tf-idf straight from token lists: weight(t, d) = count(t in d) * ln(N / df)
// where df counts the documents containing t at least once. Terms below
// min_df are omitted entirely.
// ---------------------------------------------------------------------------
inline std::vector<std::map<std::string, double>>
tfidf_by_hand(const std::vector<std::vector<std::string>>& docs, int min_df) {
    const auto n = static_cast<double>(docs.size());
    std::map<std::string, int> df;
    for (const auto& doc : docs) {
        std::set<std::string> distinct(doc.begin(), doc.end());
        for (const auto& t : distinct) df[t] += 1;
    }
    std::vector<std::map<std::string, double>> out(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        std::map<std::string, int> tf;
        for (const auto& t : docs[d]) tf[t] += 1;
        for (const auto& [term, count] : tf) {
            if (df[term] < min_df) continue;
            out[d][term] = count * std::log(n / df[term]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exhaustive depth-1 split search on a dense matrix. Tries every feature
// and every midpoint between adjacent distinct sorted values, recomputing
// both child impurities from scratch each time. Ties keep the first
// candidate in (feature, threshold) order, matching the documented rule.
// ---------------------------------------------------------------------------
struct StumpSplit {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

inline double gini_by_hand(const std::vector<int>& labels, int n_classes) {
    std::vector<double> counts(static_cast<std::size_t>(n_classes), 0.0);
    for (int y : labels) counts[static_cast<std::size_t>(y)] += 1.0;
    double g = 1.0;
    for (double c : counts) {
        const double p = c / static_cast<double>(labels.size());
        g -= p * p;
    }
    return g;
}

inline std::optional<StumpSplit> stump_by_hand(const std::vector<std::vector<double>>& x,
                                               const std::vector<int>& labels, int n_classes,
                                               int min_leaf = 1) {
    const auto n = x.size();
    if (n < 2) return std::nullopt;
    const double parent = gini_by_hand(labels, n_classes);

    std::optional<StumpSplit> best;
    const auto n_features = static_cast<int>(x.front().size());
    for (int f = 0; f < n_features; ++f) {
        std::vector<double> values;
        for (const auto& row : x) values.push_back(row[static_cast<std::size_t>(f)]);
        std::vector<double> distinct = values;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

        for (std::size_t k = 0; k + 1 < distinct.size(); ++k) {
            const double threshold = (distinct[k] + distinct[k + 1]) / 2.0;
            std::vector<int> left, right;
            for (std::size_t i = 0; i < n; ++i) {
                (values[i] <= threshold ? left : right).push_back(labels[i]);
            }
            if (static_cast<int>(left.size()) < min_leaf ||
                static_cast<int>(right.size()) < min_leaf)
                continue;
            const double weighted =
                (left.size() * gini_by_hand(left, n_classes) +
                 right.size() * gini_by_hand(right, n_classes)) /
                static_cast<double>(n);
            const double gain = parent - weighted;
            if (gain <= 0.0) continue;
            if (!best || gain > best->gain) best = StumpSplit{f, threshold, gain};
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Classification scores recomputed by direct counting.
// ---------------------------------------------------------------------------
struct MetricsByHand {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::vector<double> class_precision;
    std::vector<double> class_recall;
};

inline MetricsByHand metrics_by_hand(const std::vector<int>& truth, const std::vector<int>& pred,
                                     int n_classes) {
    MetricsByHand m;
    const auto n = truth.size();
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (truth[i] == pred[i]) ++correct;
    m.accuracy = static_cast<double>(correct) / static_cast<double>(n);

    for (int c = 0; c < n_classes; ++c) {
        std::int64_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pred[i] == c && truth[i] == c) ++tp;
            if (pred[i] == c && truth[i] != c) ++fp;
            if (pred[i] != c && truth[i] == c) ++fn;
        }
        const double p = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        const double r = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        m.class_precision.push_back(p);
        m.class_recall.push_back(r);
        m.precision += p / n_classes;
        m.recall += r / n_classes;
    }
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

// ---------------------------------------------------------------------------
// Simple linear regression y = alpha + beta * x via the centered
// covariance/variance closed form.
// ---------------------------------------------------------------------------
struct OlsByHand {
    double alpha = 0.0;
    double beta = 0.0;
};

inline OlsByHand ols_by_hand(const std::vector<double>& y, const std::vector<double>& x) {
    const auto n = static_cast<double>(x.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= n;
    mean_y /= n;
    double cov = 0.0, var = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cov += (x[i] - mean_x) * (y[i] - mean_y);
        var += (x[i] - mean_x) * (x[i] - mean_x);
    }
    OlsByHand fit;
    fit.beta = cov / var;
    fit.alpha = mean_y - fit.beta * mean_x;
    return fit;
}

// ---------------------------------------------------------------------------
// The blended chain objective recomputed with plain std::vector arithmetic:
// parameters are copied out of the model up front and every product, the
// activation, the softmax, and the per-chain bookkeeping are re-derived in
// loops here. Only the parameter VALUES are taken from the model.
// ---------------------------------------------------------------------------
namespace detail {

using DVec = std::vector<double>;
using DMat = std::vector<std::vector<double>>; // row-major

inline DVec to_vec(const Eigen::VectorXd& v) {
    DVec out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(i);
    return out;
}

inline DMat to_mat(const Eigen::MatrixXd& m) {
    DMat out(static_cast<std::size_t>(m.rows()), DVec(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = m(r, c);
    return out;
}

inline DVec affine(const DMat& w, const DVec& x, const DVec& b) {
    DVec out(w.size());
    for (std::size_t r = 0; r < w.size(); ++r) {
        double acc = b[r];
        for (std::size_t c = 0; c < x.size(); ++c) acc += w[r][c] * x[c];
        out[r] = acc;
    }
    return out;
}

inline DVec squash(DVec z, bool use_tanh) {
    for (double& v : z) v = use_tanh ? std::tanh(v) : 1.0 / (1.0 + std::exp(-v));
    return z;
}

inline DVec softmax_by_hand(const DVec& logits) {
    const double top = *std::max_element(logits.begin(), logits.end());
    DVec out(logits.size());
    double total = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        out[k] = std::exp(logits[k] - top);
        total += out[k];
    }
    for (double& v : out) v /= total;
    return out;
}

} // namespace detail

inline double rae_loss_by_hand(const std::vector<std::vector<std::string>>& token_lists,
                               const std::vector<int>& labels, const hcast::rae::RaeModel& model) {
    using namespace detail;
    const DMat w = to_mat(model.encoder.W);
    const DVec b = to_vec(model.encoder.b);
    const DMat w_dec = to_mat(model.encoder.W_dec);
    const DVec b_dec = to_vec(model.encoder.b_dec);
    const DMat w_cls = to_mat(model.softmax.W_cls);
    const DVec b_cls = to_vec(model.softmax.b_cls);
    const DMat embeddings = to_mat(model.embeddings.vectors);
    const DVec unk = to_vec(model.embeddings.unk);
    const bool use_tanh = model.config.activation == hcast::rae::Activation::tanh;
    const double alpha = model.config.alpha;

    double rec_total = 0.0, cls_total = 0.0;
    for (std::size_t s = 0; s < token_lists.size(); ++s) {
        std::vector<DVec> leaves;
        for (const auto& tok : token_lists[s]) {
            const int row = model.embeddings.index_of(tok);
            leaves.push_back(row >= 0 ? embeddings[static_cast<std::size_t>(row)] : unk);
        }
        const auto classify = [&](const DVec& code) {
            const DVec probs = softmax_by_hand(affine(w_cls, code, b_cls));
            return -std::log(probs[static_cast<std::size_t>(labels[s])]);
        };
        if (leaves.size() == 1) {
            cls_total += classify(leaves.front());
            continue;
        }
        DVec left = leaves.front();
        for (std::size_t i = 1; i < leaves.size(); ++i) {
            DVec concat = left;
            concat.insert(concat.end(), leaves[i].begin(), leaves[i].end());
            const DVec code = squash(affine(w, concat, b), use_tanh);
            const DVec decoded = squash(affine(w_dec, code, b_dec), use_tanh);
            double err = 0.0;
            for (std::size_t k = 0; k < concat.size(); ++k) {
                const double diff = concat[k] - decoded[k];
                err += diff * diff;
            }
            rec_total += 0.5 * err;
            cls_total += classify(code);
            left = code;
        }
    }
    const auto n = static_cast<double>(token_lists.size());
    return alpha * rec_total / n + (1.0 - alpha) * cls_total / n;
}

} // namespace oracles
