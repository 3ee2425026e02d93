#include "headlinecast/forest.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "headlinecast/errors.hpp"
#include "headlinecast/rng.hpp"

namespace hcast::forest {

namespace {

double value_at(const SparseRow& row, int feature) {
    const auto it = std::lower_bound(row.begin(), row.end(), feature,
                                     [](const auto& entry, int f) { return entry.first < f; });
    if (it == row.end() || it->first != feature) return 0.0;
    return it->second;
}

double gini_of(const std::vector<std::int64_t>& counts, std::int64_t total) {
    double sum_sq = 0.0;
    for (const auto c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

} // namespace

double gini_impurity(const std::vector<std::int64_t>& class_counts) {
    std::int64_t total = 0;
    for (const auto c : class_counts) {
        if (c < 0) throw DataError("gini impurity: negative class count");
        total += c;
    }
    if (total == 0) throw DataError("gini impurity undefined for an empty node");
    return gini_of(class_counts, total);
}

std::optional<SplitCandidate> best_split(const std::vector<SparseRow>& rows,
                                         const std::vector<int>& labels,
                                         const std::vector<int>& subset,
                                         const std::vector<int>& candidate_features,
                                         int n_classes, int min_leaf) {
    const auto n = static_cast<std::int64_t>(subset.size());
    if (n < 2) return std::nullopt;

    std::vector<std::int64_t> parent_counts(static_cast<std::size_t>(n_classes), 0);
    for (const int i : subset) parent_counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] += 1;
    const double parent_gini = gini_of(parent_counts, n);

    // Ascending feature order makes "keep the first best" implement the
    // (lowest feature, lowest threshold) tie rule.
    std::vector<int> features = candidate_features;
    std::sort(features.begin(), features.end());
    features.erase(std::unique(features.begin(), features.end()), features.end());

    std::optional<SplitCandidate> best;
    std::vector<std::pair<double, int>> values(subset.size());
    std::vector<std::int64_t> left_counts(static_cast<std::size_t>(n_classes));

    for (const int feature : features) {
        for (std::size_t k = 0; k < subset.size(); ++k) {
            const int i = subset[k];
            values[k] = {value_at(rows[static_cast<std::size_t>(i)], feature),
                         labels[static_cast<std::size_t>(i)]};
        }
        std::sort(values.begin(), values.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        if (values.front().first == values.back().first) continue; // constant feature

        std::fill(left_counts.begin(), left_counts.end(), 0);
        for (std::int64_t k = 0; k + 1 < n; ++k) {
            left_counts[static_cast<std::size_t>(values[static_cast<std::size_t>(k)].second)] += 1;
            const double lo = values[static_cast<std::size_t>(k)].first;
            const double hi = values[static_cast<std::size_t>(k + 1)].first;
            if (lo == hi) continue; // not a boundary between distinct values
            const std::int64_t n_left = k + 1;
            const std::int64_t n_right = n - n_left;
            if (n_left < min_leaf || n_right < min_leaf) continue;

            double right_gini_sum = 0.0, left_gini_sum = 0.0;
            for (std::size_t c = 0; c < left_counts.size(); ++c) {
                const double pl = static_cast<double>(left_counts[c]) / static_cast<double>(n_left);
                const double pr = static_cast<double>(parent_counts[c] - left_counts[c]) /
                                  static_cast<double>(n_right);
                left_gini_sum += pl * pl;
                right_gini_sum += pr * pr;
            }
            const double weighted =
                (static_cast<double>(n_left) * (1.0 - left_gini_sum) +
                 static_cast<double>(n_right) * (1.0 - right_gini_sum)) /
                static_cast<double>(n);
            const double gain = parent_gini - weighted;
            if (gain <= 0.0) continue;
            if (!best || gain > best->gain) {
                best = SplitCandidate{feature, (lo + hi) / 2.0, gain};
            }
        }
    }
    return best;
}

namespace {

struct TreeBuilder {
    const std::vector<SparseRow>& rows;
    const std::vector<int>& labels;
    int n_classes;
    int feature_dim;
    const ForestConfig& config;
    Rng& rng;
    Tree tree;

    int build(std::vector<int>& subset, int depth) {
        std::vector<std::int64_t> counts(static_cast<std::size_t>(n_classes), 0);
        for (const int i : subset) counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] += 1;

        const int node_index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        const bool pure = std::count(counts.begin(), counts.end(), 0) >=
                          static_cast<std::int64_t>(counts.size()) - 1;
        const bool depth_capped = config.max_depth > 0 && depth >= config.max_depth;
        std::optional<SplitCandidate> split;
        if (!pure && !depth_capped &&
            static_cast<int>(subset.size()) >= 2 * config.min_leaf) {
            const int mtry = config.mtry > 0
                                 ? std::min(config.mtry, feature_dim)
                                 : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(feature_dim))));
            const std::vector<int> features = rng.sample_indices(feature_dim, mtry);
            split = best_split(rows, labels, subset, features, n_classes, config.min_leaf);
        }

        if (!split) {
            tree.nodes[static_cast<std::size_t>(node_index)].class_counts = std::move(counts);
            return node_index;
        }

        std::vector<int> left_subset, right_subset;
        left_subset.reserve(subset.size());
        right_subset.reserve(subset.size());
        for (const int i : subset) {
            const double v = value_at(rows[static_cast<std::size_t>(i)], split->feature);
            (v <= split->threshold ? left_subset : right_subset).push_back(i);
        }
        subset.clear();
        subset.shrink_to_fit();

        const int left = build(left_subset, depth + 1);
        const int right = build(right_subset, depth + 1);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
        node.is_leaf = false;
        node.feature = split->feature;
        node.threshold = split->threshold;
        node.left = left;
        node.right = right;
        return node_index;
    }
};

} // namespace

ForestModel train_forest_rows(const std::vector<SparseRow>& rows, const std::vector<int>& labels,
                              int feature_dim, ForestConfig config) {
    if (rows.size() != labels.size()) {
        throw DataError(fmt::format("row/label count mismatch: {} vs {}", rows.size(), labels.size()));
    }
    if (rows.size() < 2) {
        throw TrainError(fmt::format("need at least 2 training rows, got {}", rows.size()));
    }
    if (config.n_trees < 1) throw ConfigError("n_trees must be >= 1");
    if (feature_dim < 1) throw DataError("feature_dim must be >= 1");
    if (config.mtry < 0 || config.mtry > feature_dim) {
        throw ConfigError(fmt::format("mtry must lie in 1..{} (or 0 for sqrt default), got {}",
                                      feature_dim, config.mtry));
    }

    int n_classes = 0;
    for (const int label : labels) {
        if (label < 0) throw DataError(fmt::format("negative class label {}", label));
        n_classes = std::max(n_classes, label + 1);
    }
    {
        std::vector<bool> present(static_cast<std::size_t>(n_classes), false);
        for (const int label : labels) present[static_cast<std::size_t>(label)] = true;
        const auto distinct = std::count(present.begin(), present.end(), true);
        if (distinct < 2) {
            throw TrainError("degenerate labels: training set contains a single class");
        }
    }

    ForestModel model;
    model.n_classes = n_classes;
    model.feature_dim = feature_dim;
    model.config = config;
    model.trees.resize(static_cast<std::size_t>(config.n_trees));

    const auto n = rows.size();
    for (int t = 0; t < config.n_trees; ++t) {
        // Per-tree generator: the forest is reproducible no matter in which
        // order (or in parallel) the trees are grown.
        Rng rng(config.seed ^ static_cast<std::uint64_t>(t));
        std::vector<int> subset;
        subset.reserve(n);
        if (config.bootstrap) {
            for (std::size_t i = 0; i < n; ++i) {
                subset.push_back(static_cast<int>(rng.below(n)));
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) subset.push_back(static_cast<int>(i));
        }
        TreeBuilder builder{rows, labels, n_classes, feature_dim, config, rng, {}};
        builder.build(subset, 0);
        model.trees[static_cast<std::size_t>(t)] = std::move(builder.tree);
    }
    return model;
}

ForestModel train_forest(const corpus::DocumentTermMatrix& dtm, const std::vector<int>& labels,
                         ForestConfig config) {
    const int dim = dtm.vocab ? static_cast<int>(dtm.vocab->size()) : 0;
    return train_forest_rows(dtm.rows, labels, dim, config);
}

int predict_tree(const Tree& tree, const SparseRow& row) {
    const TreeNode* node = &tree.nodes.front();
    while (!node->is_leaf) {
        const double v = value_at(row, node->feature);
        node = &tree.nodes[static_cast<std::size_t>(v <= node->threshold ? node->left : node->right)];
    }
    int best_class = 0;
    std::int64_t best_count = -1;
    for (std::size_t c = 0; c < node->class_counts.size(); ++c) {
        if (node->class_counts[c] > best_count) {
            best_count = node->class_counts[c];
            best_class = static_cast<int>(c);
        }
    }
    return best_class;
}

ForestPrediction predict_forest(const ForestModel& model, const SparseRow& row) {
    for (const auto& [feature, value] : row) {
        (void)value;
        if (feature < 0 || feature >= model.feature_dim) {
            throw DataError(fmt::format("feature index {} outside model dimension {}", feature,
                                        model.feature_dim));
        }
    }
    std::vector<std::int64_t> votes(static_cast<std::size_t>(model.n_classes), 0);
    for (const auto& tree : model.trees) {
        votes[static_cast<std::size_t>(predict_tree(tree, row))] += 1;
    }
    ForestPrediction out;
    out.vote_fractions.resize(votes.size());
    std::int64_t best_votes = -1;
    for (std::size_t c = 0; c < votes.size(); ++c) {
        out.vote_fractions[c] =
            static_cast<double>(votes[c]) / static_cast<double>(model.trees.size());
        if (votes[c] > best_votes) {
            best_votes = votes[c];
            out.predicted = static_cast<int>(c);
        }
    }
    return out;
}

} // namespace hcast::forest
