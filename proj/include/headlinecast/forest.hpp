#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "headlinecast/corpus.hpp"

namespace hcast::forest {

using corpus::SparseRow;

/// One node of a CART tree, stored in a flat array. Internal nodes route
/// weight <= threshold left and > threshold right; leaves carry per-class
/// training counts.
struct TreeNode {
    bool is_leaf = true;
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<std::int64_t> class_counts; // leaves only
};

struct Tree {
    std::vector<TreeNode> nodes; // root at index 0
};

struct ForestConfig {
    int n_trees = 200;
    int mtry = 0;      // features sampled per node; 0 = ceil(sqrt(feature_dim))
    int max_depth = 0; // 0 = unlimited
    int min_leaf = 1;
    std::uint64_t seed = 1;
    bool bootstrap = true; // test hook; disabling trains each tree on all rows
};

struct ForestModel {
    std::vector<Tree> trees;
    int n_classes = 0;
    int feature_dim = 0;
    ForestConfig config;
};

/// 1 - sum_k p_k^2. Zero exactly on pure nodes, below 1 - 1/K otherwise.
/// Throws DataError when the counts sum to zero.
double gini_impurity(const std::vector<std::int64_t>& class_counts);

struct SplitCandidate {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

/// Exhaustive search over midpoints between consecutive distinct values of
/// each candidate feature; picks the largest impurity decrease, breaking
/// ties by lowest feature index then lowest threshold. Returns nullopt when
/// no split strictly reduces impurity. Splits leaving a side with fewer
/// than min_leaf samples are not considered.
std::optional<SplitCandidate> best_split(const std::vector<SparseRow>& rows,
                                         const std::vector<int>& labels,
                                         const std::vector<int>& subset,
                                         const std::vector<int>& candidate_features,
                                         int n_classes, int min_leaf = 1);

/// Bagged CART trees over a (sparse) document-term matrix. Tree t draws its
/// bootstrap sample and feature subsets from an RNG seeded with
/// config.seed XOR t, so results do not depend on scheduling.
/// Throws TrainError when fewer than two classes are present.
ForestModel train_forest(const corpus::DocumentTermMatrix& dtm, const std::vector<int>& labels,
                         ForestConfig config);

/// Same, over raw sparse rows.
ForestModel train_forest_rows(const std::vector<SparseRow>& rows, const std::vector<int>& labels,
                              int feature_dim, ForestConfig config);

struct ForestPrediction {
    int predicted = 0;
    std::vector<double> vote_fractions; // sums to 1
};

/// Plurality vote over the trees' leaf-majority classes; ties go to the
/// lowest class index. Absent features read as 0.
ForestPrediction predict_forest(const ForestModel& model, const SparseRow& row);

int predict_tree(const Tree& tree, const SparseRow& row);

} // namespace hcast::forest
