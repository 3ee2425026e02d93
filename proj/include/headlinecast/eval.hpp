#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hcast::eval {

/// K x K confusion counts; rows are true classes, columns predictions.
struct ConfusionMatrix {
    std::vector<std::vector<std::int64_t>> counts;
    std::vector<std::string> class_names;

    std::int64_t total() const;
    std::int64_t trace() const;
};

ConfusionMatrix confusion_matrix(const std::vector<int>& truth, const std::vector<int>& predicted,
                                 int n_classes, std::vector<std::string> class_names = {});

struct PerClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
};

/// Macro-averaged scores in [0, 1]. F1 is computed from the macro-averaged
/// precision and recall, not as an average of per-class F1 values.
struct MetricsReport {
    double accuracy = 0.0;
    double precision = 0.0; // macro
    double recall = 0.0;    // macro
    double f1 = 0.0;
    std::int64_t n = 0;
    std::vector<std::string> class_names;
    std::vector<PerClassMetrics> per_class;
};

/// Scores from a confusion matrix. An empty column or row contributes a
/// per-class precision or recall of 0 rather than a division fault.
/// Throws DataError when the matrix holds no samples.
MetricsReport metrics_from_confusion(const ConfusionMatrix& cm);

/// (challenger - baseline) / baseline. Throws DataError when baseline <= 0.
double relative_improvement(double baseline, double challenger);

/// Three-row comparison: baseline, challenger, per-metric relative change.
struct ComparisonReport {
    MetricsReport baseline;
    MetricsReport challenger;
    double accuracy_improvement = 0.0;
    double precision_improvement = 0.0;
    double recall_improvement = 0.0;
    double f1_improvement = 0.0;
};

ComparisonReport comparison_report(const MetricsReport& baseline, const MetricsReport& challenger);

/// Half-up (away from zero) rounding used for display only.
double round_half_up(double value, int decimals);

/// Aligned plain-text table, metrics rounded to 2 decimals, improvements
/// rendered as signed percentages with 2 decimals. Full precision stays in
/// the ComparisonReport itself.
std::string format_comparison_table(const ComparisonReport& report,
                                    const std::string& baseline_name,
                                    const std::string& challenger_name);

std::string format_metrics_table(const MetricsReport& report);

} // namespace hcast::eval
