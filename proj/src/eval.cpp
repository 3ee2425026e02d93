#include "headlinecast/eval.hpp"

#include <cmath>

#include <fmt/format.h>

#include "headlinecast/errors.hpp"

namespace hcast::eval {

std::int64_t ConfusionMatrix::total() const {
    std::int64_t sum = 0;
    for (const auto& row : counts)
        for (const auto c : row) sum += c;
    return sum;
}

std::int64_t ConfusionMatrix::trace() const {
    std::int64_t sum = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) sum += counts[k][k];
    return sum;
}

ConfusionMatrix confusion_matrix(const std::vector<int>& truth, const std::vector<int>& predicted,
                                 int n_classes, std::vector<std::string> class_names) {
    if (truth.size() != predicted.size()) {
        throw DataError(fmt::format("cannot pair {} truth labels with {} predictions",
                                    truth.size(), predicted.size()));
    }
    if (n_classes < 1) throw ConfigError(fmt::format("n_classes must be >= 1, got {}", n_classes));

    ConfusionMatrix cm;
    cm.counts.assign(static_cast<std::size_t>(n_classes),
                     std::vector<std::int64_t>(static_cast<std::size_t>(n_classes), 0));
    if (class_names.empty()) {
        for (int k = 0; k < n_classes; ++k) class_names.push_back(fmt::format("class{}", k));
    }
    cm.class_names = std::move(class_names);

    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int t = truth[i];
        const int p = predicted[i];
        if (t < 0 || t >= n_classes || p < 0 || p >= n_classes) {
            throw DataError(fmt::format("label pair ({}, {}) outside 0..{}", t, p, n_classes - 1));
        }
        cm.counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)] += 1;
    }
    return cm;
}

MetricsReport metrics_from_confusion(const ConfusionMatrix& cm) {
    const std::int64_t total = cm.total();
    if (total <= 0) throw DataError("cannot compute metrics from an empty evaluation");

    const std::size_t k = cm.counts.size();
    MetricsReport report;
    report.n = total;
    report.class_names = cm.class_names;
    report.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);

    double precision_sum = 0.0, recall_sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        std::int64_t col_sum = 0, row_sum = 0;
        for (std::size_t r = 0; r < k; ++r) {
            col_sum += cm.counts[r][c];
            row_sum += cm.counts[c][r];
        }
        PerClassMetrics pc;
        pc.precision =
            col_sum > 0 ? static_cast<double>(cm.counts[c][c]) / static_cast<double>(col_sum) : 0.0;
        pc.recall =
            row_sum > 0 ? static_cast<double>(cm.counts[c][c]) / static_cast<double>(row_sum) : 0.0;
        report.per_class.push_back(pc);
        precision_sum += pc.precision;
        recall_sum += pc.recall;
    }
    report.precision = precision_sum / static_cast<double>(k);
    report.recall = recall_sum / static_cast<double>(k);
    const double pr = report.precision + report.recall;
    report.f1 = pr > 0.0 ? 2.0 * report.precision * report.recall / pr : 0.0;
    return report;
}

double relative_improvement(double baseline, double challenger) {
    if (!(baseline > 0.0)) {
        throw DataError(fmt::format("relative improvement undefined for baseline {}", baseline));
    }
    return (challenger - baseline) / baseline;
}

ComparisonReport comparison_report(const MetricsReport& baseline, const MetricsReport& challenger) {
    ComparisonReport report;
    report.baseline = baseline;
    report.challenger = challenger;
    report.accuracy_improvement = relative_improvement(baseline.accuracy, challenger.accuracy);
    report.precision_improvement = relative_improvement(baseline.precision, challenger.precision);
    report.recall_improvement = relative_improvement(baseline.recall, challenger.recall);
    report.f1_improvement = relative_improvement(baseline.f1, challenger.f1);
    return report;
}

double round_half_up(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::copysign(std::floor(std::fabs(value) * scale + 0.5) / scale, value);
}

namespace {

std::string fmt_metric(double v) { return fmt::format("{:.2f}", round_half_up(v, 2)); }

std::string fmt_percent(double fraction) {
    return fmt::format("{:.2f}%", round_half_up(fraction * 100.0, 2));
}

} // namespace

std::string format_comparison_table(const ComparisonReport& report,
                                    const std::string& baseline_name,
                                    const std::string& challenger_name) {
    std::string out = "Precision/recall are macro-averaged; F1 from macro P and R.\n";
    out += fmt::format("{:<24} {:>9} {:>10} {:>8} {:>9}\n", "Method", "Accuracy", "Precision",
                       "Recall", "F1-Score");
    auto row = [&](const std::string& name, const MetricsReport& m) {
        out += fmt::format("{:<24} {:>9} {:>10} {:>8} {:>9}\n", name, fmt_metric(m.accuracy),
                           fmt_metric(m.precision), fmt_metric(m.recall), fmt_metric(m.f1));
    };
    row(baseline_name, report.baseline);
    row(challenger_name, report.challenger);
    out += fmt::format("{:<24} {:>9} {:>10} {:>8} {:>9}\n", "Relative Improvement",
                       fmt_percent(report.accuracy_improvement),
                       fmt_percent(report.precision_improvement),
                       fmt_percent(report.recall_improvement),
                       fmt_percent(report.f1_improvement));
    return out;
}

std::string format_metrics_table(const MetricsReport& report) {
    std::string out = "Precision/recall are macro-averaged; F1 from macro P and R.\n";
    out += fmt::format("samples   {}\n", report.n);
    out += fmt::format("accuracy  {}\n", fmt_metric(report.accuracy));
    out += fmt::format("precision {}\n", fmt_metric(report.precision));
    out += fmt::format("recall    {}\n", fmt_metric(report.recall));
    out += fmt::format("f1        {}\n", fmt_metric(report.f1));
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        out += fmt::format("  {:<8} precision {}  recall {}\n", report.class_names[c],
                           fmt_metric(report.per_class[c].precision),
                           fmt_metric(report.per_class[c].recall));
    }
    return out;
}

} // namespace hcast::eval
