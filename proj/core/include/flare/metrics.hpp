#pragma once

#include "flare/dataset.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace flare {

/// Binary confusion counts. "Stay" is the positive class by reporting
/// convention; both classes are always reported, so the choice only orders
/// rows.
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t n_pos() const { return tp + fn; }
    std::size_t n_neg() const { return tn + fp; }
    std::size_t total() const { return tp + tn + fp + fn; }
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct MetricsReport {
    ClassMetrics stay;
    ClassMetrics evacuate;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double weighted_f1 = 0.0;
    std::optional<double> mse;
};

ConfusionMatrix confusion(const std::vector<DecisionValue>& predicted,
                          const std::vector<DecisionValue>& actual);

/// Zero-denominator precision/recall (and F1 with P+R = 0) are defined as 0.
MetricsReport metrics_from_confusion(const ConfusionMatrix& matrix);
MetricsReport compute_metrics(const std::vector<DecisionValue>& predicted,
                              const std::vector<DecisionValue>& actual);

double compute_mse(const std::vector<double>& predicted, const std::vector<double>& actual);

/// 5x5 score-confusion counts; rows = actual 1-5, columns = predicted 1-5.
struct ScoreConfusion {
    std::array<std::array<std::size_t, 5>, 5> counts{};

    /// Row-normalized view; rows with no data stay all-zero.
    std::array<std::array<double, 5>, 5> normalized() const;
};

ScoreConfusion score_confusion(const std::vector<int>& predicted, const std::vector<int>& actual);

std::string score_confusion_csv(const ScoreConfusion& confusion, bool normalized);
std::string score_confusion_svg(const ScoreConfusion& confusion, const std::string& title);

std::string metrics_to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const std::string& text);

struct ReportRow {
    std::string method;
    MetricsReport metrics;
};

/// Aligned plain-text table, two class rows per method, with Accuracy /
/// Macro F1 / Weighted F1 repeated on each.
std::string render_report_table(const std::vector<ReportRow>& rows);

}  // namespace flare
