#pragma once

#include "flare/dataset.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace flare {

enum class IndicatorKind { ThreatInjury, ThreatDeath, RiskHome, RiskNeighborhood };

std::string indicator_name(IndicatorKind kind);
IndicatorKind indicator_from_name(std::string_view name);
bool is_threat(IndicatorKind kind);

/// One of the four 1-5 survey answers standing in for a latent perception.
struct PerceptionIndicator {
    IndicatorKind kind = IndicatorKind::ThreatInjury;
    std::string source_variable;
};

enum class RegressionFamily { Ridge, Logistic };

/// Per-indicator fitted weights over the standardized survey features. The
/// indicator's own source variable is excluded from the predictors, so names
/// lists every other feature variable in schema order.
struct WeightVector {
    PerceptionIndicator indicator;
    std::vector<std::string> names;
    std::vector<double> weights;  // parallel to names, standardized space
    double intercept = 0.0;
    double residual_norm = 0.0;

    double weight_of(std::string_view name) const;
};

struct VariableSubset {
    PerceptionIndicator indicator;
    std::vector<std::string> selected;  // descending |w|, ties by schema order
    double theta = 0.0;
    double coverage = 0.0;
};

/// Fits the indicator's answer on all other feature variables. Features are
/// standardized to zero mean / unit variance on `train`; missing answers are
/// mean-imputed from `train`. Ridge solves the closed-form normal equations
/// with penalty reg_strength*||w||^2; the logistic family binarizes the
/// indicator at its median and runs gradient descent.
WeightVector fit_indicator_weights(const Dataset& train, const PerceptionIndicator& indicator,
                                   double reg_strength,
                                   RegressionFamily family = RegressionFamily::Ridge);

/// Minimal descending-|w| prefix whose cumulative |w| reaches theta of the
/// total.
VariableSubset select_variables(const WeightVector& weights, double theta);

/// Threshold from the sorted-|w| curve: the elbow is the interior point
/// farthest from the chord between the first and last values (both axes
/// normalized to [0,1]); theta is the cumulative |w| fraction accumulated
/// before the elbow, clamped to [0.5, 0.95]. Flat or perfectly linear
/// distributions fall back to 0.8.
double detect_elbow(const WeightVector& weights);

}  // namespace flare
