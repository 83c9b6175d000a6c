#include "flare/variable_selection.hpp"

#include "flare/errors.hpp"
#include "flare/linalg.hpp"
#include "flare/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace flare {

std::string indicator_name(IndicatorKind kind) {
    switch (kind) {
        case IndicatorKind::ThreatInjury: return "ThreatInjury";
        case IndicatorKind::ThreatDeath: return "ThreatDeath";
        case IndicatorKind::RiskHome: return "RiskHome";
        case IndicatorKind::RiskNeighborhood: return "RiskNeighborhood";
    }
    throw Error("unreachable indicator kind");
}

IndicatorKind indicator_from_name(std::string_view name) {
    if (name == "ThreatInjury") return IndicatorKind::ThreatInjury;
    if (name == "ThreatDeath") return IndicatorKind::ThreatDeath;
    if (name == "RiskHome") return IndicatorKind::RiskHome;
    if (name == "RiskNeighborhood") return IndicatorKind::RiskNeighborhood;
    throw ConfigInvalid("unknown indicator kind '" + std::string(name) + "'");
}

bool is_threat(IndicatorKind kind) {
    return kind == IndicatorKind::ThreatInjury || kind == IndicatorKind::ThreatDeath;
}

double WeightVector::weight_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return weights[i];
    }
    throw MissingColumn(std::string(name));
}

namespace {

struct DesignMatrix {
    std::vector<std::string> names;  // predictor variables, schema order
    linalg::Matrix x;                // standardized, n rows x p columns
    linalg::Vector y;                // indicator answers (imputed where missing)
};

DesignMatrix build_design(const Dataset& train, const PerceptionIndicator& indicator) {
    if (train.empty()) throw EmptyDataset();
    const std::vector<std::string> features = train.schema.feature_names();
    const EncodingStats stats = compute_stats(train);

    DesignMatrix design;
    std::vector<std::size_t> keep;
    long target = -1;
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i] == indicator.source_variable) {
            target = static_cast<long>(i);
        } else {
            keep.push_back(i);
            design.names.push_back(features[i]);
        }
    }
    if (target < 0) throw MissingColumn(indicator.source_variable);

    const std::size_t n = train.size();
    design.x.assign(n, linalg::Vector(keep.size(), 0.0));
    design.y.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        const FeatureVector vec = encode_record(train.records[r], train.schema, stats);
        design.y[r] = vec.values[static_cast<std::size_t>(target)];
        for (std::size_t c = 0; c < keep.size(); ++c) design.x[r][c] = vec.values[keep[c]];
    }

    // Standardize each predictor column; constant columns stay centered at 0.
    for (std::size_t c = 0; c < keep.size(); ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += design.x[r][c];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double d = design.x[r][c] - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        const double scale = var > 1e-24 ? std::sqrt(var) : 1.0;
        for (std::size_t r = 0; r < n; ++r) design.x[r][c] = (design.x[r][c] - mean) / scale;
    }
    return design;
}

WeightVector fit_ridge(const DesignMatrix& design, const PerceptionIndicator& indicator,
                       double reg_strength) {
    const std::size_t n = design.y.size();
    const std::size_t p = design.names.size();
    if (reg_strength == 0.0 && n < p) throw TooFewRecords(n, p);

    const double y_mean =
        std::accumulate(design.y.begin(), design.y.end(), 0.0) / static_cast<double>(n);

    // Normal equations (X^T X + reg I) w = X^T (y - y_mean).
    linalg::Matrix gram(p, linalg::Vector(p, 0.0));
    linalg::Vector rhs(p, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const linalg::Vector& row = design.x[r];
        const double centered = design.y[r] - y_mean;
        for (std::size_t i = 0; i < p; ++i) {
            rhs[i] += row[i] * centered;
            for (std::size_t j = i; j < p; ++j) gram[i][j] += row[i] * row[j];
        }
    }
    for (std::size_t i = 0; i < p; ++i) {
        gram[i][i] += reg_strength;
        for (std::size_t j = i + 1; j < p; ++j) gram[j][i] = gram[i][j];
    }

    WeightVector result;
    result.indicator = indicator;
    result.names = design.names;
    result.weights = linalg::solve_spd(gram, rhs);
    result.intercept = y_mean;

    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double residual = design.y[r] - y_mean - linalg::dot(design.x[r], result.weights);
        ss += residual * residual;
    }
    result.residual_norm = std::sqrt(ss);
    return result;
}

WeightVector fit_logistic_family(const DesignMatrix& design, const PerceptionIndicator& indicator,
                                 double reg_strength) {
    // Binarize the indicator at its median: above-median answers become 1.
    linalg::Vector sorted = design.y;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    std::vector<int> labels(design.y.size());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = design.y[i] > median ? 1 : 0;

    LogisticConfig config;
    config.l2 = reg_strength;
    const LogisticModel model = fit_logistic(design.x, labels, config);

    WeightVector result;
    result.indicator = indicator;
    result.names = design.names;
    result.weights = model.weights;
    result.intercept = model.intercept;
    result.residual_norm =
        logistic_loss(design.x, labels, model.weights, model.intercept, reg_strength);
    return result;
}

}  // namespace

WeightVector fit_indicator_weights(const Dataset& train, const PerceptionIndicator& indicator,
                                   double reg_strength, RegressionFamily family) {
    if (reg_strength < 0.0) throw ConfigInvalid("reg_strength must be nonnegative");
    const DesignMatrix design = build_design(train, indicator);
    return family == RegressionFamily::Ridge ? fit_ridge(design, indicator, reg_strength)
                                             : fit_logistic_family(design, indicator, reg_strength);
}

namespace {

/// Indices into weights, ordered by |w| descending with schema order breaking
/// ties.
std::vector<std::size_t> magnitude_order(const std::vector<double>& weights) {
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(weights[a]) > std::abs(weights[b]);
    });
    return order;
}

}  // namespace

VariableSubset select_variables(const WeightVector& weights, double theta) {
    if (!(theta > 0.0) || theta > 1.0) throw BadTheta(theta);
    const std::vector<std::size_t> order = magnitude_order(weights.weights);

    double total = 0.0;
    for (std::size_t idx : order) total += std::abs(weights.weights[idx]);
    if (total == 0.0) throw AllZeroWeights();

    VariableSubset subset;
    subset.indicator = weights.indicator;
    subset.theta = theta;
    double cumulative = 0.0;
    for (std::size_t idx : order) {
        subset.selected.push_back(weights.names[idx]);
        cumulative += std::abs(weights.weights[idx]);
        if (cumulative >= theta * total) break;
    }
    subset.coverage = cumulative / total;
    return subset;
}

double detect_elbow(const WeightVector& weights) {
    const std::size_t m = weights.weights.size();
    if (m < 3) throw TooFewVariables(m);

    const std::vector<std::size_t> order = magnitude_order(weights.weights);
    std::vector<double> mags(m);
    for (std::size_t i = 0; i < m; ++i) mags[i] = std::abs(weights.weights[order[i]]);

    const double v_max = mags.front();
    const double v_min = mags.back();
    if (v_max - v_min < 1e-12) return 0.8;  // flat distribution

    // Normalize both axes to [0,1]; the chord runs (0, 1) -> (1, 0) after
    // normalization of a descending curve.
    const double x_last = 1.0;
    const double y_first = 1.0;
    const double y_last = 0.0;
    double best_distance = 0.0;
    std::size_t elbow = 0;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(m - 1);
        const double y = (mags[i] - v_min) / (v_max - v_min);
        // Perpendicular distance to the segment (0, y_first)-(x_last, y_last).
        const double cross = std::abs((y_last - y_first) * x - x_last * y + x_last * y_first);
        const double distance = cross / std::hypot(x_last, y_last - y_first);
        if (distance > best_distance + 1e-15) {
            best_distance = distance;
            elbow = i;
        }
    }
    if (elbow == 0 || best_distance < 1e-12) return 0.8;  // no curvature: linear decline

    double total = 0.0;
    for (double v : mags) total += v;
    double before = 0.0;
    for (std::size_t i = 0; i < elbow; ++i) before += mags[i];
    return std::clamp(before / total, 0.5, 0.95);
}

}  // namespace flare
