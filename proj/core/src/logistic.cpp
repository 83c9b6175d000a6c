#include "flare/logistic.hpp"

#include "flare/errors.hpp"

#include <algorithm>
#include <cmath>

namespace flare {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

void check_shapes(const linalg::Matrix& x, const std::vector<int>& y,
                  const std::vector<double>& weights) {
    if (x.size() != y.size()) throw LengthMismatch(x.size(), y.size());
    if (x.empty()) throw EmptyTrainingSet();
    for (const linalg::Vector& row : x) {
        if (row.size() != weights.size()) throw DimensionMismatch(weights.size(), row.size());
    }
}

}  // namespace

double logistic_loss(const linalg::Matrix& x, const std::vector<int>& y,
                     const std::vector<double>& weights, double intercept, double l2) {
    check_shapes(x, y, weights);
    const double n = static_cast<double>(x.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double z = linalg::dot(x[i], weights) + intercept;
        const double p = std::clamp(sigmoid(z), 1e-12, 1.0 - 1e-12);
        loss += y[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
    }
    loss /= n;
    for (double w : weights) loss += 0.5 * l2 * w * w;
    return loss;
}

std::vector<double> logistic_gradient(const linalg::Matrix& x, const std::vector<int>& y,
                                      const std::vector<double>& weights, double intercept,
                                      double l2) {
    check_shapes(x, y, weights);
    const double n = static_cast<double>(x.size());
    std::vector<double> grad(weights.size() + 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double z = linalg::dot(x[i], weights) + intercept;
        const double err = sigmoid(z) - static_cast<double>(y[i]);
        for (std::size_t j = 0; j < weights.size(); ++j) grad[j] += err * x[i][j];
        grad.back() += err;
    }
    for (double& g : grad) g /= n;
    for (std::size_t j = 0; j < weights.size(); ++j) grad[j] += l2 * weights[j];
    return grad;
}

LogisticModel fit_logistic(const linalg::Matrix& x, const std::vector<int>& y,
                           const LogisticConfig& config) {
    if (x.empty()) throw EmptyTrainingSet();
    LogisticModel model;
    model.config = config;
    model.weights.assign(x.front().size(), 0.0);
    for (std::size_t it = 0; it < config.iterations; ++it) {
        const std::vector<double> grad =
            logistic_gradient(x, y, model.weights, model.intercept, config.l2);
        for (std::size_t j = 0; j < model.weights.size(); ++j)
            model.weights[j] -= config.learning_rate * grad[j];
        model.intercept -= config.learning_rate * grad.back();
    }
    return model;
}

double predict_logistic_prob(const LogisticModel& model, const linalg::Vector& features) {
    return sigmoid(linalg::dot(features, model.weights) + model.intercept);
}

}  // namespace flare
