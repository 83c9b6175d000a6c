#pragma once

#include "flare/linalg.hpp"

#include <cstddef>
#include <vector>

namespace flare {

struct LogisticConfig {
    double learning_rate = 0.1;
    std::size_t iterations = 500;
    double l2 = 1e-3;
};

struct LogisticModel {
    std::vector<double> weights;
    double intercept = 0.0;
    LogisticConfig config;
};

double sigmoid(double z);

/// Mean log-loss over (x, y) plus (l2/2)*||w||^2; the intercept is not
/// penalized. Labels are 0/1.
double logistic_loss(const linalg::Matrix& x, const std::vector<int>& y,
                     const std::vector<double>& weights, double intercept, double l2);

/// Analytic gradient of logistic_loss, laid out as d/dw_0..d/dw_{p-1}, d/db.
std::vector<double> logistic_gradient(const linalg::Matrix& x, const std::vector<int>& y,
                                      const std::vector<double>& weights, double intercept,
                                      double l2);

/// Batch gradient descent from zero initialization; fully deterministic.
LogisticModel fit_logistic(const linalg::Matrix& x, const std::vector<int>& y,
                           const LogisticConfig& config);

double predict_logistic_prob(const LogisticModel& model, const linalg::Vector& features);

}  // namespace flare
