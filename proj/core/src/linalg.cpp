#include "flare/linalg.hpp"

#include "flare/errors.hpp"

#include <cmath>

namespace flare::linalg {

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

double norm(const Vector& v) { return std::sqrt(dot(v, v)); }

double cosine(const Vector& a, const Vector& b) {
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

Vector solve_spd(Matrix a, Vector b) {
    const std::size_t n = b.size();
    if (a.size() != n) throw DimensionMismatch(a.size(), n);

    // In-place Cholesky: a becomes L in its lower triangle.
    for (std::size_t j = 0; j < n; ++j) {
        if (a[j].size() != n) throw DimensionMismatch(a[j].size(), n);
        double diag = a[j][j];
        for (std::size_t k = 0; k < j; ++k) diag -= a[j][k] * a[j][k];
        if (!(diag > 1e-12)) throw SingularFit();
        a[j][j] = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double sum = a[i][j];
            for (std::size_t k = 0; k < j; ++k) sum -= a[i][k] * a[j][k];
            a[i][j] = sum / a[j][j];
        }
    }

    // Forward substitution: L y = b.
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = b[i];
        for (std::size_t k = 0; k < i; ++k) sum -= a[i][k] * y[k];
        y[i] = sum / a[i][i];
    }
    // Back substitution: L^T x = y.
    Vector x(n);
    for (std::size_t ii = n; ii > 0; --ii) {
        const std::size_t i = ii - 1;
        double sum = y[i];
        for (std::size_t k = i + 1; k < n; ++k) sum -= a[k][i] * x[k];
        x[i] = sum / a[i][i];
    }
    return x;
}

}  // namespace flare::linalg
