#pragma once

#include <cstddef>
#include <vector>

namespace flare::linalg {

using Vector = std::vector<double>;
using Matrix = std::vector<std::vector<double>>;  // row-major, rectangular

double dot(const Vector& a, const Vector& b);
double norm(const Vector& v);

/// Cosine similarity; 0 when either vector has zero norm.
double cosine(const Vector& a, const Vector& b);

/// Solves A x = b for symmetric positive-definite A by Cholesky
/// factorization. Throws SingularFit when A is not positive definite.
Vector solve_spd(Matrix a, Vector b);

}  // namespace flare::linalg
