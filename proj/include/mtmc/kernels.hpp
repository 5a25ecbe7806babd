#pragma once

// Data-parallel inner loops. Every kernel has a serial reference path and an
// OpenMP path selected by `Execution`; the two produce bitwise-identical
// results because each output element is computed by one thread in a fixed
// order, and the only reduction (nearest neighbour) is an order-independent
// lexicographic minimum.

#include <cstddef>
#include <span>

#include "mtmc/matrix.hpp"

namespace mtmc {

enum class Execution { serial, parallel };

namespace kernels {

struct NearestHit {
  std::size_t index;
  double distance2;
};

/// Brute-force nearest neighbour over `points` (row-major, `dim` columns).
/// Ties go to the smallest index. Requires at least one point.
NearestHit nearest_scan(std::span<const double> points, std::size_t dim, std::span<const double> query,
                        Execution exec);

/// out = x * m (row vector times matrix).
void vec_mat(std::span<const double> x, const Matrix& m, std::span<double> out, Execution exec);

Matrix mat_mul(const Matrix& a, const Matrix& b, Execution exec);

/// m^power by binary exponentiation; m^0 is the identity.
Matrix mat_pow(const Matrix& m, std::size_t power, Execution exec);

} // namespace kernels
} // namespace mtmc
