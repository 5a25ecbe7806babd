#pragma once

// Finite-state analysis of the frozen-generation kernel with an independence
// proposal: importance ratios, the explicit transition matrix, its closed-form
// eigenpairs and the resulting total-variation decay bound.
//
// Distributions are indexed by zero-based state index (state label k is index
// k - 1). The closed forms live in "importance order" (states sorted by
// descending a(k) / Q(k)); every vector exposed here is mapped back to the
// original state order.

#include <cstddef>
#include <span>
#include <vector>

#include "mtmc/kernels.hpp"
#include "mtmc/matrix.hpp"

namespace mtmc {

struct ImportanceProfile {
  /// w_k = a(k) / Q(k), original order.
  std::vector<double> weights;
  /// order[r] is the state with the r-th largest weight (stable for ties).
  std::vector<std::size_t> order;
};

ImportanceProfile importance_profile(std::span<const double> a, std::span<const double> q);

/// Row-stochastic kernel together with the distribution it was built for.
struct TransitionMatrix {
  Matrix entries;
  std::vector<double> stationary;

  std::size_t size() const { return entries.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
  /// max_i |sum_j P(i, j) - 1|.
  double row_sum_error() const;
};

/// Metropolis kernel for target `a` and independence proposal `q`:
///   P(i, j) = Q_j min(1, w_j / w_i),  i != j
///   P(i, i) = Q_i + sum_{d != i} Q_d max(0, 1 - w_d / w_i).
/// Both arguments must be strictly positive and sum to one within 1e-12.
TransitionMatrix build_kernel(std::span<const double> a, std::span<const double> q);

/// Same construction for a general proposal matrix Q(i, j) (rows sum to one).
TransitionMatrix build_kernel(std::span<const double> a, const Matrix& proposal);

/// lambda_k = sum_{d >= k} (Q_d - a(d) / w_k) in importance order, k = 1..n-1,
/// preceded by lambda_0 = 1. Valid with tied ratios.
std::vector<double> closed_form_eigenvalues(std::span<const double> a, std::span<const double> q);

struct SpectralReport {
  ImportanceProfile profile;
  TransitionMatrix kernel;
  /// lambda_0 = 1, lambda_1 >= ... >= lambda_{n-1}.
  std::vector<double> lambdas;
  /// Left eigenvectors v_0 = a, v_k for k >= 1, original state order.
  std::vector<std::vector<double>> vectors;
  /// Eigenvalues of `kernel` from a dense numeric eigensolver, descending.
  std::vector<double> oracle_lambdas;
  /// max_k || v_k P - lambda_k v_k ||_inf.
  double max_residual = 0.0;
};

/// Closed-form spectrum. Throws when two importance ratios are tied (relative
/// gap below 1e-9), naming the offending states.
SpectralReport closed_form_spectrum(std::span<const double> a, std::span<const double> q);

/// theta with p0 = sum_k theta_k v_k; theta_0 = sum(p0).
std::vector<double> expansion_coefficients(const SpectralReport& report, std::span<const double> p0);

/// sum_{k >= 1} |theta_k| * (1/2) ||v_k||_1.
double tv_bound_constant(const SpectralReport& report, std::span<const double> p0);

struct TvDecay {
  double bound;
  double exact_tv;
};

/// bound = tv_bound_constant * lambda_1^N; exact_tv = (1/2) || p0 P^N - a ||_1.
TvDecay tv_decay_bound(const SpectralReport& report, std::span<const double> p0, std::size_t steps);

struct TvDecayCurves {
  std::vector<double> bound;
  std::vector<double> exact_tv;
};

/// Both curves for N = 0..max_steps. The exact curve propagates the deviation
/// (p0 - a) P^N, which avoids cancellation once p_N is close to a.
TvDecayCurves tv_decay_curves(const SpectralReport& report, std::span<const double> p0, std::size_t max_steps,
                              Execution exec = Execution::serial);

/// Eigenvalues of a square matrix (real parts), descending. Dense eigensolver.
std::vector<double> numeric_eigenvalues(const Matrix& m);

} // namespace mtmc
