#pragma once

// Convergence measurement for live runs: total-variation estimators, the
// generation gaps delta(m) and D_m, ergodic averages and detailed balance.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mtmc/approx.hpp"
#include "mtmc/core.hpp"
#include "mtmc/kernels.hpp"
#include "mtmc/matrix.hpp"
#include "mtmc/spectral.hpp"

namespace mtmc {

enum class TvScheme { exact_discrete, histogram_binned };

std::string to_string(TvScheme scheme);

/// Tensor-product histogram over a box, `counts[i]` cells along axis i.
struct Binning {
  Box box;
  std::vector<std::size_t> counts;

  std::size_t cell_count() const;
  /// Flat cell index of x, or cell_count() when x lies outside the box.
  std::size_t cell_of(std::span<const double> x) const;
};

struct TvEstimate {
  double value = 0.0;
  TvScheme scheme = TvScheme::exact_discrete;
  /// Number of cells compared (including the outside cell for binned estimates).
  std::size_t bins = 0;
  std::size_t samples = 0;
};

/// (1/2) sum |p - q|. Both must have the same size and sum to 1 within 1e-9.
TvEstimate tv_discrete(std::span<const double> p, std::span<const double> q);

/// Empirical law of `samples` (labels 1..n, one-dimensional points) against
/// the normalized target masses on those labels.
TvEstimate tv_histogram_discrete(std::span<const Point> samples, const TargetDensity& target, std::size_t n);

/// Binned empirical law against the target mass per cell. Cell masses come
/// from tensor Gauss-Legendre quadrature of the given order and are
/// normalized over the box; samples outside the box fall in an extra cell of
/// zero target mass.
TvEstimate tv_histogram(std::span<const Point> samples, const TargetDensity& target, const Binning& bins,
                        std::size_t quadrature_order = 8);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre(std::size_t order);

/// Metropolis kernel on the grid for the approximation values `a` (already
/// restricted to the grid), with the uniform independence proposal on the
/// grid. `a` is normalized first; every entry must be positive.
TransitionMatrix frozen_grid_kernel(std::span<const double> a);

struct GenerationGap {
  std::size_t m = 0;
  double delta_m = 0.0;
  double D_m = 0.0;
};

/// For consecutive snapshots (m, m + 1): delta(m) = || a_m - p || with both
/// normalized on the grid, and D_m = max over grid rows of the TV between the
/// frozen grid kernels of a_{m+1} and a_m. `m` is the snapshot's generation.
std::vector<GenerationGap> generation_gaps(std::span<const ApproximationState> history, const TargetDensity& target,
                                           std::span<const Point> grid, Execution exec = Execution::serial);

/// delta for one snapshot.
double approximation_gap(const ApproximationState& state, std::span<const double> target_values,
                         std::span<const Point> grid, Execution exec = Execution::serial);

/// Running means sum_{k <= n} e(X_k) / n, n = 1..N. Throws when |e| exceeds
/// `bound` anywhere on the trace.
std::vector<double> ergodic_average(std::span<const Point> trace, const std::function<double(const Point&)>& e,
                                    double bound);

/// Standard error of the mean from non-overlapping batch means.
double batch_means_se(std::span<const double> values, std::size_t batches = 20);

/// max_{i,j} |a(i) P(i, j) - a(j) P(j, i)|.
double detailed_balance_check(const Matrix& p, std::span<const double> a);

/// One row of the diagnostics CSV; NaN fields are written empty.
struct DiagnosticsRow {
  std::size_t step = 0;
  double tv_histogram = 0.0;
  double delta_m = 0.0;
  double D_m = 0.0;
  double running_mean_e = 0.0;
};

void write_diagnostics_csv(std::ostream& os, std::span<const DiagnosticsRow> rows);

} // namespace mtmc
