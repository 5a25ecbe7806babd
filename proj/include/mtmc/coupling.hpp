#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mtmc/core.hpp"
#include "mtmc/kernels.hpp"
#include "mtmc/spectral.hpp"

namespace mtmc {

struct CoupledStep {
  std::size_t x_next;
  std::size_t y_next;
  /// Both drawn from the common component min(m1, m2) / c1.
  bool coalesced;
};

/// c1 = sum_j min(m1(j), m2(j)).
double overlap_mass(std::span<const double> m1, std::span<const double> m2);

/// Maximal coupling of two finite distributions: X ~ m1, Y ~ m2 and
/// Prob(X != Y) = ||m1 - m2||. Consumes one uniform plus the draws of the
/// branch taken.
CoupledStep maximal_coupling_draw(RngStream& rng, std::span<const double> m1, std::span<const double> m2);

/// P^{N0}(x, .) >= epsilon * gamma(.) for every x in `region`.
struct MinorisationCertificate {
  double epsilon = 0.0;
  std::vector<double> gamma;
  std::size_t n0 = 1;
  /// Zero-based states; the whole space in the Doeblin case.
  std::vector<std::size_t> region;

  bool covers_whole_space(std::size_t n) const { return region.size() == n; }
  /// Entry-wise check against P^{N0}, with absolute tolerance 1e-12.
  bool verify(const TransitionMatrix& kernel, Execution exec = Execution::serial) const;
};

/// Minorisation restricted to `region`: epsilon = sum_j min_{i in region} P^{N0}(i, j).
/// Throws "no uniform minorisation at this N0" when epsilon is zero.
MinorisationCertificate minorisation_on_region(const TransitionMatrix& kernel, std::vector<std::size_t> region,
                                               std::size_t n0, Execution exec = Execution::serial);

/// Doeblin certificate (region = whole space).
MinorisationCertificate doeblin_epsilon(const TransitionMatrix& kernel, std::size_t n0,
                                        Execution exec = Execution::serial);

/// (1 - epsilon)^floor(N / N0).
double doeblin_bound(const MinorisationCertificate& cert, std::size_t steps);

struct CoupledPath {
  /// First step at which the common component was drawn; steps + 1 when the
  /// pair never coalesced within the horizon.
  std::size_t coupling_time;
  bool coalesced;
  /// x_path[k] and y_path[k] for k = 0..steps.
  std::vector<std::size_t> x_path;
  std::vector<std::size_t> y_path;
  /// z[k] = number of k' < k with (X_k', Y_k') in R x R.
  std::vector<std::size_t> z_counts;
};

/// One coupled pair: X_0 ~ p0, Y_0 ~ stationary. While both lie in R the pair
/// coalesces onto gamma with probability epsilon and otherwise moves through
/// the residual kernels (P(x, .) - epsilon gamma) / (1 - epsilon); outside
/// R x R the two move independently. After coalescence they move together.
/// Requires a one-step certificate (N0 = 1) that verifies against `kernel`.
CoupledPath simulate_coupled_pair(RngStream& rng, const TransitionMatrix& kernel,
                                  const MinorisationCertificate& cert, std::span<const double> p0, std::size_t steps);

struct CouplingReport {
  double epsilon = 0.0;
  std::size_t n0 = 1;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  double mean_coupling_time = 0.0;
  /// Standard error of the mean coupling time.
  double coupling_time_se = 0.0;
  std::size_t uncoalesced = 0;
  std::vector<std::size_t> coupling_times;
  /// Exact || p0 P^k - a || for k = 0..steps.
  std::vector<double> tv_curve;
  /// Empirical Prob(T > k).
  std::vector<double> survival_curve;
  /// Empirical Prob(X_k != Y_k).
  std::vector<double> mismatch_curve;
  /// Empirical TV between the law of X_k across replicates and the stationary distribution.
  std::vector<double> empirical_tv_curve;
  /// (1 - eps)^floor(k / N0) on the whole space; otherwise the tightest
  /// (1 - eps)^floor(j / N0) + Prob(z_k < j) over j = 1..k.
  std::vector<double> bound_curve;
};

/// Replicated coupled runs. Replicate r uses RngStream(seed, r), so results do
/// not depend on the execution policy or thread count.
CouplingReport coupled_run(const TransitionMatrix& kernel, const MinorisationCertificate& cert,
                           std::span<const double> p0, std::size_t steps, std::size_t replicates,
                           std::uint64_t seed, Execution exec = Execution::serial);

} // namespace mtmc
