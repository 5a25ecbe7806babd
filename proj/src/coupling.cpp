#include "mtmc/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mtmc {

namespace {

void require_pair(std::span<const double> m1, std::span<const double> m2)
{
  if (m1.size() != m2.size() || m1.empty()) throw Error("coupling needs two distributions on the same finite space");
  for (auto m : {m1, m2}) {
    double total = 0.0;
    for (double v : m) {
      if (!(v >= 0.0)) throw Error("coupling inputs must be nonnegative");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error("coupling inputs must sum to 1");
  }
}

std::vector<double> deviation_tv_curve(const TransitionMatrix& kernel, std::span<const double> p0,
                                       std::size_t steps, Execution exec)
{
  const std::size_t n = kernel.size();
  std::vector<double> deviation(n);
  std::vector<double> next(n);
  for (std::size_t i = 0; i < n; ++i) deviation[i] = p0[i] - kernel.stationary[i];
  std::vector<double> curve;
  curve.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    double l1 = 0.0;
    for (double d : deviation) l1 += std::abs(d);
    curve.push_back(0.5 * l1);
    if (k < steps) {
      kernels::vec_mat(deviation, kernel.entries, next, exec);
      deviation.swap(next);
    }
  }
  return curve;
}

} // namespace

double overlap_mass(std::span<const double> m1, std::span<const double> m2)
{
  if (m1.size() != m2.size()) throw Error("overlap_mass: size mismatch");
  double c1 = 0.0;
  for (std::size_t j = 0; j < m1.size(); ++j) c1 += std::min(m1[j], m2[j]);
  return c1;
}

CoupledStep maximal_coupling_draw(RngStream& rng, std::span<const double> m1, std::span<const double> m2)
{
  require_pair(m1, m2);
  const std::size_t n = m1.size();
  std::vector<double> common(n);
  std::vector<double> rest_x(n);
  std::vector<double> rest_y(n);
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    common[j] = std::min(m1[j], m2[j]);
    rest_x[j] = m1[j] - common[j];
    rest_y[j] = m2[j] - common[j];
    c1 += common[j];
    c2 += rest_x[j];
    c3 += rest_y[j];
  }
  const double u = rng.uniform();
  // Empty residuals (m1 == m2) can only be reached through rounding in c1;
  // they fall back to the common component.
  if (u < c1 || c2 <= 0.0 || c3 <= 0.0) {
    const std::size_t z = rng.categorical(common);
    return {z, z, true};
  }
  const std::size_t x = rng.categorical(rest_x);
  const std::size_t y = rng.categorical(rest_y);
  return {x, y, false};
}

bool MinorisationCertificate::verify(const TransitionMatrix& kernel, Execution exec) const
{
  const std::size_t n = kernel.size();
  if (gamma.size() != n || region.empty() || n0 == 0) return false;
  const Matrix power = kernels::mat_pow(kernel.entries, n0, exec);
  for (std::size_t i : region) {
    if (i >= n) return false;
    for (std::size_t j = 0; j < n; ++j) {
      if (power(i, j) < epsilon * gamma[j] - kProbabilityTolerance) return false;
    }
  }
  return true;
}

MinorisationCertificate minorisation_on_region(const TransitionMatrix& kernel, std::vector<std::size_t> region,
                                               std::size_t n0, Execution exec)
{
  const std::size_t n = kernel.size();
  if (n0 == 0) throw Error("minorisation needs N0 >= 1");
  std::sort(region.begin(), region.end());
  region.erase(std::unique(region.begin(), region.end()), region.end());
  if (region.empty()) throw Error("minorisation region is empty");
  if (region.back() >= n) throw Error("minorisation region names a state outside the space");

  const Matrix power = kernels::mat_pow(kernel.entries, n0, exec);
  MinorisationCertificate cert;
  cert.n0 = n0;
  cert.region = std::move(region);
  cert.gamma.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double lowest = power(cert.region.front(), j);
    for (std::size_t i : cert.region) lowest = std::min(lowest, power(i, j));
    cert.gamma[j] = lowest;
    cert.epsilon += lowest;
  }
  if (!(cert.epsilon > 0.0)) {
    throw Error("no uniform minorisation at this N0 (N0 = " + std::to_string(n0) + ")");
  }
  for (double& g : cert.gamma) g /= cert.epsilon;
  return cert;
}

MinorisationCertificate doeblin_epsilon(const TransitionMatrix& kernel, std::size_t n0, Execution exec)
{
  std::vector<std::size_t> all(kernel.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return minorisation_on_region(kernel, std::move(all), n0, exec);
}

double doeblin_bound(const MinorisationCertificate& cert, std::size_t steps)
{
  const std::size_t blocks = steps / cert.n0;
  return std::pow(1.0 - cert.epsilon, static_cast<double>(blocks));
}

CoupledPath simulate_coupled_pair(RngStream& rng, const TransitionMatrix& kernel,
                                  const MinorisationCertificate& cert, std::span<const double> p0, std::size_t steps)
{
  const std::size_t n = kernel.size();
  if (cert.n0 != 1) throw Error("coupled simulation requires a one-step (N0 = 1) certificate");
  if (p0.size() != n) throw Error("initial distribution size does not match the kernel");
  if (!cert.verify(kernel)) throw Error("minorisation certificate does not hold for this kernel");

  std::vector<bool> in_region(n, false);
  for (std::size_t i : cert.region) in_region[i] = true;
  Matrix residual(n, n);
  for (std::size_t i : cert.region) {
    for (std::size_t j = 0; j < n; ++j) residual(i, j) = std::max(0.0, kernel(i, j) - cert.epsilon * cert.gamma[j]);
  }
  auto residual_is_empty = [&](std::size_t i) {
    const auto row = residual.row(i);
    return std::all_of(row.begin(), row.end(), [](double v) { return v <= 0.0; });
  };

  CoupledPath path{steps + 1, false, {}, {}, {}};
  path.x_path.reserve(steps + 1);
  path.y_path.reserve(steps + 1);
  path.z_counts.assign(steps + 1, 0);

  std::size_t x = rng.categorical(p0);
  std::size_t y = rng.categorical(kernel.stationary);
  path.x_path.push_back(x);
  path.y_path.push_back(y);

  for (std::size_t k = 0; k < steps; ++k) {
    const bool both_in_region = in_region[x] && in_region[y];
    path.z_counts[k + 1] = path.z_counts[k] + (both_in_region ? 1 : 0);
    if (path.coalesced) {
      x = rng.categorical(kernel.entries.row(x));
      y = x;
    } else if (both_in_region) {
      const double u = rng.uniform();
      if (u < cert.epsilon || residual_is_empty(x) || residual_is_empty(y)) {
        x = rng.categorical(cert.gamma);
        y = x;
        path.coalesced = true;
        path.coupling_time = k + 1;
      } else {
        x = rng.categorical(residual.row(x));
        y = rng.categorical(residual.row(y));
      }
    } else {
      x = rng.categorical(kernel.entries.row(x));
      y = rng.categorical(kernel.entries.row(y));
    }
    path.x_path.push_back(x);
    path.y_path.push_back(y);
  }
  return path;
}

CouplingReport coupled_run(const TransitionMatrix& kernel, const MinorisationCertificate& cert,
                           std::span<const double> p0, std::size_t steps, std::size_t replicates,
                           std::uint64_t seed, Execution exec)
{
  if (replicates == 0) throw Error("coupled_run needs at least one replicate");
  const std::size_t n = kernel.size();
  if (p0.size() != n) throw Error("initial distribution size does not match the kernel");
  if (cert.n0 != 1) throw Error("coupled simulation requires a one-step (N0 = 1) certificate");
  if (!cert.verify(kernel, exec)) throw Error("minorisation certificate does not hold for this kernel");

  std::vector<CoupledPath> paths(replicates);
  const auto count = static_cast<std::ptrdiff_t>(replicates);
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (std::ptrdiff_t r = 0; r < count; ++r) {
    RngStream rng(seed, static_cast<std::uint64_t>(r));
    paths[static_cast<std::size_t>(r)] = simulate_coupled_pair(rng, kernel, cert, p0, steps);
  }

  CouplingReport report;
  report.epsilon = cert.epsilon;
  report.n0 = cert.n0;
  report.replicates = replicates;
  report.seed = seed;
  report.steps = steps;
  report.coupling_times.reserve(replicates);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& p : paths) {
    report.coupling_times.push_back(p.coupling_time);
    if (!p.coalesced) ++report.uncoalesced;
    const auto t = static_cast<double>(p.coupling_time);
    sum += t;
    sum_sq += t * t;
  }
  const auto reps = static_cast<double>(replicates);
  report.mean_coupling_time = sum / reps;
  if (replicates > 1) {
    const double var = std::max(0.0, (sum_sq - reps * report.mean_coupling_time * report.mean_coupling_time) / (reps - 1.0));
    report.coupling_time_se = std::sqrt(var / reps);
  }

  report.tv_curve = deviation_tv_curve(kernel, p0, steps, exec);
  const bool doeblin = cert.covers_whole_space(n);
  std::vector<double> histogram(n);
  for (std::size_t k = 0; k <= steps; ++k) {
    std::size_t survived = 0;
    std::size_t mismatched = 0;
    std::fill(histogram.begin(), histogram.end(), 0.0);
    for (const auto& p : paths) {
      if (p.coupling_time > k) ++survived;
      if (p.x_path[k] != p.y_path[k]) ++mismatched;
      histogram[p.x_path[k]] += 1.0;
    }
    report.survival_curve.push_back(static_cast<double>(survived) / reps);
    report.mismatch_curve.push_back(static_cast<double>(mismatched) / reps);
    double l1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) l1 += std::abs(histogram[i] / reps - kernel.stationary[i]);
    report.empirical_tv_curve.push_back(0.5 * l1);

    if (doeblin) {
      report.bound_curve.push_back(doeblin_bound(cert, k));
    } else {
      double best = 1.0;
      for (std::size_t j = 1; j <= k; ++j) {
        std::size_t short_visits = 0;
        for (const auto& p : paths) {
          if (p.z_counts[k] < j) ++short_visits;
        }
        const double candidate =
            std::pow(1.0 - cert.epsilon, static_cast<double>(j / cert.n0)) +
            static_cast<double>(short_visits) / reps;
        best = std::min(best, candidate);
      }
      report.bound_curve.push_back(best);
    }
  }
  return report;
}

} // namespace mtmc
