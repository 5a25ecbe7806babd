#include "mtmc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "mtmc/core.hpp"

namespace mtmc {

namespace {

constexpr double kTieTolerance = 1e-9;

void require_distribution(std::span<const double> p, const char* what, bool strictly_positive)
{
  if (p.size() < 2) throw Error(std::string(what) + " needs at least 2 states");
  double total = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0 || (strictly_positive && v == 0.0)) {
      throw Error(std::string(what) + (strictly_positive ? " must be strictly positive (importance ratios undefined)"
                                                         : " must be nonnegative"));
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw Error(std::string(what) + " must sum to 1 (sum is " + std::to_string(total) + ")");
  }
}

void require_initial(std::span<const double> p0, std::size_t n)
{
  if (p0.size() != n) throw Error("initial distribution has " + std::to_string(p0.size()) + " states, expected " +
                                  std::to_string(n));
  double total = 0.0;
  for (double v : p0) {
    if (!(v >= 0.0)) throw Error("initial distribution must be nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error("initial distribution must sum to 1");
}

} // namespace

ImportanceProfile importance_profile(std::span<const double> a, std::span<const double> q)
{
  if (a.size() != q.size()) throw Error("importance profile: a and Q differ in size");
  ImportanceProfile profile;
  profile.weights.resize(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(a[k] > 0.0) || !(q[k] > 0.0)) throw Error("importance ratios need strictly positive a and Q");
    profile.weights[k] = a[k] / q[k];
  }
  profile.order.resize(a.size());
  std::iota(profile.order.begin(), profile.order.end(), std::size_t{0});
  std::stable_sort(profile.order.begin(), profile.order.end(),
                   [&](std::size_t i, std::size_t j) { return profile.weights[i] > profile.weights[j]; });
  return profile;
}

double TransitionMatrix::row_sum_error() const
{
  double worst = 0.0;
  for (std::size_t i = 0; i < entries.rows(); ++i) {
    const auto row = entries.row(i);
    worst = std::max(worst, std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0));
  }
  return worst;
}

TransitionMatrix build_kernel(std::span<const double> a, std::span<const double> q)
{
  require_distribution(a, "a_m", true);
  require_distribution(q, "Q", true);
  if (a.size() != q.size()) throw Error("build_kernel: a_m and Q differ in size");
  const std::size_t n = a.size();
  const ImportanceProfile profile = importance_profile(a, q);
  const auto& w = profile.weights;

  TransitionMatrix kernel{Matrix(n, n), std::vector<double>(a.begin(), a.end())};
  for (std::size_t i = 0; i < n; ++i) {
    double stay = q[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double ratio = w[j] / w[i];
      kernel.entries(i, j) = q[j] * std::min(1.0, ratio);
      stay += q[j] * std::max(0.0, 1.0 - ratio);
    }
    kernel.entries(i, i) = stay;
  }
  return kernel;
}

TransitionMatrix build_kernel(std::span<const double> a, const Matrix& proposal)
{
  require_distribution(a, "a_m", true);
  const std::size_t n = a.size();
  if (proposal.rows() != n || proposal.cols() != n) throw Error("build_kernel: proposal matrix shape mismatch");
  for (std::size_t i = 0; i < n; ++i) require_distribution(proposal.row(i), "proposal row", false);

  TransitionMatrix kernel{Matrix(n, n), std::vector<double>(a.begin(), a.end())};
  for (std::size_t i = 0; i < n; ++i) {
    double stay = proposal(i, i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || proposal(i, j) == 0.0) continue;
      const double ratio = (a[j] * proposal(j, i)) / (a[i] * proposal(i, j));
      kernel.entries(i, j) = proposal(i, j) * std::min(1.0, ratio);
      stay += proposal(i, j) * std::max(0.0, 1.0 - ratio);
    }
    kernel.entries(i, i) = stay;
  }
  return kernel;
}

std::vector<double> closed_form_eigenvalues(std::span<const double> a, std::span<const double> q)
{
  require_distribution(a, "a_m", true);
  require_distribution(q, "Q", true);
  if (a.size() != q.size()) throw Error("closed_form_eigenvalues: a_m and Q differ in size");
  const ImportanceProfile profile = importance_profile(a, q);
  const auto& o = profile.order;
  const std::size_t n = a.size();

  std::vector<double> lambdas(n);
  lambdas[0] = 1.0;
  for (std::size_t r = 0; r + 1 < n; ++r) {
    const double wk = profile.weights[o[r]];
    double sum = 0.0;
    for (std::size_t s = r; s < n; ++s) sum += q[o[s]] - a[o[s]] / wk;
    lambdas[r + 1] = sum;
  }
  return lambdas;
}

SpectralReport closed_form_spectrum(std::span<const double> a, std::span<const double> q)
{
  SpectralReport report;
  report.lambdas = closed_form_eigenvalues(a, q);
  report.profile = importance_profile(a, q);
  const auto& o = report.profile.order;
  const auto& w = report.profile.weights;
  const std::size_t n = a.size();

  for (std::size_t r = 0; r + 1 < n; ++r) {
    if (w[o[r]] - w[o[r + 1]] <= kTieTolerance * w[o[r]]) {
      throw Error("non-diagonalisable case out of scope: states " + std::to_string(o[r] + 1) + " and " +
                  std::to_string(o[r + 1] + 1) + " have tied importance ratios");
    }
  }

  report.vectors.assign(n, std::vector<double>(n, 0.0));
  report.vectors[0].assign(a.begin(), a.end());
  for (std::size_t r = 0; r + 1 < n; ++r) {
    auto& v = report.vectors[r + 1];
    double tail = 0.0;
    for (std::size_t s = r + 1; s < n; ++s) {
      v[o[s]] = a[o[s]];
      tail += a[o[s]];
    }
    v[o[r]] = -tail;
  }

  report.kernel = build_kernel(a, q);
  std::vector<double> product(n);
  for (std::size_t k = 0; k < n; ++k) {
    kernels::vec_mat(report.vectors[k], report.kernel.entries, product, Execution::serial);
    for (std::size_t i = 0; i < n; ++i) {
      report.max_residual =
          std::max(report.max_residual, std::abs(product[i] - report.lambdas[k] * report.vectors[k][i]));
    }
  }
  report.oracle_lambdas = numeric_eigenvalues(report.kernel.entries);
  return report;
}

std::vector<double> expansion_coefficients(const SpectralReport& report, std::span<const double> p0)
{
  const std::size_t n = report.lambdas.size();
  require_initial(p0, n);
  const auto& a = report.kernel.stationary;
  const auto& o = report.profile.order;

  std::vector<double> theta(n, 0.0);
  theta[0] = std::accumulate(p0.begin(), p0.end(), 0.0);

  // Forward substitution in importance order: at position s only v_1..v_{s+1}
  // are nonzero, v_{s+1} contributing -sum_{d>s} a_d and the others a_s.
  std::vector<double> tail(n, 0.0);
  for (std::size_t s = n - 1; s-- > 0;) tail[s] = tail[s + 1] + a[o[s + 1]];
  double partial = 0.0;
  for (std::size_t s = 0; s + 1 < n; ++s) {
    const std::size_t state = o[s];
    const double residual = p0[state] - theta[0] * a[state];
    theta[s + 1] = (a[state] * partial - residual) / tail[s];
    partial += theta[s + 1];
  }
  return theta;
}

double tv_bound_constant(const SpectralReport& report, std::span<const double> p0)
{
  const auto theta = expansion_coefficients(report, p0);
  double constant = 0.0;
  for (std::size_t k = 1; k < theta.size(); ++k) {
    double l1 = 0.0;
    for (double x : report.vectors[k]) l1 += std::abs(x);
    constant += std::abs(theta[k]) * 0.5 * l1;
  }
  return constant;
}

TvDecayCurves tv_decay_curves(const SpectralReport& report, std::span<const double> p0, std::size_t max_steps,
                              Execution exec)
{
  const std::size_t n = report.lambdas.size();
  const double constant = tv_bound_constant(report, p0);
  const double lambda1 = report.lambdas[1];
  const auto& a = report.kernel.stationary;

  std::vector<double> deviation(n);
  for (std::size_t i = 0; i < n; ++i) deviation[i] = p0[i] - a[i];
  std::vector<double> next(n);

  TvDecayCurves curves;
  curves.bound.reserve(max_steps + 1);
  curves.exact_tv.reserve(max_steps + 1);
  for (std::size_t step = 0; step <= max_steps; ++step) {
    double l1 = 0.0;
    for (double d : deviation) l1 += std::abs(d);
    curves.exact_tv.push_back(0.5 * l1);
    curves.bound.push_back(constant * std::pow(lambda1, static_cast<double>(step)));
    if (step < max_steps) {
      kernels::vec_mat(deviation, report.kernel.entries, next, exec);
      deviation.swap(next);
    }
  }
  return curves;
}

TvDecay tv_decay_bound(const SpectralReport& report, std::span<const double> p0, std::size_t steps)
{
  const auto curves = tv_decay_curves(report, p0, steps);
  return {curves.bound.back(), curves.exact_tv.back()};
}

std::vector<double> numeric_eigenvalues(const Matrix& m)
{
  if (m.rows() != m.cols() || m.rows() == 0) throw Error("numeric_eigenvalues: matrix must be square");
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> view(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                                        static_cast<Eigen::Index>(m.cols()));
  Eigen::EigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(view), false);
  if (solver.info() != Eigen::Success) throw Error("numeric eigensolver did not converge");
  const auto values = solver.eigenvalues();
  std::vector<double> out(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) out[static_cast<std::size_t>(i)] = values[i].real();
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

} // namespace mtmc
