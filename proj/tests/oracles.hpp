#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's numerical code paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

/// sup over all subsets B of |p(B) - q(B)|, by enumeration (n <= 20).
inline double tv_by_subsets(const Vec& p, const Vec& q)
{
  const std::size_t n = p.size();
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) diff += p[i] - q[i];
    }
    best = std::max(best, std::abs(diff));
  }
  return best;
}

/// Textbook Metropolis-Hastings kernel with independence proposal q:
/// off-diagonal q_j * min(1, a_j q_i / (a_i q_j)), diagonal = 1 - row mass.
inline Mat mh_kernel(const Vec& a, const Vec& q)
{
  const std::size_t n = a.size();
  Mat p(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      p[i][j] = q[j] * std::min(1.0, (a[j] * q[i]) / (a[i] * q[j]));
      off += p[i][j];
    }
    p[i][i] = 1.0 - off;
  }
  return p;
}

inline Vec step(const Vec& x, const Mat& p)
{
  Vec out(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) out[j] += x[i] * p[i][j];
  }
  return out;
}

inline Mat multiply(const Mat& a, const Mat& b)
{
  const std::size_t n = a.size();
  Mat out(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

inline Mat power(const Mat& p, std::size_t k)
{
  const std::size_t n = p.size();
  Mat out(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) out[i][i] = 1.0;
  for (std::size_t s = 0; s < k; ++s) out = multiply(out, p);
  return out;
}

inline double half_l1(const Vec& p, const Vec& q)
{
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

/// Exact TV of p0 P^N against a via the eigen-decomposition of P computed by
/// Eigen (independent of repeated products).
inline double exact_tv_by_eigen(const Mat& p, const Vec& p0, const Vec& a, std::size_t steps)
{
  const auto n = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = p[i][j];
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m.transpose());
  const Eigen::MatrixXcd vecs = solver.eigenvectors();
  const Eigen::VectorXcd vals = solver.eigenvalues();
  Eigen::VectorXcd x0(n);
  for (Eigen::Index i = 0; i < n; ++i) x0(i) = p0[static_cast<std::size_t>(i)];
  const Eigen::VectorXcd c = vecs.fullPivLu().solve(x0);
  Eigen::VectorXcd xn = Eigen::VectorXcd::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) xn += c(k) * std::pow(vals(k), static_cast<double>(steps)) * vecs.col(k);
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) s += std::abs(xn(i).real() - a[static_cast<std::size_t>(i)]);
  return 0.5 * s;
}

/// Eigenvalues (real parts) of a dense matrix, descending.
inline Vec eigenvalues(const Mat& p)
{
  const auto n = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = p[i][j];
  }
  const Eigen::VectorXcd vals = m.eigenvalues();
  Vec out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(vals(i).real());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

/// Index of the nearest point (ties to the smaller index), by linear scan.
inline std::size_t nearest(const std::vector<Vec>& points, const Vec& q)
{
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    double d = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) d += (points[i][k] - q[k]) * (points[i][k] - q[k]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

/// Random strictly positive distribution on n states with a floor on each mass.
inline Vec random_distribution(std::mt19937_64& gen, std::size_t n, double floor = 0.02)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec v(n);
  double s = 0.0;
  for (auto& x : v) {
    x = floor + u(gen);
    s += x;
  }
  for (auto& x : v) x /= s;
  return v;
}

/// Random distribution with dyadic masses k / 2^20 (exact arithmetic).
inline Vec dyadic_distribution(std::mt19937_64& gen, std::size_t n)
{
  constexpr std::uint64_t total = 1u << 20;
  std::vector<std::uint64_t> cuts{0, total};
  std::uniform_int_distribution<std::uint64_t> u(0, total);
  for (std::size_t i = 0; i + 1 < n; ++i) cuts.push_back(u(gen));
  std::sort(cuts.begin(), cuts.end());
  Vec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(cuts[i + 1] - cuts[i]) / static_cast<double>(total);
  return v;
}

/// Composite Simpson integral of f over [lo, hi] with `panels` (even) panels.
template <class F>
double simpson(F f, double lo, double hi, int panels = 4000)
{
  const double h = (hi - lo) / panels;
  double s = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) s += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

} // namespace oracle
