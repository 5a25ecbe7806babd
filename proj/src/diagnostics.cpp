#include "mtmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "mtmc/io.hpp"

namespace mtmc {

namespace {

void require_probability_vector(std::span<const double> p, const char* what)
{
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(std::string(what) + " must be nonnegative and finite");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(std::string(what) + " must sum to 1");
}

double half_l1(std::span<const double> p, std::span<const double> q)
{
  double l1 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) l1 += std::abs(p[i] - q[i]);
  return std::clamp(0.5 * l1, 0.0, 1.0);
}

void require_binning(const Binning& bins)
{
  const std::size_t d = bins.box.dim();
  if (bins.counts.empty() || d == 0) throw Error("empty bins spec");
  if (bins.counts.size() != d || bins.box.upper.size() != d) throw Error("bins spec dimension mismatch");
  for (std::size_t i = 0; i < d; ++i) {
    if (bins.counts[i] == 0) throw Error("empty bins spec: axis " + std::to_string(i) + " has no cells");
    if (!(bins.box.upper[i] > bins.box.lower[i])) throw Error("bins spec box has an empty side");
  }
}

} // namespace

std::string to_string(TvScheme scheme)
{
  return scheme == TvScheme::exact_discrete ? "exact-discrete" : "histogram-binned";
}

std::size_t Binning::cell_count() const
{
  std::size_t total = 1;
  for (std::size_t c : counts) total *= c;
  return total;
}

std::size_t Binning::cell_of(std::span<const double> x) const
{
  std::size_t flat = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double lo = box.lower[i];
    const double hi = box.upper[i];
    if (x[i] < lo || x[i] > hi) return cell_count();
    auto cell = static_cast<std::size_t>((x[i] - lo) / (hi - lo) * static_cast<double>(counts[i]));
    cell = std::min(cell, counts[i] - 1);
    flat = flat * counts[i] + cell;
  }
  return flat;
}

TvEstimate tv_discrete(std::span<const double> p, std::span<const double> q)
{
  if (p.size() != q.size()) {
    throw Error("tv_discrete: dimension mismatch (" + std::to_string(p.size()) + " vs " + std::to_string(q.size()) +
                ")");
  }
  require_probability_vector(p, "tv_discrete: first distribution");
  require_probability_vector(q, "tv_discrete: second distribution");
  return {half_l1(p, q), TvScheme::exact_discrete, p.size(), 0};
}

TvEstimate tv_histogram_discrete(std::span<const Point> samples, const TargetDensity& target, std::size_t n)
{
  if (samples.empty()) throw Error("tv_histogram: no samples");
  const DiscreteSpace space(n);
  std::vector<double> masses(n);
  for (std::size_t k = 0; k < n; ++k) masses[k] = target(space.point(k + 1));
  const auto expected = normalized(masses);

  std::vector<double> empirical(n, 0.0);
  for (const Point& x : samples) empirical[space.index_of(x)] += 1.0;
  for (double& v : empirical) v /= static_cast<double>(samples.size());
  return {half_l1(empirical, expected), TvScheme::exact_discrete, n, samples.size()};
}

QuadratureRule gauss_legendre(std::size_t order)
{
  if (order == 0) throw Error("quadrature order must be at least 1");
  QuadratureRule rule{std::vector<double>(order), std::vector<double>(order)};
  const auto n = static_cast<double>(order);
  for (std::size_t i = 0; i < order; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const auto kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      derivative = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / derivative;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * derivative * derivative);
  }
  return rule;
}

TvEstimate tv_histogram(std::span<const Point> samples, const TargetDensity& target, const Binning& bins,
                        std::size_t quadrature_order)
{
  require_binning(bins);
  if (samples.empty()) throw Error("tv_histogram: no samples");
  const std::size_t d = bins.box.dim();
  if (target.dim() != d) throw Error("tv_histogram: bins and target differ in dimension");

  const std::size_t cells = bins.cell_count();
  const QuadratureRule rule = gauss_legendre(quadrature_order);
  const std::size_t q = rule.nodes.size();
  std::size_t per_cell = 1;
  for (std::size_t i = 0; i < d; ++i) per_cell *= q;

  std::vector<double> width(d);
  for (std::size_t i = 0; i < d; ++i) {
    width[i] = (bins.box.upper[i] - bins.box.lower[i]) / static_cast<double>(bins.counts[i]);
  }

  std::vector<double> mass(cells + 1, 0.0);
  std::vector<std::size_t> cell_idx(d);
  std::vector<std::size_t> node_idx(d);
  std::vector<double> x(d);
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t rest = c;
    for (std::size_t i = d; i-- > 0;) {
      cell_idx[i] = rest % bins.counts[i];
      rest /= bins.counts[i];
    }
    double total = 0.0;
    for (std::size_t t = 0; t < per_cell; ++t) {
      std::size_t r = t;
      double weight = 1.0;
      for (std::size_t i = d; i-- > 0;) {
        node_idx[i] = r % q;
        r /= q;
        const double lo = bins.box.lower[i] + static_cast<double>(cell_idx[i]) * width[i];
        x[i] = lo + 0.5 * width[i] * (rule.nodes[node_idx[i]] + 1.0);
        weight *= 0.5 * width[i] * rule.weights[node_idx[i]];
      }
      total += weight * target(Point(x));
    }
    mass[c] = total;
  }
  double box_mass = 0.0;
  for (std::size_t c = 0; c < cells; ++c) box_mass += mass[c];
  if (!(box_mass > 0.0)) throw Error("tv_histogram: target has no mass inside the bins");
  for (std::size_t c = 0; c < cells; ++c) mass[c] /= box_mass;

  std::vector<double> empirical(cells + 1, 0.0);
  for (const Point& s : samples) {
    if (s.dim() != d) throw Error("tv_histogram: sample dimension mismatch");
    empirical[bins.cell_of(s.coords())] += 1.0;
  }
  for (double& v : empirical) v /= static_cast<double>(samples.size());
  return {half_l1(empirical, mass), TvScheme::histogram_binned, cells + 1, samples.size()};
}

TransitionMatrix frozen_grid_kernel(std::span<const double> a)
{
  if (a.size() < 2) throw Error("grid kernel needs at least 2 grid states");
  for (double v : a) {
    if (!(v > 0.0)) throw Error("approximation vanishes on the grid; frozen kernel undefined");
  }
  const auto mass = normalized(a);
  const std::vector<double> uniform(a.size(), 1.0 / static_cast<double>(a.size()));
  return build_kernel(mass, uniform);
}

double approximation_gap(const ApproximationState& state, std::span<const double> target_values,
                         std::span<const Point> grid, Execution exec)
{
  if (target_values.size() != grid.size()) throw Error("target values do not match the grid");
  const auto a = evaluate_on_grid(state, grid, exec);
  return tv_discrete(normalized(a), normalized(target_values)).value;
}

std::vector<GenerationGap> generation_gaps(std::span<const ApproximationState> history, const TargetDensity& target,
                                           std::span<const Point> grid, Execution exec)
{
  if (history.size() < 2) throw Error("generation_gaps needs at least 2 snapshots");
  if (grid.size() < 2) throw Error("generation_gaps needs a grid of at least 2 points");
  const auto p = target_on_grid(target, grid, exec);
  const auto p_mass = normalized(p);

  std::vector<TransitionMatrix> kernels_by_gen;
  std::vector<double> deltas;
  kernels_by_gen.reserve(history.size());
  for (const auto& state : history) {
    const auto a = evaluate_on_grid(state, grid, exec);
    deltas.push_back(tv_discrete(normalized(a), p_mass).value);
    kernels_by_gen.push_back(frozen_grid_kernel(a));
  }

  std::vector<GenerationGap> gaps;
  gaps.reserve(history.size() - 1);
  for (std::size_t m = 0; m + 1 < history.size(); ++m) {
    const auto& now = kernels_by_gen[m].entries;
    const auto& next = kernels_by_gen[m + 1].entries;
    double worst = 0.0;
    for (std::size_t i = 0; i < now.rows(); ++i) worst = std::max(worst, half_l1(next.row(i), now.row(i)));
    gaps.push_back({history[m].generation(), deltas[m], worst});
  }
  return gaps;
}

std::vector<double> ergodic_average(std::span<const Point> trace, const std::function<double(const Point&)>& e,
                                    double bound)
{
  std::vector<double> means;
  means.reserve(trace.size());
  double sum = 0.0;
  for (std::size_t n = 0; n < trace.size(); ++n) {
    const double v = e(trace[n]);
    if (!std::isfinite(v) || std::abs(v) > bound) {
      throw Error("observable exceeds its declared bound at step " + std::to_string(n) + " (|e| = " +
                  io::format_double(std::abs(v)) + ")");
    }
    sum += v;
    means.push_back(sum / static_cast<double>(n + 1));
  }
  return means;
}

double batch_means_se(std::span<const double> values, std::size_t batches)
{
  if (batches < 2) throw Error("batch means need at least 2 batches");
  const std::size_t size = values.size() / batches;
  if (size == 0) throw Error("too few values for the requested number of batches");
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = 0; i < size; ++i) means[b] += values[b * size + i];
    means[b] /= static_cast<double>(size);
  }
  double grand = 0.0;
  for (double m : means) grand += m;
  grand /= static_cast<double>(batches);
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  const auto k = static_cast<double>(batches);
  return std::sqrt(ss / (k - 1.0) / k);
}

double detailed_balance_check(const Matrix& p, std::span<const double> a)
{
  if (p.rows() != p.cols() || p.rows() != a.size()) throw Error("detailed_balance_check: shapes disagree");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      worst = std::max(worst, std::abs(a[i] * p(i, j) - a[j] * p(j, i)));
    }
  }
  return worst;
}

void write_diagnostics_csv(std::ostream& os, std::span<const DiagnosticsRow> rows)
{
  auto field = [&](double v) {
    if (!std::isnan(v)) os << io::format_double(v);
  };
  os << "step,tv_histogram,delta_m,D_m,running_mean_e\n";
  for (const auto& r : rows) {
    os << r.step << ',';
    field(r.tv_histogram);
    os << ',';
    field(r.delta_m);
    os << ',';
    field(r.D_m);
    os << ',';
    field(r.running_mean_e);
    os << '\n';
  }
}

} // namespace mtmc
