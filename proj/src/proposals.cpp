#include "mtmc/core.hpp"

#include <cmath>
#include <numbers>

namespace mtmc {

Proposal::Proposal(ProposalKind kind, SampleFn sample, DensityFn density)
    : kind_(kind), sample_(std::move(sample)), density_(std::move(density))
{
}

Proposal Proposal::gaussian_random_walk(std::size_t dim, double scale)
{
  if (dim == 0) throw Error("random walk dimension must be at least 1");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error("random walk scale must be positive");
  const double norm = std::pow(2.0 * std::numbers::pi * scale * scale, -0.5 * static_cast<double>(dim));
  return Proposal(
      ProposalKind::symmetric_random_walk,
      [dim, scale](RngStream& rng, const Point& from) {
        std::vector<double> next(dim);
        for (std::size_t i = 0; i < dim; ++i) next[i] = from[i] + scale * rng.normal();
        return Point(std::move(next));
      },
      [scale, norm](const Point& from, const Point& to) {
        return norm * std::exp(-0.5 * squared_distance(from.coords(), to.coords()) / (scale * scale));
      });
}

Proposal Proposal::uniform_independent(std::vector<double> lower, std::vector<double> upper)
{
  if (lower.empty() || lower.size() != upper.size()) throw Error("uniform proposal: box size mismatch");
  double volume = 1.0;
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(upper[i] > lower[i])) throw Error("uniform proposal: empty box");
    volume *= upper[i] - lower[i];
  }
  Box box{lower, upper};
  return Proposal(
      ProposalKind::independent,
      [box](RngStream& rng, const Point&) {
        std::vector<double> next(box.dim());
        for (std::size_t i = 0; i < box.dim(); ++i) {
          next[i] = box.lower[i] + rng.uniform() * (box.upper[i] - box.lower[i]);
        }
        return Point(std::move(next));
      },
      [box, volume](const Point&, const Point& to) { return box.contains(to.coords()) ? 1.0 / volume : 0.0; });
}

Proposal Proposal::discrete_independent(std::vector<double> masses)
{
  const DiscreteSpace space(masses.size());
  for (double m : masses) {
    if (!(m > 0.0)) throw Error("independent proposal masses must be positive");
  }
  auto q = normalized(masses);
  return Proposal(
      ProposalKind::independent,
      [q, space](RngStream& rng, const Point&) { return space.point(rng.categorical(q) + 1); },
      [q, space](const Point&, const Point& to) { return q[space.index_of(to)]; });
}

Proposal Proposal::discrete_random_walk(std::size_t n)
{
  const DiscreteSpace space(n);
  return Proposal(
      ProposalKind::symmetric_random_walk,
      [space, n](RngStream& rng, const Point& from) {
        const std::size_t i = space.index_of(from);
        const std::size_t j = rng.uniform() < 0.5 ? (i + n - 1) % n : (i + 1) % n;
        return space.point(j + 1);
      },
      [space, n](const Point& from, const Point& to) {
        const std::size_t i = space.index_of(from);
        const std::size_t j = space.index_of(to);
        double q = 0.0;
        if (j == (i + n - 1) % n) q += 0.5;
        if (j == (i + 1) % n) q += 0.5;
        return q;
      });
}

} // namespace mtmc
