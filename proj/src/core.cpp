#include "mtmc/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mtmc {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

void require_finite(const std::vector<double>& coords)
{
  for (double c : coords) {
    if (!std::isfinite(c)) {
      throw Error("point coordinate is not finite");
    }
  }
}

} // namespace

Point::Point(std::vector<double> coords) : coords_(std::move(coords))
{
  require_finite(coords_);
}

Point::Point(std::initializer_list<double> coords) : coords_(coords)
{
  require_finite(coords_);
}

std::string Point::to_string() const
{
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i > 0) os << ", ";
    os << coords_[i];
  }
  os << ')';
  return os.str();
}

double squared_distance(std::span<const double> a, std::span<const double> b)
{
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return d2;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ull)))
{
}

double RngStream::uniform()
{
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal()
{
  // 1 - u lies in (0, 1], so the logarithm is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t RngStream::categorical(std::span<const double> weights)
{
  if (weights.empty()) {
    throw Error("categorical draw from an empty weight vector");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error("categorical weights must be finite and nonnegative");
    }
    total += w;
  }
  if (total <= 0.0) {
    throw Error("categorical weights sum to zero");
  }
  const double target = uniform() * total;
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) last_positive = i;
    cumulative += weights[i];
    if (target < cumulative) {
      return i;
    }
  }
  return last_positive;
}

TargetDensity::TargetDensity(std::size_t dim, Fn fn, double cost_per_eval)
    : dim_(dim), fn_(std::move(fn)), cost_(cost_per_eval)
{
  if (dim_ == 0) throw Error("target dimension must be at least 1");
  if (!(cost_ >= 0.0)) throw Error("target cost per evaluation must be nonnegative");
}

double TargetDensity::operator()(const Point& x) const
{
  if (x.dim() != dim_) {
    throw Error("target evaluated at a point of dimension " + std::to_string(x.dim()) +
                ", expected " + std::to_string(dim_));
  }
  const double value = fn_(x.coords());
  if (!std::isfinite(value) || value < 0.0) {
    throw Error("target density is negative or not finite at " + x.to_string());
  }
  return value;
}

DiscreteSpace::DiscreteSpace(std::size_t n) : n_(n)
{
  if (n_ < 2) throw Error("a discrete space needs at least 2 states");
}

Point DiscreteSpace::point(std::size_t label) const
{
  if (label < 1 || label > n_) throw Error("state label out of range: " + std::to_string(label));
  return Point{static_cast<double>(label)};
}

std::size_t DiscreteSpace::index_of(const Point& x) const
{
  if (x.dim() != 1) throw Error("discrete states are one-dimensional");
  const double label = x[0];
  if (label != std::floor(label) || label < 1.0 || label > static_cast<double>(n_)) {
    throw Error("point " + x.to_string() + " is not a state label");
  }
  return static_cast<std::size_t>(label) - 1;
}

std::vector<Point> DiscreteSpace::points() const
{
  std::vector<Point> out;
  out.reserve(n_);
  for (std::size_t k = 1; k <= n_; ++k) out.push_back(point(k));
  return out;
}

bool Box::contains(std::span<const double> x) const
{
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  }
  return true;
}

std::vector<Point> tensor_grid(const Box& box, std::size_t per_dim)
{
  const std::size_t d = box.dim();
  if (d == 0 || box.upper.size() != d) throw Error("grid box is malformed");
  if (per_dim < 2) throw Error("grid needs at least 2 nodes per axis");
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= per_dim;

  std::vector<Point> grid;
  grid.reserve(total);
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> coords(d);
  for (std::size_t n = 0; n < total; ++n) {
    for (std::size_t i = 0; i < d; ++i) {
      const double t = static_cast<double>(idx[i]) / static_cast<double>(per_dim - 1);
      coords[i] = box.lower[i] + t * (box.upper[i] - box.lower[i]);
    }
    grid.emplace_back(coords);
    for (std::size_t i = d; i-- > 0;) {
      if (++idx[i] < per_dim) break;
      idx[i] = 0;
    }
  }
  return grid;
}

double accept_ratio_mh(double p_current, double p_candidate, double q_fwd, double q_bwd)
{
  if (!(p_current >= 0.0) || !(p_candidate >= 0.0) || !(q_fwd >= 0.0) || !(q_bwd >= 0.0)) {
    throw Error("acceptance ratio inputs must be nonnegative");
  }
  if (p_current == 0.0 || q_fwd == 0.0) {
    throw Error("undefined acceptance ratio");
  }
  return std::min(1.0, (p_candidate / p_current) * (q_bwd / q_fwd));
}

bool bernoulli_accept(RngStream& rng, double alpha)
{
  if (!(alpha >= -kProbabilityTolerance && alpha <= 1.0 + kProbabilityTolerance)) {
    throw Error("acceptance probability outside [0, 1]");
  }
  const double u = rng.uniform();
  return u < alpha;
}

std::vector<double> normalized(std::span<const double> weights)
{
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("weights must be finite and nonnegative");
    total += w;
  }
  if (total <= 0.0) throw Error("weights sum to zero");
  std::vector<double> out(weights.begin(), weights.end());
  for (double& w : out) w /= total;
  return out;
}

} // namespace mtmc
