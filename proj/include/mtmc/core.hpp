#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtmc {

inline constexpr const char* kVersion = "0.1.0";

/// Absolute tolerance for "equals 0" / "equals 1" checks on probabilities.
inline constexpr double kProbabilityTolerance = 1e-12;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A point of the model space. Coordinates are always finite.
class Point {
public:
  Point() = default;
  explicit Point(std::vector<double> coords);
  Point(std::initializer_list<double> coords);

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }

  friend bool operator==(const Point&, const Point&) = default;

  std::string to_string() const;

private:
  std::vector<double> coords_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

/// Seeded random stream. Identical (seed, stream) pairs yield identical draws
/// on every platform: the engine is std::mt19937_64 and all variates are
/// derived here rather than through the implementation-defined std
/// distributions.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller; consumes two uniforms.
  double normal();
  /// Index drawn proportionally to nonnegative weights; consumes one uniform.
  std::size_t categorical(std::span<const double> weights);

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

/// Unnormalized target density p~(x) = likelihood(x) * prior(x).
class TargetDensity {
public:
  using Fn = std::function<double(std::span<const double>)>;

  TargetDensity(std::size_t dim, Fn fn, double cost_per_eval = 1.0);

  /// Throws if the density is negative or not finite.
  double operator()(const Point& x) const;

  std::size_t dim() const { return dim_; }
  double cost_per_eval() const { return cost_; }

private:
  std::size_t dim_;
  Fn fn_;
  double cost_;
};

enum class ProposalKind { symmetric_random_walk, independent, general };

class Proposal {
public:
  using SampleFn = std::function<Point(RngStream&, const Point&)>;
  using DensityFn = std::function<double(const Point& from, const Point& to)>;

  Proposal(ProposalKind kind, SampleFn sample, DensityFn density);

  ProposalKind kind() const { return kind_; }
  Point sample(RngStream& rng, const Point& from) const { return sample_(rng, from); }
  /// Q(from, to).
  double density(const Point& from, const Point& to) const { return density_(from, to); }

  /// Isotropic Gaussian random walk with standard deviation `scale`.
  static Proposal gaussian_random_walk(std::size_t dim, double scale);
  /// Uniform independence proposal on an axis-aligned box.
  static Proposal uniform_independent(std::vector<double> lower, std::vector<double> upper);
  /// Independence proposal on the labels 1..n of a discrete space.
  static Proposal discrete_independent(std::vector<double> masses);
  /// Cyclic +-1 walk on the labels 1..n.
  static Proposal discrete_random_walk(std::size_t n);

private:
  ProposalKind kind_;
  SampleFn sample_;
  DensityFn density_;
};

/// Finite state space {1, ..., n}. State k is the one-dimensional point (k).
class DiscreteSpace {
public:
  explicit DiscreteSpace(std::size_t n);

  std::size_t size() const { return n_; }
  Point point(std::size_t label) const;
  /// Zero-based index of a point that lies exactly on a label.
  std::size_t index_of(const Point& x) const;
  std::vector<Point> points() const;

private:
  std::size_t n_;
};

/// Axis-aligned box used for grids, bins and bounded proposals.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const { return lower.size(); }
  bool contains(std::span<const double> x) const;
};

/// Tensor grid with `per_dim` evenly spaced nodes per axis, endpoints included.
std::vector<Point> tensor_grid(const Box& box, std::size_t per_dim);

/// min(1, (p_candidate / p_current) * (q_bwd / q_fwd)).
double accept_ratio_mh(double p_current, double p_candidate, double q_fwd, double q_bwd);

/// True with probability alpha; always consumes exactly one uniform.
bool bernoulli_accept(RngStream& rng, double alpha);

/// Normalizes nonnegative weights to sum to one. Throws on an all-zero vector.
std::vector<double> normalized(std::span<const double> weights);

namespace targets {

/// Unnormalized product Gaussian shape exp(-sum ((x_i - mean_i) / sd_i)^2 / 2).
TargetDensity gaussian_shape(std::vector<double> mean, std::vector<double> sd, double cost = 1.0);

/// Weighted sum of isotropic Gaussian bumps. `centers` holds one point per bump.
TargetDensity mixture_of_bumps(std::vector<std::vector<double>> centers, std::vector<double> widths,
                               std::vector<double> weights, double cost = 1.0);

/// Table over the labels 1..n of a discrete space; zero off the labels.
TargetDensity discrete_table(std::vector<double> masses, double cost = 1.0);

/// One-dimensional table on evenly spaced nodes, nearest-node lookup
/// (constant extrapolation outside [lower, upper]).
TargetDensity grid_table(double lower, double upper, std::vector<double> values, double cost = 1.0);

} // namespace targets

} // namespace mtmc
