#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtmc/core.hpp"
#include "mtmc/kernels.hpp"

namespace mtmc {

struct EvaluationRecord {
  Point point;
  double value;
  /// Insertion order within the archive.
  std::size_t index;
  /// Generation at which the record entered the archive.
  std::size_t generation;
};

/// Moving approximation a_n: nearest-neighbour constant interpolation over the
/// Voronoi cells of every point where the true target has been evaluated.
/// Values are unnormalized; only ratios of a_n are ever used.
///
/// Queries go through an incrementally built k-d tree. The brute-force scan
/// in `kernels::nearest_scan` answers the same queries and is kept as the
/// reference. Ties at cell boundaries resolve to the smallest insertion index.
class ApproximationState {
public:
  explicit ApproximationState(std::size_t dim, double fallback = 1.0);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::size_t generation() const { return generation_; }
  double fallback() const { return fallback_; }

  /// Value of the nearest archived point, or the fallback when empty.
  double evaluate(const Point& x) const;
  double evaluate(std::span<const double> x) const;

  /// Insertion index of the nearest archived point (k-d tree query).
  std::optional<std::size_t> nearest(std::span<const double> x) const;
  /// Same answer as `nearest`, by linear scan.
  std::optional<std::size_t> nearest_brute_force(std::span<const double> x,
                                                 Execution exec = Execution::serial) const;

  /// Archives p~(x) = value and advances the generation by one. Re-inserting
  /// an archived point with the same value adds no record; a different value
  /// throws (the target is deterministic).
  void insert(const Point& x, double value);

  EvaluationRecord record(std::size_t index) const;
  std::span<const double> coordinates() const { return coords_; }
  std::span<const double> values() const { return values_; }

  /// The state as it was at an earlier generation (records inserted at or
  /// before `generation`).
  ApproximationState snapshot(std::size_t generation) const;

private:
  struct Node {
    std::size_t record;
    std::size_t axis;
    std::size_t left = kNone;
    std::size_t right = kNone;
  };
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  void tree_insert(std::size_t record);
  void tree_search(std::size_t node, std::span<const double> x, kernels::NearestHit& best) const;

  std::size_t dim_;
  double fallback_;
  std::size_t generation_ = 0;
  std::vector<double> coords_;
  std::vector<double> values_;
  std::vector<std::size_t> inserted_at_;
  std::vector<Node> nodes_;
};

/// Value-semantic update: returns a copy of `state` with (x, value) archived.
ApproximationState update(ApproximationState state, const Point& x, double value);

/// Evaluates the approximation at every grid point.
std::vector<double> evaluate_on_grid(const ApproximationState& state, std::span<const Point> grid,
                                     Execution exec = Execution::serial);

/// Evaluates the true target at every grid point.
std::vector<double> target_on_grid(const TargetDensity& target, std::span<const Point> grid,
                                   Execution exec = Execution::serial);

/// max over the grid of |a(x) - p~(x)| after normalizing both to unit sum on
/// the grid.
double sup_error(const ApproximationState& state, const TargetDensity& target, std::span<const Point> grid,
                 Execution exec = Execution::serial);

/// max over the grid of |a_after(x) - a_before(x)|, both normalized on the grid.
double successive_difference(const ApproximationState& before, const ApproximationState& after,
                             std::span<const Point> grid, Execution exec = Execution::serial);

/// CSV archive: header `index,coord_0,...,coord_{d-1},value`, one row per record.
void write_archive_csv(std::ostream& os, const ApproximationState& state);
/// Reads an archive written by `write_archive_csv`. Lines starting with '#'
/// are ignored.
ApproximationState read_archive_csv(std::istream& is, double fallback = 1.0);

} // namespace mtmc
