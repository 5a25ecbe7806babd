#include "mtmc/approx.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "mtmc/io.hpp"

namespace mtmc {

ApproximationState::ApproximationState(std::size_t dim, double fallback) : dim_(dim), fallback_(fallback)
{
  if (dim_ == 0) throw Error("approximation dimension must be at least 1");
  if (!(fallback_ > 0.0) || !std::isfinite(fallback_)) throw Error("approximation fallback must be positive");
}

double ApproximationState::evaluate(const Point& x) const
{
  return evaluate(x.coords());
}

double ApproximationState::evaluate(std::span<const double> x) const
{
  const auto hit = nearest(x);
  return hit ? values_[*hit] : fallback_;
}

std::optional<std::size_t> ApproximationState::nearest(std::span<const double> x) const
{
  if (x.size() != dim_) throw Error("approximation queried with a point of the wrong dimension");
  if (nodes_.empty()) return std::nullopt;
  kernels::NearestHit best{std::numeric_limits<std::size_t>::max(), std::numeric_limits<double>::infinity()};
  tree_search(0, x, best);
  return best.index;
}

std::optional<std::size_t> ApproximationState::nearest_brute_force(std::span<const double> x, Execution exec) const
{
  if (x.size() != dim_) throw Error("approximation queried with a point of the wrong dimension");
  if (values_.empty()) return std::nullopt;
  return kernels::nearest_scan(coords_, dim_, x, exec).index;
}

void ApproximationState::insert(const Point& x, double value)
{
  if (x.dim() != dim_) throw Error("approximation updated with a point of the wrong dimension");
  if (!(value >= 0.0) || !std::isfinite(value)) throw Error("archived values must be finite and nonnegative");
  if (const auto hit = nearest(x.coords()); hit) {
    const auto existing = std::span<const double>(coords_).subspan(*hit * dim_, dim_);
    if (squared_distance(existing, x.coords()) == 0.0) {
      if (values_[*hit] != value) {
        throw Error("inconsistent re-evaluation at " + x.to_string());
      }
      ++generation_;
      return;
    }
  }
  ++generation_;
  coords_.insert(coords_.end(), x.coords().begin(), x.coords().end());
  values_.push_back(value);
  inserted_at_.push_back(generation_);
  tree_insert(values_.size() - 1);
}

EvaluationRecord ApproximationState::record(std::size_t index) const
{
  if (index >= values_.size()) throw Error("archive record index out of range");
  const auto c = std::span<const double>(coords_).subspan(index * dim_, dim_);
  return {Point(std::vector<double>(c.begin(), c.end())), values_[index], index, inserted_at_[index]};
}

ApproximationState ApproximationState::snapshot(std::size_t generation) const
{
  if (generation > generation_) throw Error("snapshot requested beyond the current generation");
  ApproximationState out(dim_, fallback_);
  for (std::size_t i = 0; i < values_.size() && inserted_at_[i] <= generation; ++i) {
    out.coords_.insert(out.coords_.end(), coords_.begin() + static_cast<std::ptrdiff_t>(i * dim_),
                       coords_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_));
    out.values_.push_back(values_[i]);
    out.inserted_at_.push_back(inserted_at_[i]);
    out.tree_insert(i);
  }
  out.generation_ = generation;
  return out;
}

void ApproximationState::tree_insert(std::size_t record)
{
  const auto point = std::span<const double>(coords_).subspan(record * dim_, dim_);
  if (nodes_.empty()) {
    nodes_.push_back({record, 0});
    return;
  }
  std::size_t node = 0;
  while (true) {
    const Node& n = nodes_[node];
    const double split = coords_[n.record * dim_ + n.axis];
    const bool go_left = point[n.axis] < split;
    const std::size_t child = go_left ? n.left : n.right;
    if (child == kNone) {
      const std::size_t axis = (n.axis + 1) % dim_;
      nodes_.push_back({record, axis});
      if (go_left) {
        nodes_[node].left = nodes_.size() - 1;
      } else {
        nodes_[node].right = nodes_.size() - 1;
      }
      return;
    }
    node = child;
  }
}

void ApproximationState::tree_search(std::size_t root, std::span<const double> x, kernels::NearestHit& best) const
{
  // Explicit stack: the tree is unbalanced and chain traces insert points in
  // strongly correlated order.
  struct Pending {
    std::size_t node;
    double bound;
  };
  std::vector<Pending> stack;
  stack.push_back({root, 0.0});
  while (!stack.empty()) {
    const Pending top = stack.back();
    stack.pop_back();
    // Equal bounds are still explored: the subtree may hold a tie with a
    // smaller insertion index.
    if (top.bound > best.distance2) continue;

    const Node& n = nodes_[top.node];
    const auto p = std::span<const double>(coords_).subspan(n.record * dim_, dim_);
    const double d2 = squared_distance(p, x);
    if (d2 < best.distance2 || (d2 == best.distance2 && n.record < best.index)) {
      best = {n.record, d2};
    }
    const double diff = x[n.axis] - p[n.axis];
    const std::size_t near = diff < 0.0 ? n.left : n.right;
    const std::size_t far = diff < 0.0 ? n.right : n.left;
    if (far != kNone) stack.push_back({far, diff * diff});
    if (near != kNone) stack.push_back({near, top.bound});
  }
}

ApproximationState update(ApproximationState state, const Point& x, double value)
{
  state.insert(x, value);
  return state;
}

std::vector<double> evaluate_on_grid(const ApproximationState& state, std::span<const Point> grid, Execution exec)
{
  std::vector<double> out(grid.size());
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = state.evaluate(grid[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::vector<double> target_on_grid(const TargetDensity& target, std::span<const Point> grid, Execution exec)
{
  std::vector<double> out(grid.size());
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = target(grid[static_cast<std::size_t>(i)]);
  }
  return out;
}

namespace {

double max_normalized_gap(const std::vector<double>& a, const std::vector<double>& b)
{
  const auto na = normalized(a);
  const auto nb = normalized(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < na.size(); ++i) worst = std::max(worst, std::abs(na[i] - nb[i]));
  return worst;
}

} // namespace

double sup_error(const ApproximationState& state, const TargetDensity& target, std::span<const Point> grid,
                 Execution exec)
{
  if (grid.empty()) throw Error("sup_error needs a nonempty grid");
  const auto approx = evaluate_on_grid(state, grid, exec);
  const auto truth = target_on_grid(target, grid, exec);
  try {
    return max_normalized_gap(approx, truth);
  } catch (const Error&) {
    throw Error("sup_error: grid carries no mass, normalization undefined");
  }
}

double successive_difference(const ApproximationState& before, const ApproximationState& after,
                             std::span<const Point> grid, Execution exec)
{
  if (grid.empty()) throw Error("successive_difference needs a nonempty grid");
  return max_normalized_gap(evaluate_on_grid(before, grid, exec), evaluate_on_grid(after, grid, exec));
}

void write_archive_csv(std::ostream& os, const ApproximationState& state)
{
  os << "index";
  for (std::size_t i = 0; i < state.dim(); ++i) os << ",coord_" << i;
  os << ",value\n";
  const auto coords = state.coordinates();
  const auto values = state.values();
  for (std::size_t r = 0; r < state.size(); ++r) {
    os << r;
    for (std::size_t i = 0; i < state.dim(); ++i) os << ',' << io::format_double(coords[r * state.dim() + i]);
    os << ',' << io::format_double(values[r]) << '\n';
  }
}

ApproximationState read_archive_csv(std::istream& is, double fallback)
{
  std::string line;
  std::size_t line_no = 0;
  std::optional<ApproximationState> state;
  std::size_t dim = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = io::split_csv_record(line);
    if (!state) {
      if (fields.size() < 3 || fields.front() != "index" || fields.back() != "value") {
        throw Error("archive CSV line " + std::to_string(line_no) + ": expected header index,coord_*,value");
      }
      dim = fields.size() - 2;
      state.emplace(dim, fallback);
      continue;
    }
    if (fields.size() != dim + 2) {
      throw Error("archive CSV line " + std::to_string(line_no) + ": expected " + std::to_string(dim + 2) +
                  " fields");
    }
    try {
      std::vector<double> coords(dim);
      for (std::size_t i = 0; i < dim; ++i) coords[i] = io::parse_double(fields[i + 1]);
      state->insert(Point(std::move(coords)), io::parse_double(fields.back()));
    } catch (const Error& e) {
      throw Error("archive CSV line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!state) throw Error("archive CSV has no header");
  return std::move(*state);
}

} // namespace mtmc
