#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtmc/approx.hpp"
#include "mtmc/core.hpp"
#include "mtmc/kernels.hpp"

namespace mtmc {

enum class SamplerKind { mh, mtmc };

std::string to_string(SamplerKind kind);

/// Accounting of expensive target evaluations versus cheap approximation
/// queries.
struct EvaluationLedger {
  std::size_t true_evals = 0;
  std::size_t approx_evals = 0;
  std::size_t iterations = 0;
  double work_units = 0.0;
};

/// Per-step diagnostics. Entry 0 describes the initial point.
struct StepRecord {
  double alpha = 0.0;
  bool accepted = false;
  /// Density used for the candidate in the acceptance ratio (p~ for MH, a_n for MTMC).
  double candidate_value = 0.0;
  double current_value = 0.0;
  /// Approximation generation after the step (always 0 for MH).
  std::size_t generation = 0;
  std::size_t true_evals = 0;
};

struct ChainRun {
  SamplerKind kind = SamplerKind::mh;
  std::vector<Point> trace;
  std::vector<bool> accepted;
  EvaluationLedger ledger;
  std::vector<StepRecord> steps;
  /// Final approximation (MTMC only).
  std::optional<ApproximationState> approximation;
};

struct StepOutcome {
  Point next;
  /// p~(next) for MH; a_n(next), which equals p~(next), for MTMC.
  double next_value;
  bool accepted;
  double alpha;
  double candidate_value;
};

/// One Metropolis-Hastings step. The target is evaluated at the candidate.
/// Draw order: proposal, then one uniform.
StepOutcome mh_step(RngStream& rng, const TargetDensity& target, const Proposal& proposal, const Point& current,
                    double p_current, EvaluationLedger& ledger);

/// One Moving Target step. The acceptance ratio uses only the approximation;
/// the target is evaluated once, and the approximation updated, only when the
/// candidate is accepted. `a_current` is the archived value of `current`.
/// Draw order matches `mh_step`.
StepOutcome mtmc_step(RngStream& rng, const TargetDensity& target, const Proposal& proposal,
                      ApproximationState& approx, const Point& current, double a_current,
                      EvaluationLedger& ledger);

struct ChainConfig {
  SamplerKind kind = SamplerKind::mtmc;
  /// Number of points in the trace, including the initial point.
  std::size_t length = 1;
  Point initial;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  /// Starting archive for MTMC; an empty one is created otherwise.
  std::optional<ApproximationState> preload;
  double fallback = 1.0;
  /// Work units charged per approximation query.
  double approx_cost = 0.0;
};

/// Runs a chain of `config.length` points. Throws if p~(initial) = 0.
ChainRun run_chain(const ChainConfig& config, const TargetDensity& target, const Proposal& proposal);

/// Independent chains, one per config; each owns its own stream.
std::vector<ChainRun> run_chains(std::span<const ChainConfig> configs, const TargetDensity& target,
                                 const Proposal& proposal, Execution exec = Execution::serial);

/// Columns: step, coord_*, accepted, alpha, generation, true_evals_cumulative.
/// Step 0 carries an empty alpha.
void write_trace_csv(std::ostream& os, const ChainRun& run, std::size_t burn_in = 0, std::size_t thin = 1);

} // namespace mtmc
