#include "mtmc/samplers.hpp"

#include <exception>
#include <ostream>

#include "mtmc/io.hpp"

namespace mtmc {

std::string to_string(SamplerKind kind)
{
  return kind == SamplerKind::mh ? "mh" : "mtmc";
}

StepOutcome mh_step(RngStream& rng, const TargetDensity& target, const Proposal& proposal, const Point& current,
                    double p_current, EvaluationLedger& ledger)
{
  Point candidate = proposal.sample(rng, current);
  const double p_candidate = target(candidate);
  ++ledger.true_evals;
  ++ledger.iterations;
  ledger.work_units += target.cost_per_eval();

  const double q_fwd = proposal.density(current, candidate);
  const double q_bwd = proposal.density(candidate, current);
  const double alpha = accept_ratio_mh(p_current, p_candidate, q_fwd, q_bwd);
  if (bernoulli_accept(rng, alpha)) {
    return {std::move(candidate), p_candidate, true, alpha, p_candidate};
  }
  return {current, p_current, false, alpha, p_candidate};
}

StepOutcome mtmc_step(RngStream& rng, const TargetDensity& target, const Proposal& proposal,
                      ApproximationState& approx, const Point& current, double a_current, EvaluationLedger& ledger)
{
  if (a_current == 0.0) throw Error("zero approximation at current state " + current.to_string());

  Point candidate = proposal.sample(rng, current);
  // a_n(candidate) is one nearest-neighbour query; a_n(current) is the value
  // archived for the current point. Both count as approximation reads.
  const double a_candidate = approx.evaluate(candidate);
  ledger.approx_evals += 2;
  ++ledger.iterations;

  const double q_fwd = proposal.density(current, candidate);
  const double q_bwd = proposal.density(candidate, current);
  const double alpha = accept_ratio_mh(a_current, a_candidate, q_fwd, q_bwd);
  if (!bernoulli_accept(rng, alpha)) {
    return {current, a_current, false, alpha, a_candidate};
  }
  const double p_candidate = target(candidate);
  ++ledger.true_evals;
  ledger.work_units += target.cost_per_eval();
  approx.insert(candidate, p_candidate);
  return {std::move(candidate), p_candidate, true, alpha, a_candidate};
}

ChainRun run_chain(const ChainConfig& config, const TargetDensity& target, const Proposal& proposal)
{
  if (config.length < 1) throw Error("chain length must be at least 1");
  if (config.initial.dim() != target.dim()) throw Error("initial point dimension does not match the target");

  ChainRun run;
  run.kind = config.kind;
  run.trace.reserve(config.length);
  run.accepted.reserve(config.length);
  run.steps.reserve(config.length);

  RngStream rng(config.seed, config.stream);
  const double p0 = target(config.initial);
  ++run.ledger.true_evals;
  run.ledger.work_units += target.cost_per_eval();
  if (p0 == 0.0) {
    throw Error("initialization failed: target density is zero at start point " + config.initial.to_string());
  }

  Point current = config.initial;
  double current_value = p0;
  run.trace.push_back(current);
  run.accepted.push_back(false);

  if (config.kind == SamplerKind::mh) {
    run.steps.push_back({0.0, false, p0, p0, 0, run.ledger.true_evals});
    for (std::size_t n = 1; n < config.length; ++n) {
      auto out = mh_step(rng, target, proposal, current, current_value, run.ledger);
      run.steps.push_back({out.alpha, out.accepted, out.candidate_value, current_value, 0, run.ledger.true_evals});
      current = std::move(out.next);
      current_value = out.next_value;
      run.trace.push_back(current);
      run.accepted.push_back(out.accepted);
    }
    return run;
  }

  ApproximationState approx = config.preload ? *config.preload : ApproximationState(target.dim(), config.fallback);
  if (approx.dim() != target.dim()) throw Error("preloaded archive dimension does not match the target");
  // The start point is archived so that a_n(x^n) = p~(x^n) holds from step 0.
  approx.insert(current, p0);
  run.steps.push_back({0.0, false, p0, p0, approx.generation(), run.ledger.true_evals});

  for (std::size_t n = 1; n < config.length; ++n) {
    auto out = mtmc_step(rng, target, proposal, approx, current, current_value, run.ledger);
    run.steps.push_back(
        {out.alpha, out.accepted, out.candidate_value, current_value, approx.generation(), run.ledger.true_evals});
    current = std::move(out.next);
    current_value = out.next_value;
    run.trace.push_back(current);
    run.accepted.push_back(out.accepted);
  }
  run.ledger.work_units += static_cast<double>(run.ledger.approx_evals) * config.approx_cost;
  run.approximation = std::move(approx);
  return run;
}

std::vector<ChainRun> run_chains(std::span<const ChainConfig> configs, const TargetDensity& target,
                                 const Proposal& proposal, Execution exec)
{
  std::vector<ChainRun> runs(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  const auto n = static_cast<std::ptrdiff_t>(configs.size());
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      runs[k] = run_chain(configs[k], target, proposal);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return runs;
}

void write_trace_csv(std::ostream& os, const ChainRun& run, std::size_t burn_in, std::size_t thin)
{
  if (thin == 0) throw Error("thinning interval must be at least 1");
  const std::size_t dim = run.trace.empty() ? 0 : run.trace.front().dim();
  os << "step";
  for (std::size_t i = 0; i < dim; ++i) os << ",coord_" << i;
  os << ",accepted,alpha,generation,true_evals_cumulative\n";
  for (std::size_t n = burn_in; n < run.trace.size(); n += thin) {
    os << n;
    for (std::size_t i = 0; i < dim; ++i) os << ',' << io::format_double(run.trace[n][i]);
    const StepRecord& s = run.steps[n];
    os << ',' << (run.accepted[n] ? 1 : 0) << ',';
    if (n > 0) os << io::format_double(s.alpha);
    os << ',' << s.generation << ',' << s.true_evals << '\n';
  }
}

} // namespace mtmc
