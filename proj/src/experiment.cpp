#include "mtmc/experiment.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mtmc/approx.hpp"
#include "mtmc/io.hpp"

namespace mtmc {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Json header(const Scenario& s, const char* kind)
{
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  j["scenario"] = s.name;
  j["seed"] = s.seed;
  j["version"] = std::string("mtmc ") + kVersion;
  return j;
}

std::string dump(const Json& j)
{
  return j.dump(2) + "\n";
}

Json ledger_json(const ChainRun& run)
{
  std::size_t accepts = 0;
  for (std::size_t n = 1; n < run.accepted.size(); ++n) accepts += run.accepted[n] ? 1 : 0;
  Json j;
  j["sampler"] = to_string(run.kind);
  j["iterations"] = run.ledger.iterations;
  j["accepts"] = accepts;
  j["acceptance_rate"] = run.ledger.iterations > 0
                             ? static_cast<double>(accepts) / static_cast<double>(run.ledger.iterations)
                             : 0.0;
  j["true_evals"] = run.ledger.true_evals;
  j["approx_evals"] = run.ledger.approx_evals;
  j["work_units"] = run.ledger.work_units;
  return j;
}

Json tv_json(const TvEstimate& tv)
{
  Json j;
  j["value"] = tv.value;
  j["scheme"] = to_string(tv.scheme);
  j["bins"] = tv.bins;
  j["samples"] = tv.samples;
  return j;
}

std::function<double(const Point&)> observable(const Scenario& s)
{
  if (s.observable == "identity") return [](const Point& x) { return x[0]; };
  const auto label = static_cast<double>(std::stoul(s.observable.substr(10)));
  return [label](const Point& x) { return x[0] == label ? 1.0 : 0.0; };
}

std::filesystem::path output_path(const Scenario& s, const std::filesystem::path& dir, const std::string& suffix)
{
  return dir / (s.name + "_" + suffix);
}

void write_file(const std::filesystem::path& path, const std::string& contents)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << contents;
  if (!out) throw Error("failed writing " + path.string());
}

void require_discrete(const Scenario& s, const char* what)
{
  if (s.space != SpaceKind::discrete) {
    throw ConfigError("<scenario " + s.name + ">", 0, "space.kind", std::string(what) + " needs a discrete space");
  }
}

GenerationGap gap_between(const ApproximationState& archive, std::size_t m, std::span<const Point> grid,
                          const TargetDensity& target)
{
  const std::vector<ApproximationState> history{archive.snapshot(m), archive.snapshot(m + 1)};
  auto gaps = generation_gaps(history, target, grid);
  gaps.front().m = m;
  return gaps.front();
}

} // namespace

std::string csv_preamble(const Scenario& s)
{
  return "# scenario: " + s.name + "\n# seed: " + std::to_string(s.seed) + "\n# version: mtmc " + kVersion + "\n";
}

ChainRun run_sampler(const Scenario& s, SamplerKind kind)
{
  return run_chain(chain_config(s, kind), make_target(s), make_proposal(s));
}

TvEstimate trace_tv(const Scenario& s, const ChainRun& run, std::size_t upto)
{
  upto = std::min(upto, run.trace.size());
  if (upto == 0) throw Error("trace_tv: empty trace");
  const std::size_t from = std::min(s.burn_in, upto - 1);
  const std::span<const Point> slice(run.trace.data() + from, upto - from);
  const auto target = make_target(s);
  if (s.space == SpaceKind::discrete) return tv_histogram_discrete(slice, target, s.n);
  Binning bins{Box{s.lower, s.upper}, std::vector<std::size_t>(s.dim, s.bins)};
  return tv_histogram(slice, target, bins);
}

std::vector<DiagnosticsRow> diagnostics_rows(const Scenario& s, const ChainRun& run)
{
  const auto target = make_target(s);
  const auto grid = diagnostic_grid(s);
  std::vector<double> means;
  if (s.observable != "none") means = ergodic_average(run.trace, observable(s), s.observable_bound);
  std::vector<double> p_grid;
  if (run.approximation) p_grid = target_on_grid(target, grid);

  std::vector<DiagnosticsRow> rows;
  for (std::size_t checkpoint : s.checkpoints) {
    if (checkpoint > run.trace.size()) break;
    DiagnosticsRow row;
    row.step = checkpoint;
    row.tv_histogram = trace_tv(s, run, checkpoint).value;
    row.delta_m = kNaN;
    row.D_m = kNaN;
    if (run.approximation) {
      const std::size_t m = run.steps[checkpoint - 1].generation;
      const auto& archive = *run.approximation;
      row.delta_m = approximation_gap(archive.snapshot(m), p_grid, grid);
      if (m + 1 <= archive.generation()) row.D_m = gap_between(archive, m, grid, target).D_m;
    }
    row.running_mean_e = means.empty() ? kNaN : means[checkpoint - 1];
    rows.push_back(row);
  }
  return rows;
}

std::vector<GenerationGap> requested_generation_gaps(const Scenario& s, const ChainRun& run)
{
  std::vector<GenerationGap> gaps;
  if (!run.approximation) return gaps;
  const auto target = make_target(s);
  const auto grid = diagnostic_grid(s);
  const auto& archive = *run.approximation;
  for (std::size_t m : s.generations) {
    if (m + 1 > archive.generation()) break;
    gaps.push_back(gap_between(archive, m, grid, target));
  }
  return gaps;
}

Comparison compare_samplers(const Scenario& s)
{
  Comparison c;
  c.mh = run_sampler(s, SamplerKind::mh);
  c.mtmc = run_sampler(s, SamplerKind::mtmc);
  c.tv_mh = trace_tv(s, c.mh, c.mh.trace.size());
  c.tv_mtmc = trace_tv(s, c.mtmc, c.mtmc.trace.size());
  c.ratio = static_cast<double>(c.mtmc.ledger.true_evals) / static_cast<double>(c.mh.ledger.true_evals);
  return c;
}

TransitionMatrix scenario_kernel(const Scenario& s)
{
  require_discrete(s, "a transition matrix");
  const auto a = target_masses(s);
  if (s.proposal == ProposalFamily::independent) return build_kernel(a, proposal_masses(s));
  const auto proposal = make_proposal(s);
  const DiscreteSpace space(s.n);
  Matrix q(s.n, s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    for (std::size_t j = 0; j < s.n; ++j) q(i, j) = proposal.density(space.point(i + 1), space.point(j + 1));
  }
  return build_kernel(a, q);
}

std::vector<double> scenario_initial_distribution(const Scenario& s)
{
  require_discrete(s, "an initial distribution");
  if (!s.spectrum_initial.empty()) return s.spectrum_initial;
  std::vector<double> p0(s.n, 0.0);
  p0[DiscreteSpace(s.n).index_of(initial_point(s))] = 1.0;
  return p0;
}

std::string run_json(const Scenario& s, const ChainRun& run)
{
  Json j = header(s, "run");
  j["ledger"] = ledger_json(run);
  j["final_tv"] = tv_json(trace_tv(s, run, run.trace.size()));
  if (run.approximation) {
    j["archive_size"] = run.approximation->size();
    j["final_generation"] = run.approximation->generation();
    Json gaps = Json::array();
    for (const auto& g : requested_generation_gaps(s, run)) gaps.push_back({{"m", g.m}, {"delta_m", g.delta_m}, {"D_m", g.D_m}});
    j["generation_gaps"] = gaps;
  }
  return dump(j);
}

std::string compare_json(const Scenario& s, const Comparison& c)
{
  Json j = header(s, "compare");
  Json samplers = Json::array();
  for (const auto* pair : {&c.mh, &c.mtmc}) {
    Json entry = ledger_json(*pair);
    entry["final_tv"] = tv_json(pair == &c.mh ? c.tv_mh : c.tv_mtmc);
    samplers.push_back(entry);
  }
  j["samplers"] = samplers;
  j["true_evals_ratio"] = c.ratio;
  return dump(j);
}

std::string spectrum_json(const Scenario& s)
{
  require_discrete(s, "spectral analysis");
  if (s.proposal != ProposalFamily::independent) {
    throw ConfigError("<scenario " + s.name + ">", 0, "proposal.kind", "spectral analysis needs an independence proposal");
  }
  const auto a = target_masses(s);
  const auto q = proposal_masses(s);
  const auto p0 = scenario_initial_distribution(s);
  const SpectralReport report = closed_form_spectrum(a, q);
  const auto curves = tv_decay_curves(report, p0, s.horizon);

  Json j = header(s, "spectrum");
  j["states"] = s.n;
  j["a"] = a;
  j["q"] = q;
  std::vector<std::size_t> order;
  for (std::size_t k : report.profile.order) order.push_back(k + 1);
  j["importance_order"] = order;
  j["importance_ratios"] = report.profile.weights;
  j["lambdas"] = report.lambdas;
  j["oracle_lambdas"] = report.oracle_lambdas;
  j["max_residual"] = report.max_residual;
  j["initial"] = p0;
  j["theta"] = expansion_coefficients(report, p0);
  j["bound_constant"] = tv_bound_constant(report, p0);
  j["horizon"] = s.horizon;
  j["bound_curve"] = curves.bound;
  j["exact_tv_curve"] = curves.exact_tv;
  return dump(j);
}

std::string spectrum_csv(const Scenario& s)
{
  const auto report = closed_form_spectrum(target_masses(s), proposal_masses(s));
  const auto curves = tv_decay_curves(report, scenario_initial_distribution(s), s.horizon);
  std::string out = csv_preamble(s) + "N,bound,exact_tv\n";
  for (std::size_t k = 0; k < curves.bound.size(); ++k) {
    out += std::to_string(k) + "," + io::format_double(curves.bound[k]) + "," + io::format_double(curves.exact_tv[k]) +
           "\n";
  }
  return out;
}

std::string coupling_json(const Scenario& s, const CouplingReport& report, const MinorisationCertificate& cert)
{
  Json j = header(s, "coupling");
  j["epsilon"] = cert.epsilon;
  j["N0"] = cert.n0;
  j["gamma"] = cert.gamma;
  j["expected_coupling_time"] = 1.0 / cert.epsilon;
  j["mean_coupling_time"] = report.mean_coupling_time;
  j["coupling_time_se"] = report.coupling_time_se;
  j["uncoalesced"] = report.uncoalesced;
  j["replicates"] = report.replicates;
  j["steps"] = report.steps;
  j["tv_curve"] = report.tv_curve;
  j["bound_curve"] = report.bound_curve;
  j["survival_curve"] = report.survival_curve;
  j["empirical_tv_curve"] = report.empirical_tv_curve;
  return dump(j);
}

std::string coupling_csv(const Scenario& s, const CouplingReport& report)
{
  std::string out = csv_preamble(s) + "N,tv_exact,bound,survival,mismatch,tv_empirical\n";
  for (std::size_t k = 0; k < report.tv_curve.size(); ++k) {
    out += std::to_string(k) + "," + io::format_double(report.tv_curve[k]) + "," +
           io::format_double(report.bound_curve[k]) + "," + io::format_double(report.survival_curve[k]) + "," +
           io::format_double(report.mismatch_curve[k]) + "," + io::format_double(report.empirical_tv_curve[k]) + "\n";
  }
  return out;
}

std::vector<std::filesystem::path> write_run(const Scenario& s, const std::filesystem::path& out_dir)
{
  const ChainRun run = run_sampler(s, s.sampler);
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;

  std::ostringstream trace;
  trace << csv_preamble(s);
  write_trace_csv(trace, run, s.burn_in, s.thin);
  written.push_back(output_path(s, out_dir, "trace.csv"));
  write_file(written.back(), trace.str());

  std::ostringstream diag;
  diag << csv_preamble(s);
  const auto rows = diagnostics_rows(s, run);
  write_diagnostics_csv(diag, rows);
  written.push_back(output_path(s, out_dir, "diagnostics.csv"));
  write_file(written.back(), diag.str());

  if (run.approximation) {
    std::ostringstream archive;
    archive << csv_preamble(s);
    write_archive_csv(archive, *run.approximation);
    written.push_back(output_path(s, out_dir, "archive.csv"));
    write_file(written.back(), archive.str());
  }

  written.push_back(output_path(s, out_dir, "run.json"));
  write_file(written.back(), run_json(s, run));
  return written;
}

std::vector<std::filesystem::path> write_compare(const Scenario& s, const std::filesystem::path& out_dir)
{
  const Comparison c = compare_samplers(s);
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written{output_path(s, out_dir, "compare.json")};
  write_file(written.back(), compare_json(s, c));
  return written;
}

std::vector<std::filesystem::path> write_spectrum(const Scenario& s, const std::filesystem::path& out_dir)
{
  const std::string json = spectrum_json(s);
  const std::string csv = spectrum_csv(s);
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written{output_path(s, out_dir, "spectrum.json"),
                                             output_path(s, out_dir, "spectrum.csv")};
  write_file(written[0], json);
  write_file(written[1], csv);
  return written;
}

std::vector<std::filesystem::path> write_coupling(const Scenario& s, const std::filesystem::path& out_dir)
{
  const auto kernel = scenario_kernel(s);
  const auto cert = doeblin_epsilon(kernel, s.n0);
  const auto p0 = scenario_initial_distribution(s);
  CouplingReport report;
  if (cert.n0 == 1) {
    report = coupled_run(kernel, cert, p0, s.coupling_steps, s.replicates, s.seed, Execution::parallel);
  } else {
    throw ConfigError("<scenario " + s.name + ">", 0, "coupling.n0", "coupled simulation needs N0 = 1");
  }
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written{output_path(s, out_dir, "coupling.json"),
                                             output_path(s, out_dir, "coupling.csv")};
  write_file(written[0], coupling_json(s, report, cert));
  write_file(written[1], coupling_csv(s, report));
  return written;
}

} // namespace mtmc
