#pragma once

// End-to-end experiments behind the command-line tool. Every function is
// deterministic in (scenario, seed); reports carry no timestamps.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "mtmc/coupling.hpp"
#include "mtmc/diagnostics.hpp"
#include "mtmc/samplers.hpp"
#include "mtmc/scenario.hpp"
#include "mtmc/spectral.hpp"

namespace mtmc {

inline constexpr int kSchemaVersion = 1;

/// "# scenario: ...", "# seed: ..." and "# version: ..." lines.
std::string csv_preamble(const Scenario& s);

ChainRun run_sampler(const Scenario& s, SamplerKind kind);

/// TV between the empirical law of trace[from, upto) and the target, with
/// from = min(burn_in, upto - 1): exact on discrete spaces, binned on the
/// scenario box otherwise.
TvEstimate trace_tv(const Scenario& s, const ChainRun& run, std::size_t upto);

/// One row per checkpoint. delta_m and D_m refer to the archive generation
/// reached at the checkpoint (MTMC only, NaN otherwise); running_mean_e is
/// NaN when no observable is declared.
std::vector<DiagnosticsRow> diagnostics_rows(const Scenario& s, const ChainRun& run);

/// delta(m) and D_m for each requested generation m that the run reached.
std::vector<GenerationGap> requested_generation_gaps(const Scenario& s, const ChainRun& run);

struct Comparison {
  ChainRun mh;
  ChainRun mtmc;
  TvEstimate tv_mh;
  TvEstimate tv_mtmc;
  /// MTMC true_evals / MH true_evals.
  double ratio = 0.0;
};

/// Both samplers on the same scenario and seed.
Comparison compare_samplers(const Scenario& s);

/// Metropolis kernel on the discrete space for the scenario's target and
/// proposal.
TransitionMatrix scenario_kernel(const Scenario& s);
/// spectrum.initial, or a point mass on the initial state.
std::vector<double> scenario_initial_distribution(const Scenario& s);

std::string run_json(const Scenario& s, const ChainRun& run);
std::string compare_json(const Scenario& s, const Comparison& c);
std::string spectrum_json(const Scenario& s);
std::string spectrum_csv(const Scenario& s);
std::string coupling_json(const Scenario& s, const CouplingReport& report, const MinorisationCertificate& cert);
std::string coupling_csv(const Scenario& s, const CouplingReport& report);

/// File writers; each returns the paths written, in a fixed order.
std::vector<std::filesystem::path> write_run(const Scenario& s, const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> write_compare(const Scenario& s, const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> write_spectrum(const Scenario& s, const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> write_coupling(const Scenario& s, const std::filesystem::path& out_dir);

} // namespace mtmc
