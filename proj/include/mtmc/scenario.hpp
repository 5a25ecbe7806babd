#pragma once

// Typed scenario model on top of ConfigDocument. Schema (all sections but
// [scenario], [space], [target] and [sampler] are optional):
//
//   [scenario]     name
//   [space]        kind = discrete | continuous; n (discrete); dim, lower, upper (continuous)
//   [target]       family = table | gaussian | mixture | grid; cost
//                  table: masses          gaussian: mean, sd
//                  mixture: centers (points separated by ';'), widths, weights
//                  grid: values (one-dimensional, nodes spread over [lower, upper])
//   [proposal]     kind = independent | random_walk; masses (discrete independent); scale
//   [sampler]      kind = mh | mtmc; steps; seed; initial; fallback; burn_in; thin;
//                  preload = none | exact | <archive csv path>; approx_cost
//   [diagnostics]  bins; grid; checkpoints; generations; observable; observable_bound
//   [spectrum]     initial; horizon
//   [coupling]     replicates; steps; n0
//
// Lists are comma separated. Every number is written in decimal.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mtmc/config.hpp"
#include "mtmc/core.hpp"
#include "mtmc/samplers.hpp"

namespace mtmc {

enum class SpaceKind { discrete, continuous };
enum class TargetFamily { table, gaussian, mixture, grid };
enum class ProposalFamily { independent, random_walk };
enum class PreloadMode { none, exact, archive };

struct Scenario {
  std::string name;

  SpaceKind space = SpaceKind::discrete;
  std::size_t n = 0;
  std::size_t dim = 1;
  std::vector<double> lower;
  std::vector<double> upper;

  TargetFamily family = TargetFamily::table;
  std::vector<double> masses;
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<std::vector<double>> centers;
  std::vector<double> widths;
  std::vector<double> weights;
  std::vector<double> values;
  double cost = 1.0;

  ProposalFamily proposal = ProposalFamily::independent;
  std::vector<double> proposal_masses;
  double scale = 1.0;

  SamplerKind sampler = SamplerKind::mtmc;
  std::size_t steps = 1000;
  std::uint64_t seed = 0;
  std::vector<double> initial;
  double fallback = 1.0;
  std::size_t burn_in = 0;
  std::size_t thin = 1;
  PreloadMode preload = PreloadMode::none;
  std::string preload_path;
  double approx_cost = 0.0;

  std::size_t bins = 40;
  std::size_t grid = 101;
  std::vector<std::size_t> checkpoints;
  std::vector<std::size_t> generations;
  /// none | identity | indicator:<label>
  std::string observable = "none";
  double observable_bound = 1.0;

  std::vector<double> spectrum_initial;
  std::size_t horizon = 50;

  std::size_t replicates = 1000;
  std::size_t coupling_steps = 50;
  std::size_t n0 = 1;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Validates and converts; throws ConfigError naming the offending field.
Scenario parse_scenario(const ConfigDocument& doc);
Scenario load_scenario(const std::string& path);

/// Canonical configuration text; parse_scenario(parse(serialize(s))) == s.
std::string serialize(const Scenario& s);

TargetDensity make_target(const Scenario& s);
Proposal make_proposal(const Scenario& s);
Point initial_point(const Scenario& s);

/// Grid used for delta(m), D_m and the spectral analysis: the labels of a
/// discrete space, or a tensor grid with `s.grid` nodes per axis.
std::vector<Point> diagnostic_grid(const Scenario& s);

/// Normalized target masses (discrete spaces only).
std::vector<double> target_masses(const Scenario& s);
/// Independence proposal masses on a discrete space (uniform when unset).
std::vector<double> proposal_masses(const Scenario& s);

/// Chain configuration for `kind`, including the preloaded archive.
ChainConfig chain_config(const Scenario& s, SamplerKind kind);

} // namespace mtmc
