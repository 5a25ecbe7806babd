#include "mtmc/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "mtmc/approx.hpp"
#include "mtmc/io.hpp"

namespace mtmc {

namespace {

const std::map<std::string, std::set<std::string>>& known_fields()
{
  static const std::map<std::string, std::set<std::string>> fields{
      {"scenario", {"name"}},
      {"space", {"kind", "n", "dim", "lower", "upper"}},
      {"target", {"family", "masses", "mean", "sd", "centers", "widths", "weights", "values", "cost"}},
      {"proposal", {"kind", "masses", "scale"}},
      {"sampler", {"kind", "steps", "seed", "initial", "fallback", "burn_in", "thin", "preload", "approx_cost"}},
      {"diagnostics", {"bins", "grid", "checkpoints", "generations", "observable", "observable_bound"}},
      {"spectrum", {"initial", "horizon"}},
      {"coupling", {"replicates", "steps", "n0"}},
  };
  return fields;
}

std::string trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view text, char sep)
{
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

class Reader {
public:
  explicit Reader(const ConfigDocument& doc) : doc_(doc) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& message) const
  {
    const ConfigEntry* e = doc_.find(section, key);
    std::size_t line = e != nullptr ? e->line : 0;
    if (line == 0) {
      const ConfigSection* s = doc_.section(section);
      if (s != nullptr) line = s->line;
    }
    throw ConfigError(doc_.source(), line, section + "." + key, message);
  }

  bool has(const std::string& section, const std::string& key) const { return doc_.find(section, key) != nullptr; }

  std::string text(const std::string& section, const std::string& key) const
  {
    const ConfigEntry* e = doc_.find(section, key);
    if (e == nullptr) fail(section, key, "required field is missing");
    if (e->value.empty()) fail(section, key, "value is empty");
    return e->value;
  }

  double number(const std::string& section, const std::string& key) const
  {
    return to_double(section, key, text(section, key));
  }

  std::size_t count(const std::string& section, const std::string& key) const
  {
    return to_count(section, key, text(section, key));
  }

  std::uint64_t seed(const std::string& section, const std::string& key) const
  {
    const std::string v = text(section, key);
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) fail(section, key, "expected a nonnegative integer");
    return out;
  }

  std::vector<double> numbers(const std::string& section, const std::string& key) const
  {
    std::vector<double> out;
    for (const auto& part : split(text(section, key), ',')) out.push_back(to_double(section, key, part));
    return out;
  }

  std::vector<std::size_t> counts(const std::string& section, const std::string& key) const
  {
    std::vector<std::size_t> out;
    for (const auto& part : split(text(section, key), ',')) out.push_back(to_count(section, key, part));
    return out;
  }

  std::vector<std::vector<double>> points(const std::string& section, const std::string& key) const
  {
    std::vector<std::vector<double>> out;
    for (const auto& item : split(text(section, key), ';')) {
      std::vector<double> coords;
      for (const auto& part : split(item, ',')) coords.push_back(to_double(section, key, part));
      out.push_back(std::move(coords));
    }
    return out;
  }

  void check_unknown() const
  {
    const auto& fields = known_fields();
    for (const auto& s : doc_.sections()) {
      const auto it = fields.find(s.name);
      if (it == fields.end()) throw ConfigError(doc_.source(), s.line, s.name, "unknown section");
      for (const auto& e : s.entries) {
        if (!it->second.contains(e.key)) throw ConfigError(doc_.source(), e.line, s.name + "." + e.key, "unknown field");
      }
    }
  }

private:
  double to_double(const std::string& section, const std::string& key, const std::string& v) const
  {
    try {
      return io::parse_double(v);
    } catch (const Error&) {
      fail(section, key, "expected a decimal number, got '" + v + "'");
    }
  }

  std::size_t to_count(const std::string& section, const std::string& key, const std::string& v) const
  {
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      fail(section, key, "expected a nonnegative integer, got '" + v + "'");
    }
    return out;
  }

  const ConfigDocument& doc_;
};

template <class Enum>
Enum choose(const Reader& r, const std::string& section, const std::string& key,
            std::initializer_list<std::pair<const char*, Enum>> options)
{
  const std::string v = r.text(section, key);
  std::string allowed;
  for (const auto& [label, value] : options) {
    if (v == label) return value;
    allowed += allowed.empty() ? label : std::string(" | ") + label;
  }
  r.fail(section, key, "unknown value '" + v + "' (expected " + allowed + ")");
}

std::string join(std::span<const double> values)
{
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += io::format_double(values[i]);
  }
  return out;
}

std::string join(std::span<const std::size_t> values)
{
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(values[i]);
  }
  return out;
}

void require_positive(const Reader& r, const std::string& section, const std::string& key,
                      std::span<const double> values)
{
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      r.fail(section, key, "entry " + std::to_string(i + 1) + " must be positive, got " + io::format_double(values[i]));
    }
  }
}

void require_size(const Reader& r, const std::string& section, const std::string& key, std::size_t got,
                  std::size_t expected)
{
  if (got != expected) {
    r.fail(section, key, "expected " + std::to_string(expected) + " entries, got " + std::to_string(got));
  }
}

bool valid_scenario_name(const std::string& name)
{
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
           c == '.';
  });
}

} // namespace

Scenario parse_scenario(const ConfigDocument& doc)
{
  const Reader r(doc);
  r.check_unknown();
  Scenario s;

  s.name = r.text("scenario", "name");
  if (!valid_scenario_name(s.name)) r.fail("scenario", "name", "use letters, digits, '-', '_' or '.'");

  s.space = choose<SpaceKind>(r, "space", "kind", {{"discrete", SpaceKind::discrete}, {"continuous", SpaceKind::continuous}});
  if (s.space == SpaceKind::discrete) {
    s.n = r.count("space", "n");
    if (s.n < 2) r.fail("space", "n", "a discrete space needs at least 2 states");
    s.dim = 1;
  } else {
    s.dim = r.count("space", "dim");
    if (s.dim == 0) r.fail("space", "dim", "dimension must be at least 1");
    s.lower = r.numbers("space", "lower");
    s.upper = r.numbers("space", "upper");
    require_size(r, "space", "lower", s.lower.size(), s.dim);
    require_size(r, "space", "upper", s.upper.size(), s.dim);
    for (std::size_t i = 0; i < s.dim; ++i) {
      if (!(s.upper[i] > s.lower[i])) r.fail("space", "upper", "upper must exceed lower on every axis");
    }
  }

  s.family = choose<TargetFamily>(r, "target", "family",
                                  {{"table", TargetFamily::table},
                                   {"gaussian", TargetFamily::gaussian},
                                   {"mixture", TargetFamily::mixture},
                                   {"grid", TargetFamily::grid}});
  if (r.has("target", "cost")) {
    s.cost = r.number("target", "cost");
    if (!(s.cost >= 0.0)) r.fail("target", "cost", "cost must be nonnegative");
  }
  if (r.has("target", "masses")) s.masses = r.numbers("target", "masses");
  if (r.has("target", "mean")) s.mean = r.numbers("target", "mean");
  if (r.has("target", "sd")) s.sd = r.numbers("target", "sd");
  if (r.has("target", "centers")) s.centers = r.points("target", "centers");
  if (r.has("target", "widths")) s.widths = r.numbers("target", "widths");
  if (r.has("target", "weights")) s.weights = r.numbers("target", "weights");
  if (r.has("target", "values")) s.values = r.numbers("target", "values");

  switch (s.family) {
  case TargetFamily::table:
    if (s.space != SpaceKind::discrete) r.fail("target", "family", "a table target needs a discrete space");
    if (!r.has("target", "masses")) r.fail("target", "masses", "required field is missing");
    require_size(r, "target", "masses", s.masses.size(), s.n);
    require_positive(r, "target", "masses", s.masses);
    break;
  case TargetFamily::gaussian:
    if (!r.has("target", "mean")) r.fail("target", "mean", "required field is missing");
    if (!r.has("target", "sd")) r.fail("target", "sd", "required field is missing");
    require_size(r, "target", "mean", s.mean.size(), s.dim);
    require_size(r, "target", "sd", s.sd.size(), s.dim);
    require_positive(r, "target", "sd", s.sd);
    break;
  case TargetFamily::mixture:
    if (!r.has("target", "centers")) r.fail("target", "centers", "required field is missing");
    if (!r.has("target", "widths")) r.fail("target", "widths", "required field is missing");
    if (!r.has("target", "weights")) r.fail("target", "weights", "required field is missing");
    for (const auto& c : s.centers) require_size(r, "target", "centers", c.size(), s.dim);
    require_size(r, "target", "widths", s.widths.size(), s.centers.size());
    require_size(r, "target", "weights", s.weights.size(), s.centers.size());
    require_positive(r, "target", "widths", s.widths);
    require_positive(r, "target", "weights", s.weights);
    break;
  case TargetFamily::grid:
    if (s.space != SpaceKind::continuous || s.dim != 1) {
      r.fail("target", "family", "a grid target needs a one-dimensional continuous space");
    }
    if (!r.has("target", "values")) r.fail("target", "values", "required field is missing");
    if (s.values.size() < 2) r.fail("target", "values", "a grid table needs at least 2 values");
    require_positive(r, "target", "values", s.values);
    break;
  }

  s.proposal = s.space == SpaceKind::discrete ? ProposalFamily::independent : ProposalFamily::random_walk;
  if (r.has("proposal", "kind")) {
    s.proposal = choose<ProposalFamily>(r, "proposal", "kind",
                                        {{"independent", ProposalFamily::independent},
                                         {"random_walk", ProposalFamily::random_walk}});
  }
  if (r.has("proposal", "masses")) {
    if (s.space != SpaceKind::discrete || s.proposal != ProposalFamily::independent) {
      r.fail("proposal", "masses", "masses apply to an independence proposal on a discrete space");
    }
    s.proposal_masses = r.numbers("proposal", "masses");
    require_size(r, "proposal", "masses", s.proposal_masses.size(), s.n);
    require_positive(r, "proposal", "masses", s.proposal_masses);
  }
  if (r.has("proposal", "scale")) {
    s.scale = r.number("proposal", "scale");
    if (!(s.scale > 0.0)) r.fail("proposal", "scale", "scale must be positive");
  }

  s.sampler = choose<SamplerKind>(r, "sampler", "kind", {{"mh", SamplerKind::mh}, {"mtmc", SamplerKind::mtmc}});
  s.steps = r.count("sampler", "steps");
  if (s.steps == 0) r.fail("sampler", "steps", "a chain needs at least 1 step");
  if (r.has("sampler", "seed")) s.seed = r.seed("sampler", "seed");
  if (r.has("sampler", "initial")) {
    s.initial = r.numbers("sampler", "initial");
    require_size(r, "sampler", "initial", s.initial.size(), s.dim);
    if (s.space == SpaceKind::discrete) {
      const double k = s.initial[0];
      if (k != std::floor(k) || k < 1.0 || k > static_cast<double>(s.n)) {
        r.fail("sampler", "initial", "must be a state label between 1 and " + std::to_string(s.n));
      }
    }
  }
  if (r.has("sampler", "fallback")) {
    s.fallback = r.number("sampler", "fallback");
    if (!(s.fallback > 0.0)) r.fail("sampler", "fallback", "fallback must be positive");
  }
  if (r.has("sampler", "burn_in")) s.burn_in = r.count("sampler", "burn_in");
  if (s.burn_in >= s.steps) r.fail("sampler", "burn_in", "burn-in must be shorter than the chain");
  if (r.has("sampler", "thin")) s.thin = r.count("sampler", "thin");
  if (s.thin == 0) r.fail("sampler", "thin", "thinning interval must be at least 1");
  if (r.has("sampler", "preload")) {
    const std::string v = r.text("sampler", "preload");
    if (v == "none") {
      s.preload = PreloadMode::none;
    } else if (v == "exact") {
      if (s.space != SpaceKind::discrete) r.fail("sampler", "preload", "exact preload needs a discrete space");
      s.preload = PreloadMode::exact;
    } else {
      s.preload = PreloadMode::archive;
      s.preload_path = v;
    }
  }
  if (r.has("sampler", "approx_cost")) {
    s.approx_cost = r.number("sampler", "approx_cost");
    if (!(s.approx_cost >= 0.0)) r.fail("sampler", "approx_cost", "cost must be nonnegative");
  }

  if (r.has("diagnostics", "bins")) s.bins = r.count("diagnostics", "bins");
  if (s.bins == 0) r.fail("diagnostics", "bins", "empty bins spec");
  if (r.has("diagnostics", "grid")) s.grid = r.count("diagnostics", "grid");
  if (s.grid < 2) r.fail("diagnostics", "grid", "grid needs at least 2 nodes per axis");
  if (s.space == SpaceKind::continuous) {
    double nodes = 1.0;
    for (std::size_t i = 0; i < s.dim; ++i) nodes *= static_cast<double>(s.grid);
    if (nodes > 4096.0) r.fail("diagnostics", "grid", "diagnostic grid exceeds 4096 nodes");
  }
  if (r.has("diagnostics", "checkpoints")) {
    s.checkpoints = r.counts("diagnostics", "checkpoints");
    for (std::size_t i = 0; i < s.checkpoints.size(); ++i) {
      if (s.checkpoints[i] == 0 || s.checkpoints[i] > s.steps) {
        r.fail("diagnostics", "checkpoints", "checkpoints must lie between 1 and sampler.steps");
      }
      if (i > 0 && s.checkpoints[i] <= s.checkpoints[i - 1]) {
        r.fail("diagnostics", "checkpoints", "checkpoints must be strictly increasing");
      }
    }
  } else {
    s.checkpoints = {s.steps};
  }
  if (r.has("diagnostics", "generations")) {
    s.generations = r.counts("diagnostics", "generations");
    for (std::size_t i = 1; i < s.generations.size(); ++i) {
      if (s.generations[i] <= s.generations[i - 1]) {
        r.fail("diagnostics", "generations", "generations must be strictly increasing");
      }
    }
  }
  if (r.has("diagnostics", "observable")) {
    s.observable = r.text("diagnostics", "observable");
    if (s.observable.starts_with("indicator:")) {
      if (s.space != SpaceKind::discrete) r.fail("diagnostics", "observable", "indicators need a discrete space");
      std::size_t label = 0;
      const std::string tail = s.observable.substr(10);
      const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), label);
      if (ec != std::errc() || ptr != tail.data() + tail.size() || label < 1 || label > s.n) {
        r.fail("diagnostics", "observable", "indicator needs a state label between 1 and " + std::to_string(s.n));
      }
    } else if (s.observable != "none" && s.observable != "identity") {
      r.fail("diagnostics", "observable", "expected none | identity | indicator:<label>");
    }
  }
  if (r.has("diagnostics", "observable_bound")) {
    s.observable_bound = r.number("diagnostics", "observable_bound");
    if (!(s.observable_bound > 0.0)) r.fail("diagnostics", "observable_bound", "bound must be positive");
  } else if (s.observable == "identity") {
    // Chains on a continuous space may leave the box, so the bound must be declared.
    if (s.space != SpaceKind::discrete) r.fail("diagnostics", "observable_bound", "identity needs a declared bound");
    s.observable_bound = static_cast<double>(s.n);
  }

  if (r.has("spectrum", "initial")) {
    if (s.space != SpaceKind::discrete) r.fail("spectrum", "initial", "spectral analysis needs a discrete space");
    s.spectrum_initial = r.numbers("spectrum", "initial");
    require_size(r, "spectrum", "initial", s.spectrum_initial.size(), s.n);
    double total = 0.0;
    for (double v : s.spectrum_initial) {
      if (!(v >= 0.0)) r.fail("spectrum", "initial", "entries must be nonnegative");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) r.fail("spectrum", "initial", "entries must sum to 1");
  }
  if (r.has("spectrum", "horizon")) s.horizon = r.count("spectrum", "horizon");

  if (r.has("coupling", "replicates")) s.replicates = r.count("coupling", "replicates");
  if (s.replicates == 0) r.fail("coupling", "replicates", "need at least 1 replicate");
  if (r.has("coupling", "steps")) s.coupling_steps = r.count("coupling", "steps");
  if (r.has("coupling", "n0")) s.n0 = r.count("coupling", "n0");
  if (s.n0 == 0) r.fail("coupling", "n0", "N0 must be at least 1");
  return s;
}

Scenario load_scenario(const std::string& path)
{
  return parse_scenario(ConfigDocument::load(path));
}

std::string serialize(const Scenario& s)
{
  ConfigDocument doc;
  doc.set("scenario", "name", s.name);
  if (s.space == SpaceKind::discrete) {
    doc.set("space", "kind", "discrete");
    doc.set("space", "n", std::to_string(s.n));
  } else {
    doc.set("space", "kind", "continuous");
    doc.set("space", "dim", std::to_string(s.dim));
    doc.set("space", "lower", join(s.lower));
    doc.set("space", "upper", join(s.upper));
  }

  static const char* families[] = {"table", "gaussian", "mixture", "grid"};
  doc.set("target", "family", families[static_cast<int>(s.family)]);
  if (!s.masses.empty()) doc.set("target", "masses", join(s.masses));
  if (!s.mean.empty()) doc.set("target", "mean", join(s.mean));
  if (!s.sd.empty()) doc.set("target", "sd", join(s.sd));
  if (!s.centers.empty()) {
    std::string text;
    for (std::size_t i = 0; i < s.centers.size(); ++i) {
      if (i > 0) text += "; ";
      text += join(s.centers[i]);
    }
    doc.set("target", "centers", text);
  }
  if (!s.widths.empty()) doc.set("target", "widths", join(s.widths));
  if (!s.weights.empty()) doc.set("target", "weights", join(s.weights));
  if (!s.values.empty()) doc.set("target", "values", join(s.values));
  doc.set("target", "cost", io::format_double(s.cost));

  doc.set("proposal", "kind", s.proposal == ProposalFamily::independent ? "independent" : "random_walk");
  if (!s.proposal_masses.empty()) doc.set("proposal", "masses", join(s.proposal_masses));
  doc.set("proposal", "scale", io::format_double(s.scale));

  doc.set("sampler", "kind", to_string(s.sampler));
  doc.set("sampler", "steps", std::to_string(s.steps));
  doc.set("sampler", "seed", std::to_string(s.seed));
  if (!s.initial.empty()) doc.set("sampler", "initial", join(s.initial));
  doc.set("sampler", "fallback", io::format_double(s.fallback));
  doc.set("sampler", "burn_in", std::to_string(s.burn_in));
  doc.set("sampler", "thin", std::to_string(s.thin));
  doc.set("sampler", "preload",
          s.preload == PreloadMode::none ? "none" : s.preload == PreloadMode::exact ? "exact" : s.preload_path);
  doc.set("sampler", "approx_cost", io::format_double(s.approx_cost));

  doc.set("diagnostics", "bins", std::to_string(s.bins));
  doc.set("diagnostics", "grid", std::to_string(s.grid));
  doc.set("diagnostics", "checkpoints", join(s.checkpoints));
  if (!s.generations.empty()) doc.set("diagnostics", "generations", join(s.generations));
  doc.set("diagnostics", "observable", s.observable);
  doc.set("diagnostics", "observable_bound", io::format_double(s.observable_bound));

  if (!s.spectrum_initial.empty()) doc.set("spectrum", "initial", join(s.spectrum_initial));
  doc.set("spectrum", "horizon", std::to_string(s.horizon));

  doc.set("coupling", "replicates", std::to_string(s.replicates));
  doc.set("coupling", "steps", std::to_string(s.coupling_steps));
  doc.set("coupling", "n0", std::to_string(s.n0));
  return doc.to_string();
}

TargetDensity make_target(const Scenario& s)
{
  switch (s.family) {
  case TargetFamily::table:
    return targets::discrete_table(s.masses, s.cost);
  case TargetFamily::gaussian:
    return targets::gaussian_shape(s.mean, s.sd, s.cost);
  case TargetFamily::mixture:
    return targets::mixture_of_bumps(s.centers, s.widths, s.weights, s.cost);
  case TargetFamily::grid:
    return targets::grid_table(s.lower[0], s.upper[0], s.values, s.cost);
  }
  throw Error("unknown target family");
}

Proposal make_proposal(const Scenario& s)
{
  if (s.space == SpaceKind::discrete) {
    if (s.proposal == ProposalFamily::independent) return Proposal::discrete_independent(proposal_masses(s));
    return Proposal::discrete_random_walk(s.n);
  }
  if (s.proposal == ProposalFamily::independent) return Proposal::uniform_independent(s.lower, s.upper);
  return Proposal::gaussian_random_walk(s.dim, s.scale);
}

Point initial_point(const Scenario& s)
{
  if (!s.initial.empty()) return Point(s.initial);
  if (s.space == SpaceKind::discrete) return Point{1.0};
  std::vector<double> mid(s.dim);
  for (std::size_t i = 0; i < s.dim; ++i) mid[i] = 0.5 * (s.lower[i] + s.upper[i]);
  return Point(mid);
}

std::vector<Point> diagnostic_grid(const Scenario& s)
{
  if (s.space == SpaceKind::discrete) return DiscreteSpace(s.n).points();
  return tensor_grid(Box{s.lower, s.upper}, s.grid);
}

std::vector<double> target_masses(const Scenario& s)
{
  if (s.space != SpaceKind::discrete) throw Error("target masses need a discrete space");
  const auto target = make_target(s);
  const DiscreteSpace space(s.n);
  std::vector<double> values(s.n);
  for (std::size_t k = 0; k < s.n; ++k) values[k] = target(space.point(k + 1));
  return normalized(values);
}

std::vector<double> proposal_masses(const Scenario& s)
{
  if (s.space != SpaceKind::discrete) throw Error("proposal masses need a discrete space");
  if (s.proposal_masses.empty()) return std::vector<double>(s.n, 1.0 / static_cast<double>(s.n));
  return normalized(s.proposal_masses);
}

ChainConfig chain_config(const Scenario& s, SamplerKind kind)
{
  ChainConfig config;
  config.kind = kind;
  config.length = s.steps;
  config.initial = initial_point(s);
  config.seed = s.seed;
  config.fallback = s.fallback;
  config.approx_cost = s.approx_cost;
  if (kind != SamplerKind::mtmc) return config;

  if (s.preload == PreloadMode::exact) {
    const auto target = make_target(s);
    ApproximationState state(1, s.fallback);
    const DiscreteSpace space(s.n);
    for (std::size_t k = 1; k <= s.n; ++k) state.insert(space.point(k), target(space.point(k)));
    config.preload = std::move(state);
  } else if (s.preload == PreloadMode::archive) {
    std::ifstream in(s.preload_path);
    if (!in) throw ConfigError("<scenario " + s.name + ">", 0, "sampler.preload", "cannot open archive " + s.preload_path);
    config.preload = read_archive_csv(in, s.fallback);
  }
  return config;
}

} // namespace mtmc
