#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mtmc/config.hpp"
#include "mtmc/experiment.hpp"
#include "mtmc/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  bool quiet = false;
};

void add_common(CLI::App* cmd, Options& opts)
{
  cmd->add_option("--config", opts.config, "Scenario configuration file")->required();
  cmd->add_option("--seed", opts.seed, "Override the sampler seed");
  cmd->add_option("--out", opts.out, "Output directory");
  cmd->add_flag("--quiet", opts.quiet, "Suppress the list of written files");
}

using Writer = std::function<std::vector<std::filesystem::path>(const mtmc::Scenario&, const std::filesystem::path&)>;

int execute(const Options& opts, const Writer& writer)
{
  mtmc::Scenario scenario;
  try {
    scenario = mtmc::load_scenario(opts.config);
    if (opts.seed) scenario.seed = *opts.seed;
  } catch (const mtmc::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    const auto written = writer(scenario, opts.out);
    if (!opts.quiet) {
      for (const auto& path : written) std::cout << path.string() << "\n";
    }
  } catch (const mtmc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error in scenario '" << scenario.name << "' (seed " << scenario.seed << "): " << e.what()
              << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Moving Target Monte Carlo experiment runner"};
  app.set_version_flag("--version", std::string("mtmc ") + mtmc::kVersion);
  app.require_subcommand(1);

  Options opts;
  Writer writer;
  struct Command {
    const char* name;
    const char* help;
    Writer writer;
  };
  const Command commands[] = {
      {"run", "Run the configured sampler; write trace, diagnostics and archive", mtmc::write_run},
      {"compare", "Run MH and MTMC on the same scenario and seed", mtmc::write_compare},
      {"spectrum", "Closed-form spectrum and TV decay of the frozen kernel", mtmc::write_spectrum},
      {"couple", "Doeblin certificate and replicated coupled chains", mtmc::write_coupling},
  };
  for (const auto& c : commands) {
    auto* cmd = app.add_subcommand(c.name, c.help);
    add_common(cmd, opts);
    cmd->callback([&writer, w = c.writer] { writer = w; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  return execute(opts, writer);
}
