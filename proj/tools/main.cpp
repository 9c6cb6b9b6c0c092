#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cli/experiments.hpp"

namespace sj = switchjump::cli;

int main(int argc, char** argv) {
  CLI::App app{"switchjump: regime-switching jump diffusion experiments"};
  app.require_subcommand(1);

  sj::RunOptions opts;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> paths;

  for (auto kind : {sj::Experiment::simulate, sj::Experiment::check_assumptions, sj::Experiment::dynkin,
                    sj::Experiment::periodicity, sj::Experiment::series_vs_oracle, sj::Experiment::cesaro}) {
    auto* sub = app.add_subcommand(sj::to_string(kind));
    sub->add_option("--config", opts.config_path, "config file (key = value)")->required();
    sub->add_option("--seed", seed, "override sim.seed");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--paths", paths, "override sim.paths");
    sub->add_flag("--quiet", opts.quiet, "suppress the summary");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sj::kUsage;
  }

  opts.seed = seed;
  opts.out_dir = out;
  opts.paths = paths;
  const auto kind = sj::parse_experiment(app.get_subcommands().front()->get_name());
  return sj::run(*kind, opts, std::cout, std::cerr);
}
