#include <iostream>

#include "CLI11.hpp"
#include "evoclust/cli.hpp"

int main(int argc, char** argv) {
  using namespace evoclust;
  CLI::App app{"Evolutionary clustering of time-dependent densities"};
  app.require_subcommand(1);

  std::vector<std::string> configs;
  std::string out = "out";
  std::vector<double> snapshots;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "run one model and write its output bundle");
  run->add_option("--config", configs, "configuration file")->required()->expected(1);
  run->add_option("--out", out, "output directory");
  run->add_option("--snapshots", snapshots, "times for density snapshots")->delimiter(',');
  run->add_option("--seed", seed, "override the configured seed");

  auto* oracle = app.add_subcommand("oracle-check", "grid solver against the Gaussian moment equations");
  oracle->add_option("--config", configs, "scenario file")->required()->expected(1);
  oracle->add_option("--out", out, "write oracle.csv here");

  auto* compare = app.add_subcommand("compare", "run several models on one dataset and compare them");
  compare->add_option("--config", configs, "configuration files (repeat or list)")->required();
  compare->add_option("--out", out, "output directory");
  compare->add_option("--seed", seed, "override every configured seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) {
      RunRequest request;
      request.config = configs.front();
      request.out = out;
      if (run->count("--snapshots")) request.snapshots = snapshots;
      if (run->count("--seed")) request.seed = seed;
      return cmd_run(request, std::cout);
    }
    if (oracle->parsed()) {
      std::optional<std::filesystem::path> dir;
      if (oracle->count("--out")) dir = out;
      return cmd_oracle_check(configs.front(), dir, std::cout);
    }
    std::optional<std::uint64_t> s;
    if (compare->count("--seed")) s = seed;
    std::vector<std::filesystem::path> paths(configs.begin(), configs.end());
    return cmd_compare(paths, out, s, std::cout);
  } catch (...) {
    return report_failure(std::cerr);
  }
}
