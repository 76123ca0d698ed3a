// Command-line front end: run one config, sweep a directory of configs
// concurrently, or check the problem assumptions of a config.

#include "beq/runner.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <vector>

namespace {

std::uint64_t seed_from_env() {
  const char* s = std::getenv("BANACH_EQ_SEED");
  if (!s || !*s) return 42;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (*end != '\0') {
    std::cerr << "warning: ignoring non-numeric BANACH_EQ_SEED='" << s << "'\n";
    return 42;
  }
  return v;
}

int report(const beq::RunOutcome& out) {
  std::cout << out.summary << '\n';
  if (!out.diagnostic.empty()) std::cerr << "error: " << out.diagnostic << '\n';
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid extragradient and linesearch solvers for equilibrium problems"};
  app.require_subcommand(1);

  std::string run_config;
  std::optional<std::string> csv, golden;
  std::optional<double> quantize;
  auto* run = app.add_subcommand("run", "Run one config and print a JSON summary");
  run->add_option("--config", run_config, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--csv", csv, "Trace CSV path (overrides the config)");
  run->add_option("--golden", golden, "Golden table to compare against");
  run->add_option("--quantize", quantize, "Grid step applied to x_{n+1}")->check(CLI::PositiveNumber);

  std::string sweep_dir;
  std::optional<std::string> sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Run every *.json config in a directory concurrently");
  sweep->add_option("--dir", sweep_dir, "Directory of configs")->required()->check(CLI::ExistingDirectory);
  sweep->add_option("--out", sweep_out, "Directory for per-run trace CSVs (default: the configs' own paths)");

  std::string verify_config;
  int samples = 2000;
  auto* verify = app.add_subcommand("verify", "Sampled assumption checks only");
  verify->add_option("--config", verify_config, "Config file")->required()->check(CLI::ExistingFile);
  verify->add_option("--samples", samples, "Samples per check")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 4;
  }

  const std::uint64_t seed = seed_from_env();

  if (*run) {
    beq::RunOverrides o;
    o.csv_path = csv;
    o.golden_path = golden;
    o.quantization = quantize;
    o.seed = seed;
    return report(beq::run_file(run_config, o));
  }

  if (*verify) return report(beq::verify_file(verify_config, seed, samples));

  std::vector<std::filesystem::path> configs;
  for (const auto& e : std::filesystem::directory_iterator(sweep_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") configs.push_back(e.path());
  }
  std::sort(configs.begin(), configs.end());
  if (sweep_out) std::filesystem::create_directories(*sweep_out);
  std::vector<std::future<beq::RunOutcome>> jobs;
  for (const auto& path : configs) {
    beq::RunOverrides o;
    o.seed = seed;
    // With --out each trace goes to <out>/<stem>.csv instead of the config's own path.
    o.csv_path = sweep_out ? std::optional<std::string>((std::filesystem::path(*sweep_out) /
                                                         (path.stem().string() + ".csv")).string())
                           : std::nullopt;
    jobs.push_back(std::async(std::launch::async, [path, o] { return beq::run_file(path.string(), o); }));
  }
  int worst = 0;
  std::cout << "[\n";
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const beq::RunOutcome out = jobs[i].get();
    std::cout << out.summary << (i + 1 < jobs.size() ? ",\n" : "\n");
    if (!out.diagnostic.empty()) std::cerr << configs[i].filename().string() << ": " << out.diagnostic << '\n';
    worst = std::max(worst, out.exit_code);
  }
  std::cout << "]\n";
  return worst;
}
