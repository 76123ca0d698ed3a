#pragma once

// Config-driven runs: a JSON file names the problem, geometry, set, solver
// and its parameters, the start point and the output files.
//
// Exit codes: 0 Converged or StoppedAtSolution, 2 MaxIter, 3 invariant
// violation, golden mismatch or a solver contradiction (empty cut, exhausted
// linesearch, vanishing subgradient), 4 configuration error, 1 any other
// solver failure.

#include "beq/extragradient.hpp"
#include "beq/errors.hpp"
#include "beq/golden.hpp"
#include "beq/linesearch.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace beq {

struct RunConfig {
  std::string name;
  Problem problem = paper_example();
  Algorithm algorithm = Algorithm::Extragradient;
  ExtragradientConfig extragradient;
  LinesearchConfig linesearch;
  PrimalVector x0;
  std::optional<PrimalVector> reference_solution;
  std::optional<double> quantization;
  // Output paths are used as given; the golden path is resolved against the
  // config file's directory.
  std::optional<std::string> csv_path;
  std::optional<std::string> plot_path;
  std::optional<std::string> golden_path;
};

// Throws ConfigError with a diagnostic.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::string& path);

// Registry names: "paper_example_sec5"; "paper_example_product" (with "dim").
Problem problem_from_registry(const std::string& name, int dim = 1);

struct RunOverrides {
  std::optional<std::string> csv_path;
  std::optional<std::string> golden_path;
  std::optional<double> quantization;
  std::uint64_t seed = 42;
};

struct RunOutcome {
  int exit_code = 0;
  std::optional<SolveResult> result;
  std::optional<GoldenReport> golden;
  // Pretty-printed JSON summary.
  std::string summary;
  std::string diagnostic;
};

RunOutcome run(const RunConfig& cfg, const RunOverrides& overrides = {});

// Loads the config and runs it; config loading failures become exit 4.
RunOutcome run_file(const std::string& config_path, const RunOverrides& overrides = {});

// Sampled assumption checks only (A1, A2, A4, A5 when constants are declared,
// and relative nonexpansiveness of S). Exit 0 when all pass, 3 otherwise.
RunOutcome verify_file(const std::string& config_path, std::uint64_t seed = 42, int samples = 2000);

int exit_code_for(ErrorCode code);

// Two columns: n and |x_n - x*|.
void write_plot_data(const std::string& path, const SolveResult& result, const Geometry& g, const PrimalVector& ref);

}  // namespace beq
