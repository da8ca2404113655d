// Copyright 2026 The ndmm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// ndmm command-line front end.
//
//   ndmm verify --seed 42 --trials 100 --max-dim 4 --tol 1e-9
//   ndmm run scenario.json -o report.json --tol 1e-9
//   ndmm example swap --n 2 --probe sharp
//
// Exit codes: 0 all checks pass, 1 numerical failure, 2 parse or usage
// error, 3 validation error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ndmm.hpp"

namespace {

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

int emit(const ndmm::RunOutcome& outcome, const std::string& out_path) {
  if (outcome.report) {
    const std::string text = ndmm::dump17(ndmm::report_to_json(*outcome.report)) + "\n";
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        std::cerr << "ndmm: cannot write " << out_path << "\n";
        return ndmm::kExitParseError;
      }
      out << text;
    }
  }
  if (outcome.code != ndmm::kExitOk) std::cerr << "ndmm: " << outcome.message << "\n";
  return outcome.code;
}

int cmd_verify(std::uint64_t seed, int trials, int max_dim, double tol) {
  try {
    const ndmm::VerifySummary s = ndmm::verify_suite(seed, trials, max_dim, tol);
    std::cout << s.text;
    return s.pass ? ndmm::kExitOk : ndmm::kExitNumericalFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "ndmm: usage error: " << e.what() << "\n";
    return ndmm::kExitParseError;
  }
}

int cmd_run(const std::string& path, const std::string& out_path, double tol) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "ndmm: cannot read " << path << "\n";
    return ndmm::kExitParseError;
  }
  return emit(ndmm::run_scenario_text(text, tol), out_path);
}

int cmd_example(const std::string& name, int n, int m, const std::string& probe, const std::string& out_path,
                double tol) {
  ndmm::json example{{"name", name}, {"n", n}};
  if (name == "fourier") example["m"] = m;
  if (probe == "sharp") {
    example["probe"] = "sharp";
  } else {
    std::string text;
    if (!read_file(probe, text)) {
      std::cerr << "ndmm: cannot read probe file " << probe << "\n";
      return ndmm::kExitParseError;
    }
    try {
      example["probe"] = ndmm::json::parse(text);
    } catch (const ndmm::json::parse_error& e) {
      std::cerr << "ndmm: " << probe << ": parse error at byte " << e.byte << "\n";
      return ndmm::kExitParseError;
    }
  }
  const ndmm::json scenario{{"example", example},
                            {"requests", {"instrument", "observable", "post_probe", "remeasure"}}};
  return emit(ndmm::run_scenario_text(scenario.dump(), tol), out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nondisturbing measurement models: verification, scenarios and examples"};
  app.require_subcommand(1);

  std::uint64_t seed = 42;
  int trials = 100;
  int max_dim = 4;
  double tol = ndmm::kDefaultAtol;
  auto* verify = app.add_subcommand("verify", "Run the seeded randomized property suite");
  verify->add_option("--seed", seed, "Master seed")->capture_default_str();
  verify->add_option("--trials", trials, "Trials per family")->capture_default_str();
  verify->add_option("--max-dim", max_dim, "Largest space dimension")->capture_default_str();
  verify->add_option("--tol", tol, "Residual tolerance")->capture_default_str();

  std::string scenario_path;
  std::string out_path;
  auto* run = app.add_subcommand("run", "Evaluate a JSON scenario and write a report");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("-o,--output", out_path, "Report file (default: stdout)");
  run->add_option("--tol", tol, "Residual tolerance")->capture_default_str();

  std::string example_name;
  int n = 2;
  int m = 3;
  std::string probe = "sharp";
  auto* example = app.add_subcommand("example", "Evaluate a built-in example model");
  example->add_option("name", example_name, "swap or fourier")
      ->required()
      ->check(CLI::IsMember({"swap", "fourier"}));
  example->add_option("--n", n, "Dimension of the base space")->capture_default_str();
  example->add_option("--m", m, "Dimension of the probe space (fourier)")->capture_default_str();
  example->add_option("--probe", probe, "\"sharp\" or a JSON Observable file")->capture_default_str();
  example->add_option("-o,--output", out_path, "Report file (default: stdout)");
  example->add_option("--tol", tol, "Residual tolerance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ndmm::kExitParseError;
  }

  if (*verify) return cmd_verify(seed, trials, max_dim, tol);
  if (*run) return cmd_run(scenario_path, out_path, tol);
  return cmd_example(example_name, n, m, probe, out_path, tol);
}
