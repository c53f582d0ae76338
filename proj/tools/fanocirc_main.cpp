// Copyright 2026 The fanocirc Authors
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


#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fanocirc/config.hpp"
#include "fanocirc/runner.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kSolver = 2;

std::string describe(const std::string& name) {
  if (name == "spectrum") return "lowest transition frequencies over a flux sweep";
  if (name == "smatrix") return "3x3 scattering matrix over a drive-frequency grid";
  if (name == "fidelity") return "cw/ccw circulation fidelity and dB figures over frequency";
  if (name == "optimize") return "search flux, charge bias and drive for the best circulation";
  if (name == "spread-sweep") return "optimized fidelity vs junction spread and shunt capacitance";
  if (name == "power-sweep") return "fidelity compression vs drive power";
  if (name == "selftest") return "quick numerical consistency checks";
  return name;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fanocirc: three-junction Fano circulator simulator"};
  app.set_version_flag("--version", fanocirc::version());
  app.require_subcommand(1, 1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  long long seed = -1;

  for (const auto& name : fanocirc::subcommands()) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    sub->add_option("-c,--config", config_path, "config file (flat key = value with sections)")
        ->check(CLI::ExistingFile);
    sub->add_option("-s,--set", overrides, "override a config key, e.g. --set c_x_ff=75");
    sub->add_option("-o,--out-dir", out_dir, "output directory");
    sub->add_option("--seed", seed, "optimizer seed")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    fanocirc::RunConfig cfg =
        config_path.empty() ? fanocirc::RunConfig{} : fanocirc::load_config(config_path);
    for (const auto& o : overrides) fanocirc::apply_override(cfg, o);
    if (!out_dir.empty()) fanocirc::apply_override(cfg, "out_dir=" + out_dir);
    if (seed >= 0) fanocirc::apply_override(cfg, "seed=" + std::to_string(seed));

    const fanocirc::ResultRecord rec = fanocirc::run_subcommand(name, cfg);
    const std::size_t shown = std::min<std::size_t>(rec.warnings.size(), 5);
    for (std::size_t i = 0; i < shown; ++i) std::cerr << "warning: " << rec.warnings[i] << "\n";
    if (rec.warnings.size() > shown) {
      std::cerr << "warning: " << rec.warnings.size() - shown << " more in " << rec.json_path.string()
                << "\n";
    }
    std::cout << rec.csv_path.string() << "\n" << rec.json_path.string() << "\n";
    if (!rec.ok) {
      std::cerr << "error: " << name << " reported failed checks (see " << rec.csv_path.string()
                << ")\n";
      return kSolver;
    }
    return kOk;
  } catch (const fanocirc::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const fanocirc::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  }
}
