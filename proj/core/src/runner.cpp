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
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fanocirc/runner.hpp"
#include "fanocirc/selftest.hpp"

#ifndef FANOCIRC_VERSION
#define FANOCIRC_VERSION "0.0.0"
#endif

namespace fanocirc {

namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

// JSON has no infinities; they become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json config_json(const RunConfig& c) {
  json j;
  const auto& d = c.device;
  j["e_c_sigma_ghz"] = d.e_c_sigma_ghz;
  j["e_j_ghz"] = d.e_j_ghz;
  j["e_j_spread"] = junction_spread(d.e_j_ghz);
  j["c_x_ff"] = d.c_x_ff;
  j["c_c_tilde_ff"] = d.c_c_tilde_ff ? json(*d.c_c_tilde_ff) : json("inf");
  j["z_wg_ohm"] = d.z_wg_ohm;
  j["gamma_ghz"] = d.gamma_ghz;
  j["gamma_is_angular"] = c.gamma_is_angular;
  j["n_cut"] = d.n_cut;
  j["n_levels"] = d.n_levels;
  j["phi_x"] = c.bias.phi_x;
  j["n_g"] = c.bias.n_g;
  j["sector"] = c.sector;
  j["auto_bias"] = c.auto_bias;
  j["direction"] = to_string(c.direction);
  j["method"] = c.method == ScatteringMethod::kFull ? "full" : "adiabatic";
  j["f_min_ghz"] = c.f_min_ghz;
  j["f_max_ghz"] = c.f_max_ghz;
  j["f_step_mhz"] = c.f_step_mhz;
  j["f_drive_ghz"] = c.f_drive_ghz;
  j["power_dbm"] = c.power_dbm;
  j["flux_min"] = c.flux_min;
  j["flux_max"] = c.flux_max;
  j["flux_points"] = c.flux_points;
  j["spectrum_sectors"] = c.spectrum_sectors;
  j["spread_delta"] = c.spread_delta;
  j["spread_c_x_ff"] = c.spread_c_x_ff;
  j["opt_starts"] = c.opt_starts;
  j["opt_max_evals"] = c.opt_max_evals;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  return j;
}

json bias_json(const BiasPoint& b, double f_ghz) {
  return {{"phi_x", b.reduced_phi_x()}, {"n_g", b.n_g}, {"f_ghz", f_ghz}};
}

class Csv {
 public:
  Csv(const std::string& kind, const std::vector<std::string>& columns) {
    out_ << "# fanocirc " << kind << " schema v" << kSchemaVersion << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
  }
  Csv& row() {
    first_ = true;
    return *this;
  }
  Csv& operator<<(double v) { return cell(format_number(v)); }
  Csv& operator<<(int v) { return cell(std::to_string(v)); }
  Csv& operator<<(const std::string& v) { return cell(v); }
  void end() { out_ << "\n"; }
  [[nodiscard]] std::string str() const { return out_.str(); }

 private:
  Csv& cell(const std::string& s) {
    if (!first_) out_ << ",";
    first_ = false;
    out_ << s;
    return *this;
  }
  std::ostringstream out_;
  bool first_ = true;
};

std::vector<std::string> spectrum_columns(int n_levels) {
  std::vector<std::string> c = {"phi_x", "sector"};
  for (int k = 1; k < n_levels; ++k) c.push_back("omega_" + std::to_string(k));
  return c;
}

std::vector<std::string> smatrix_columns() {
  std::vector<std::string> c = {"f_ghz"};
  for (const char* prefix : {"abs_S", "arg_S"}) {
    for (int j = 1; j <= 3; ++j) {
      for (int i = 1; i <= 3; ++i) c.push_back(prefix + std::to_string(j) + std::to_string(i));
    }
  }
  return c;
}

const std::vector<std::string> kFidelityColumns = {"f_ghz", "F_cw",  "F_ccw", "R_avg",
                                                   "IL_db", "IS_db", "R_db"};
const std::vector<std::string> kOptimizeColumns = {"start", "eval",  "phi_x", "ng1",
                                                   "ng2",   "f_ghz", "F"};
const std::vector<std::string> kSpreadColumns = {"delta",   "c_x_ff",  "F_opt",    "phi_x_opt",
                                                 "ng1_opt", "ng2_opt", "f_opt_ghz"};
const std::vector<std::string> kPowerColumns = {"p_dbm", "F", "F_db_drop"};
const std::vector<std::string> kSelftestColumns = {"check", "passed", "detail"};

std::vector<std::string> columns_for(const std::string& name, int n_levels) {
  if (name == "spectrum") return spectrum_columns(n_levels);
  if (name == "smatrix") return smatrix_columns();
  if (name == "fidelity") return kFidelityColumns;
  if (name == "optimize") return kOptimizeColumns;
  if (name == "spread-sweep") return kSpreadColumns;
  if (name == "power-sweep") return kPowerColumns;
  if (name == "selftest") return kSelftestColumns;
  std::string msg = "unknown subcommand '" + name + "'; expected one of:";
  for (const auto& s : subcommands()) msg += " " + s;
  throw ValidationError(msg);
}

std::string schema_kind(const std::string& name) {
  if (name == "spread-sweep") return "spread";
  if (name == "power-sweep") return "power";
  return name;
}

// Resolves the working bias, optionally by optimization.
struct Operating {
  BiasPoint bias;
  double f_ghz = 0.0;
  json info;
};

Operating operating_point(const RunConfig& cfg, double default_f) {
  Operating op{cfg.bias, default_f, json::object()};
  if (cfg.auto_bias) {
    const OptimizationResult r = optimize_bias(cfg.device, QuasiparticleSector::from_id(cfg.sector),
                                               cfg.optimizer());
    op.bias = r.bias;
    op.f_ghz = r.f_ghz;
    op.info = {{"bias", bias_json(r.bias, r.f_ghz)},
               {"fidelity", r.fidelity},
               {"fidelity_full", num(r.fidelity_full)},
               {"converged", r.converged}};
  }
  return op;
}

void append_warnings(std::vector<std::string>& out, const std::vector<std::string>& in) {
  for (const auto& w : in) {
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
  }
}

}  // namespace

std::string version() { return FANOCIRC_VERSION; }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config_to_text(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

std::string csv_header(const std::string& name, int n_levels) {
  return Csv(schema_kind(name), columns_for(name, n_levels)).str();
}

ResultRecord run_subcommand(const std::string& name, const RunConfig& cfg) {
  cfg.validate();
  const QuasiparticleSector sector = QuasiparticleSector::from_id(cfg.sector);
  const RateConvention rates = cfg.rates();
  Csv csv(schema_kind(name), columns_for(name, cfg.device.n_levels));
  json results = json::object();
  ResultRecord rec;
  rec.subcommand = name;

  if (name == "spectrum") {
    std::vector<double> flux(static_cast<std::size_t>(cfg.flux_points));
    for (int i = 0; i < cfg.flux_points; ++i) {
      flux[i] = cfg.flux_points == 1 ? cfg.flux_min
                                     : cfg.flux_min + (cfg.flux_max - cfg.flux_min) * i /
                                                          (cfg.flux_points - 1);
    }
    std::vector<QuasiparticleSector> sectors;
    for (int s : cfg.spectrum_sectors) sectors.push_back(QuasiparticleSector::from_id(s));
    const auto rows = transition_spectrum(cfg.device, cfg.bias, flux, sectors);
    for (const auto& r : rows) {
      csv.row() << r.phi_x << r.sector;
      for (double w : r.omega) csv << w;
      csv.end();
      append_warnings(rec.warnings, r.warnings);
    }
    results["rows"] = rows.size();
  } else if (name == "smatrix" || name == "fidelity") {
    const Operating op = operating_point(cfg, 0.0);
    const EigenSystem es = solve_loop(cfg.device, op.bias, sector);
    const auto grid = frequency_grid(cfg.f_min_ghz, cfg.f_max_ghz, cfg.f_step_mhz);
    DriveOptions drive;
    drive.rates = rates;
    const auto sweep = frequency_sweep(es, cfg.device, grid, cfg.method, drive);
    std::vector<FrequencyPoint> points;
    for (const auto& s : sweep) {
      append_warnings(rec.warnings, s.warnings);
      points.push_back({s.omega_d_ghz, circulation_fidelities(s.s)});
    }
    if (name == "smatrix") {
      double max_sv = 0.0;
      for (const auto& s : sweep) {
        csv.row() << s.omega_d_ghz;
        for (int j = 0; j < 3; ++j) {
          for (int i = 0; i < 3; ++i) csv << std::abs(s.s(j, i));
        }
        for (int j = 0; j < 3; ++j) {
          for (int i = 0; i < 3; ++i) csv << std::arg(s.s(j, i));
        }
        csv.end();
        max_sv = std::max(max_sv, Eigen::JacobiSVD<Matrix3c>(s.s).singularValues()(0));
      }
      results["points"] = sweep.size();
      results["max_singular_value"] = max_sv;
    } else {
      std::size_t best = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& f = points[i].fidelity;
        csv.row() << points[i].f_ghz << f.f_cw << f.f_ccw << f.r_avg << loss_db(f.f_cw)
                  << loss_db(f.f_ccw) << -loss_db(f.r_avg);
        csv.end();
        if (f.value(cfg.direction) > points[best].fidelity.value(cfg.direction)) best = i;
      }
      const PerformanceReport perf = performance_db(points[best].fidelity, points);
      results["peak_f_ghz"] = points[best].f_ghz;
      results["F_cw"] = points[best].fidelity.f_cw;
      results["F_ccw"] = points[best].fidelity.f_ccw;
      results["R_avg"] = points[best].fidelity.r_avg;
      results["IL_db"] = num(perf.il_db);
      results["IS_db"] = num(perf.is_db);
      results["R_db"] = num(perf.r_db);
      results["bandwidth_IL_1dB_mhz"] = perf.bandwidth_il_mhz;
      results["bandwidth_IS_14dB_mhz"] = perf.bandwidth_is_mhz;
    }
    results["method"] = cfg.method == ScatteringMethod::kFull ? "full" : "adiabatic";
    results["bias"] = bias_json(op.bias, 0.0);
    if (cfg.auto_bias) results["optimized"] = op.info;
  } else if (name == "optimize") {
    const OptimizationResult r = optimize_bias(cfg.device, sector, cfg.optimizer());
    for (const auto& t : r.trace) {
      csv.row() << t.start << t.eval << t.phi_x << t.n_g1 << t.n_g2 << t.f_ghz << t.fidelity;
      csv.end();
    }
    json starts = json::array();
    for (const auto& s : r.starts) {
      starts.push_back({{"initial", s.initial},
                        {"final", s.final},
                        {"evals", s.evals},
                        {"converged", s.converged}});
    }
    results["direction"] = to_string(cfg.direction);
    results["best"] = bias_json(r.bias, r.f_ghz);
    results["fidelity"] = r.fidelity;
    results["fidelity_full"] = num(r.fidelity_full);
    results["F_cw"] = r.report.f_cw;
    results["F_ccw"] = r.report.f_ccw;
    results["R_avg"] = r.report.r_avg;
    results["converged"] = r.converged;
    results["evaluations"] = r.evaluations;
    results["starts"] = starts;
    append_warnings(rec.warnings, r.warnings);
  } else if (name == "spread-sweep") {
    const auto rows = fidelity_vs_spread_sweep(cfg.device, cfg.spread_delta, cfg.spread_c_x_ff,
                                               sector, cfg.optimizer());
    json out = json::array();
    for (const auto& r : rows) {
      csv.row() << r.delta << r.c_x_ff << r.fidelity << r.bias.reduced_phi_x() << r.bias.n_g[0]
                << r.bias.n_g[1] << r.f_ghz;
      csv.end();
      out.push_back({{"delta", r.delta},
                     {"c_x_ff", r.c_x_ff},
                     {"F_opt", r.fidelity},
                     {"converged", r.converged}});
      if (!r.converged) {
        rec.warnings.push_back("optimizer did not improve for delta=" + format_number(r.delta) +
                               ", c_x_ff=" + format_number(r.c_x_ff));
      }
    }
    results["rows"] = out;
  } else if (name == "power-sweep") {
    const Operating op = operating_point(cfg, cfg.f_drive_ghz);
    std::vector<double> grid = cfg.power_dbm;
    if (grid.empty()) {
      for (double p = -150.0; p <= -100.0 + 1e-9; p += 1.0) grid.push_back(p);
    }
    const SaturationReport rep =
        power_sweep(cfg.device, op.bias, sector, cfg.f_drive_ghz, grid, cfg.direction, rates);
    for (const auto& p : rep.points) {
      csv.row() << p.p_dbm << p.fidelity << p.db_drop;
      csv.end();
    }
    results["f_drive_ghz"] = cfg.f_drive_ghz;
    results["direction"] = to_string(cfg.direction);
    results["p3db_dbm"] = num(rep.p3db_dbm);
    results["bracketed"] = rep.bracketed;
    results["p_sat_dbm"] = rep.estimate.p_sat_dbm;
    results["lifetime_ns"] = rep.estimate.lifetime_ns;
    results["matrix_element_sq"] = rep.estimate.matrix_element_sq;
    results["bias"] = bias_json(op.bias, cfg.f_drive_ghz);
    if (cfg.auto_bias) results["optimized"] = op.info;
    append_warnings(rec.warnings, rep.warnings);
  } else if (name == "selftest") {
    const auto cases = run_selftest();
    int passed = 0;
    for (const auto& c : cases) {
      csv.row() << c.name << (c.passed ? 1 : 0) << ("\"" + c.detail + "\"");
      csv.end();
      passed += c.passed ? 1 : 0;
    }
    results["passed"] = passed;
    results["failed"] = static_cast<int>(cases.size()) - passed;
    rec.ok = passed == static_cast<int>(cases.size());
  }

  rec.version = version();
  rec.config_hash = config_hash(cfg);
  rec.seed = cfg.seed;
  rec.timestamp = utc_timestamp();
  rec.csv = csv.str();

  json summary;
  summary["subcommand"] = name;
  summary["version"] = rec.version;
  summary["schema_version"] = kSchemaVersion;
  summary["config_hash"] = rec.config_hash;
  summary["seed"] = rec.seed;
  summary["timestamp"] = rec.timestamp;
  summary["config"] = config_json(cfg);
  summary["results"] = results;
  summary["warnings"] = rec.warnings;
  rec.json = summary.dump(2) + "\n";

  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  rec.csv_path = dir / (name + ".csv");
  rec.json_path = dir / (name + ".json");
  for (const auto& [path, text] : {std::pair{rec.csv_path, rec.csv}, {rec.json_path, rec.json}}) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw ValidationError("cannot write " + path.string());
  }
  return rec;
}

}  // namespace fanocirc
