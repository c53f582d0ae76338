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
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fanocirc/config.hpp"

namespace fanocirc {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string unquote(const std::string& raw) {
  std::string s = trim(raw);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
  throw ValidationError(key + ": expected " + expected + ", got '" + value + "'");
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) bad_value(key, s, "a number");
  return v;
}

long long parse_int(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  long long v = 0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) bad_value(key, s, "an integer");
  return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = unquote(raw);
  if (s == "true") return true;
  if (s == "false") return false;
  bad_value(key, s, "true or false");
}

std::vector<std::string> split_list(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') bad_value(key, s, "a [list]");
  std::vector<std::string> items;
  const std::string body = trim(s.substr(1, s.size() - 2));
  if (body.empty()) return items;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

std::vector<double> parse_doubles(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  for (const auto& item : split_list(key, raw)) out.push_back(parse_double(key, item));
  return out;
}

template <std::size_t N>
std::array<double, N> parse_fixed(const std::string& key, const std::string& raw) {
  const auto v = parse_doubles(key, raw);
  if (v.size() != N) bad_value(key, raw, N == 3 ? "a list of 3 numbers" : "a list of numbers");
  std::array<double, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename Range>
std::string fmt_list(const Range& r) {
  std::string out = "[";
  bool first = true;
  for (const auto& v : r) {
    if (!first) out += ", ";
    first = false;
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
      out += fmt(v);
    } else {
      out += std::to_string(v);
    }
  }
  return out + "]";
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

struct Field {
  const char* section;
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"device", "e_c_sigma_ghz",
       [](RunConfig& c, const std::string& v) {
         c.device.e_c_sigma_ghz = parse_double("e_c_sigma_ghz", v);
       },
       [](const RunConfig& c) { return fmt(c.device.e_c_sigma_ghz); }},
      {"device", "e_j_ghz",
       [](RunConfig& c, const std::string& v) { c.device.e_j_ghz = parse_fixed<3>("e_j_ghz", v); },
       [](const RunConfig& c) { return fmt_list(c.device.e_j_ghz); }},
      {"device", "c_x_ff",
       [](RunConfig& c, const std::string& v) { c.device.c_x_ff = parse_double("c_x_ff", v); },
       [](const RunConfig& c) { return fmt(c.device.c_x_ff); }},
      {"device", "c_c_tilde_ff",
       [](RunConfig& c, const std::string& v) {
         const std::string s = unquote(v);
         if (s == "inf" || s == "infinite") {
           c.device.c_c_tilde_ff.reset();
         } else {
           c.device.c_c_tilde_ff = parse_double("c_c_tilde_ff", s);
         }
       },
       [](const RunConfig& c) {
         return c.device.c_c_tilde_ff ? fmt(*c.device.c_c_tilde_ff) : quote("inf");
       }},
      {"device", "z_wg_ohm",
       [](RunConfig& c, const std::string& v) { c.device.z_wg_ohm = parse_double("z_wg_ohm", v); },
       [](const RunConfig& c) { return fmt(c.device.z_wg_ohm); }},
      {"device", "gamma_ghz",
       [](RunConfig& c, const std::string& v) {
         c.device.gamma_ghz = parse_double("gamma_ghz", v);
       },
       [](const RunConfig& c) { return fmt(c.device.gamma_ghz); }},
      {"device", "gamma_is_angular",
       [](RunConfig& c, const std::string& v) {
         c.gamma_is_angular = parse_bool("gamma_is_angular", v);
       },
       [](const RunConfig& c) { return std::string(c.gamma_is_angular ? "true" : "false"); }},
      {"device", "n_cut",
       [](RunConfig& c, const std::string& v) {
         c.device.n_cut = static_cast<int>(parse_int("n_cut", v));
       },
       [](const RunConfig& c) { return std::to_string(c.device.n_cut); }},
      {"device", "n_levels",
       [](RunConfig& c, const std::string& v) {
         c.device.n_levels = static_cast<int>(parse_int("n_levels", v));
       },
       [](const RunConfig& c) { return std::to_string(c.device.n_levels); }},
      {"bias", "phi_x",
       [](RunConfig& c, const std::string& v) { c.bias.phi_x = parse_double("phi_x", v); },
       [](const RunConfig& c) { return fmt(c.bias.phi_x); }},
      {"bias", "n_g",
       [](RunConfig& c, const std::string& v) { c.bias.n_g = parse_fixed<3>("n_g", v); },
       [](const RunConfig& c) { return fmt_list(c.bias.n_g); }},
      {"bias", "sector",
       [](RunConfig& c, const std::string& v) { c.sector = static_cast<int>(parse_int("sector", v)); },
       [](const RunConfig& c) { return std::to_string(c.sector); }},
      {"bias", "auto_bias",
       [](RunConfig& c, const std::string& v) { c.auto_bias = parse_bool("auto_bias", v); },
       [](const RunConfig& c) { return std::string(c.auto_bias ? "true" : "false"); }},
      {"bias", "direction",
       [](RunConfig& c, const std::string& v) { c.direction = direction_from_string(unquote(v)); },
       [](const RunConfig& c) { return quote(to_string(c.direction)); }},
      {"sweep", "method",
       [](RunConfig& c, const std::string& v) {
         const std::string s = unquote(v);
         if (s == "adiabatic") {
           c.method = ScatteringMethod::kAdiabatic;
         } else if (s == "full") {
           c.method = ScatteringMethod::kFull;
         } else {
           bad_value("method", s, "adiabatic or full");
         }
       },
       [](const RunConfig& c) {
         return quote(c.method == ScatteringMethod::kFull ? "full" : "adiabatic");
       }},
      {"sweep", "f_min_ghz",
       [](RunConfig& c, const std::string& v) { c.f_min_ghz = parse_double("f_min_ghz", v); },
       [](const RunConfig& c) { return fmt(c.f_min_ghz); }},
      {"sweep", "f_max_ghz",
       [](RunConfig& c, const std::string& v) { c.f_max_ghz = parse_double("f_max_ghz", v); },
       [](const RunConfig& c) { return fmt(c.f_max_ghz); }},
      {"sweep", "f_step_mhz",
       [](RunConfig& c, const std::string& v) { c.f_step_mhz = parse_double("f_step_mhz", v); },
       [](const RunConfig& c) { return fmt(c.f_step_mhz); }},
      {"sweep", "f_drive_ghz",
       [](RunConfig& c, const std::string& v) { c.f_drive_ghz = parse_double("f_drive_ghz", v); },
       [](const RunConfig& c) { return fmt(c.f_drive_ghz); }},
      {"sweep", "power_dbm",
       [](RunConfig& c, const std::string& v) { c.power_dbm = parse_doubles("power_dbm", v); },
       [](const RunConfig& c) { return fmt_list(c.power_dbm); }},
      {"sweep", "flux_min",
       [](RunConfig& c, const std::string& v) { c.flux_min = parse_double("flux_min", v); },
       [](const RunConfig& c) { return fmt(c.flux_min); }},
      {"sweep", "flux_max",
       [](RunConfig& c, const std::string& v) { c.flux_max = parse_double("flux_max", v); },
       [](const RunConfig& c) { return fmt(c.flux_max); }},
      {"sweep", "flux_points",
       [](RunConfig& c, const std::string& v) {
         c.flux_points = static_cast<int>(parse_int("flux_points", v));
       },
       [](const RunConfig& c) { return std::to_string(c.flux_points); }},
      {"sweep", "spectrum_sectors",
       [](RunConfig& c, const std::string& v) {
         c.spectrum_sectors.clear();
         for (const auto& item : split_list("spectrum_sectors", v)) {
           c.spectrum_sectors.push_back(static_cast<int>(parse_int("spectrum_sectors", item)));
         }
       },
       [](const RunConfig& c) { return fmt_list(c.spectrum_sectors); }},
      {"sweep", "spread_delta",
       [](RunConfig& c, const std::string& v) {
         c.spread_delta = parse_doubles("spread_delta", v);
       },
       [](const RunConfig& c) { return fmt_list(c.spread_delta); }},
      {"sweep", "spread_c_x_ff",
       [](RunConfig& c, const std::string& v) {
         c.spread_c_x_ff = parse_doubles("spread_c_x_ff", v);
       },
       [](const RunConfig& c) { return fmt_list(c.spread_c_x_ff); }},
      {"optimizer", "opt_starts",
       [](RunConfig& c, const std::string& v) {
         c.opt_starts = static_cast<int>(parse_int("opt_starts", v));
       },
       [](const RunConfig& c) { return std::to_string(c.opt_starts); }},
      {"optimizer", "opt_max_evals",
       [](RunConfig& c, const std::string& v) {
         c.opt_max_evals = static_cast<int>(parse_int("opt_max_evals", v));
       },
       [](const RunConfig& c) { return std::to_string(c.opt_max_evals); }},
      {"optimizer", "seed",
       [](RunConfig& c, const std::string& v) {
         const long long s = parse_int("seed", v);
         if (s < 0) bad_value("seed", v, "a non-negative integer");
         c.seed = static_cast<std::uint64_t>(s);
       },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      {"output", "out_dir",
       [](RunConfig& c, const std::string& v) { c.out_dir = unquote(v); },
       [](const RunConfig& c) { return quote(c.out_dir); }},
  };
  return table;
}

const Field* find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (key == f.key) return &f;
  }
  return nullptr;
}

[[noreturn]] void unknown_key(const std::string& key) {
  std::string msg = "unknown config key '" + key + "'; valid keys:";
  for (const auto& k : config_keys()) msg += " " + k;
  throw ValidationError(msg);
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f) unknown_key(key);
  f->set(cfg, value);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.emplace_back(f.key);
    return k;
  }();
  return keys;
}

OptimizerOptions RunConfig::optimizer() const {
  OptimizerOptions o;
  o.direction = direction;
  o.starts = opt_starts;
  o.max_evals = opt_max_evals;
  o.seed = seed;
  o.rates = rates();
  return o;
}

void RunConfig::validate() const {
  device.validate();
  if (!std::isfinite(bias.phi_x)) throw ValidationError("phi_x must be finite");
  for (double g : bias.n_g) {
    if (!std::isfinite(g)) throw ValidationError("n_g entries must be finite");
  }
  QuasiparticleSector::from_id(sector);
  if (spectrum_sectors.empty()) throw ValidationError("spectrum_sectors must not be empty");
  for (int s : spectrum_sectors) QuasiparticleSector::from_id(s);
  if (!(f_min_ghz > 0.0)) throw ValidationError("f_min_ghz must be > 0");
  if (!(f_max_ghz >= f_min_ghz)) throw ValidationError("f_max_ghz must be >= f_min_ghz");
  if (!(f_step_mhz > 0.0)) throw ValidationError("f_step_mhz must be > 0");
  if (!(f_drive_ghz > 0.0)) throw ValidationError("f_drive_ghz must be > 0");
  for (std::size_t i = 1; i < power_dbm.size(); ++i) {
    if (!(power_dbm[i] > power_dbm[i - 1])) {
      throw ValidationError("power_dbm must be strictly increasing");
    }
  }
  if (!std::isfinite(flux_min) || !std::isfinite(flux_max) || !(flux_max >= flux_min)) {
    throw ValidationError("flux_min/flux_max must be finite with flux_max >= flux_min");
  }
  if (flux_points < 1) throw ValidationError("flux_points must be >= 1");
  for (double d : spread_delta) {
    if (!(d >= 0.0 && d <= 0.05)) throw ValidationError("spread_delta entries must lie in [0, 0.05]");
  }
  for (double cx : spread_c_x_ff) {
    if (!(cx >= 0.0) || !std::isfinite(cx)) {
      throw ValidationError("spread_c_x_ff entries must be non-negative");
    }
  }
  if (opt_starts < 1) throw ValidationError("opt_starts must be >= 1");
  if (opt_max_evals < 5) throw ValidationError("opt_max_evals must be >= 5");
  if (out_dir.empty()) throw ValidationError("out_dir must not be empty");
}

RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config parse error: ") + e.message() + " (line " +
                          std::to_string(e.line()) + ")");
  }
  RunConfig cfg;
  std::map<std::string, int> seen;
  auto assign = [&](const std::string& key, const std::string& value) {
    if (++seen[key] > 1) throw ValidationError("config key '" + key + "' given more than once");
    set_key(cfg, key, value);
  };
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      assign(name, node.data());
    } else {
      for (const auto& [key, leaf] : node) assign(key, leaf.data());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ValidationError("override '" + assignment + "' must have the form key=value");
  }
  set_key(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
  cfg.validate();
}

std::string config_to_text(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += std::string(f.key) + " = " + f.get(cfg) + "\n";
  }
  return out;
}

}  // namespace fanocirc
