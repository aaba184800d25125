#ifndef DEGENWAVE_CONFIG_HPP
#define DEGENWAVE_CONFIG_HPP

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "degenwave/errors.hpp"
#include "degenwave/fixed_point.hpp"
#include "degenwave/model.hpp"

namespace degenwave {

/// Sectioned key = value configuration file. Lines starting with '#' or ';'
/// are comments; values may be scalars or comma-separated lists.
class ConfigFile {
 public:
  static ConfigFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParams("config: cannot open " + path);
    ConfigFile cfg;
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string s = trim(line);
      if (s.empty() || s[0] == '#' || s[0] == ';') continue;
      if (s.front() == '[') {
        if (s.back() != ']')
          throw InvalidParams("config: bad section header at line " +
                              std::to_string(lineno));
        section = trim(s.substr(1, s.size() - 2));
        cfg.sections_[section];
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos)
        throw InvalidParams("config: expected key = value at line " +
                            std::to_string(lineno));
      const std::string key = trim(s.substr(0, eq));
      const std::string val = trim(s.substr(eq + 1));
      if (key.empty())
        throw InvalidParams("config: empty key at line " +
                            std::to_string(lineno));
      cfg.sections_[section][key] = val;
    }
    return cfg;
  }

  bool has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& def) const {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return def;
    const auto jt = it->second.find(key);
    return jt == it->second.end() ? def : jt->second;
  }

  double get_double(const std::string& section, const std::string& key,
                    double def) const {
    if (!has(section, key)) return def;
    return parse_double(get_string(section, key, ""), section, key);
  }

  int get_int(const std::string& section, const std::string& key,
              int def) const {
    const double v = get_double(section, key, static_cast<double>(def));
    return static_cast<int>(v);
  }

  bool get_bool(const std::string& section, const std::string& key,
                bool def) const {
    if (!has(section, key)) return def;
    const std::string v = get_string(section, key, "");
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InvalidParams("config: bad boolean [" + section + "] " + key);
  }

  std::vector<double> get_list(const std::string& section,
                               const std::string& key,
                               std::vector<double> def = {}) const {
    if (!has(section, key)) return def;
    std::vector<double> out;
    std::stringstream ss(get_string(section, key, ""));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      if (t.empty()) continue;
      out.push_back(parse_double(t, section, key));
    }
    return out;
  }

  /// Rejects typos: every present key must be declared known.
  void check_known(
      const std::map<std::string, std::set<std::string>>& known) const {
    for (const auto& [sec, kv] : sections_) {
      const auto it = known.find(sec);
      if (it == known.end())
        throw InvalidParams("config: unknown section [" + sec + "]");
      for (const auto& [key, _] : kv)
        if (!it->second.count(key))
          throw InvalidParams("config: unknown key [" + sec + "] " + key);
    }
  }

 private:
  static std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
  }

  static double parse_double(const std::string& v, const std::string& section,
                             const std::string& key) {
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw InvalidParams("config: bad number [" + section + "] " + key +
                          " = " + v);
    }
  }

  std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// Fully resolved run configuration with defaults for every command.
struct RunConfig {
  ModelParams model;

  // variational
  double var_tol = 1e-6;
  int var_max_iter = 100;
  double var_damping = 0.5;

  // speed (fixed point)
  FixedPointConfig fp;

  // simulate
  double sim_h = 0.05;
  double sim_T_final = 40.0;
  double sim_x_lo = -60.0;
  double sim_x_hi = 15.0;
  double sim_dt = 0.0;           ///< 0 = stability-bound auto
  double sim_delta = -1.0;       ///< -1 = 1e-3 a/b
  double sim_sample_every = 0.25;
  double sim_burn_in = 0.3;
  std::vector<double> sim_snapshots;

  // classify
  double cls_h = 1e-3;

  // sweep
  std::vector<double> sweep_m;
  std::vector<double> sweep_chi;
  bool sweep_simulate = false;

  std::string out_dir = ".";
  int workers = 1;
};

inline RunConfig resolve_config(const ConfigFile& f) {
  static const std::map<std::string, std::set<std::string>> known = {
      {"model", {"m", "chi", "a", "b", "tau"}},
      {"variational", {"tol", "max_iter", "damping"}},
      {"speed",
       {"h", "profile_tol", "speed_tol", "damping", "max_iter", "bisect_tol",
        "left", "tail", "compute_sigma"}},
      {"simulate",
       {"h", "T_final", "x_lo", "x_hi", "dt", "delta", "sample_every",
        "burn_in", "snapshots"}},
      {"classify", {"h"}},
      {"sweep", {"m", "chi", "simulate"}},
      {"output", {"dir", "workers"}},
  };
  f.check_known(known);

  RunConfig c;
  c.model.m = f.get_double("model", "m", c.model.m);
  c.model.chi = f.get_double("model", "chi", c.model.chi);
  c.model.a = f.get_double("model", "a", c.model.a);
  c.model.b = f.get_double("model", "b", c.model.b);
  c.model.tau = f.get_double("model", "tau", c.model.tau);
  c.model.validate();

  c.var_tol = f.get_double("variational", "tol", c.var_tol);
  c.var_max_iter = f.get_int("variational", "max_iter", c.var_max_iter);
  c.var_damping = f.get_double("variational", "damping", c.var_damping);

  c.fp.h = f.get_double("speed", "h", c.fp.h);
  c.fp.profile_tol = f.get_double("speed", "profile_tol", c.fp.profile_tol);
  c.fp.speed_tol = f.get_double("speed", "speed_tol", c.fp.speed_tol);
  c.fp.damping = f.get_double("speed", "damping", c.fp.damping);
  c.fp.max_iter = f.get_int("speed", "max_iter", c.fp.max_iter);
  c.fp.bisect_tol = f.get_double("speed", "bisect_tol", c.fp.bisect_tol);
  c.fp.left = f.get_double("speed", "left", c.fp.left);
  c.fp.tail = f.get_double("speed", "tail", c.fp.tail);
  c.fp.compute_sigma =
      f.get_bool("speed", "compute_sigma", c.fp.compute_sigma);

  c.sim_h = f.get_double("simulate", "h", c.sim_h);
  c.sim_T_final = f.get_double("simulate", "T_final", c.sim_T_final);
  c.sim_x_lo = f.get_double("simulate", "x_lo", c.sim_x_lo);
  c.sim_x_hi = f.get_double("simulate", "x_hi", c.sim_x_hi);
  c.sim_dt = f.get_double("simulate", "dt", c.sim_dt);
  c.sim_delta = f.get_double("simulate", "delta", c.sim_delta);
  c.sim_sample_every =
      f.get_double("simulate", "sample_every", c.sim_sample_every);
  c.sim_burn_in = f.get_double("simulate", "burn_in", c.sim_burn_in);
  c.sim_snapshots = f.get_list("simulate", "snapshots", c.sim_snapshots);

  c.cls_h = f.get_double("classify", "h", c.cls_h);

  c.sweep_m = f.get_list("sweep", "m", c.sweep_m);
  c.sweep_chi = f.get_list("sweep", "chi", c.sweep_chi);
  c.sweep_simulate = f.get_bool("sweep", "simulate", c.sweep_simulate);

  c.out_dir = f.get_string("output", "dir", c.out_dir);
  c.workers = f.get_int("output", "workers", c.workers);
  if (c.workers < 1) throw InvalidParams("config: workers must be >= 1");
  return c;
}

}  // namespace degenwave

#endif
