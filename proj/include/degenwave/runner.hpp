#ifndef DEGENWAVE_RUNNER_HPP
#define DEGENWAVE_RUNNER_HPP

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "degenwave/classify.hpp"
#include "degenwave/config.hpp"
#include "degenwave/fixed_point.hpp"
#include "degenwave/model.hpp"
#include "degenwave/simulate.hpp"
#include "degenwave/variational.hpp"

namespace degenwave {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum ExitCode {
  kExitOk = 0,
  kExitUsage = 1,
  kExitSolver = 2,
  kExitNonConvergent = 3,
};

namespace detail {

using json = nlohmann::ordered_json;

inline std::string fmt_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline json model_json(const ModelParams& p) {
  return json{{"m", p.m}, {"chi", p.chi}, {"a", p.a}, {"b", p.b},
              {"tau", p.tau}};
}

inline json config_echo(const RunConfig& c) {
  json j;
  j["model"] = model_json(c.model);
  j["variational"] = {{"tol", c.var_tol},
                      {"max_iter", c.var_max_iter},
                      {"damping", c.var_damping}};
  j["speed"] = {{"h", c.fp.h},
                {"profile_tol", c.fp.profile_tol},
                {"speed_tol", c.fp.speed_tol},
                {"damping", c.fp.damping},
                {"max_iter", c.fp.max_iter},
                {"bisect_tol", c.fp.bisect_tol},
                {"left", c.fp.left},
                {"tail", c.fp.tail},
                {"compute_sigma", c.fp.compute_sigma}};
  j["simulate"] = {{"h", c.sim_h},
                   {"T_final", c.sim_T_final},
                   {"x_lo", c.sim_x_lo},
                   {"x_hi", c.sim_x_hi},
                   {"dt", c.sim_dt},
                   {"delta", c.sim_delta},
                   {"sample_every", c.sim_sample_every},
                   {"burn_in", c.sim_burn_in},
                   {"snapshots", c.sim_snapshots}};
  j["classify"] = {{"h", c.cls_h}};
  j["sweep"] = {{"m", c.sweep_m},
                {"chi", c.sweep_chi},
                {"simulate", c.sweep_simulate}};
  j["output"] = {{"dir", c.out_dir}, {"workers", c.workers}};
  return j;
}

inline void write_text(const std::filesystem::path& path,
                       const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SolverError("cannot write " + path.string());
  out << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

/// Run metadata lives in a sidecar so the payload stays bit-identical
/// across reruns.
inline void write_sidecar(const std::filesystem::path& payload,
                          const std::string& command) {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  json meta{{"command", command},
            {"version", kVersion},
            {"payload", payload.filename().string()},
            {"generated_at", stamp}};
  auto p = payload;
  p.replace_extension(".meta.json");
  write_json(p, meta);
}

inline void write_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c)
    out += (c ? "," : "") + header[c];
  out += "\n";
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      out += (c ? "," : "") + fmt_num(columns[c][r]);
    out += "\n";
  }
  write_text(path, out);
}

}  // namespace detail

inline int cmd_variational(const RunConfig& cfg) {
  using detail::json;
  const std::filesystem::path out(cfg.out_dir);
  std::filesystem::create_directories(out);
  try {
    ExtremalConfig ec;
    ec.tol = cfg.var_tol;
    ec.max_iter = cfg.var_max_iter;
    ec.damping = cfg.var_damping;
    const ExtremalResult res = extremal_weight(cfg.model, ec);

    json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = detail::config_echo(cfg);
    j["m"] = cfg.model.m;
    j["a"] = cfg.model.a;
    j["b"] = cfg.model.b;
    j["c_star_0"] = res.c_star_0;
    j["c_unit"] = res.c_unit;
    j["sigma"] = res.sigma;
    j["A"] = res.A;
    j["iterations"] = res.iterations;
    detail::write_json(out / "variational.json", j);
    detail::write_sidecar(out / "variational.json", "variational");

    std::vector<double> s(res.g_tilde.grid.points);
    detail::write_csv(out / "g_tilde.csv", {"s", "g", "g_prime"},
                      {s, res.g_tilde.g, res.g_tilde.g1});
    return kExitOk;
  } catch (const NonConvergent& e) {
    std::cerr << "variational: " << e.what() << "\n";
    return kExitNonConvergent;
  } catch (const std::exception& e) {
    std::cerr << "variational: " << e.what() << "\n";
    return kExitSolver;
  }
}

inline int cmd_speed(const RunConfig& cfg) {
  using detail::json;
  const std::filesystem::path out(cfg.out_dir);
  std::filesystem::create_directories(out);
  try {
    const WaveResult res = solve_wave(cfg.model, cfg.fp);

    json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = detail::config_echo(cfg);
    j["c_star_chi"] = res.speed;
    j["c_star_0"] = res.c_star_0;
    j["ratio"] = res.speed / res.c_star_0;
    j["iterations"] = res.iterations;
    j["converged"] = res.converged;
    j["sigma"] = res.sigma;
    if (cfg.model.chi > 0.0 && std::isfinite(res.sigma)) {
      j["admissible"] = res.admissibility.admissible;
      j["chi_bounds"] = {
          {"variational", res.admissibility.bound_variational},
          {"growth", res.admissibility.bound_growth},
          {"relaxation", res.admissibility.bound_relaxation}};
    }
    if (res.has_bounds) {
      const bool pass = res.speed >= res.bounds.lower - cfg.fp.speed_tol &&
                        res.speed < res.bounds.upper;
      j["bounds_check"] = pass ? "pass" : "fail";
      j["bounds"] = {{"lower", res.bounds.lower},
                     {"upper", res.bounds.upper},
                     {"lower_coarse", res.bounds.lower_coarse},
                     {"lower_refined", res.bounds.lower_refined}};
    } else {
      j["bounds_check"] = "n/a";
    }
    detail::write_json(out / "speed.json", j);
    detail::write_sidecar(out / "speed.json", "speed");

    const std::size_t n = res.profile.grid.size();
    std::vector<double> xi(res.profile.grid.points), eta(n), eta1(n);
    for (std::size_t i = 0; i < n; ++i) {
      eta[i] = res.signal.eta_at(xi[i]);
      eta1[i] = res.signal.eta1_at(xi[i]);
    }
    detail::write_csv(out / "wave.csv", {"xi", "phi", "eta", "eta_prime"},
                      {xi, res.profile.values, eta, eta1});
    return res.converged ? kExitOk : kExitNonConvergent;
  } catch (const NonConvergent& e) {
    std::cerr << "speed: " << e.what() << "\n";
    return kExitNonConvergent;
  } catch (const std::exception& e) {
    std::cerr << "speed: " << e.what() << "\n";
    return kExitSolver;
  }
}

inline int cmd_simulate(const RunConfig& cfg) {
  using detail::json;
  const std::filesystem::path out(cfg.out_dir);
  std::filesystem::create_directories(out);
  try {
    SimState init =
        make_step_initial(cfg.model, cfg.sim_x_lo, cfg.sim_x_hi, cfg.sim_h);
    RunOptions opt;
    opt.dt = cfg.sim_dt;
    opt.delta = cfg.sim_delta;
    opt.sample_every = cfg.sim_sample_every;
    opt.snapshot_times = cfg.sim_snapshots;
    const RunResult res = run(cfg.model, std::move(init), cfg.sim_T_final, opt);
    const EmpiricalSpeed sp = empirical_speed(res.front, cfg.sim_burn_in);

    json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = detail::config_echo(cfg);
    j["empirical_speed"] = sp.speed;
    j["speed_stderr"] = sp.stderr_;
    j["samples"] = sp.samples;
    j["delta"] = res.front.delta;
    j["grid"] = {{"x_lo", cfg.sim_x_lo},
                 {"x_hi", cfg.sim_x_hi},
                 {"h", cfg.sim_h}};
    j["dt"] = res.dt_used;
    j["steps"] = res.steps;
    detail::write_json(out / "simulate.json", j);
    detail::write_sidecar(out / "simulate.json", "simulate");

    detail::write_csv(out / "front.csv", {"t", "x_f"},
                      {res.front.times, res.front.positions});
    for (const auto& snap : res.snapshots) {
      char name[64];
      std::snprintf(name, sizeof(name), "snapshot_t%.6g.csv", snap.time);
      detail::write_csv(out / name, {"x", "u", "v"},
                        {snap.grid.points, snap.u, snap.v});
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "simulate: " << e.what() << "\n";
    return kExitSolver;
  }
}

inline int cmd_classify(const RunConfig& cfg) {
  using detail::json;
  const std::filesystem::path out(cfg.out_dir);
  std::filesystem::create_directories(out);
  try {
    const ModelParams& p = cfg.model;
    Profile prof;
    if (p.chi == 0.0) {
      // fast route: the chi = 0 wave straight from the shooter
      std::vector<PhaseState> trace;
      ShootConfig sc;
      const double probe_t_max =
          80.0 * std::max(1.0, std::sqrt(p.capacity()));
      degenwave::detail::chi0_speed(p, 1e-6, sc, probe_t_max, &trace);
      prof = reconstruct_profile(trace, p, cfg.cls_h);
    } else {
      FixedPointConfig fc = cfg.fp;
      fc.h = cfg.cls_h;
      prof = solve_wave(p, fc).profile;
    }
    const ConsistencyReport rep = consistency_check(prof, p);

    json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = detail::config_echo(cfg);
    j["m"] = p.m;
    j["class"] = to_string(rep.theoretical);
    j["fitted_exponent"] = rep.fit.exponent;
    j["expected_exponent"] = rep.expected_exponent;
    j["fitted_amplitude"] = rep.fit.amplitude;
    j["derivative_regime"] = rep.derivative_regime;
    j["consistency"] = rep.agrees ? "pass" : "fail";
    detail::write_json(out / "classify.json", j);
    detail::write_sidecar(out / "classify.json", "classify");
    return kExitOk;
  } catch (const NonConvergent& e) {
    std::cerr << "classify: " << e.what() << "\n";
    return kExitNonConvergent;
  } catch (const std::exception& e) {
    std::cerr << "classify: " << e.what() << "\n";
    return kExitSolver;
  }
}

inline int cmd_sweep(const RunConfig& cfg) {
  using detail::json;
  if (cfg.sweep_m.empty() || cfg.sweep_chi.empty()) {
    std::cerr << "sweep: empty sweep list ([sweep] m and chi required)\n";
    return kExitUsage;
  }
  const std::filesystem::path out(cfg.out_dir);
  std::filesystem::create_directories(out);

  struct Cell {
    double m = 0.0, chi = 0.0;
    double c_star_chi = 0.0, c_star_0 = 0.0, ratio = 0.0;
    double empirical = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
    std::string error;
  };
  std::vector<Cell> cells;
  for (double m : cfg.sweep_m)
    for (double chi : cfg.sweep_chi) cells.push_back({m, chi});

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      Cell& cell = cells[i];
      try {
        ModelParams p = cfg.model;
        p.m = cell.m;
        p.chi = cell.chi;
        const WaveResult res = solve_wave(p, cfg.fp);
        cell.c_star_chi = res.speed;
        cell.c_star_0 = res.c_star_0;
        cell.ratio = res.speed / res.c_star_0;
        if (cfg.sweep_simulate) {
          SimState init =
              make_step_initial(p, cfg.sim_x_lo, cfg.sim_x_hi, cfg.sim_h);
          RunOptions opt;
          opt.dt = cfg.sim_dt;
          opt.delta = cfg.sim_delta;
          opt.sample_every = cfg.sim_sample_every;
          const RunResult rr = run(p, std::move(init), cfg.sim_T_final, opt);
          cell.empirical = empirical_speed(rr.front, cfg.sim_burn_in).speed;
        }
        cell.ok = res.converged;
        if (!res.converged) cell.error = "non-convergent";
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << "sweep: cell m=" << cell.m << " chi=" << cell.chi
                  << " failed: " << e.what() << "\n";
      }
    }
  };
  const auto n_workers = static_cast<std::size_t>(
      std::min<int>(cfg.workers, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::string csv = "m,chi,c_star_chi,c_star_0,ratio,empirical_speed,status\n";
  for (const auto& cell : cells) {
    csv += detail::fmt_num(cell.m) + "," + detail::fmt_num(cell.chi) + ",";
    if (cell.ok || cell.error == "non-convergent") {
      csv += detail::fmt_num(cell.c_star_chi) + "," +
             detail::fmt_num(cell.c_star_0) + "," +
             detail::fmt_num(cell.ratio) + ",";
    } else {
      csv += ",,,";
    }
    csv += std::isfinite(cell.empirical) ? detail::fmt_num(cell.empirical)
                                         : std::string();
    csv += ",";
    csv += cell.ok ? "ok" : (cell.error.empty() ? "error" : cell.error);
    csv += "\n";
  }
  detail::write_text(out / "sweep.csv", csv);

  json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = detail::config_echo(cfg);
  j["cells"] = json::array();
  for (const auto& cell : cells) {
    json row{{"m", cell.m}, {"chi", cell.chi}, {"status", cell.ok ? "ok" : cell.error}};
    if (cell.ok || cell.error == "non-convergent") {
      row["c_star_chi"] = cell.c_star_chi;
      row["c_star_0"] = cell.c_star_0;
      row["ratio"] = cell.ratio;
    }
    if (std::isfinite(cell.empirical)) row["empirical_speed"] = cell.empirical;
    j["cells"].push_back(row);
  }
  detail::write_json(out / "sweep.json", j);
  detail::write_sidecar(out / "sweep.json", "sweep");
  return kExitOk;
}

}  // namespace degenwave

#endif
