// Scenario ingestion and orchestration: JSON schema with validation, solver
// dispatch for tracked-front and variational runs, CSV artifact persistence
// (snapshots, atoms, events, diagnostics), cross-method comparison, and
// gnuplot script emission.
#ifndef SDW_SCENARIO_HPP
#define SDW_SCENARIO_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdw/conservation.hpp"
#include "sdw/entropy.hpp"
#include "sdw/errors.hpp"
#include "sdw/fronts.hpp"
#include "sdw/gvp.hpp"
#include "sdw/model.hpp"

namespace sdw {

struct ScenarioPiece {
  double x = 0, v = 0, u = 0, w = 0;
};

struct Scenario {
  std::string name = "scenario";
  // model
  std::string flux_name = "identity";
  int flux_k = 3;
  double flux_a = 1.0;
  std::string kappa_kind = "zero";  // zero | constant | algebraic
  double kappa_value = 0.0;
  double kappa_hat = 1.0;
  std::string ambient_kind = "zero";  // zero | constant | algebraic
  double ambient_value = 0.0;
  // initial data
  double left_v = 1.0, left_u = 0.0, left_w = 0.0;
  std::vector<ScenarioPiece> pieces;
  bool has_samples = false;
  std::vector<double> sample_x, sample_v, sample_u, sample_w;
  bool two_phase = false;
  // fronts solver
  bool fronts_enabled = false;
  double eps = 1.0 / 64, alpha = 0.5, C1 = 1.0, C2 = 2.0;
  std::string rho = "sqrt";  // sqrt | linear
  bool has_R = false;
  double fronts_R = 0.0;
  // gvp solver
  bool gvp_enabled = false;
  bool has_gvp_kh = false;
  double gvp_kappa_hat = 0.0;
  int gvp_cells = 4096;
  // run window and outputs
  double horizon = 1.0;
  double box_lo = -1.0, box_hi = 1.0;
  std::vector<double> out_times;
  int out_grid = 101;
};

namespace detail {

inline double jnum(const nlohmann::json& j, const char* key, double fallback,
                   const std::string& where, bool required = false) {
  if (!j.contains(key)) {
    if (required) throw ValidationError(where + "." + key + ": missing");
    return fallback;
  }
  if (!j.at(key).is_number())
    throw ValidationError(where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

inline std::string jstr(const nlohmann::json& j, const char* key,
                        const std::string& fallback,
                        const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string())
    throw ValidationError(where + "." + key + ": expected a string");
  return j.at(key).get<std::string>();
}

inline bool jbool(const nlohmann::json& j, const char* key, bool fallback,
                  const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean())
    throw ValidationError(where + "." + key + ": expected a boolean");
  return j.at(key).get<bool>();
}

inline std::vector<double> jarr(const nlohmann::json& j, const char* key,
                                const std::string& where) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  if (!j.at(key).is_array())
    throw ValidationError(where + "." + key + ": expected an array");
  for (const auto& e : j.at(key)) {
    if (!e.is_number())
      throw ValidationError(where + "." + key + ": expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace detail

inline Scenario parse_scenario(const nlohmann::json& j) {
  using detail::jarr;
  using detail::jbool;
  using detail::jnum;
  using detail::jstr;
  Scenario s;
  if (!j.is_object()) throw ValidationError("scenario: expected an object");
  s.name = jstr(j, "name", s.name, "scenario");

  if (j.contains("model")) {
    const auto& m = j.at("model");
    if (m.contains("flux")) {
      const auto& f = m.at("flux");
      s.flux_name = jstr(f, "name", s.flux_name, "model.flux");
      s.flux_k = static_cast<int>(jnum(f, "k", s.flux_k, "model.flux"));
      s.flux_a = jnum(f, "a", s.flux_a, "model.flux");
    }
    if (m.contains("kappa")) {
      const auto& k = m.at("kappa");
      s.kappa_kind = jstr(k, "kind", s.kappa_kind, "model.kappa");
      s.kappa_value = jnum(k, "value", s.kappa_value, "model.kappa");
      s.kappa_hat = jnum(k, "kappa_hat", s.kappa_hat, "model.kappa");
    }
    if (m.contains("ambient")) {
      const auto& a = m.at("ambient");
      s.ambient_kind = jstr(a, "kind", s.ambient_kind, "model.ambient");
      s.ambient_value = jnum(a, "value", s.ambient_value, "model.ambient");
    }
  }

  if (j.contains("initial")) {
    const auto& in = j.at("initial");
    if (in.contains("left")) {
      const auto& l = in.at("left");
      s.left_v = jnum(l, "v", s.left_v, "initial.left", true);
      s.left_u = jnum(l, "u", s.left_u, "initial.left", true);
      s.left_w = jnum(l, "w", s.left_w, "initial.left");
    }
    if (in.contains("pieces")) {
      if (!in.at("pieces").is_array())
        throw ValidationError("initial.pieces: expected an array");
      for (const auto& p : in.at("pieces")) {
        ScenarioPiece sp;
        sp.x = jnum(p, "x", 0, "initial.pieces[]", true);
        sp.v = jnum(p, "v", 0, "initial.pieces[]", true);
        sp.u = jnum(p, "u", 0, "initial.pieces[]", true);
        sp.w = jnum(p, "w", 0, "initial.pieces[]");
        s.pieces.push_back(sp);
      }
    }
    if (in.contains("samples")) {
      const auto& sm = in.at("samples");
      s.has_samples = true;
      s.sample_x = jarr(sm, "x", "initial.samples");
      s.sample_v = jarr(sm, "v", "initial.samples");
      s.sample_u = jarr(sm, "u", "initial.samples");
      s.sample_w = jarr(sm, "w", "initial.samples");
    }
    s.two_phase = jbool(in, "two_phase", s.two_phase, "initial");
  }

  if (j.contains("solver")) {
    const auto& so = j.at("solver");
    if (so.contains("fronts")) {
      const auto& f = so.at("fronts");
      s.fronts_enabled = jbool(f, "enabled", true, "solver.fronts");
      s.eps = jnum(f, "eps", s.eps, "solver.fronts");
      s.alpha = jnum(f, "alpha", s.alpha, "solver.fronts");
      s.C1 = jnum(f, "C1", s.C1, "solver.fronts");
      s.C2 = jnum(f, "C2", s.C2, "solver.fronts");
      s.rho = jstr(f, "rho", s.rho, "solver.fronts");
      if (f.contains("R")) {
        s.has_R = true;
        s.fronts_R = jnum(f, "R", 0, "solver.fronts");
      }
    }
    if (so.contains("gvp")) {
      const auto& g = so.at("gvp");
      s.gvp_enabled = jbool(g, "enabled", true, "solver.gvp");
      if (g.contains("kappa_hat")) {
        s.has_gvp_kh = true;
        s.gvp_kappa_hat = jnum(g, "kappa_hat", 0, "solver.gvp");
      }
      s.gvp_cells =
          static_cast<int>(jnum(g, "cells", s.gvp_cells, "solver.gvp"));
    }
  }

  s.horizon = detail::jnum(j, "horizon", s.horizon, "scenario", true);
  if (j.contains("box")) {
    const auto& b = j.at("box");
    s.box_lo = jnum(b, "lo", s.box_lo, "box", true);
    s.box_hi = jnum(b, "hi", s.box_hi, "box", true);
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    s.out_times = jarr(o, "times", "output");
    s.out_grid = static_cast<int>(jnum(o, "grid", s.out_grid, "output"));
  }
  if (s.out_times.empty()) s.out_times.push_back(s.horizon);
  return s;
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["model"]["flux"] = {{"name", s.flux_name}, {"k", s.flux_k},
                        {"a", s.flux_a}};
  j["model"]["kappa"] = {{"kind", s.kappa_kind},
                         {"value", s.kappa_value},
                         {"kappa_hat", s.kappa_hat}};
  j["model"]["ambient"] = {{"kind", s.ambient_kind},
                           {"value", s.ambient_value}};
  j["initial"]["left"] = {{"v", s.left_v}, {"u", s.left_u}, {"w", s.left_w}};
  j["initial"]["pieces"] = nlohmann::json::array();
  for (const ScenarioPiece& p : s.pieces)
    j["initial"]["pieces"].push_back(
        {{"x", p.x}, {"v", p.v}, {"u", p.u}, {"w", p.w}});
  if (s.has_samples)
    j["initial"]["samples"] = {{"x", s.sample_x},
                               {"v", s.sample_v},
                               {"u", s.sample_u},
                               {"w", s.sample_w}};
  j["initial"]["two_phase"] = s.two_phase;
  j["solver"]["fronts"] = {{"enabled", s.fronts_enabled}, {"eps", s.eps},
                           {"alpha", s.alpha},            {"C1", s.C1},
                           {"C2", s.C2},                  {"rho", s.rho}};
  if (s.has_R) j["solver"]["fronts"]["R"] = s.fronts_R;
  j["solver"]["gvp"] = {{"enabled", s.gvp_enabled}, {"cells", s.gvp_cells}};
  if (s.has_gvp_kh) j["solver"]["gvp"]["kappa_hat"] = s.gvp_kappa_hat;
  j["horizon"] = s.horizon;
  j["box"] = {{"lo", s.box_lo}, {"hi", s.box_hi}};
  j["output"] = {{"times", s.out_times}, {"grid", s.out_grid}};
  return j;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("scenario JSON parse error: ") +
                          e.what());
  }
  return parse_scenario(j);
}

// --- validation ----------------------------------------------------------

inline FluxSpec scenario_flux(const Scenario& s) {
  FluxParams fp;
  fp.k = s.flux_k;
  fp.a = s.flux_a;
  try {
    return builtin_flux(s.flux_name, fp);
  } catch (const Error& e) {
    throw ValidationError(std::string("model.flux: ") + e.what());
  }
}

inline CoeffPtr scenario_coeff(const Scenario& s) {
  if (s.kappa_kind == "zero") return CoefficientSpec::zero();
  if (s.kappa_kind == "constant")
    return CoefficientSpec::constant(
        s.kappa_value, s.ambient_kind == "constant" ? s.ambient_value : 0.0);
  if (s.kappa_kind == "algebraic")
    return CoefficientSpec::algebraic(
        s.kappa_hat, s.ambient_kind == "constant" ? s.ambient_value : 0.0);
  throw ValidationError("model.kappa.kind: unknown kind " + s.kappa_kind);
}

inline double gvp_effective_kh(const Scenario& s) {
  if (s.has_gvp_kh) return s.gvp_kappa_hat;
  if (s.kappa_kind == "algebraic") return s.kappa_hat;
  throw ValidationError(
      "solver.gvp.kappa_hat: required unless model.kappa is algebraic");
}

inline double fronts_anchor(const Scenario& s) {
  if (s.has_R) return s.fronts_R;
  if (!s.pieces.empty()) return s.pieces.front().x;
  if (s.has_samples && !s.sample_x.empty()) return s.sample_x.front();
  return s.box_lo + 0.1 * (s.box_hi - s.box_lo);
}

inline void validate_scenario(const Scenario& s) {
  if (!(s.box_lo < s.box_hi)) throw ValidationError("box: lo must be < hi");
  if (!(s.horizon > 0)) throw ValidationError("horizon: must be > 0");
  const FluxSpec flux = scenario_flux(s);

  if (s.kappa_kind != "zero" && s.kappa_kind != "constant" &&
      s.kappa_kind != "algebraic")
    throw ValidationError("model.kappa.kind: unknown kind " + s.kappa_kind);
  if (s.kappa_kind == "constant" && s.kappa_value < 0)
    throw ValidationError("model.kappa.value: drag must be >= 0");
  if (s.kappa_kind == "algebraic" && !(s.kappa_hat > 0))
    throw ValidationError("model.kappa.kappa_hat: must be > 0");
  if (s.ambient_kind != "zero" && s.ambient_kind != "constant" &&
      s.ambient_kind != "algebraic")
    throw ValidationError("model.ambient.kind: unknown kind " +
                          s.ambient_kind);
  if (s.ambient_kind == "algebraic" && s.kappa_kind != "algebraic")
    throw ValidationError(
        "model.ambient: the algebraic ambient x/(t+kappa_hat) requires "
        "algebraic kappa");

  if (s.left_v < 0) throw ValidationError("initial.left.v: must be >= 0");
  if (s.left_w < 0) throw ValidationError("initial.left.w: must be >= 0");
  for (std::size_t i = 0; i < s.pieces.size(); ++i) {
    const ScenarioPiece& p = s.pieces[i];
    if (p.v < 0) throw ValidationError("initial.pieces.v: must be >= 0");
    if (p.w < 0) throw ValidationError("initial.pieces.w: must be >= 0");
    if (i > 0 && !(p.x > s.pieces[i - 1].x))
      throw ValidationError("initial.pieces.x: must be strictly increasing");
    if (!(p.x > s.box_lo) || !(p.x < s.box_hi))
      throw ValidationError("initial.pieces.x: breaks must lie inside box");
  }
  if (s.has_samples) {
    if (!s.pieces.empty())
      throw ValidationError(
          "initial: pieces and samples are mutually exclusive");
    const std::size_t n = s.sample_x.size();
    if (n < 2) throw ValidationError("initial.samples.x: need >= 2 points");
    if (s.sample_v.size() != n || s.sample_u.size() != n ||
        (!s.sample_w.empty() && s.sample_w.size() != n))
      throw ValidationError("initial.samples: array sizes differ");
    for (std::size_t i = 1; i < n; ++i)
      if (!(s.sample_x[i] > s.sample_x[i - 1]))
        throw ValidationError(
            "initial.samples.x: must be strictly increasing");
    for (double v : s.sample_v)
      if (v < 0) throw ValidationError("initial.samples.v: must be >= 0");
  }
  if (!s.two_phase && (s.left_w != 0 ||
                       std::any_of(s.pieces.begin(), s.pieces.end(),
                                   [](const ScenarioPiece& p) {
                                     return p.w != 0;
                                   })))
    throw ValidationError("initial: w values need two_phase=true");

  if (!s.fronts_enabled && !s.gvp_enabled)
    throw ValidationError("solver: enable fronts, gvp, or both");

  if (s.fronts_enabled) {
    if (s.ambient_kind == "algebraic")
      throw ValidationError(
          "solver.fronts: x-dependent ambient velocity is a gvp-only regime");
    if (s.rho != "sqrt" && s.rho != "linear")
      throw ValidationError("solver.fronts.rho: choose sqrt or linear");
    PartitionSpec ps;
    ps.R = fronts_anchor(s);
    ps.eps = s.eps;
    ps.alpha = s.alpha;
    ps.C1 = s.C1;
    ps.C2 = s.C2;
    if (s.rho == "linear") ps.rho = [](double e) { return e; };
    if (!(ps.R > s.box_lo) || !(ps.R < s.box_hi))
      throw ValidationError("solver.fronts.R: must lie inside box");
    if (!s.pieces.empty() && ps.R > s.pieces.front().x)
      throw ValidationError(
          "solver.fronts.R: must not exceed the first break");
    try {
      partition_points(ps, s.box_hi);
    } catch (const InvalidPartition& e) {
      throw ValidationError(std::string("solver.fronts: ") + e.what());
    }

    // static interior check: fronts must stay inside the box, so that the
    // zero-boundary-flux truncation is valid
    double umin = s.left_u, umax = s.left_u;
    for (const ScenarioPiece& p : s.pieces) {
      umin = std::min(umin, p.u);
      umax = std::max(umax, p.u);
    }
    for (double u : s.sample_u) {
      umin = std::min(umin, u);
      umax = std::max(umax, u);
    }
    if (s.kappa_kind != "zero") {
      const double ua = s.ambient_kind == "constant" ? s.ambient_value : 0.0;
      umin = std::min(umin, ua);
      umax = std::max(umax, ua);
    }
    const double fmin = flux.f(umin), fmax = flux.f(umax);
    double first = ps.R, last = ps.R;
    if (!s.pieces.empty()) last = s.pieces.back().x;
    if (s.has_samples) last = s.sample_x.back();
    if (first + s.horizon * std::min(fmin, 0.0) < s.box_lo ||
        last + s.horizon * std::max(fmax, 0.0) > s.box_hi)
      throw ValidationError(
          "box: fronts may reach the box edge before the horizon; enlarge "
          "the box");
  }

  if (s.gvp_enabled) {
    if (s.flux_name != "identity")
      throw ValidationError("solver.gvp: requires the identity flux");
    if (s.two_phase)
      throw ValidationError("solver.gvp: single-phase model only");
    if (!(s.left_v > 0) ||
        std::any_of(s.pieces.begin(), s.pieces.end(),
                    [](const ScenarioPiece& p) { return !(p.v > 0); }) ||
        std::any_of(s.sample_v.begin(), s.sample_v.end(),
                    [](double v) { return !(v > 0); }))
      throw ValidationError(
          "solver.gvp: initial density must be strictly positive");
    if (!(gvp_effective_kh(s) > 0))
      throw ValidationError("solver.gvp.kappa_hat: must be > 0");
    if (s.gvp_cells < 4)
      throw ValidationError("solver.gvp.cells: must be >= 4");
  }

  for (double t : s.out_times)
    if (t < 0 || t > s.horizon + 1e-12)
      throw ValidationError("output.times: must lie in [0, horizon]");
  if (s.out_grid < 2) throw ValidationError("output.grid: must be >= 2");
}

// --- initial data builders ------------------------------------------------

// Piecewise-constant sampler with (break, next] semantics so that a cell
// whose right endpoint sits exactly on a break still carries the left state.
inline std::function<double(double)> piecewise_sampler(
    const Scenario& s, double leftval,
    double ScenarioPiece::* field) {
  std::vector<double> bx;
  std::vector<double> bv;
  for (const ScenarioPiece& p : s.pieces) {
    bx.push_back(p.x);
    bv.push_back(p.*field);
  }
  return [bx, bv, leftval](double x) {
    std::size_t k = std::lower_bound(bx.begin(), bx.end(), x) - bx.begin();
    return k == 0 ? leftval : bv[k - 1];
  };
}

inline std::function<double(double)> linear_sampler(std::vector<double> xs,
                                                    std::vector<double> ys) {
  return [xs = std::move(xs), ys = std::move(ys)](double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    std::size_t k = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
    const double f = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return ys[k - 1] + f * (ys[k] - ys[k - 1]);
  };
}

inline InitialData scenario_initial(const Scenario& s) {
  InitialData d;
  d.left = State{s.left_v, s.left_u};
  d.w_left = s.left_w;
  if (s.has_samples) {
    d.v = linear_sampler(s.sample_x, s.sample_v);
    d.u = linear_sampler(s.sample_x, s.sample_u);
    d.w = s.sample_w.empty()
              ? std::function<double(double)>([](double) { return 0.0; })
              : linear_sampler(s.sample_x, s.sample_w);
  } else {
    d.v = piecewise_sampler(s, s.left_v, &ScenarioPiece::v);
    d.u = piecewise_sampler(s, s.left_u, &ScenarioPiece::u);
    d.w = piecewise_sampler(s, s.left_w, &ScenarioPiece::w);
  }
  return d;
}

inline std::vector<double> scenario_breaks(const Scenario& s) {
  std::vector<double> b;
  for (const ScenarioPiece& p : s.pieces) b.push_back(p.x);
  return b;
}

// --- CSV persistence -------------------------------------------------------

namespace detail {

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) {
    out_.open(path, std::ios::binary);
    if (!out_) throw Error("cannot open output file: " + path.string());
    out_ << header << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

inline void write_events_csv(const std::filesystem::path& dir,
                             const std::vector<TrackEvent>& events) {
  CsvWriter w(dir / "events.csv", "T,X,participants");
  for (const TrackEvent& e : events) {
    std::string parts;
    for (std::size_t i = 0; i < e.participants.size(); ++i)
      parts += (i ? ";" : "") + std::to_string(e.participants[i]);
    w.row({g17(e.T), g17(e.X), parts});
  }
}

inline void write_plot_script(const std::filesystem::path& dir,
                              const std::string& name, bool two_phase) {
  std::ofstream out(dir / "plot.gp", std::ios::binary);
  out << "# gnuplot script for scenario '" << name << "'\n"
      << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set grid\n"
      << "set terminal pngcairo size 1200,800\n"
      << "set output 'solution.png'\n"
      << "set multiplot layout 2,1\n"
      << "set title 'velocity snapshots'\n"
      << "plot 'snapshots.csv' using 2:3 with lines lw 2 title 'u', \\\n"
      << "     'atoms.csv' using 2:(0):(column(3)) with points pt 7 ps 2 "
         "title 'atoms'\n"
      << "set title 'cumulative mass'\n"
      << "plot 'snapshots.csv' using 2:4 with lines lw 2 title 'm'\n"
      << "unset multiplot\n";
  (void)two_phase;
}

}  // namespace detail

// --- run -------------------------------------------------------------------

inline std::vector<double> output_grid(const Scenario& s) {
  std::vector<double> xs(s.out_grid);
  for (int i = 0; i < s.out_grid; ++i)
    xs[i] = s.box_lo + (s.box_hi - s.box_lo) * i / double(s.out_grid - 1);
  return xs;
}

inline PartitionSpec scenario_partition(const Scenario& s) {
  PartitionSpec ps;
  ps.R = fronts_anchor(s);
  ps.eps = s.eps;
  ps.alpha = s.alpha;
  ps.C1 = s.C1;
  ps.C2 = s.C2;
  if (s.rho == "linear") ps.rho = [](double e) { return e; };
  return ps;
}

// Tracks the scenario, flushing the event log to events.csv even when the
// solver fails mid-run (the CLI then exits with the solver-error status).
inline Trajectory run_tracking(const Scenario& s,
                               const std::filesystem::path& dir,
                               const ToleranceProfile& tol) {
  const FluxSpec flux = scenario_flux(s);
  const CoeffPtr coeff = scenario_coeff(s);
  const InitialData data = scenario_initial(s);
  FrontConfiguration cur =
      discretize_initial(data, scenario_partition(s), s.box_lo, s.box_hi,
                         flux, coeff, s.horizon, s.two_phase, tol,
                         scenario_breaks(s));
  Trajectory traj;
  const long guard = 10 * std::max<long>(cur.event_budget, 4);
  long events = 0;
  try {
    for (;;) {
      std::optional<TrackEvent> ev = next_interaction(cur, s.horizon);
      if (!ev) {
        cur.valid_to = s.horizon;
        traj.configs.push_back(std::move(cur));
        return traj;
      }
      if (++events > guard)
        throw EventBudgetExceeded(
            "interaction count exceeded ten times the budget");
      cur.valid_to = ev->T;
      traj.configs.push_back(cur);
      cur = resolve_interaction(cur, *ev);
    }
  } catch (const Error&) {
    detail::write_events_csv(dir, cur.event_log);
    throw;
  }
}

inline void run_fronts_scenario(const Scenario& s,
                                const std::filesystem::path& dir,
                                const ToleranceProfile& tol) {
  const Trajectory traj = run_tracking(s, dir, tol);
  const std::vector<double> xs = output_grid(s);

  detail::CsvWriter snap_csv(dir / "snapshots.csv", "t,x,u,m");
  detail::CsvWriter atom_csv(dir / "atoms.csv",
                             s.two_phase ? "t,x,xi,chi,xi_v,xi_w"
                                         : "t,x,xi,chi");
  detail::CsvWriter diag_csv(
      dir / "diagnostics.csv",
      "t,M0,M1,entropy_residual_max,oleinik_violation");

  for (double t : s.out_times) {
    const FrontConfiguration& cfg = traj.at_time(t);
    const Snapshot snap = sample(cfg, t, xs);
    for (std::size_t i = 0; i < xs.size(); ++i)
      snap_csv.row({detail::g17(t), detail::g17(snap.x[i]),
                    detail::g17(snap.u[i]), detail::g17(snap.m[i])});
    for (const Atom& a : snap.atoms) {
      std::vector<std::string> row = {detail::g17(t), detail::g17(a.x),
                                      detail::g17(a.xi), detail::g17(a.chi)};
      if (s.two_phase) {
        row.push_back(detail::g17(a.xi_v));
        row.push_back(detail::g17(a.xi_w));
      }
      atom_csv.row(row);
    }
    double res_max = -std::numeric_limits<double>::infinity();
    bool any_res = false;
    for (const TrackFront& f : cfg.fronts) {
      if (!f.is_delta()) continue;
      try {
        const DeltaFront& d =
            f.node.index() == 0
                ? std::get<DeltaFront>(f.node)
                : std::get<DeltaFront3>(f.node).aggregate();
        const DissipativityPoint p = dissipativity_residual(d, t, tol);
        res_max = std::max(res_max, p.residual);
        any_res = true;
      } catch (const Error&) {
        // front born or dying at this exact time: no interior window
      }
    }
    diag_csv.row({detail::g17(t), detail::g17(total_mass(cfg, t)),
                  detail::g17(total_momentum(cfg, t)),
                  any_res ? detail::g17(res_max) : "nan", "nan"});
  }
  detail::write_events_csv(dir, traj.final_config().event_log);
}

inline GvpField scenario_gvp_field(const Scenario& s) {
  const InitialData data = scenario_initial(s);
  return GvpField(data.v, data.u, s.box_lo, s.box_hi, gvp_effective_kh(s),
                  s.gvp_cells, scenario_breaks(s));
}

inline void run_gvp_scenario(const Scenario& s,
                             const std::filesystem::path& dir,
                             const ToleranceProfile&) {
  const GvpField field = scenario_gvp_field(s);
  const std::vector<double> xs = output_grid(s);

  detail::CsvWriter snap_csv(dir / "snapshots.csv", "t,x,u,m");
  detail::CsvWriter atom_csv(dir / "atoms.csv", "t,x,xi,chi");
  detail::CsvWriter diag_csv(
      dir / "diagnostics.csv",
      "t,M0,M1,entropy_residual_max,oleinik_violation");
  const double span = s.box_hi - s.box_lo;

  for (double t : s.out_times) {
    const GvpField::TimeGeom g = field.geom(t);
    const double delta = 1e-9 * (1.0 + span);
    const double xe_lo = field.x_forward(field.y_min(), g) + delta;
    const double xe_hi = field.x_forward(field.y_max(), g) - delta;
    std::vector<double> xq = xs;
    for (double& x : xq) x = std::clamp(x, xe_lo, xe_hi);
    const std::vector<MinimizerPair> row = minimize_row(field, xq, t);
    for (std::size_t i = 0; i < xs.size(); ++i)
      snap_csv.row({detail::g17(t), detail::g17(xs[i]),
                    detail::g17(detail::velocity_from_pair(field, row[i], g)),
                    detail::g17(field.P0(row[i].y_star))});
    for (const GvpAtom& a :
         find_atoms(field, t, xe_lo, xe_hi, std::max(256, s.out_grid)))
      atom_csv.row({detail::g17(t), detail::g17(a.x), detail::g17(a.mass),
                    detail::g17(a.u_avg)});

    const double M0 = field.P0(field.y_max()) - field.P0(field.y_min());
    const double M1 =
        g.a * (field.P1(field.y_max()) - field.P1(field.y_min())) +
        g.b * (field.Pu(field.y_max()) - field.Pu(field.y_min()));
    std::string olk = "nan";
    if (t > 0) {
      std::vector<double> grid = xq;
      grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
      if (grid.size() >= 2)
        olk = detail::g17(oleinik_violation(field, t, grid).max_violation);
    }
    diag_csv.row(
        {detail::g17(t), detail::g17(M0), detail::g17(M1), "nan", olk});
  }
  detail::write_events_csv(dir, {});
}

inline void run_scenario(const Scenario& s, const std::string& out_dir,
                         const ToleranceProfile& tol = {}) {
  validate_scenario(s);
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  if (s.fronts_enabled)
    run_fronts_scenario(s, dir, tol);
  else
    run_gvp_scenario(s, dir, tol);
  detail::write_plot_script(dir, s.name, s.two_phase);
}

// --- compare ---------------------------------------------------------------

// Two overlap regimes: (A) pressureless fronts against the variational
// solver at large kappa_hat (grid velocities and atom positions); (B) the
// algebraic-drag regime, variational shock position against the independent
// balance-system integration. Everything else is incompatible.
inline void compare_scenario(const Scenario& s, const std::string& out_dir,
                             const ToleranceProfile& tol = {}) {
  validate_scenario(s);
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  const bool mode_a = s.fronts_enabled && s.gvp_enabled &&
                      s.kappa_kind == "zero" && s.ambient_kind == "zero" &&
                      s.flux_name == "identity";
  const bool mode_b = s.gvp_enabled && s.kappa_kind == "algebraic" &&
                      s.ambient_kind == "algebraic" &&
                      s.flux_name == "identity" && s.pieces.size() == 1 &&
                      s.left_u > s.pieces.front().u && !s.two_phase;
  if (!mode_a && !mode_b)
    throw IncompatibleScenario(
        "compare needs either pressureless fronts+gvp (identity flux) or a "
        "single-jump algebraic-drag gvp scenario");

  detail::CsvWriter cmp(dir / "compare.csv", "kind,t,x,a,b,delta");
  const double cell = (s.box_hi - s.box_lo) / double(s.out_grid - 1);

  if (mode_a) {
    const Trajectory traj = run_tracking(s, dir, tol);
    const GvpField field = scenario_gvp_field(s);
    double max_du = 0, max_atom = 0;
    for (double t : s.out_times) {
      if (!(t > 0)) continue;
      const FrontConfiguration& cfg = traj.at_time(t);
      const GvpField::TimeGeom g = field.geom(t);
      const double delta = 1e-9 * (1.0 + s.box_hi - s.box_lo);
      const double xe_lo = field.x_forward(field.y_min(), g) + delta;
      const double xe_hi = field.x_forward(field.y_max(), g) - delta;

      std::vector<double> xs;
      for (double x : output_grid(s))
        if (x >= xe_lo && x <= xe_hi) xs.push_back(x);
      const Snapshot snap = sample(cfg, t, xs);
      const std::vector<MinimizerPair> row = minimize_row(field, xs, t);

      std::vector<double> atom_pos;
      for (const Atom& a : snap.atoms) atom_pos.push_back(a.x);
      const std::vector<GvpAtom> gatoms =
          find_atoms(field, t, xe_lo, xe_hi, std::max(256, s.out_grid));
      for (const GvpAtom& a : gatoms) atom_pos.push_back(a.x);

      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double uf = snap.u[i];
        const double ug = detail::velocity_from_pair(field, row[i], g);
        cmp.row({"u", detail::g17(t), detail::g17(xs[i]), detail::g17(uf),
                 detail::g17(ug), detail::g17(std::fabs(uf - ug))});
        bool near_atom = false;
        for (double ax : atom_pos)
          if (std::fabs(xs[i] - ax) <= 2.0 * cell) near_atom = true;
        if (!near_atom) max_du = std::max(max_du, std::fabs(uf - ug));
      }
      for (const Atom& a : snap.atoms) {
        double best = std::numeric_limits<double>::infinity();
        double bx = std::numeric_limits<double>::quiet_NaN();
        for (const GvpAtom& ga : gatoms)
          if (std::fabs(ga.x - a.x) < best) {
            best = std::fabs(ga.x - a.x);
            bx = ga.x;
          }
        cmp.row({"atom_x", detail::g17(t), detail::g17(a.x),
                 detail::g17(a.x), detail::g17(bx), detail::g17(best)});
        if (std::isfinite(best)) max_atom = std::max(max_atom, best);
      }
    }
    cmp.row({"summary", detail::g17(s.out_times.back()), "nan",
             detail::g17(max_du), detail::g17(max_atom),
             detail::g17(max_du)});
  } else {
    const GvpField field = scenario_gvp_field(s);
    const double kh = gvp_effective_kh(s);
    const ScenarioPiece& p = s.pieces.front();
    const OdeSolution oracle = riemann_shock_oracle(
        s.left_v, s.left_u, p.v, p.u, kh, s.horizon, tol);
    double max_dx = 0;
    for (double t : s.out_times) {
      if (!(t >= 1e-6)) continue;
      const GvpField::TimeGeom g = field.geom(t);
      const double delta = 1e-9 * (1.0 + s.box_hi - s.box_lo);
      const double xe_lo = field.x_forward(field.y_min(), g) + delta;
      const double xe_hi = field.x_forward(field.y_max(), g) - delta;
      const double x_oracle = p.x + oracle.eval1(t);
      const std::vector<GvpAtom> atoms =
          find_atoms(field, t, xe_lo, xe_hi, std::max(256, s.out_grid));
      double best = std::numeric_limits<double>::infinity();
      double bx = std::numeric_limits<double>::quiet_NaN();
      for (const GvpAtom& a : atoms)
        if (std::fabs(a.x - x_oracle) < best) {
          best = std::fabs(a.x - x_oracle);
          bx = a.x;
        }
      cmp.row({"shock_x", detail::g17(t), detail::g17(x_oracle),
               detail::g17(bx), detail::g17(x_oracle), detail::g17(best)});
      if (std::isfinite(best)) max_dx = std::max(max_dx, best);
    }
    cmp.row({"summary", detail::g17(s.out_times.back()), "nan",
             detail::g17(max_dx), detail::g17(2.0 * cell),
             detail::g17(max_dx)});
  }
}

}  // namespace sdw

#endif  // SDW_SCENARIO_HPP
