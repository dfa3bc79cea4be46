// Wave-front tracking: discretization of initial data into piecewise-constant
// states, per-boundary Riemann fans/fronts, interaction detection and merge
// resolution, trajectory assembly and field sampling.
#ifndef SDW_FRONTS_HPP
#define SDW_FRONTS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "sdw/errors.hpp"
#include "sdw/model.hpp"
#include "sdw/riemann.hpp"
#include "sdw/twophase.hpp"

namespace sdw {

struct PartitionSpec {
  double R = 0;      // left anchor of the sampled region
  double eps = 1.0 / 64;
  double alpha = 0.5;
  double C1 = 1.0;
  double C2 = 2.0;
  std::function<double(double)> rho = [](double e) { return std::sqrt(e); };
};

// Uniform partition of (R, xmax] with every cell width inside
// (C1*eps^alpha, C2*rho(eps)).
inline std::vector<double> partition_points(const PartitionSpec& p,
                                            double xmax) {
  if (!(p.eps > 0) || !(p.alpha > 0) || !(p.alpha < 1) || !(p.C1 > 0) ||
      !(p.C2 > 0))
    throw InvalidPartition("partition parameters out of range");
  if (!(xmax > p.R)) throw InvalidPartition("empty sampling interval");
  const double lo = p.C1 * std::pow(p.eps, p.alpha);
  const double hi = p.C2 * p.rho(p.eps);
  if (!(lo < hi))
    throw InvalidPartition("width bounds cross: C1*eps^alpha >= C2*rho(eps)");
  const double L = xmax - p.R;
  long n = std::lround(L / std::sqrt(lo * hi));
  auto admissible = [&](long m) {
    return m >= 1 && L / double(m) > lo && L / double(m) < hi;
  };
  if (!admissible(n)) {
    if (admissible(n + 1))
      ++n;
    else if (admissible(n - 1))
      --n;
    else
      throw InvalidPartition("no admissible cell count for this interval");
  }
  std::vector<double> y(n + 1);
  for (long i = 0; i <= n; ++i) y[i] = p.R + L * double(i) / double(n);
  y.back() = xmax;
  return y;
}

// Partition aligned to the given anchor positions (data breakpoints): each
// segment between consecutive anchors is split uniformly with widths kept
// below the upper bound; the lower width bound may be undershot next to an
// anchor, which costs at most one extra front per anchor.
inline std::vector<double> partition_points_aligned(
    const PartitionSpec& p, double xmax, const std::vector<double>& anchors) {
  if (anchors.empty()) return partition_points(p, xmax);
  if (!(p.eps > 0) || !(p.alpha > 0) || !(p.alpha < 1) || !(p.C1 > 0) ||
      !(p.C2 > 0))
    throw InvalidPartition("partition parameters out of range");
  if (!(xmax > p.R)) throw InvalidPartition("empty sampling interval");
  const double lo = p.C1 * std::pow(p.eps, p.alpha);
  const double hi = p.C2 * p.rho(p.eps);
  if (!(lo < hi))
    throw InvalidPartition("width bounds cross: C1*eps^alpha >= C2*rho(eps)");

  std::vector<double> marks;
  marks.push_back(p.R);
  for (double a : anchors)
    if (a > p.R && a < xmax) marks.push_back(a);
  marks.push_back(xmax);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  std::vector<double> y;
  y.push_back(p.R);
  for (std::size_t s = 0; s + 1 < marks.size(); ++s) {
    const double L = marks[s + 1] - marks[s];
    long n = std::max<long>(1, std::lround(L / std::sqrt(lo * hi)));
    while (L / double(n) >= hi) ++n;
    for (long i = 1; i <= n; ++i)
      y.push_back(marks[s] + L * double(i) / double(n));
    y.back() = marks[s + 1];
  }
  return y;
}

struct StatePiece {
  double v = 0;
  double w = 0;  // second phase (two-phase runs only)
  VelocityOrbit orbit;
  bool vacuum = false;
  double density() const { return v + w; }
};

struct ContactFront {
  double birth_time = 0, birth_x = 0;
  VelocityOrbit orbit;
  std::shared_ptr<SpeedIntegral> path;
  double pos(double t) const {
    return birth_x + path->psi_between(birth_time, t);
  }
};

inline ContactFront make_contact(double t0, double x0, VelocityOrbit orbit,
                                 const FluxSpec& flux) {
  ContactFront c;
  c.birth_time = t0;
  c.birth_x = x0;
  c.orbit = std::move(orbit);
  c.path = std::make_shared<SpeedIntegral>(c.orbit, flux);
  return c;
}

struct TrackFront {
  std::variant<DeltaFront, DeltaFront3, ContactFront> node;

  bool is_delta() const {
    return !std::holds_alternative<ContactFront>(node);
  }
  double position(double t) const {
    return std::visit(
        [t](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, ContactFront>)
            return f.pos(t);
          else
            return f.c(t);
        },
        node);
  }
  double xi(double t) const {
    return std::visit(
        [t](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, ContactFront>)
            return 0.0;
          else
            return f.xi(t);
        },
        node);
  }
  // Velocity trace seen from either side (atoms carry their own velocity).
  double trace(double t) const {
    return std::visit(
        [t](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, ContactFront>)
            return f.orbit.at(t);
          else
            return f.chi(t);
        },
        node);
  }
  // Orbit bounding the given side (used when the outer state is vacuum).
  const VelocityOrbit& side_orbit(bool left_side) const {
    return std::visit(
        [left_side](const auto& f) -> const VelocityOrbit& {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, ContactFront>)
            return f.orbit;
          else if constexpr (std::is_same_v<T, DeltaFront3>)
            return left_side ? f.aggregate().left().orbit
                             : f.aggregate().right().orbit;
          else
            return left_side ? f.left().orbit : f.right().orbit;
        },
        node);
  }
};

struct TrackEvent {
  double T = 0, X = 0;
  std::vector<int> participants;
  bool vacuum_edge = false;
};

struct FrontConfiguration {
  double time = 0;
  double valid_to = 0;
  double box_lo = 0, box_hi = 0;
  double horizon = 0;
  bool two_phase = false;
  FluxSpec flux;
  CoeffPtr coeff;
  std::vector<StatePiece> states;  // states.size() == fronts.size() + 1
  std::vector<TrackFront> fronts;
  std::vector<TrackEvent> event_log;
  long event_budget = 0;
  std::shared_ptr<SpeedIntegral> left_edge, right_edge;
  ToleranceProfile tol;

  // Characteristic funnel anchored at the truncation box; no mass or
  // momentum crosses these curves, so totals inside are conserved exactly.
  double funnel_lo(double t) const {
    return box_lo + left_edge->psi_between(0.0, t);
  }
  double funnel_hi(double t) const {
    return box_hi + right_edge->psi_between(0.0, t);
  }
};

struct InitialData {
  State left;
  double w_left = 0;
  std::function<double(double)> v, u;
  std::function<double(double)> w;  // required for two-phase runs
};

inline FrontConfiguration discretize_initial(
    const InitialData& data, const PartitionSpec& pspec, double box_lo,
    double box_hi, const FluxSpec& flux, const CoeffPtr& coeff, double horizon,
    bool two_phase = false, const ToleranceProfile& tol = {},
    const std::vector<double>& align = {}) {
  if (!(box_lo < pspec.R))
    throw InvalidPartition("left box edge must lie left of the anchor R");
  if (two_phase && !data.w)
    throw InvalidParameter("two-phase discretization needs a w sampler");
  const std::vector<double> y =
      partition_points_aligned(pspec, box_hi, align);

  struct Cell {
    double v, w, u;
  };
  std::vector<Cell> cells;
  std::vector<double> bounds;  // boundary left of cells[i+...]
  cells.push_back({data.left.v, data.w_left, data.left.u});
  for (std::size_t i = 1; i < y.size(); ++i) {
    Cell c{data.v(y[i]), two_phase ? data.w(y[i]) : 0.0, data.u(y[i])};
    if (c.v < 0 || c.w < 0)
      throw InvalidParameter("sampled density is negative");
    if (c.v == cells.back().v && c.w == cells.back().w &&
        c.u == cells.back().u)
      continue;  // merge equal neighbours
    bounds.push_back(y[i - 1]);
    cells.push_back(c);
  }

  FrontConfiguration cfg;
  cfg.time = 0;
  cfg.valid_to = horizon;
  cfg.box_lo = box_lo;
  cfg.box_hi = box_hi;
  cfg.horizon = horizon;
  cfg.two_phase = two_phase;
  cfg.flux = flux;
  cfg.coeff = coeff;
  cfg.tol = tol;
  cfg.event_budget =
      static_cast<long>(std::ceil(
          (box_hi - box_lo) /
          (pspec.C1 * std::pow(pspec.eps, pspec.alpha)))) +
      static_cast<long>(align.size());

  auto piece = [&](const Cell& c) {
    StatePiece s;
    s.v = c.v;
    s.w = c.w;
    s.orbit = VelocityOrbit{c.u, coeff};
    return s;
  };

  cfg.states.push_back(piece(cells[0]));
  for (std::size_t b = 0; b < bounds.size(); ++b) {
    const Cell& sl = cells[b];
    const Cell& sr = cells[b + 1];
    const double xb = bounds[b];
    if (sl.u > sr.u) {
      DeltaFront::Side L{sl.v + sl.w, VelocityOrbit{sl.u, coeff}};
      DeltaFront::Side R{sr.v + sr.w, VelocityOrbit{sr.u, coeff}};
      DeltaFront agg = build_delta_front(0.0, xb, L, R, 0.0, 0.0, flux, coeff,
                                         horizon, tol);
      if (two_phase)
        cfg.fronts.push_back(TrackFront{DeltaFront3(
            std::move(agg), sl.v, sl.w, sr.v, sr.w, 0.0, 0.0)});
      else
        cfg.fronts.push_back(TrackFront{std::move(agg)});
      cfg.states.push_back(piece(sr));
    } else if (sl.u < sr.u) {
      cfg.fronts.push_back(
          TrackFront{make_contact(0.0, xb, VelocityOrbit{sl.u, coeff}, flux)});
      StatePiece vac;
      vac.vacuum = true;
      vac.orbit = VelocityOrbit{sl.u, coeff};
      cfg.states.push_back(vac);
      cfg.fronts.push_back(
          TrackFront{make_contact(0.0, xb, VelocityOrbit{sr.u, coeff}, flux)});
      cfg.states.push_back(piece(sr));
    } else {
      cfg.fronts.push_back(
          TrackFront{make_contact(0.0, xb, VelocityOrbit{sl.u, coeff}, flux)});
      cfg.states.push_back(piece(sr));
    }
  }

  cfg.left_edge =
      std::make_shared<SpeedIntegral>(cfg.states.front().orbit, flux);
  cfg.right_edge =
      std::make_shared<SpeedIntegral>(cfg.states.back().orbit, flux);
  return cfg;
}

// Earliest pairwise crossing after cfg.time; crossings closer than 1e-12 in
// time and co-located in space are grouped into one multi-front event.
inline std::optional<TrackEvent> next_interaction(const FrontConfiguration& cfg,
                                                  double horizon) {
  const double tau = cfg.time;
  const double hend = std::min(horizon, cfg.horizon);
  if (!(hend > tau) || cfg.fronts.size() < 2) return std::nullopt;

  const int nscan =
      std::max(64, static_cast<int>(std::ceil((hend - tau) * 256.0)));
  std::vector<double> cross(cfg.fronts.size() - 1,
                            std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i + 1 < cfg.fronts.size(); ++i) {
    const auto& a = cfg.fronts[i];
    const auto& b = cfg.fronts[i + 1];
    auto gap = [&](double t) { return b.position(t) - a.position(t); };
    double tprev = tau, gprev = gap(tau);
    if (gprev <= 0) {
      // Touching at the current time. A freshly opened vacuum fan puts both
      // contacts at the same birth point, so fire only if the pair is not
      // separating just ahead of now.
      const double tp = tau + std::max(1e-13 * (1.0 + std::fabs(tau)),
                                       1e-9 * (hend - tau));
      const double gp = gap(tp);
      if (gp <= 0) {
        cross[i] = tp;
        continue;
      }
      tprev = tp;
      gprev = gp;
    }
    for (int k = 1; k <= nscan; ++k) {
      const double tk = tau + (hend - tau) * k / double(nscan);
      const double gk = gap(tk);
      if (gk <= 0) {
        cross[i] = gk == 0 ? tk : find_root(gap, tprev, tk, cfg.tol);
        break;
      }
      tprev = tk;
      gprev = gk;
    }
  }

  std::size_t best = cross.size();
  for (std::size_t i = 0; i < cross.size(); ++i)
    if (best == cross.size() || cross[i] < cross[best]) best = i;
  if (best == cross.size() || !std::isfinite(cross[best])) return std::nullopt;

  const double T = cross[best];
  const double ttol = 1e-12 * std::max(1.0, std::fabs(T));
  const double X = cfg.fronts[best].position(T);
  const double xtol = 1e-9 * (1.0 + std::fabs(X));
  std::size_t lo = best, hi = best + 1;  // participating front range [lo, hi]
  while (lo > 0 && std::isfinite(cross[lo - 1]) &&
         std::fabs(cross[lo - 1] - T) <= ttol &&
         std::fabs(cfg.fronts[lo - 1].position(T) - X) <= xtol)
    --lo;
  while (hi + 1 < cfg.fronts.size() && std::isfinite(cross[hi]) &&
         std::fabs(cross[hi] - T) <= ttol &&
         std::fabs(cfg.fronts[hi + 1].position(T) - X) <= xtol)
    ++hi;

  TrackEvent ev;
  ev.T = T;
  ev.X = X;
  for (std::size_t i = lo; i <= hi; ++i)
    ev.participants.push_back(static_cast<int>(i));
  return ev;
}

inline FrontConfiguration resolve_interaction(const FrontConfiguration& cfg,
                                              const TrackEvent& event) {
  if (event.participants.size() < 2)
    throw Error("an interaction needs at least two fronts");
  for (std::size_t k = 1; k < event.participants.size(); ++k)
    if (event.participants[k] != event.participants[k - 1] + 1)
      throw Error("interaction participants must be adjacent");
  const int first = event.participants.front();
  const int last = event.participants.back();
  const double T = event.T;

  double m_v = 0, m_w = 0, mom = 0;
  for (int idx : event.participants) {
    const TrackFront& f = cfg.fronts[idx];
    if (!f.is_delta()) continue;
    if (const auto* d3 = std::get_if<DeltaFront3>(&f.node)) {
      const double xv = d3->xi_v(T), xw = d3->xi_w(T);
      m_v += xv;
      m_w += xw;
      mom += (xv + xw) * d3->chi(T);
    } else {
      const auto& d = std::get<DeltaFront>(f.node);
      const double x = d.xi(T);
      m_v += x;
      mom += x * d.chi(T);
    }
  }
  const double m_bar = m_v + m_w;
  if (!(m_bar > 0))
    throw NonOvercompressiveMerge("interaction carries no singular mass");
  const double u_bar = mom / m_bar;

  const StatePiece& sl = cfg.states[first];
  const StatePiece& sr = cfg.states[last + 1];
  const bool vac_l = sl.vacuum;
  const bool vac_r = sr.vacuum;
  const VelocityOrbit orbit_l =
      vac_l ? cfg.fronts[first].side_orbit(true) : sl.orbit;
  const VelocityOrbit orbit_r =
      vac_r ? cfg.fronts[last].side_orbit(false) : sr.orbit;

  const double ul = orbit_l.at(T), ur = orbit_r.at(T);
  const double slack = 1e-9 * (1.0 + std::fabs(ul) + std::fabs(ur));
  if (u_bar > ul + slack || u_bar < ur - slack)
    throw NonOvercompressiveMerge(
        "merged velocity escapes the outer traces");
  const double ub = std::clamp(u_bar, std::min(ur, ul), std::max(ur, ul));

  DeltaFront::Side L{vac_l ? 0.0 : sl.density(), orbit_l};
  DeltaFront::Side R{vac_r ? 0.0 : sr.density(), orbit_r};
  DeltaFront agg =
      build_delta_front(T, event.X, L, R, m_bar, ub, cfg.flux, cfg.coeff,
                        cfg.horizon, cfg.tol, vac_l, vac_r);
  TrackFront merged;
  if (cfg.two_phase)
    merged.node = DeltaFront3(std::move(agg), vac_l ? 0.0 : sl.v,
                              vac_l ? 0.0 : sl.w, vac_r ? 0.0 : sr.v,
                              vac_r ? 0.0 : sr.w, m_v, m_w);
  else
    merged.node = std::move(agg);

  FrontConfiguration out = cfg;
  out.time = T;
  out.valid_to = cfg.horizon;
  out.fronts.erase(out.fronts.begin() + first,
                   out.fronts.begin() + last + 1);
  out.fronts.insert(out.fronts.begin() + first, std::move(merged));
  out.states.erase(out.states.begin() + first + 1,
                   out.states.begin() + last + 1);
  TrackEvent logged = event;
  logged.vacuum_edge = vac_l || vac_r;
  out.event_log.push_back(logged);
  return out;
}

struct Trajectory {
  std::vector<FrontConfiguration> configs;

  const FrontConfiguration& final_config() const { return configs.back(); }

  const FrontConfiguration& at_time(double t) const {
    const double slack = 1e-9 * (1.0 + std::fabs(t));
    for (auto it = configs.rbegin(); it != configs.rend(); ++it)
      if (it->time <= t + slack) {
        if (t > it->valid_to + slack)
          throw TimeOutOfRange("no configuration covers the requested time");
        return *it;
      }
    throw TimeOutOfRange("time precedes the initial configuration");
  }

  long event_count() const {
    return static_cast<long>(configs.back().event_log.size());
  }
};

inline Trajectory track(const FrontConfiguration& initial, double until) {
  if (until > initial.horizon + 1e-12)
    throw Error("tracking horizon exceeds the configured front horizon");
  Trajectory traj;
  FrontConfiguration cur = initial;
  const long guard = 10 * std::max<long>(cur.event_budget, 4);
  long events = 0;
  for (;;) {
    std::optional<TrackEvent> ev = next_interaction(cur, until);
    if (!ev) {
      cur.valid_to = until;
      traj.configs.push_back(std::move(cur));
      return traj;
    }
    if (++events > guard)
      throw EventBudgetExceeded("interaction count exceeded ten times the budget");
    cur.valid_to = ev->T;
    traj.configs.push_back(cur);
    cur = resolve_interaction(cur, *ev);
  }
}

struct Atom {
  double x = 0, xi = 0, chi = 0;
  double xi_v = 0, xi_w = 0;
};

struct Snapshot {
  std::vector<double> x, u, m;
  std::vector<Atom> atoms;
};

inline Snapshot sample(const FrontConfiguration& cfg, double t,
                       const std::vector<double>& xs) {
  const double slack = 1e-9 * (1.0 + std::fabs(t));
  if (t < cfg.time - slack || t > cfg.valid_to + slack)
    throw TimeOutOfRange("sample time outside the configuration validity");

  const std::size_t nf = cfg.fronts.size();
  std::vector<double> pos(nf);
  for (std::size_t j = 0; j < nf; ++j) pos[j] = cfg.fronts[j].position(t);

  Snapshot snap;
  snap.x = xs;
  for (std::size_t j = 0; j < nf; ++j) {
    const TrackFront& f = cfg.fronts[j];
    if (!f.is_delta()) continue;
    Atom a;
    a.x = pos[j];
    if (const auto* d3 = std::get_if<DeltaFront3>(&f.node)) {
      a.xi_v = d3->xi_v(t);
      a.xi_w = d3->xi_w(t);
      a.xi = a.xi_v + a.xi_w;
      a.chi = d3->chi(t);
    } else {
      const auto& d = std::get<DeltaFront>(f.node);
      a.xi = d.xi(t);
      a.chi = d.chi(t);
    }
    snap.atoms.push_back(a);
  }

  const double anchor = cfg.funnel_lo(t);
  // cumulative mass up to each front position (states plus atoms)
  std::vector<double> cum(nf + 1, 0.0);
  double acc = 0.0;
  for (std::size_t j = 0; j < nf; ++j) {
    const double lb = j == 0 ? anchor : pos[j - 1];
    acc += cfg.states[j].density() * (pos[j] - lb);
    cum[j] = acc;
    acc += cfg.fronts[j].xi(t);
  }
  cum[nf] = acc;

  auto u_at = [&](double x, std::size_t k) {
    const StatePiece& s = cfg.states[k];
    if (!s.vacuum) return s.orbit.at(t);
    const double xl = k > 0 ? pos[k - 1] : cfg.funnel_lo(t);
    const double xr = k < nf ? pos[k] : cfg.funnel_hi(t);
    const double ul = k > 0 ? cfg.fronts[k - 1].trace(t) : s.orbit.at(t);
    const double ur = k < nf ? cfg.fronts[k].trace(t) : s.orbit.at(t);
    if (xr <= xl) return 0.5 * (ul + ur);
    const double frac = std::clamp((x - xl) / (xr - xl), 0.0, 1.0);
    return ul + frac * (ur - ul);
  };

  for (double x : xs) {
    const std::size_t k =
        std::upper_bound(pos.begin(), pos.end(), x) - pos.begin();
    snap.u.push_back(u_at(x, k));
    const double lb = k == 0 ? anchor : pos[k - 1];
    double m = (k == 0 ? 0.0 : cum[k - 1]) +
               (k > 0 ? cfg.fronts[k - 1].xi(t) : 0.0) +
               cfg.states[k].density() * (x - lb);
    snap.m.push_back(m);
  }
  return snap;
}

}  // namespace sdw

#endif  // SDW_FRONTS_HPP
