// Variational solver for the self-similar drag regime kappa(t) = 1/(t+kh),
// ambient velocity x/(t+kh): quadratic-in-data potential built from prefix
// tables of the initial data, global minimization in the Lagrangian label,
// velocity/mass/potential diagnostics, one-sided slope bounds and weak-form
// residuals evaluated through measure increments.
#ifndef SDW_GVP_HPP
#define SDW_GVP_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "sdw/errors.hpp"
#include "sdw/numerics.hpp"

namespace sdw {

struct MinimizerPair {
  double y_star = 0;     // leftmost minimizer
  double y_star_hi = 0;  // rightmost minimizer
  double f_star = 0;
  bool split = false;
};

class GvpField {
 public:
  GvpField(std::function<double(double)> v0, std::function<double(double)> u0,
           double ymin, double ymax, double kappa_hat, int cells = 4096,
           std::vector<double> align = {})
      : v0_(std::move(v0)),
        u0_(std::move(u0)),
        ymin_(ymin),
        ymax_(ymax),
        kh_(kappa_hat) {
    if (!(ymax_ > ymin_)) throw InvalidParameter("empty data support");
    if (!(kh_ > 0)) throw InvalidParameter("drag scale kappa_hat must be > 0");
    if (cells < 4) throw InvalidParameter("need at least 4 support cells");

    nodes_.reserve(cells + 1 + align.size());
    for (int i = 0; i <= cells; ++i)
      nodes_.push_back(ymin_ + (ymax_ - ymin_) * i / double(cells));
    for (double b : align)
      if (b > ymin_ && b < ymax_) nodes_.push_back(b);
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end(),
                             [&](double a, double b) {
                               return b - a < 1e-12 * (ymax_ - ymin_);
                             }),
                 nodes_.end());
    nodes_.back() = ymax_;
    nodes_.front() = ymin_;

    build_tables();
    anchor_ = std::clamp(0.0, ymin_, ymax_);
    off0_ = eval_raw(p0_, anchor_);
    off1_ = eval_raw(p1_, anchor_);
    offu_ = eval_raw(pu_, anchor_);
  }

  double y_min() const { return ymin_; }
  double y_max() const { return ymax_; }
  double kappa_hat() const { return kh_; }
  double anchor() const { return anchor_; }
  const std::vector<double>& nodes() const { return nodes_; }
  double v0(double y) const { return v0_(y); }
  double u0(double y) const { return u0_(y); }

  // Prefix integrals anchored at anchor(): P0 = int v0, P1 = int eta*v0,
  // Pu = int u0*v0.
  double P0(double y) const { return eval_raw(p0_, y) - off0_; }
  double P1(double y) const { return eval_raw(p1_, y) - off1_; }
  double Pu(double y) const { return eval_raw(pu_, y) - offu_; }

  // Scaled-time geometry; sm = s^2 - kh^2 is formed cancellation-free.
  struct TimeGeom {
    double t, s, sp, sm, G, D, a, b;
  };
  TimeGeom geom(double t) const {
    if (t < 0) {
      if (t < -1e-12) throw NegativeTime("field queried at t < 0");
      t = 0;
    }
    TimeGeom g;
    g.t = t;
    g.s = t + kh_;
    g.sp = g.s * g.s + kh_ * kh_;
    g.sm = t * (t + 2.0 * kh_);
    g.G = g.sp / (kh_ * g.s);
    g.D = g.sm / g.s;
    g.a = g.sm / (2.0 * kh_ * g.s * g.s);
    g.b = g.sp / (2.0 * g.s * g.s);
    return g;
  }

  // Velocity transported along the free curve launched from label eta.
  double kernel(double eta, const TimeGeom& g) const {
    return g.a * eta + g.b * u0_(eta);
  }
  // Free-curve position of label eta at scaled time g.
  double x_forward(double eta, const TimeGeom& g) const {
    return 0.5 * eta * g.G + 0.5 * u0_(eta) * g.D;
  }

  double potential_raw(double y, double x, const TimeGeom& g) const {
    return 0.5 * g.G * eval_raw(p1_, y) + 0.5 * g.D * eval_raw(pu_, y) -
           x * eval_raw(p0_, y);
  }
  double raw_shift(double x, const TimeGeom& g) const {
    return 0.5 * g.G * off1_ + 0.5 * g.D * offu_ - x * off0_;
  }
  double node_potential_raw(std::size_t k, double x, const TimeGeom& g) const {
    return 0.5 * g.G * p1_.prefix[k] + 0.5 * g.D * pu_.prefix[k] -
           x * p0_.prefix[k];
  }

  double support_span() const { return ymax_ - ymin_; }

 private:
  struct Table {
    std::vector<double> prefix;                 // at nodes
    std::vector<std::array<double, 3>> coef;    // per-cell quadratic (unit param)
  };

  void build_tables() {
    const double r = std::sqrt(0.15);
    const std::size_t nc = nodes_.size() - 1;
    auto build = [&](Table& tb, auto&& integrand) {
      tb.prefix.assign(nc + 1, 0.0);
      tb.coef.resize(nc);
      for (std::size_t j = 0; j < nc; ++j) {
        const double a = nodes_[j], h = nodes_[j + 1] - nodes_[j];
        const double f1 = integrand(a + h * (0.5 - r));
        const double f2 = integrand(a + h * 0.5);
        const double f3 = integrand(a + h * (0.5 + r));
        const double c2 = (f1 + f3 - 2.0 * f2) / (2.0 * r * r);
        const double c1 = (f3 - f1) / (2.0 * r) - c2;
        const double c0 = f2 - 0.5 * c1 - 0.25 * c2;
        tb.coef[j] = {c0, c1, c2};
        tb.prefix[j + 1] =
            tb.prefix[j] + h * (c0 + 0.5 * c1 + c2 / 3.0);
      }
    };
    auto vpos = [&](double y) {
      const double v = v0_(y);
      if (!(v > 0) || !std::isfinite(v))
        throw InvalidParameter("initial density must be strictly positive");
      return v;
    };
    build(p0_, vpos);
    build(p1_, [&](double y) { return y * v0_(y); });
    build(pu_, [&](double y) { return u0_(y) * v0_(y); });
  }

  double eval_raw(const Table& tb, double y) const {
    const double span = ymax_ - ymin_;
    if (y < ymin_ - 1e-9 * span || y > ymax_ + 1e-9 * span)
      throw OutOfSupport("label outside the data support");
    y = std::clamp(y, ymin_, ymax_);
    std::size_t j =
        std::upper_bound(nodes_.begin(), nodes_.end(), y) - nodes_.begin();
    if (j == 0) j = 1;
    if (j > tb.coef.size()) j = tb.coef.size();
    --j;
    const double h = nodes_[j + 1] - nodes_[j];
    const double sg = (y - nodes_[j]) / h;
    const auto& c = tb.coef[j];
    return tb.prefix[j] +
           h * sg * (c[0] + sg * (0.5 * c[1] + sg * c[2] / 3.0));
  }

  std::function<double(double)> v0_, u0_;
  double ymin_, ymax_, kh_;
  double anchor_ = 0, off0_ = 0, off1_ = 0, offu_ = 0;
  std::vector<double> nodes_;
  Table p0_, p1_, pu_;
};

inline double potential(const GvpField& f, double y, double x, double t) {
  const GvpField::TimeGeom g = f.geom(t);
  return f.potential_raw(y, x, g) - f.raw_shift(x, g);
}

namespace detail {

// Scan all support nodes from `from` for local minima of F(., x, t), refine
// each basin by golden section, then group refined minima that tie within
// the declared equality tolerance.
inline MinimizerPair scan_minimizers(const GvpField& f, double x,
                                     const GvpField::TimeGeom& g,
                                     std::size_t from) {
  const auto& nd = f.nodes();
  const std::size_t n = nd.size();
  const double span = f.support_span();
  const double xtol = 1e-12 * std::max(1.0, span);

  // pass 1: node values, local minima candidates
  std::vector<std::size_t> cand;
  double fprev = f.node_potential_raw(from, x, g);
  double fcur = fprev;
  double fnext;
  for (std::size_t k = from; k < n; ++k) {
    fnext = (k + 1 < n) ? f.node_potential_raw(k + 1, x, g) : fcur;
    const bool left_ok = (k == from) ? true : fcur <= fprev;
    const bool right_ok = (k + 1 == n) ? true : fcur <= fnext;
    if (left_ok && right_ok) cand.push_back(k);
    fprev = fcur;
    fcur = fnext;
  }

  struct Ref {
    double y, F;
  };
  std::vector<Ref> refined;
  for (std::size_t k : cand) {
    const double a = nd[k > from ? k - 1 : from];
    const double b = nd[std::min(k + 1, n - 1)];
    double y;
    if (b > a) {
      // F'(y) = (x_forward(y) - x) v0(y) with v0 > 0: refine by the root of
      // the forward map when it brackets, which beats the sqrt(eps) noise
      // floor of value-based search; Brent also lands on kinks of piecewise
      // data where F' jumps through zero.
      const double ga = f.x_forward(a, g) - x;
      const double gb = f.x_forward(b, g) - x;
      if (ga < 0 && gb > 0) {
        ToleranceProfile rt;
        rt.abs_tol = 0;
        rt.rel_tol = 1e-15;
        y = find_root([&](double yy) { return f.x_forward(yy, g) - x; }, a, b,
                      rt);
      } else {
        y = minimize_golden(
            [&](double yy) { return f.potential_raw(yy, x, g); }, a, b, xtol);
      }
    } else {
      y = nd[k];
    }
    refined.push_back({y, f.potential_raw(y, x, g)});
  }

  double fstar = std::numeric_limits<double>::infinity();
  for (const Ref& r : refined) fstar = std::min(fstar, r.F);
  const double eqtol = 1e-9 * (1.0 + std::fabs(fstar - f.raw_shift(x, g)));

  double ylo = std::numeric_limits<double>::infinity();
  double yhi = -ylo;
  for (const Ref& r : refined)
    if (r.F <= fstar + eqtol) {
      ylo = std::min(ylo, r.y);
      yhi = std::max(yhi, r.y);
    }

  // boundary escape: the refined argmin pinned to a support edge while the
  // free curve through that edge has not yet reached x
  const double ptol = 1e-9 * (1.0 + std::fabs(x));
  if (from == 0 && ylo <= nd.front() + xtol &&
      f.x_forward(nd.front(), g) > x + ptol)
    throw UnboundedBelow("minimizer escapes the support on the left");
  if (yhi >= nd.back() - xtol && f.x_forward(nd.back(), g) < x - ptol)
    throw UnboundedBelow("minimizer escapes the support on the right");

  MinimizerPair mp;
  mp.y_star = ylo;
  mp.y_star_hi = yhi;
  mp.f_star = fstar - f.raw_shift(x, g);
  mp.split = (yhi - ylo) > 1e-7 * std::max(1.0, span);
  if (!mp.split) {
    mp.y_star = mp.y_star_hi = 0.5 * (ylo + yhi);
  }
  return mp;
}

inline std::size_t node_index_below(const GvpField& f, double y) {
  const auto& nd = f.nodes();
  std::size_t j = std::upper_bound(nd.begin(), nd.end(), y) - nd.begin();
  return j == 0 ? 0 : j - 1;
}

}  // namespace detail

inline MinimizerPair minimizers(const GvpField& f, double x, double t) {
  return detail::scan_minimizers(f, x, f.geom(t), 0);
}

// Minimizers along a sorted row of x at fixed t; exploits monotonicity of
// the minimizer in x to restrict each scan window.
inline std::vector<MinimizerPair> minimize_row(const GvpField& f,
                                               const std::vector<double>& xs,
                                               double t) {
  const GvpField::TimeGeom g = f.geom(t);
  std::vector<MinimizerPair> out;
  out.reserve(xs.size());
  std::size_t hint = 0;
  for (double x : xs) {
    MinimizerPair mp = detail::scan_minimizers(f, x, g, hint);
    out.push_back(mp);
    const std::size_t j = detail::node_index_below(f, mp.y_star);
    hint = j > 2 ? j - 2 : 0;
  }
  return out;
}

inline double mass(const GvpField& f, double x, double t) {
  return f.P0(minimizers(f, x, t).y_star);
}

namespace detail {

inline double velocity_from_pair(const GvpField& f, const MinimizerPair& mp,
                                 const GvpField::TimeGeom& g) {
  if (!mp.split) return f.kernel(mp.y_star, g);
  const double dm = f.P0(mp.y_star_hi) - f.P0(mp.y_star);
  const double d1 = f.P1(mp.y_star_hi) - f.P1(mp.y_star);
  const double du = f.Pu(mp.y_star_hi) - f.Pu(mp.y_star);
  return (g.a * d1 + g.b * du) / dm;
}

}  // namespace detail

inline double velocity(const GvpField& f, double x, double t) {
  const GvpField::TimeGeom g = f.geom(t);
  return detail::velocity_from_pair(f, detail::scan_minimizers(f, x, g, 0), g);
}

// Backward characteristic pair through (x0, t0 > 0), evaluated at time t.
inline std::pair<double, double> backward_characteristics(const GvpField& f,
                                                          double x0, double t0,
                                                          double t) {
  if (!(t0 > 0))
    throw InvalidParameter("backward characteristics need t0 > 0");
  const MinimizerPair mp = minimizers(f, x0, t0);
  const GvpField::TimeGeom g0 = f.geom(t0);
  const GvpField::TimeGeom g = f.geom(t);
  auto one = [&](double ystar) {
    return 0.5 * ystar * g.G +
           g.D * (x0 - 0.5 * ystar * g0.G) / g0.D;
  };
  return {one(mp.y_star), one(mp.y_star_hi)};
}

struct GvpAtom {
  double x = 0;
  double mass = 0;
  double y_lo = 0, y_hi = 0;
  double u_minus = 0, u_plus = 0;  // one-sided trace formulas
  double u_avg = 0;                // mass-averaged atom velocity
};

namespace detail {

inline GvpAtom atom_from_bracket(const GvpField& f, double x, double ylo,
                                 double yhi, const GvpField::TimeGeom& g) {
  GvpAtom a;
  a.x = x;
  a.y_lo = ylo;
  a.y_hi = yhi;
  a.mass = f.P0(yhi) - f.P0(ylo);
  const double B = g.sp / (g.s * g.sm);
  a.u_minus = B * x - (2.0 * f.kappa_hat() / g.sm) * ylo;
  a.u_plus = B * x - (2.0 * f.kappa_hat() / g.sm) * yhi;
  const double d1 = f.P1(yhi) - f.P1(ylo);
  const double du = f.Pu(yhi) - f.Pu(ylo);
  a.u_avg = (g.a * d1 + g.b * du) / a.mass;
  return a;
}

}  // namespace detail

// Locate minimizer-gap points (atoms) on [xlo, xhi] with a scan of `scan`
// cells, refining each gap by bisection.
inline std::vector<GvpAtom> find_atoms(const GvpField& f, double t, double xlo,
                                       double xhi, int scan = 256) {
  const GvpField::TimeGeom g = f.geom(t);
  const double gap_tol = 1e-6 * std::max(1.0, f.support_span());
  // Continuous variation of the minimizer across one scan cell is of the
  // order of the label span divided by the scan count; only label gaps that
  // exceed that drift budget can hide an atom. The bisection then verifies
  // the gap survives as the x-bracket collapses; for a continuous region it
  // shrinks to nothing and the candidate is dropped.
  const double drift = 2.0 * f.support_span() / double(scan);
  const double screen = std::max(gap_tol, drift);
  std::vector<double> xs(scan + 1);
  for (int i = 0; i <= scan; ++i)
    xs[i] = xlo + (xhi - xlo) * i / double(scan);
  const std::vector<MinimizerPair> row = minimize_row(f, xs, t);

  std::vector<GvpAtom> atoms;
  for (int i = 0; i <= scan; ++i) {
    if (row[i].split) {
      atoms.push_back(
          detail::atom_from_bracket(f, xs[i], row[i].y_star,
                                    row[i].y_star_hi, g));
      continue;
    }
    if (i == scan) break;
    if (row[i + 1].split) continue;  // handled at its own grid point
    if (row[i + 1].y_star - row[i].y_star_hi <= screen) continue;
    double lo = xs[i], hi = xs[i + 1];
    double ylo = row[i].y_star_hi, yhi = row[i + 1].y_star;
    for (int it = 0; it < 60 && hi - lo > 1e-13 * std::max(1.0, std::fabs(hi));
         ++it) {
      const double mid = 0.5 * (lo + hi);
      const MinimizerPair mp = detail::scan_minimizers(f, mid, g, 0);
      if (mp.split) {
        ylo = mp.y_star;
        yhi = mp.y_star_hi;
        lo = hi = mid;
        break;
      }
      if (mp.y_star < 0.5 * (ylo + yhi)) {
        lo = mid;
        ylo = mp.y_star_hi;
      } else {
        hi = mid;
        yhi = mp.y_star;
      }
    }
    if (yhi - ylo > gap_tol)
      atoms.push_back(
          detail::atom_from_bracket(f, 0.5 * (lo + hi), ylo, yhi, g));
  }
  return atoms;
}

struct OleinikReport {
  double bound = 0;
  double max_violation = -std::numeric_limits<double>::infinity();
  bool jumps_ordered = true;
  std::vector<GvpAtom> atoms;
};

// One-sided slope diagnostic: max over grid pairs of du/dx minus the decay
// bound, plus trace ordering u(x+0) <= u(x-0) at every detected atom.
inline OleinikReport oleinik_violation(const GvpField& f, double t,
                                       const std::vector<double>& xs) {
  if (xs.size() < 2)
    throw InsufficientSamples("slope diagnostic needs at least two points");
  const GvpField::TimeGeom g = f.geom(t);
  if (!(g.sm > 0))
    throw InvalidParameter("slope diagnostic needs t > 0");
  OleinikReport rep;
  rep.bound = g.sp / (g.s * g.sm);

  const std::vector<MinimizerPair> row = minimize_row(f, xs, t);
  std::vector<double> us(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    us[i] = detail::velocity_from_pair(f, row[i], g);

  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      const double slope = (us[j] - us[i]) / (xs[j] - xs[i]);
      rep.max_violation = std::max(rep.max_violation, slope - rep.bound);
    }

  rep.atoms = find_atoms(f, t, xs.front(), xs.back(),
                         std::max<int>(64, xs.size()));
  const double utol = 1e-9 * (1.0 + std::fabs(rep.bound) * (std::fabs(xs.back()) + 1.0));
  for (const GvpAtom& a : rep.atoms)
    if (a.u_plus > a.u_minus + utol) rep.jumps_ordered = false;
  return rep;
}

// Actual position of label eta at time t: the free curve unless the label
// has been absorbed, in which case the containing atom is found by monotone
// bisection in x.
inline double forward_position(const GvpField& f, double eta, double t) {
  const GvpField::TimeGeom g = f.geom(t);
  const double x0 = f.x_forward(eta, g);
  const double ptol = 1e-9 * std::max(1.0, f.support_span());
  MinimizerPair mp = detail::scan_minimizers(f, x0, g, 0);
  if (eta >= mp.y_star - ptol && eta <= mp.y_star_hi + ptol) return x0;
  double lo = x0, hi = x0;
  double step = 1e-3 * std::max(1.0, std::fabs(x0));
  if (mp.y_star > eta) {  // absorbed atom lies to the left
    do {
      lo -= step;
      step *= 2;
      mp = detail::scan_minimizers(f, lo, g, 0);
    } while (mp.y_star > eta + ptol && step < 1e9);
  } else {
    do {
      hi += step;
      step *= 2;
      mp = detail::scan_minimizers(f, hi, g, 0);
    } while (mp.y_star_hi < eta - ptol && step < 1e9);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    mp = detail::scan_minimizers(f, mid, g, 0);
    if (eta >= mp.y_star - ptol && eta <= mp.y_star_hi + ptol) return mid;
    if (mp.y_star > eta)
      hi = mid;
    else
      lo = mid;
    if (hi - lo < 1e-13 * std::max(1.0, std::fabs(mid))) return mid;
  }
  return 0.5 * (lo + hi);
}

inline double forward_velocity(const GvpField& f, double eta, double t) {
  const GvpField::TimeGeom g = f.geom(t);
  const double x0 = f.x_forward(eta, g);
  const MinimizerPair mp = detail::scan_minimizers(f, x0, g, 0);
  if (eta >= mp.y_star - 1e-9 * std::max(1.0, f.support_span()) &&
      eta <= mp.y_star_hi + 1e-9 * std::max(1.0, f.support_span()))
    return detail::velocity_from_pair(f, mp, g);
  const double xs = forward_position(f, eta, t);
  return velocity(f, xs, t);
}

struct GvpDiagnostics {
  double q = 0;  // momentum potential increment from the anchor
  double E = 0;  // energy potential
  double J = 0;  // drag-source potential
};

inline GvpDiagnostics diagnostics(const GvpField& f, double x, double t) {
  const GvpField::TimeGeom g = f.geom(t);
  const MinimizerPair mp = detail::scan_minimizers(f, x, g, 0);
  const double y = mp.y_star;
  GvpDiagnostics d;
  d.q = g.a * f.P1(y) + g.b * f.Pu(y);
  d.J = (f.kappa_hat() / (g.s * g.s * g.s)) * (f.P1(y) - f.kappa_hat() * f.Pu(y));

  // energy: 1/2 int kernel * v0 * u(curve) over [anchor, y]; absorbed labels
  // ride their atom and carry its averaged velocity
  const double a = f.anchor(), b = y;
  if (a == b) return d;
  const double xl = std::min(f.x_forward(std::min(a, b), g), x);
  std::vector<GvpAtom> atoms = find_atoms(f, t, xl - 1e-9, x + 1e-9, 192);
  auto u_along = [&](double eta) {
    for (const GvpAtom& at : atoms)
      if (eta >= at.y_lo && eta <= at.y_hi) return at.u_avg;
    return f.kernel(eta, g);
  };
  auto integrand = [&](double eta) {
    return 0.5 * f.kernel(eta, g) * f.v0(eta) * u_along(eta);
  };
  const int nseg = 512;
  double acc = 0;
  const double h = (b - a) / nseg;
  for (int i = 0; i < nseg; ++i) {
    const double l = a + i * h, r = l + h;
    acc += h / 6.0 * (integrand(l) + 4.0 * integrand(0.5 * (l + r)) +
                      integrand(r));
  }
  d.E = acc;
  return d;
}

// Compactly supported smooth bump on [x0 +- rx] x [t0 +- rt].
struct TestBump {
  double x0 = 0, t0 = 0, rx = 1, rt = 0.25;

  static double psi(double s) {
    const double q = 1.0 - s * s;
    return q > 0 ? std::exp(-1.0 / q) : 0.0;
  }
  static double dpsi(double s) {
    const double q = 1.0 - s * s;
    return q > 0 ? psi(s) * (-2.0 * s) / (q * q) : 0.0;
  }
  double phi(double x, double t) const {
    return psi((x - x0) / rx) * psi((t - t0) / rt);
  }
  double phi_x(double x, double t) const {
    return dpsi((x - x0) / rx) / rx * psi((t - t0) / rt);
  }
  double phi_t(double x, double t) const {
    return psi((x - x0) / rx) * dpsi((t - t0) / rt) / rt;
  }
};

struct WeakResidual {
  double r1 = 0;  // mass equation
  double r2 = 0;  // momentum equation
};

// Weak-form residuals of both equations against a bump test function. The
// measures u dm, u^2 dm and the drag source are realized through x-grid
// increments of the potentials (q, J) and the Radon-Nikodym square dq^2/dm,
// which captures atoms without case analysis; the bump factors are taken at
// cell midpoints. Composite Simpson in t.
inline WeakResidual weak_residual(const GvpField& f, const TestBump& bump,
                                  int nx, int nt) {
  if (!(bump.t0 - bump.rt > 0))
    throw SupportEscape("bump support must stay inside t > 0");
  if (nx < 2 || nt < 2) throw InvalidParameter("refinement grid too coarse");
  nt += nt % 2;

  const double xl = bump.x0 - bump.rx, xr = bump.x0 + bump.rx;
  const double tl = bump.t0 - bump.rt, tr = bump.t0 + bump.rt;
  const double dx = (xr - xl) / nx;
  const double dt = (tr - tl) / nt;

  // interleaved nodes and midpoints in one sorted row
  std::vector<double> xs(2 * nx + 1);
  for (int i = 0; i <= 2 * nx; ++i) xs[i] = xl + 0.5 * dx * i;

  double R1 = 0, R2 = 0;
  for (int j = 0; j <= nt; ++j) {
    const double t = tl + dt * j;
    const double wt = (j == 0 || j == nt) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    const GvpField::TimeGeom g = f.geom(t);

    std::vector<MinimizerPair> row;
    try {
      row = minimize_row(f, xs, t);
    } catch (const UnboundedBelow&) {
      throw SupportEscape("bump support escapes the evolved data support");
    }
    auto m_of = [&](int k) { return f.P0(row[k].y_star); };
    auto q_of = [&](int k) {
      return g.a * f.P1(row[k].y_star) + g.b * f.Pu(row[k].y_star);
    };
    auto j_of = [&](int k) {
      return (f.kappa_hat() / (g.s * g.s * g.s)) *
             (f.P1(row[k].y_star) - f.kappa_hat() * f.Pu(row[k].y_star));
    };

    double r1 = 0, r2 = 0;
    for (int i = 0; i < nx; ++i) {
      const int kl = 2 * i, km = 2 * i + 1, kr2 = 2 * i + 2;
      const double xm = xs[km];
      const double dm = m_of(kr2) - m_of(kl);
      const double dq = q_of(kr2) - q_of(kl);
      const double dj = j_of(kr2) - j_of(kl);
      const double pt = bump.phi_t(xm, t);
      const double px = bump.phi_x(xm, t);
      const double p = bump.phi(xm, t);
      r1 += pt * m_of(km) * dx - p * dq;
      r2 += pt * dq + (dm > 0 ? px * dq * dq / dm : 0.0) + p * dj;
    }
    R1 += wt * r1;
    R2 += wt * r2;
  }
  const double wsimp = dt / 3.0;
  return {std::fabs(R1 * wsimp), std::fabs(R2 * wsimp)};
}

// Independent singular-front position for jump data in the same drag regime:
// the balance system for (c, xi, xi*chi) closed by the time-scaled side
// states, integrated from a short-time expansion at t0.
inline OdeSolution riemann_shock_oracle(double vl, double ul, double vr,
                                        double ur, double kappa_hat,
                                        double t_end,
                                        const ToleranceProfile& tol = {}) {
  if (!(ul > ur)) throw BracketFailure("jump data admits no singular front");
  const double kh = kappa_hat;
  // initial front velocity: the pressureless root of the quadratic balance
  const double sl = std::sqrt(vl), sr = std::sqrt(vr);
  const double chi0 = (sl * ul + sr * ur) / (sl + sr);
  const double t0 = 1e-8;
  const double xi0 =
      (chi0 * (vr - vl) - (vr * ur - vl * ul)) * t0;
  std::vector<double> y0 = {chi0 * t0, xi0, chi0 * xi0};

  OdeRhs rhs = [=](double t, const std::vector<double>& y,
                   std::vector<double>& dy) {
    const double s = t + kh;
    const double sp = s * s + kh * kh;
    const double sm = t * (t + 2.0 * kh);
    const double c = y[0], xi = y[1], th = y[2];
    const double chi = th / xi;
    const double Ul = 2.0 * kh * kh * ul / sp + c * sm / (s * sp);
    const double Ur = 2.0 * kh * kh * ur / sp + c * sm / (s * sp);
    const double Vl = 2.0 * vl * kh * s / sp;
    const double Vr = 2.0 * vr * kh * s / sp;
    dy[0] = chi;
    dy[1] = chi * (Vr - Vl) - (Vr * Ur - Vl * Ul);
    dy[2] = chi * (Vr * Ur - Vl * Ul) - (Vr * Ur * Ur - Vl * Ul * Ul) -
            (1.0 / s) * (chi - c / s) * xi;
  };
  return integrate_ode(rhs, t0, y0, t_end, tol);
}

// Thin solution handle bundling a field with its evaluation operations.
struct GvpSolution {
  std::shared_ptr<const GvpField> field;

  double u(double x, double t) const { return velocity(*field, x, t); }
  double m(double x, double t) const { return mass(*field, x, t); }
  GvpDiagnostics potentials(double x, double t) const {
    return diagnostics(*field, x, t);
  }
};

}  // namespace sdw

#endif  // SDW_GVP_HPP
