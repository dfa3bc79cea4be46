// Admissibility diagnostics for singular fronts: overcompressibility of the
// front velocity between the side traces, and the convex-entropy dissipation
// residual evaluated with finite differences on the front's own time mesh.
#ifndef SDW_ENTROPY_HPP
#define SDW_ENTROPY_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "sdw/errors.hpp"
#include "sdw/model.hpp"
#include "sdw/riemann.hpp"

namespace sdw {

// chi(t) between the side traces and f(chi) between the side speeds, with a
// tolerance scaled to the trace magnitudes.
inline bool overcompressive(const DeltaFront& front, double t,
                            const ToleranceProfile& tol = {}) {
  const double ul = front.left().orbit.at(t);
  const double ur = front.right().orbit.at(t);
  const double chi = front.chi(t);
  const double slack = 100.0 * tol.abs_tol * (1.0 + std::fabs(ul) + std::fabs(ur));
  if (!(chi >= ur - slack && chi <= ul + slack)) return false;
  const double fl = front.flux().f(ul);
  const double fr = front.flux().f(ur);
  const double fc = front.flux().f(chi);
  const double fslack =
      100.0 * tol.abs_tol * (1.0 + std::fabs(fl) + std::fabs(fr));
  return fc >= fr - fslack && fc <= fl + fslack;
}

struct DissipativityPoint {
  double residual = 0;    // entropy production of the front (<= 0 wanted)
  double threshold = 0;   // 10x finite-difference error estimate
  bool dissipative = false;
  double err_chi = 0, err_xi = 0;
};

// Residual of the f(u)^2-entropy balance across the front at time t:
//   2 xi f f' (chi' + kappa (chi - ua)) + xi' f^2
//     - ( f(chi) [v f(U)^2] - [v f(U)^3] )
// with chi', xi' by centered differences and Richardson error control.
inline DissipativityPoint dissipativity_residual(const DeltaFront& front,
                                                 double t,
                                                 const ToleranceProfile& tol = {}) {
  const double birth = front.birth_time();
  const double end = front.end_time();
  if (!(t > birth && t < end))
    throw TimeOutOfRange("dissipation residual needs an interior time");

  const std::vector<double>& mesh = front.mesh();
  auto it = std::lower_bound(mesh.begin(), mesh.end(), t);
  double hmesh = (end - birth) / 64.0;
  if (it != mesh.begin() && it != mesh.end())
    hmesh = std::max(*it - *(it - 1),
                     (it + 1 != mesh.end()) ? *(it + 1) - *it : 0.0);
  double h = std::min({hmesh, 0.5 * (t - birth), 0.5 * (end - t)});
  const double hfloor = 1e-12 * (1.0 + std::fabs(t));
  if (!(h > hfloor))
    throw InsufficientSamples("no room for centered differences at t");

  auto d_center = [&](auto&& fn, double step) {
    return (fn(t + step) - fn(t - step)) / (2.0 * step);
  };
  auto chi_of = [&](double s) { return front.chi(s); };
  auto xi_of = [&](double s) { return front.xi(s); };

  const double dchi_h = d_center(chi_of, h);
  const double dchi_2h = d_center(chi_of, 0.5 * h);
  const double dxi_h = d_center(xi_of, h);
  const double dxi_2h = d_center(xi_of, 0.5 * h);

  DissipativityPoint out;
  out.err_chi = std::fabs(dchi_h - dchi_2h) / 3.0;
  out.err_xi = std::fabs(dxi_h - dxi_2h) / 3.0;
  const double dchi = dchi_2h + (dchi_2h - dchi_h) / 3.0;
  const double dxi = dxi_2h + (dxi_2h - dxi_h) / 3.0;

  const FluxSpec& fs = front.flux();
  const double chi = front.chi(t);
  const double xi = front.xi(t);
  const double ul = front.left().orbit.at(t);
  const double ur = front.right().orbit.at(t);
  const double vl = front.left().v;
  const double vr = front.right().v;
  const double fc = fs.f(chi), dfc = fs.df(chi);
  const double fl = fs.f(ul), fr = fs.f(ur);
  const double kap = front.coeff()->kappa(t);
  const double ua = front.coeff()->ua(t);

  const double jump_f2 = vr * fr * fr - vl * fl * fl;
  const double jump_f3 = vr * fr * fr * fr - vl * fl * fl * fl;

  out.residual = 2.0 * xi * fc * dfc * (dchi + kap * (chi - ua)) +
                 dxi * fc * fc - (fc * jump_f2 - jump_f3);
  const double scale =
      1.0 + std::fabs(xi) + std::fabs(jump_f2) + std::fabs(jump_f3);
  const double mesh_err = std::fabs(2.0 * xi * fc * dfc) * out.err_chi +
                          fc * fc * out.err_xi + tol.abs_tol * scale;
  out.threshold = 10.0 * mesh_err;
  out.dissipative = out.residual <= out.threshold;
  return out;
}

struct EntropyReport {
  std::vector<double> ts;
  std::vector<double> residuals, thresholds;
  std::vector<char> dissipative, overcomp;
  bool all_dissipative = true;
  bool all_overcompressive = true;
};

inline EntropyReport entropy_report(const DeltaFront& front,
                                    const std::vector<double>& ts,
                                    const ToleranceProfile& tol = {}) {
  if (ts.empty()) throw InsufficientSamples("empty sample list");
  EntropyReport rep;
  for (double t : ts) {
    const DissipativityPoint p = dissipativity_residual(front, t, tol);
    const bool oc = overcompressive(front, t, tol);
    rep.ts.push_back(t);
    rep.residuals.push_back(p.residual);
    rep.thresholds.push_back(p.threshold);
    rep.dissipative.push_back(p.dissipative ? 1 : 0);
    rep.overcomp.push_back(oc ? 1 : 0);
    rep.all_dissipative = rep.all_dissipative && p.dissipative;
    rep.all_overcompressive = rep.all_overcompressive && oc;
  }
  return rep;
}

// Convexity probe for f^2 on [lo, hi] by nonnegative second differences.
inline bool f_squared_convex(const FluxSpec& flux, double lo, double hi,
                             int samples = 1000, double abs_tol = 1e-10) {
  if (samples < 3) throw InsufficientSamples("need at least 3 samples");
  const double h = (hi - lo) / (samples - 1);
  auto g = [&](double u) {
    const double f = flux.f(u);
    return f * f;
  };
  double scale = 0;
  for (int i = 0; i < samples; ++i)
    scale = std::max(scale, std::fabs(g(lo + i * h)));
  for (int i = 1; i + 1 < samples; ++i) {
    const double x = lo + i * h;
    const double d2 = g(x - h) - 2.0 * g(x) + g(x + h);
    if (d2 < -abs_tol * (1.0 + scale)) return false;
  }
  return true;
}

}  // namespace sdw

#endif  // SDW_ENTROPY_HPP
