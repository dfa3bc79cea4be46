// Conserved totals for tracked configurations. Totals are taken inside the
// characteristic funnel spanned by the outermost orbits of the truncation
// box, through which neither mass nor momentum flux passes; inside it the
// mass is constant and the momentum obeys M1' = kappa(t)(ua(t) M0 - M1).
#ifndef SDW_CONSERVATION_HPP
#define SDW_CONSERVATION_HPP

#include <cmath>
#include <vector>

#include "sdw/errors.hpp"
#include "sdw/fronts.hpp"

namespace sdw {

namespace detail {

template <class PieceValue, class AtomValue>
double funnel_total(const FrontConfiguration& cfg, double t, PieceValue&& pv,
                    AtomValue&& av) {
  const std::size_t nf = cfg.fronts.size();
  std::vector<double> pos(nf);
  for (std::size_t j = 0; j < nf; ++j) pos[j] = cfg.fronts[j].position(t);
  const double lo = cfg.funnel_lo(t);
  const double hi = cfg.funnel_hi(t);

  double total = 0;
  for (std::size_t k = 0; k <= nf; ++k) {
    const double xl = k == 0 ? lo : pos[k - 1];
    const double xr = k == nf ? hi : pos[k];
    if (xr > xl) total += pv(cfg.states[k], xr - xl);
  }
  for (std::size_t j = 0; j < nf; ++j) total += av(cfg.fronts[j]);
  return total;
}

}  // namespace detail

inline double total_mass(const FrontConfiguration& cfg, double t) {
  return detail::funnel_total(
      cfg, t,
      [](const StatePiece& s, double w) { return s.density() * w; },
      [t](const TrackFront& f) { return f.xi(t); });
}

inline double total_momentum(const FrontConfiguration& cfg, double t) {
  return detail::funnel_total(
      cfg, t,
      [t](const StatePiece& s, double w) {
        return s.density() * s.orbit.at(t) * w;
      },
      [t](const TrackFront& f) { return f.xi(t) * f.trace(t); });
}

struct BalanceReport {
  std::vector<double> ts, M0, M1;
};

inline BalanceReport balance_report(const Trajectory& traj,
                                    const std::vector<double>& ts) {
  BalanceReport rep;
  for (double t : ts) {
    const FrontConfiguration& cfg = traj.at_time(t);
    rep.ts.push_back(t);
    rep.M0.push_back(total_mass(cfg, t));
    rep.M1.push_back(total_momentum(cfg, t));
  }
  return rep;
}

// Largest defect of the momentum balance M1' = kappa (ua M0 - M1) over the
// report's interior samples, with nonuniform centered differences.
inline double momentum_residual(const BalanceReport& rep,
                                const CoeffPtr& coeff) {
  if (rep.ts.size() < 5)
    throw InsufficientSamples("momentum residual needs at least 5 samples");
  double worst = 0;
  for (std::size_t i = 1; i + 1 < rep.ts.size(); ++i) {
    const double hl = rep.ts[i] - rep.ts[i - 1];
    const double hr = rep.ts[i + 1] - rep.ts[i];
    const double dM1 = (hl / (hr * (hl + hr))) * rep.M1[i + 1] +
                       ((hr - hl) / (hl * hr)) * rep.M1[i] -
                       (hr / (hl * (hl + hr))) * rep.M1[i - 1];
    const double rhs = coeff->kappa(rep.ts[i]) *
                       (coeff->ua(rep.ts[i]) * rep.M0[i] - rep.M1[i]);
    worst = std::max(worst, std::fabs(dM1 - rhs));
  }
  return worst;
}

// Closed-form momentum total under constant drag toward constant ambient
// velocity: M1(t) = a0 M0 + (M1(0) - a0 M0) exp(-k0 t).
inline double constant_coeff_momentum(double M0, double M1_0, double k0,
                                      double a0, double t) {
  return a0 * M0 + (M1_0 - a0 * M0) * std::exp(-k0 * t);
}

}  // namespace sdw

#endif  // SDW_CONSERVATION_HPP
