// Two-phase (3x3) extension: both phase densities ride one aggregate front
// whose position and velocity come from the combined density field.
#ifndef SDW_TWOPHASE_HPP
#define SDW_TWOPHASE_HPP

#include <utility>
#include <variant>

#include "sdw/errors.hpp"
#include "sdw/riemann.hpp"

namespace sdw {

struct State3 {
  double v = 0;  // first phase density
  double w = 0;  // second phase density
  double u = 0;  // common velocity
};

struct RiemannInput3 {
  State3 left, right;
  double delta_mass_v = 0;
  double delta_mass_w = 0;
  double delta_velocity = 0;
  CoeffPtr coeff;
  FluxSpec flux;
  double birth_time = 0;
  double birth_x = 0;
};

// Aggregate singular front plus per-phase mass splits. chi and c are those of
// the combined-density front; each phase mass follows its own balance with
// the shared position.
class DeltaFront3 {
 public:
  DeltaFront3(DeltaFront aggregate, double vl, double wl, double vr, double wr,
              double m_bar_v, double m_bar_w)
      : agg_(std::move(aggregate)),
        vl_(vl),
        wl_(wl),
        vr_(vr),
        wr_(wr),
        mv_(m_bar_v),
        mw_(m_bar_w) {}

  const DeltaFront& aggregate() const { return agg_; }
  double c(double t) const { return agg_.c(t); }
  double chi(double t) const { return agg_.chi(t); }
  double xi(double t) const { return agg_.xi(t); }

  double xi_v(double t) const { return phase_mass(t, vl_, vr_, mv_); }
  double xi_w(double t) const { return phase_mass(t, wl_, wr_, mw_); }

  double m_bar_v() const { return mv_; }
  double m_bar_w() const { return mw_; }

 private:
  double phase_mass(double t, double dl, double dr, double m0) const {
    const double t0 = agg_.birth_time();
    return (agg_.c(t) - agg_.birth_x()) * (dr - dl) +
           dl * agg_.psi_left().psi_between(t0, t) -
           dr * agg_.psi_right().psi_between(t0, t) + m0;
  }

  DeltaFront agg_;
  double vl_, wl_, vr_, wr_;
  double mv_, mw_;
};

using RiemannSolution3 = std::variant<DeltaFront3, WaveFan>;

inline RiemannInput aggregate_input(const RiemannInput3& in) {
  RiemannInput a;
  a.left = {in.left.v + in.left.w, in.left.u};
  a.right = {in.right.v + in.right.w, in.right.u};
  a.delta_mass = in.delta_mass_v + in.delta_mass_w;
  a.delta_velocity = in.delta_velocity;
  a.coeff = in.coeff;
  a.flux = in.flux;
  a.birth_time = in.birth_time;
  a.birth_x = in.birth_x;
  return a;
}

inline RiemannSolution3 solve_riemann3(const RiemannInput3& in, double horizon,
                                       const ToleranceProfile& tol = {}) {
  if (in.left.v < 0 || in.left.w < 0 || in.right.v < 0 || in.right.w < 0)
    throw InvalidParameter("phase densities must be nonnegative");
  RiemannSolution agg = solve_riemann(aggregate_input(in), horizon, tol);
  if (std::holds_alternative<WaveFan>(agg))
    return std::get<WaveFan>(std::move(agg));
  return DeltaFront3(std::get<DeltaFront>(std::move(agg)), in.left.v,
                     in.left.w, in.right.v, in.right.w, 0.0, 0.0);
}

inline DeltaFront3 solve_delta_riemann3(const RiemannInput3& in,
                                        double horizon,
                                        const ToleranceProfile& tol = {}) {
  if (in.left.v < 0 || in.left.w < 0 || in.right.v < 0 || in.right.w < 0)
    throw InvalidParameter("phase densities must be nonnegative");
  if (in.delta_mass_v < 0 || in.delta_mass_w < 0)
    throw InvalidParameter("phase point masses must be nonnegative");
  DeltaFront agg = solve_delta_riemann(aggregate_input(in), horizon, tol);
  return DeltaFront3(std::move(agg), in.left.v, in.left.w, in.right.v,
                     in.right.w, in.delta_mass_v, in.delta_mass_w);
}

}  // namespace sdw

#endif  // SDW_TWOPHASE_HPP
