// Riemann solvers for the 2x2 droplet system: classification, singular-front
// construction (position/mass/velocity as functions of time), vacuum fans.
#ifndef SDW_RIEMANN_HPP
#define SDW_RIEMANN_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sdw/errors.hpp"
#include "sdw/model.hpp"
#include "sdw/numerics.hpp"

namespace sdw {

struct State {
  double v = 0;
  double u = 0;
};

enum class RiemannKind { DeltaShock, ContactVacuum, SingleContact };

struct RiemannInput {
  State left, right;
  double delta_mass = 0;      // point mass carried by the initial datum
  double delta_velocity = 0;  // its velocity
  CoeffPtr coeff;
  FluxSpec flux;
  double birth_time = 0;
  double birth_x = 0;
};

inline RiemannKind classify(const RiemannInput& in) {
  if (in.delta_mass != 0)
    throw Error("classify applies to data without an initial point mass");
  if (in.left.u > in.right.u) return RiemannKind::DeltaShock;
  if (in.left.u < in.right.u) return RiemannKind::ContactVacuum;
  return RiemannKind::SingleContact;
}

namespace detail {

// Root of the singular-front velocity equation
//   f(x)([v]x - [vU]) - x[vf(U)] + [vUf(U)] = 0,   [q] = q_r - q_l,
// on the bracket (U_r, U_l); the bracket values have opposite signs whenever
// both side densities are positive, and degenerate sides pin the root to the
// opposite trace.
inline double chi_root_values(double vl, double ul, double vr, double ur,
                              const FluxSpec& flux,
                              const ToleranceProfile& tol) {
  if (ul == ur) return ul;
  if (ul < ur)
    throw BracketFailure("singular-front root requires u_l >= u_r");
  if (vl <= 0 && vr <= 0) return 0.5 * (ul + ur);
  if (vl <= 0) return ur;
  if (vr <= 0) return ul;
  const double fl = flux.f(ul), fr = flux.f(ur);
  const double dv = vr - vl;
  const double dvu = vr * ur - vl * ul;
  const double dvf = vr * fr - vl * fl;
  const double dvuf = vr * ur * fr - vl * ul * fl;
  auto K = [&](double x) {
    return flux.f(x) * (dv * x - dvu) - x * dvf + dvuf;
  };
  const double kl = K(ul), kr = K(ur);
  const double scale = std::fabs(kl) + std::fabs(kr) + tol.abs_tol;
  if (kl < -1e-12 * scale || kr > 1e-12 * scale)
    throw BracketFailure("front velocity bracket has the wrong signs");
  if (kl <= 0) return ul;
  if (kr >= 0) return ur;
  ToleranceProfile rt = tol;
  rt.abs_tol = 0;  // converge on the bracket, not on a residual scale
  rt.rel_tol = 1e-15;
  return find_root(K, ur, ul, rt);
}

}  // namespace detail

inline double chi_root(double t, const RiemannInput& in,
                       const ToleranceProfile& tol = {}) {
  const VelocityOrbit ol =
      VelocityOrbit::through(in.birth_time, in.left.u, in.coeff);
  const VelocityOrbit or_ =
      VelocityOrbit::through(in.birth_time, in.right.u, in.coeff);
  return detail::chi_root_values(in.left.v, ol.at(t), in.right.v, or_.at(t),
                                 in.flux, tol);
}

// Front mass from the integrated balance across the front path:
//   xi(t) = (c - x0)[v] + v_l int f(U_l) - v_r int f(U_r) + m_bar.
inline double xi_mass(double t, double c_value, const RiemannInput& in) {
  const VelocityOrbit ol =
      VelocityOrbit::through(in.birth_time, in.left.u, in.coeff);
  const VelocityOrbit or_ =
      VelocityOrbit::through(in.birth_time, in.right.u, in.coeff);
  SpeedIntegral pl(ol, in.flux), pr(or_, in.flux);
  return (c_value - in.birth_x) * (in.right.v - in.left.v) +
         in.left.v * pl.psi_between(in.birth_time, t) -
         in.right.v * pr.psi_between(in.birth_time, t) + in.delta_mass;
}

// Singular (delta-type) front. Copies share one immutable core.
class DeltaFront {
 public:
  struct Side {
    double v = 0;
    VelocityOrbit orbit;
  };

  double birth_time() const { return core_->birth_time; }
  double birth_x() const { return core_->birth_x; }
  double end_time() const { return core_->end_time; }
  double m_bar() const { return core_->m_bar; }
  double u_bar() const { return core_->u_bar; }
  const Side& left() const { return core_->left; }
  const Side& right() const { return core_->right; }
  const FluxSpec& flux() const { return core_->flux; }
  const CoeffPtr& coeff() const { return core_->coeff; }
  const std::vector<double>& mesh() const { return core_->mesh; }
  const SpeedIntegral& psi_left() const { return *core_->psi_l; }
  const SpeedIntegral& psi_right() const { return *core_->psi_r; }
  bool vacuum_left() const { return core_->vacuum_left; }
  bool vacuum_right() const { return core_->vacuum_right; }

  double c(double t) const {
    check_time(t);
    if (core_->c_fn) return core_->c_fn(t);
    return core_->c_path.eval1(t);
  }

  double xi(double t) const {
    check_time(t);
    if (core_->xi_fn) return core_->xi_fn(t);
    return xi_at(c(t), t);
  }

  double chi(double t) const {
    check_time(t);
    if (core_->chi_fn) return core_->chi_fn(t);
    if (core_->pointwise_root)
      return detail::chi_root_values(core_->left.v, core_->left.orbit.at(t),
                                     core_->right.v, core_->right.orbit.at(t),
                                     core_->flux, core_->tol);
    return theta_at(c(t), t) / xi_at(c(t), t);
  }

  // Velocity consistent with a pure drag orbit launched from the birth value;
  // its largest deviation from chi is the diagnostic for the pointwise root.
  double orbit_form_discrepancy() const {
    const double chi0 = chi(core_->birth_time);
    const VelocityOrbit ref =
        VelocityOrbit::through(core_->birth_time, chi0, core_->coeff);
    double worst = 0;
    for (double t : core_->mesh)
      worst = std::max(worst, std::fabs(chi(t) - ref.at(t)));
    return worst;
  }

  static DeltaFront make_synthetic(double birth_time, double birth_x,
                                   Side left, Side right, FluxSpec flux,
                                   CoeffPtr coeff,
                                   std::function<double(double)> c_fn,
                                   std::function<double(double)> xi_fn,
                                   std::function<double(double)> chi_fn,
                                   std::vector<double> mesh) {
    auto core = std::make_shared<Core>();
    core->birth_time = birth_time;
    core->birth_x = birth_x;
    core->end_time = mesh.empty() ? birth_time : mesh.back();
    core->left = left;
    core->right = right;
    core->flux = std::move(flux);
    core->coeff = std::move(coeff);
    core->c_fn = std::move(c_fn);
    core->xi_fn = std::move(xi_fn);
    core->chi_fn = std::move(chi_fn);
    core->mesh = std::move(mesh);
    core->psi_l = std::make_shared<SpeedIntegral>(core->left.orbit, core->flux);
    core->psi_r =
        std::make_shared<SpeedIntegral>(core->right.orbit, core->flux);
    DeltaFront f;
    f.core_ = std::move(core);
    return f;
  }

 private:
  struct Core {
    double birth_time = 0, birth_x = 0;
    double m_bar = 0, u_bar = 0;
    double end_time = 0;
    Side left, right;
    FluxSpec flux;
    CoeffPtr coeff;
    VelocityOrbit ubar_orbit;
    std::shared_ptr<SpeedIntegral> psi_l, psi_r;
    OdeSolution c_path;
    bool pointwise_root = false;
    bool vacuum_left = false, vacuum_right = false;
    std::vector<double> mesh;
    ToleranceProfile tol;
    std::function<double(double)> c_fn, xi_fn, chi_fn;
  };

  void check_time(double t) const {
    const double slack =
        1e-9 * (1.0 + core_->end_time - core_->birth_time);
    if (t < core_->birth_time - slack || t > core_->end_time + slack)
      throw TimeOutOfRange("front sampled outside its lifetime");
  }

  double xi_at(double cv, double t) const {
    const Core& k = *core_;
    return (cv - k.birth_x) * (k.right.v - k.left.v) +
           k.left.v * k.psi_l->psi_between(k.birth_time, t) -
           k.right.v * k.psi_r->psi_between(k.birth_time, t) + k.m_bar;
  }

  double theta_at(double cv, double t) const {
    const Core& k = *core_;
    const double ul = k.left.orbit.at(t), ur = k.right.orbit.at(t);
    return (cv - k.birth_x) * (k.right.v * ur - k.left.v * ul) +
           k.left.v * ul * k.psi_l->psi_between(k.birth_time, t) -
           k.right.v * ur * k.psi_r->psi_between(k.birth_time, t) +
           k.m_bar * k.ubar_orbit.at(t);
  }

  friend DeltaFront build_delta_front(double, double, DeltaFront::Side,
                                      DeltaFront::Side, double, double,
                                      const FluxSpec&, const CoeffPtr&, double,
                                      const ToleranceProfile&, bool, bool);
  std::shared_ptr<const Core> core_;
};

// Builds a singular front from side states given as orbits, either from pure
// jump data (m_bar = 0, pointwise velocity root) or from an inherited point
// mass (m_bar > 0, coupled position ODE). Verifies the admissible-position
// region at every mesh node.
inline DeltaFront build_delta_front(double birth_time, double birth_x,
                                    DeltaFront::Side left,
                                    DeltaFront::Side right, double m_bar,
                                    double u_bar, const FluxSpec& flux,
                                    const CoeffPtr& coeff, double horizon,
                                    const ToleranceProfile& tol = {},
                                    bool vacuum_left = false,
                                    bool vacuum_right = false) {
  if (horizon < birth_time)
    throw Error("front horizon precedes its birth time");
  if (m_bar < 0) throw InvalidParameter("point mass must be nonnegative");
  auto core = std::make_shared<DeltaFront::Core>();
  core->birth_time = birth_time;
  core->birth_x = birth_x;
  core->end_time = horizon;
  core->left = std::move(left);
  core->right = std::move(right);
  core->m_bar = m_bar;
  core->u_bar = u_bar;
  core->flux = flux;
  core->coeff = coeff;
  core->tol = tol;
  core->vacuum_left = vacuum_left;
  core->vacuum_right = vacuum_right;
  core->psi_l = std::make_shared<SpeedIntegral>(core->left.orbit, flux);
  core->psi_r = std::make_shared<SpeedIntegral>(core->right.orbit, flux);
  core->ubar_orbit = VelocityOrbit::through(birth_time, u_bar, coeff);
  core->pointwise_root = (m_bar == 0);

  DeltaFront front;
  if (core->pointwise_root) {
    const double ul0 = core->left.orbit.at(birth_time);
    const double ur0 = core->right.orbit.at(birth_time);
    if (!(ul0 > ur0))
      throw BracketFailure("jump data admits no singular front: u_l <= u_r");
    auto rhs = [&core](double t, double) {
      return core->flux.f(detail::chi_root_values(
          core->left.v, core->left.orbit.at(t), core->right.v,
          core->right.orbit.at(t), core->flux, core->tol));
    };
    core->c_path = integrate_ode1(rhs, birth_time, birth_x, horizon, tol);
  } else {
    auto xi_of = [&core](double cv, double t) {
      const auto& k = *core;
      return (cv - k.birth_x) * (k.right.v - k.left.v) +
             k.left.v * k.psi_l->psi_between(k.birth_time, t) -
             k.right.v * k.psi_r->psi_between(k.birth_time, t) + k.m_bar;
    };
    auto theta_of = [&core](double cv, double t) {
      const auto& k = *core;
      const double ul = k.left.orbit.at(t), ur = k.right.orbit.at(t);
      return (cv - k.birth_x) * (k.right.v * ur - k.left.v * ul) +
             k.left.v * ul * k.psi_l->psi_between(k.birth_time, t) -
             k.right.v * ur * k.psi_r->psi_between(k.birth_time, t) +
             k.m_bar * k.ubar_orbit.at(t);
    };
    auto rhs = [&core, xi_of, theta_of](double t, double cv) {
      const double m = xi_of(cv, t);
      if (!(m > 0))
        throw RegionViolation("front mass lost positivity while integrating");
      return core->flux.f(theta_of(cv, t) / m);
    };
    core->c_path = integrate_ode1(rhs, birth_time, birth_x, horizon, tol);
  }

  // Sampling mesh: accepted ODE nodes, a 64-per-unit-time floor, and a
  // geometric refinement toward the birth time.
  std::vector<double> mesh = core->c_path.times();
  const double span = std::max(horizon - birth_time, 0.0);
  const int floor_nodes = static_cast<int>(std::ceil(span * 64.0));
  for (int i = 1; i < floor_nodes; ++i)
    mesh.push_back(birth_time + span * i / floor_nodes);
  for (double dt = span * 0.5; dt > 1e-9 * std::max(span, 1.0); dt *= 0.5)
    mesh.push_back(birth_time + dt);
  std::sort(mesh.begin(), mesh.end());
  mesh.erase(std::unique(mesh.begin(), mesh.end()), mesh.end());
  core->mesh = std::move(mesh);

  front.core_ = core;
  for (double t : core->mesh) {
    const double cv = front.c(t);
    const double lo = birth_x + core->psi_r->psi_between(birth_time, t);
    const double hi = birth_x + core->psi_l->psi_between(birth_time, t);
    const double slack = 1e-7 * (1.0 + std::fabs(lo) + std::fabs(hi));
    if (cv < lo - slack || cv > hi + slack)
      throw RegionViolation("front position left the admissible region");
    if (m_bar > 0 && !(front.xi(t) > 0))
      throw RegionViolation("front mass lost positivity");
  }
  return front;
}

// Expanding (possibly degenerate) vacuum fan between two contact paths.
struct WaveFan {
  double birth_time = 0, birth_x = 0;
  DeltaFront::Side left, right;
  std::shared_ptr<SpeedIntegral> psi_l, psi_r;
  bool single = false;

  double left_pos(double t) const {
    return birth_x + psi_l->psi_between(birth_time, t);
  }
  double right_pos(double t) const {
    return birth_x + psi_r->psi_between(birth_time, t);
  }
  // Interior velocity: linear match between the edge traces.
  double z(double x, double t) const {
    const double xl = left_pos(t), xr = right_pos(t);
    const double ul = left.orbit.at(t), ur = right.orbit.at(t);
    if (xr <= xl) return 0.5 * (ul + ur);
    const double s = std::clamp((x - xl) / (xr - xl), 0.0, 1.0);
    return ul + s * (ur - ul);
  }
};

using RiemannSolution = std::variant<DeltaFront, WaveFan>;

inline WaveFan make_fan(double birth_time, double birth_x,
                        DeltaFront::Side left, DeltaFront::Side right,
                        const FluxSpec& flux, bool single) {
  WaveFan fan;
  fan.birth_time = birth_time;
  fan.birth_x = birth_x;
  fan.left = std::move(left);
  fan.right = std::move(right);
  fan.psi_l = std::make_shared<SpeedIntegral>(fan.left.orbit, flux);
  fan.psi_r = std::make_shared<SpeedIntegral>(fan.right.orbit, flux);
  fan.single = single;
  return fan;
}

inline RiemannSolution solve_riemann(const RiemannInput& in, double horizon,
                                     const ToleranceProfile& tol = {}) {
  const RiemannKind kind = classify(in);
  DeltaFront::Side left{in.left.v,
                        VelocityOrbit::through(in.birth_time, in.left.u,
                                               in.coeff)};
  DeltaFront::Side right{in.right.v,
                         VelocityOrbit::through(in.birth_time, in.right.u,
                                                in.coeff)};
  if (kind == RiemannKind::DeltaShock)
    return build_delta_front(in.birth_time, in.birth_x, std::move(left),
                             std::move(right), 0.0, 0.0, in.flux, in.coeff,
                             horizon, tol);
  return make_fan(in.birth_time, in.birth_x, std::move(left), std::move(right),
                  in.flux, kind == RiemannKind::SingleContact);
}

inline DeltaFront solve_delta_riemann(const RiemannInput& in, double horizon,
                                      const ToleranceProfile& tol = {}) {
  if (in.delta_mass < 0)
    throw InvalidParameter("initial point mass must be nonnegative");
  DeltaFront::Side left{in.left.v,
                        VelocityOrbit::through(in.birth_time, in.left.u,
                                               in.coeff)};
  DeltaFront::Side right{in.right.v,
                         VelocityOrbit::through(in.birth_time, in.right.u,
                                                in.coeff)};
  if (in.delta_mass > 0) {
    const double slack =
        1e-9 * (1.0 + std::fabs(in.left.u) + std::fabs(in.right.u));
    if (in.delta_velocity > in.left.u + slack ||
        in.delta_velocity < in.right.u - slack)
      throw RegionViolation(
          "point-mass velocity is not between the side traces");
  }
  const double ubar =
      std::clamp(in.delta_velocity, std::min(in.right.u, in.left.u),
                 std::max(in.right.u, in.left.u));
  return build_delta_front(in.birth_time, in.birth_x, std::move(left),
                           std::move(right), in.delta_mass, ubar, in.flux,
                           in.coeff, horizon, tol);
}

}  // namespace sdw

#endif  // SDW_RIEMANN_HPP
