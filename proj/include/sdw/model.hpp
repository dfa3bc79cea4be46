// Model ingredients: flux laws, drag coefficients, velocity orbits and the
// memoized time integrals they feed (K, Phi, per-orbit speed integrals).
#ifndef SDW_MODEL_HPP
#define SDW_MODEL_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "sdw/errors.hpp"
#include "sdw/numerics.hpp"

namespace sdw {

struct FluxSpec {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::string name;
};

struct FluxParams {
  int k = 3;     // odd_power exponent
  double a = 1;  // traffic saturation constant
};

inline FluxSpec builtin_flux(const std::string& name, FluxParams p = {}) {
  if (name == "identity")
    return {[](double u) { return u; }, [](double) { return 1.0; }, name};
  if (name == "geometric_optics")
    return {[](double u) { return u / std::sqrt(1.0 + u * u); },
            [](double u) { return std::pow(1.0 + u * u, -1.5); }, name};
  if (name == "odd_power") {
    if (p.k < 1 || p.k % 2 == 0)
      throw InvalidParameter("odd_power flux needs an odd exponent k >= 1");
    const int k = p.k;
    return {[k](double u) { return std::pow(u, k); },
            [k](double u) { return k * std::pow(u, k - 1); }, name};
  }
  if (name == "traffic") {
    if (!(p.a > 0))
      throw InvalidParameter("traffic flux needs a > 0");
    const double a = p.a;
    return {[a](double u) { return u / (a + u); },
            [a](double u) { return a / ((a + u) * (a + u)); }, name};
  }
  throw UnknownModel("unknown flux model: " + name);
}

inline bool flux_monotone_on(const FluxSpec& flux, double lo, double hi,
                             int samples = 10000) {
  if (hi < lo) std::swap(lo, hi);
  if (hi == lo) hi = lo + 1e-6;
  for (int i = 0; i < samples; ++i) {
    const double u = lo + (hi - lo) * i / double(samples - 1);
    const double d = flux.df(u);
    if (!(std::isfinite(d) && d > 0)) return false;
  }
  return true;
}

namespace detail {

// Append-only checkpoint ladder (0, h0, 2*h0, 4*h0, ...) memoizing the prefix
// integral of `integrand`; a query completes the tail with one adaptive quad.
class LadderCache {
 public:
  explicit LadderCache(std::function<double(double)> integrand,
                       double h0 = 1.0 / 16)
      : integrand_(std::move(integrand)), h0_(h0) {
    ts_.push_back(0.0);
    vals_.push_back(0.0);
  }

  double value(double t) const {
    if (t < 0) {
      if (t < -1e-12) throw NegativeTime("time integral queried at t < 0");
      t = 0;
    }
    if (t == 0) return 0.0;
    std::scoped_lock lk(mu_);
    while (ts_.back() < t) {
      const double next = ts_.back() == 0 ? h0_ : 2.0 * ts_.back();
      vals_.push_back(vals_.back() +
                      quad(integrand_, ts_.back(), next, tight_));
      ts_.push_back(next);
    }
    std::size_t j = ts_.size() - 1;
    while (ts_[j] > t) --j;
    if (ts_[j] == t) return vals_[j];
    return vals_[j] + quad(integrand_, ts_[j], t, tight_);
  }

 private:
  std::function<double(double)> integrand_;
  double h0_;
  ToleranceProfile tight_{1e-13, 1e-12, 200};
  mutable std::vector<double> ts_, vals_;
  mutable std::mutex mu_;
};

}  // namespace detail

// Drag coefficient kappa(t) >= 0 and ambient velocity ua(t), together with
// K(t) = int_0^t kappa and Phi(t) = int_0^t kappa*ua*exp(K). Factories for
// the built-in coefficient families install exact prefix forms; arbitrary
// coefficient functions fall back to the memoized quadrature ladder.
class CoefficientSpec {
 public:
  CoefficientSpec(std::function<double(double)> kappa,
                  std::function<double(double)> ua)
      : kappa_(std::move(kappa)), ua_(std::move(ua)) {
    k_ladder_ = std::make_unique<detail::LadderCache>(
        [this](double s) { return kappa_(s); });
    phi_ladder_ = std::make_unique<detail::LadderCache>([this](double s) {
      return kappa_(s) * ua_(s) * std::exp(K(s));
    });
  }

  CoefficientSpec(const CoefficientSpec&) = delete;
  CoefficientSpec& operator=(const CoefficientSpec&) = delete;

  double kappa(double t) const { return kappa_(t); }
  double ua(double t) const { return ua_(t); }

  double K(double t) const {
    if (t < 0) {
      if (t < -1e-12) throw NegativeTime("K(t) queried at t < 0");
      t = 0;
    }
    return k_exact_ ? k_exact_(t) : k_ladder_->value(t);
  }

  double Phi(double t) const {
    if (t < 0) {
      if (t < -1e-12) throw NegativeTime("Phi(t) queried at t < 0");
      t = 0;
    }
    return phi_exact_ ? phi_exact_(t) : phi_ladder_->value(t);
  }

  static std::shared_ptr<const CoefficientSpec> zero() {
    auto c = std::make_shared<CoefficientSpec>([](double) { return 0.0; },
                                               [](double) { return 0.0; });
    c->k_exact_ = [](double) { return 0.0; };
    c->phi_exact_ = [](double) { return 0.0; };
    return c;
  }

  static std::shared_ptr<const CoefficientSpec> constant(double k0, double a0) {
    auto c = std::make_shared<CoefficientSpec>([k0](double) { return k0; },
                                               [a0](double) { return a0; });
    c->k_exact_ = [k0](double t) { return k0 * t; };
    c->phi_exact_ = [k0, a0](double t) {
      return k0 == 0 ? 0.0 : a0 * (std::exp(k0 * t) - 1.0);
    };
    return c;
  }

  // kappa(t) = 1/(t+kh) with a constant ambient velocity.
  static std::shared_ptr<const CoefficientSpec> algebraic(double kh,
                                                          double a0 = 0.0) {
    if (!(kh > 0)) throw InvalidParameter("algebraic drag needs kh > 0");
    auto c = std::make_shared<CoefficientSpec>(
        [kh](double t) { return 1.0 / (t + kh); },
        [a0](double) { return a0; });
    c->k_exact_ = [kh](double t) { return std::log((t + kh) / kh); };
    c->phi_exact_ = [kh, a0](double t) { return a0 * t / kh; };
    return c;
  }

 private:
  std::function<double(double)> kappa_, ua_;
  std::function<double(double)> k_exact_, phi_exact_;
  std::unique_ptr<detail::LadderCache> k_ladder_, phi_ladder_;
};

using CoeffPtr = std::shared_ptr<const CoefficientSpec>;

inline double kappa_integral(const CoeffPtr& c, double t) { return c->K(t); }
inline double forcing_integral(const CoeffPtr& c, double t) { return c->Phi(t); }

// Velocity along a drag orbit: U(t) = exp(-K(t)) * (Phi(t) + u0).
struct VelocityOrbit {
  double u0 = 0.0;
  CoeffPtr coeff;

  double at(double t) const {
    return std::exp(-coeff->K(t)) * (coeff->Phi(t) + u0);
  }
  // Orbit passing through (t_ref, u_ref).
  static VelocityOrbit through(double t_ref, double u_ref, CoeffPtr c) {
    return {u_ref * std::exp(c->K(t_ref)) - c->Phi(t_ref), std::move(c)};
  }
};

inline double evolve_velocity(const VelocityOrbit& orbit, double t) {
  return orbit.at(t);
}

// Memoized position integral of a characteristic speed along an orbit:
// Psi(t) = int_0^t f(U(s)) ds.
class SpeedIntegral {
 public:
  SpeedIntegral(VelocityOrbit orbit, FluxSpec flux)
      : orbit_(std::move(orbit)),
        flux_(std::move(flux)),
        ladder_(std::make_shared<detail::LadderCache>(
            [o = orbit_, f = flux_.f](double s) { return f(o.at(s)); })) {}

  const VelocityOrbit& orbit() const { return orbit_; }
  double psi(double t) const { return ladder_->value(t); }
  double psi_between(double t_from, double t_to) const {
    return ladder_->value(t_to) - ladder_->value(t_from);
  }

 private:
  VelocityOrbit orbit_;
  FluxSpec flux_;
  std::shared_ptr<detail::LadderCache> ladder_;
};

}  // namespace sdw

#endif  // SDW_MODEL_HPP
