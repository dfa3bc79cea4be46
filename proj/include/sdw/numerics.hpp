// Shared numerical kernels: embedded RK45 integration with dense output,
// Brent root bracketing, adaptive Simpson quadrature, golden-section descent.
#ifndef SDW_NUMERICS_HPP
#define SDW_NUMERICS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "sdw/errors.hpp"

namespace sdw {

struct ToleranceProfile {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  int max_iter = 200;
};

using OdeRhs =
    std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

// Dense-output trajectory of one integrate_ode call. Interpolation uses the
// fourth-order continuous extension of the Dormand-Prince pair, so sampled
// values between accepted nodes stay within the step tolerance.
class OdeSolution {
 public:
  OdeSolution() = default;

  double front_time() const { return ts_.front(); }
  double back_time() const { return ts_.back(); }
  const std::vector<double>& times() const { return ts_; }
  std::size_t dim() const { return dim_; }

  std::vector<double> eval(double t) const {
    std::vector<double> out(dim_);
    eval_into(t, out);
    return out;
  }

  void eval_into(double t, std::vector<double>& out) const {
    const double span = std::max(ts_.back() - ts_.front(), 1e-300);
    if (t < ts_.front() - 1e-9 * span || t > ts_.back() + 1e-9 * span)
      throw TimeOutOfRange("ode path sampled outside its time range");
    t = std::clamp(t, ts_.front(), ts_.back());
    std::size_t k =
        std::upper_bound(ts_.begin(), ts_.end(), t) - ts_.begin();
    if (k == 0) k = 1;
    if (k >= ts_.size()) k = ts_.size() - 1;
    const std::size_t s = k - 1;
    const double h = ts_[k] - ts_[s];
    const double theta = h > 0 ? (t - ts_[s]) / h : 0.0;
    const double theta1 = 1.0 - theta;
    const auto& rc = dense_[s];
    out.resize(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      out[i] = rc[0][i] +
               theta * (rc[1][i] +
                        theta1 * (rc[2][i] +
                                  theta * (rc[3][i] + theta1 * rc[4][i])));
    }
  }

  double eval1(double t) const {
    std::vector<double> out(dim_);
    eval_into(t, out);
    return out[0];
  }

 private:
  friend OdeSolution integrate_ode(const OdeRhs&, double, std::vector<double>,
                                   double, const ToleranceProfile&);
  std::vector<double> ts_;
  std::vector<std::array<std::vector<double>, 5>> dense_;
  std::size_t dim_ = 0;
};

inline OdeSolution integrate_ode(const OdeRhs& rhs, double t0,
                                 std::vector<double> y0, double t1,
                                 const ToleranceProfile& tol = {}) {
  if (t1 < t0) throw Error("integrate_ode requires t1 >= t0");
  const std::size_t n = y0.size();
  OdeSolution sol;
  sol.dim_ = n;
  sol.ts_.push_back(t0);
  if (t1 == t0) {
    std::array<std::vector<double>, 5> rc;
    rc[0] = y0;
    for (int j = 1; j < 5; ++j) rc[j].assign(n, 0.0);
    sol.ts_.push_back(t0);
    sol.dense_.push_back(std::move(rc));
    return sol;
  }

  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113,
                          a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                          a76 = 11.0 / 84;
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432.0,
                          d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0,
                          d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0,
                          d7 = 69997945.0 / 29380423.0;

  const double span = t1 - t0;
  const double h_min = 1e-14 * span;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n),
      y1(n);
  auto check_finite = [&](const std::vector<double>& v) {
    for (double x : v)
      if (!std::isfinite(x)) throw NonFiniteRhs("ode right-hand side not finite");
  };

  double t = t0;
  double h = span / 100.0;
  rhs(t, y0, k1);
  check_finite(k1);
  long steps = 0;
  const long max_steps = 20'000'000;
  while (t < t1) {
    if (++steps > max_steps) throw Error("integrate_ode step budget exhausted");
    if (h < h_min) throw StepSizeUnderflow("ode step size underflow");
    h = std::min(h, t1 - t);

    auto stage = [&](double frac, std::vector<double>& k,
                     auto... weighted_ks) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = y0[i];
        ((acc += weighted_ks.first * weighted_ks.second[i]), ...);
        yt[i] = acc;
      }
      rhs(t + frac * h, yt, k);
      check_finite(k);
    };
    using W = std::pair<double, const std::vector<double>&>;
    stage(c2, k2, W{h * a21, k1});
    stage(c3, k3, W{h * a31, k1}, W{h * a32, k2});
    stage(c4, k4, W{h * a41, k1}, W{h * a42, k2}, W{h * a43, k3});
    stage(c5, k5, W{h * a51, k1}, W{h * a52, k2}, W{h * a53, k3},
          W{h * a54, k4});
    stage(1.0, k6, W{h * a61, k1}, W{h * a62, k2}, W{h * a63, k3},
          W{h * a64, k4}, W{h * a65, k5});
    for (std::size_t i = 0; i < n; ++i)
      y1[i] = y0[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                           a75 * k5[i] + a76 * k6[i]);
    rhs(t + h, y1, k7);
    check_finite(k7);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                             e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc =
          tol.abs_tol + tol.rel_tol * std::max(std::fabs(y0[i]), std::fabs(y1[i]));
      err += (ei / sc) * (ei / sc);
    }
    err = std::sqrt(err / static_cast<double>(n));

    if (err <= 1.0) {
      std::array<std::vector<double>, 5> rc;
      for (auto& v : rc) v.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double ydiff = y1[i] - y0[i];
        const double bspl = h * k1[i] - ydiff;
        rc[0][i] = y0[i];
        rc[1][i] = ydiff;
        rc[2][i] = bspl;
        rc[3][i] = ydiff - h * k7[i] - bspl;
        rc[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                        d6 * k6[i] + d7 * k7[i]);
      }
      sol.dense_.push_back(std::move(rc));
      t += h;
      sol.ts_.push_back(t);
      y0 = y1;
      k1.swap(k7);  // first-same-as-last
      const double fac =
          err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h *= fac;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }
  return sol;
}

inline OdeSolution integrate_ode1(const std::function<double(double, double)>& rhs,
                                  double t0, double y0, double t1,
                                  const ToleranceProfile& tol = {}) {
  OdeRhs wrapped = [&rhs](double t, const std::vector<double>& y,
                          std::vector<double>& dy) { dy[0] = rhs(t, y[0]); };
  return integrate_ode(wrapped, t0, {y0}, t1, tol);
}

// Brent root search on a sign-change bracket [a, b].
inline double find_root(const std::function<double(double)>& g, double a,
                        double b, const ToleranceProfile& tol = {}) {
  double fa = g(a), fb = g(b);
  if (!std::isfinite(fa) || !std::isfinite(fb))
    throw NonFiniteRhs("find_root endpoint value not finite");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw NoSignChange("find_root bracket carries no sign change");
  const double xtol = tol.rel_tol * (std::fabs(a) + std::fabs(b));
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < tol.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 =
        2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) +
        0.5 * xtol;
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0 || std::fabs(fb) <= tol.abs_tol)
      return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q),
                             std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = g(b);
    if (!std::isfinite(fb)) throw NonFiniteRhs("find_root value not finite");
  }
  return b;
}

namespace detail {

inline double simpson_recurse(const std::function<double(double)>& f, double a,
                              double b, double fa, double fm, double fb,
                              double whole, double eps, int depth) {
  if (depth > 30) throw MaxDepthExceeded("quad recursion deeper than 30 levels");
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  if (!std::isfinite(flm) || !std::isfinite(frm))
    throw NonFiniteRhs("quad integrand not finite");
  const double sl = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double sr = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = sl + sr - whole;
  if (std::fabs(delta) <= 15.0 * eps) return sl + sr + delta / 15.0;
  return simpson_recurse(f, a, m, fa, flm, fm, sl, 0.5 * eps, depth + 1) +
         simpson_recurse(f, m, b, fm, frm, fb, sr, 0.5 * eps, depth + 1);
}

}  // namespace detail

// Adaptive Simpson quadrature; estimated error <= max(abs_tol, rel_tol*|I|).
inline double quad(const std::function<double(double)>& f, double a, double b,
                   const ToleranceProfile& tol = {}) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
    throw NonFiniteRhs("quad integrand not finite");
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double eps = std::max(tol.abs_tol, tol.rel_tol * std::fabs(whole));
  return sign *
         detail::simpson_recurse(f, a, b, fa, fm, fb, whole, eps, 0);
}

// Golden-section descent to the minimum of a unimodal section of f.
inline double minimize_golden(const std::function<double(double)>& f, double a,
                              double b, double xtol, int max_iter = 200) {
  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace sdw

#endif  // SDW_NUMERICS_HPP
