// Front tracking: partitions, discretization, interaction detection and
// resolution, trajectory assembly, field sampling, and a weak-formulation
// refinement study on both balance laws.
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "sdw/fronts.hpp"

namespace {

sdw::FluxSpec idflux() { return sdw::builtin_flux("identity"); }
sdw::CoeffPtr zerok() { return sdw::CoefficientSpec::zero(); }

// Triple state u = 2 | 0 | -2 with unit density, breaks at 0 and 1; the two
// fronts travel at +-1 and meet at (0.5, 0.5).
sdw::FrontConfiguration triple_state(double eps = 1.0 / 64) {
  sdw::InitialData data;
  data.left = sdw::State{1.0, 2.0};
  data.v = [](double) { return 1.0; };
  data.u = [](double x) { return x <= 0.0 ? 2.0 : (x <= 1.0 ? 0.0 : -2.0); };
  sdw::PartitionSpec p;
  p.R = -0.5;
  p.eps = eps;
  return sdw::discretize_initial(data, p, -2.0, 3.0, idflux(), zerok(), 1.5,
                                 false, {}, {0.0, 1.0});
}

double total_mass(const sdw::FrontConfiguration& cfg, double t) {
  std::vector<double> pos(cfg.fronts.size());
  for (std::size_t j = 0; j < cfg.fronts.size(); ++j)
    pos[j] = cfg.fronts[j].position(t);
  double total = 0;
  for (std::size_t k = 0; k < cfg.states.size(); ++k) {
    const double a = k == 0 ? cfg.funnel_lo(t) : pos[k - 1];
    const double b = k == cfg.fronts.size() ? cfg.funnel_hi(t) : pos[k];
    total += cfg.states[k].density() * (b - a);
  }
  for (const auto& f : cfg.fronts) total += f.xi(t);
  return total;
}

double total_momentum(const sdw::FrontConfiguration& cfg, double t) {
  std::vector<double> pos(cfg.fronts.size());
  for (std::size_t j = 0; j < cfg.fronts.size(); ++j)
    pos[j] = cfg.fronts[j].position(t);
  double total = 0;
  for (std::size_t k = 0; k < cfg.states.size(); ++k) {
    const double a = k == 0 ? cfg.funnel_lo(t) : pos[k - 1];
    const double b = k == cfg.fronts.size() ? cfg.funnel_hi(t) : pos[k];
    total += cfg.states[k].density() * cfg.states[k].orbit.at(t) * (b - a);
  }
  for (const auto& f : cfg.fronts)
    if (f.is_delta()) total += f.xi(t) * f.trace(t);
  return total;
}

}  // namespace

TEST_CASE("uniform partition keeps every width inside the admissible band") {
  for (double eps : {1.0 / 16, 1.0 / 64, 1.0 / 256}) {
    sdw::PartitionSpec p;
    p.R = -1.0;
    p.eps = eps;
    auto y = sdw::partition_points(p, 2.5);
    REQUIRE(y.size() >= 2);
    CHECK(y.front() == -1.0);
    CHECK(y.back() == 2.5);
    const double lo = p.C1 * std::pow(eps, p.alpha);
    const double hi = p.C2 * std::sqrt(eps);
    for (std::size_t i = 1; i < y.size(); ++i) {
      CHECK(y[i] - y[i - 1] > lo);
      CHECK(y[i] - y[i - 1] < hi);
    }
  }
}

TEST_CASE("partition rejects out-of-range parameters") {
  sdw::PartitionSpec p;
  p.eps = 0.0;
  CHECK_THROWS_AS(sdw::partition_points(p, 1.0), sdw::InvalidPartition);
  p = {};
  p.alpha = 1.0;
  CHECK_THROWS_AS(sdw::partition_points(p, 1.0), sdw::InvalidPartition);
  p = {};
  CHECK_THROWS_AS(sdw::partition_points(p, -0.5), sdw::InvalidPartition);
  p = {};
  p.C1 = 10.0;
  p.C2 = 0.1;
  CHECK_THROWS_AS(sdw::partition_points(p, 1.0), sdw::InvalidPartition);
}

TEST_CASE("aligned partition hits every interior anchor exactly") {
  sdw::PartitionSpec p;
  p.R = 0.0;
  p.eps = 1.0 / 64;
  const std::vector<double> anchors = {0.3, 1.0, 2.7, 5.0};  // 5.0 outside
  auto y = sdw::partition_points_aligned(p, 3.0, anchors);
  CHECK(y.front() == 0.0);
  CHECK(y.back() == 3.0);
  for (double a : {0.3, 1.0, 2.7})
    CHECK(std::count(y.begin(), y.end(), a) == 1);
  const double hi = p.C2 * std::sqrt(p.eps);
  for (std::size_t i = 1; i < y.size(); ++i) {
    CHECK(y[i] - y[i - 1] > 0);
    CHECK(y[i] - y[i - 1] < hi);
  }
  CHECK(sdw::partition_points_aligned(p, 3.0, {}) ==
        sdw::partition_points(p, 3.0));
}

TEST_CASE("discretization turns a decreasing step into one singular front") {
  auto cfg = triple_state();
  REQUIRE(cfg.fronts.size() == 2);
  CHECK(cfg.fronts[0].is_delta());
  CHECK(cfg.fronts[1].is_delta());
  CHECK(cfg.states.size() == 3);
  CHECK(cfg.fronts[0].position(0.0) == doctest::Approx(0.0));
  CHECK(cfg.fronts[1].position(0.0) == doctest::Approx(1.0));
  CHECK(cfg.fronts[0].trace(0.25) == doctest::Approx(1.0));   // midpoint speed
  CHECK(cfg.fronts[1].trace(0.25) == doctest::Approx(-1.0));
  // budget follows the cell-count bound plus one per anchor
  const long base = static_cast<long>(std::ceil(5.0 / (1.0 / 8.0)));
  CHECK(cfg.event_budget == base + 2);
}

TEST_CASE("discretization opens a vacuum fan on an increasing step") {
  sdw::InitialData data;
  data.left = sdw::State{1.0, 0.0};
  data.v = [](double) { return 1.0; };
  data.u = [](double x) { return x <= 0.0 ? 0.0 : 1.0; };
  sdw::PartitionSpec p;
  p.R = -0.5;
  auto cfg = sdw::discretize_initial(data, p, -2.0, 2.0, idflux(), zerok(),
                                     1.0, false, {}, {0.0});
  REQUIRE(cfg.fronts.size() == 2);
  CHECK_FALSE(cfg.fronts[0].is_delta());
  CHECK_FALSE(cfg.fronts[1].is_delta());
  REQUIRE(cfg.states.size() == 3);
  CHECK(cfg.states[1].vacuum);
  CHECK(cfg.states[1].density() == 0.0);
  // contacts ride the side velocities
  CHECK(cfg.fronts[0].position(1.0) == doctest::Approx(0.0));
  CHECK(cfg.fronts[1].position(1.0) == doctest::Approx(1.0));
}

TEST_CASE("discretization merges equal neighbours and validates input") {
  sdw::InitialData data;
  data.left = sdw::State{1.0, 0.5};
  data.v = [](double) { return 1.0; };
  data.u = [](double) { return 0.5; };
  sdw::PartitionSpec p;
  p.R = -0.5;
  auto cfg =
      sdw::discretize_initial(data, p, -1.0, 1.0, idflux(), zerok(), 1.0);
  CHECK(cfg.fronts.empty());
  CHECK(cfg.states.size() == 1);

  CHECK_THROWS_AS(
      sdw::discretize_initial(data, p, 0.0, 1.0, idflux(), zerok(), 1.0),
      sdw::InvalidPartition);  // box edge not left of the anchor

  sdw::InitialData bad = data;
  bad.v = [](double x) { return x > 0.3 ? -1.0 : 1.0; };
  CHECK_THROWS_AS(
      sdw::discretize_initial(bad, p, -1.0, 1.0, idflux(), zerok(), 1.0),
      sdw::InvalidParameter);

  CHECK_THROWS_AS(sdw::discretize_initial(data, p, -1.0, 1.0, idflux(),
                                          zerok(), 1.0, true),
                  sdw::InvalidParameter);  // two-phase needs a w sampler
}

TEST_CASE("interaction detection finds the triple-state collision") {
  auto cfg = triple_state();
  auto ev = sdw::next_interaction(cfg, 1.5);
  REQUIRE(ev.has_value());
  CHECK(ev->T == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(ev->X == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(ev->participants == std::vector<int>{0, 1});
}

TEST_CASE("diverging contacts never interact") {
  sdw::InitialData data;
  data.left = sdw::State{1.0, -1.0};
  data.v = [](double) { return 1.0; };
  data.u = [](double x) { return x <= 0.0 ? -1.0 : 1.0; };
  sdw::PartitionSpec p;
  p.R = -0.5;
  auto cfg = sdw::discretize_initial(data, p, -3.0, 3.0, idflux(), zerok(),
                                     2.0, false, {}, {0.0});
  CHECK_FALSE(sdw::next_interaction(cfg, 2.0).has_value());
  auto traj = sdw::track(cfg, 2.0);
  CHECK(traj.event_count() == 0);
  CHECK(traj.configs.size() == 1);
}

TEST_CASE("triple-state tracking merges into the resting point mass") {
  auto traj = sdw::track(triple_state(), 1.0);
  CHECK(traj.event_count() == 1);
  const auto& ev = traj.final_config().event_log.front();
  CHECK(ev.T == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(ev.X == doctest::Approx(0.5).epsilon(1e-9));

  const auto& fin = traj.final_config();
  REQUIRE(fin.fronts.size() == 1);
  REQUIRE(fin.states.size() == 2);
  const auto& d = std::get<sdw::DeltaFront>(fin.fronts[0].node);
  CHECK(d.m_bar() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(d.u_bar() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(d.c(1.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(d.chi(1.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(d.xi(1.0) == doctest::Approx(4.0).epsilon(1e-8));

  // pre-merge configuration still answers queries at earlier times
  const auto& pre = traj.at_time(0.25);
  CHECK(pre.fronts.size() == 2);
  CHECK(pre.fronts[0].xi(0.25) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_THROWS_AS(traj.at_time(-0.5), sdw::TimeOutOfRange);
}

TEST_CASE("tracking beyond the configured horizon is rejected") {
  auto cfg = triple_state();
  CHECK_THROWS_AS(sdw::track(cfg, 2.0), sdw::Error);
}

TEST_CASE("sampling reproduces closed-form fields after the merge") {
  auto traj = sdw::track(triple_state(), 1.0);
  const auto& fin = traj.final_config();
  auto snap = sdw::sample(fin, 1.0, {0.25, 0.75, 1.5});
  REQUIRE(snap.atoms.size() == 1);
  CHECK(snap.atoms[0].x == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(snap.atoms[0].xi == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(snap.atoms[0].chi == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(snap.u[0] == doctest::Approx(2.0));
  CHECK(snap.u[1] == doctest::Approx(-2.0));
  CHECK(snap.u[2] == doctest::Approx(-2.0));
  // mass anchored on the left funnel edge: -2 + 2t = 0 at t = 1
  CHECK(snap.m[0] == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(snap.m[1] == doctest::Approx(0.75 + 4.0).epsilon(1e-9));
  CHECK(snap.m[2] == doctest::Approx(1.5 + 4.0).epsilon(1e-9));
  CHECK_THROWS_AS(sdw::sample(fin, 2.0, {0.0}), sdw::TimeOutOfRange);
  CHECK_THROWS_AS(sdw::sample(traj.at_time(0.2), 0.9, {0.0}),
                  sdw::TimeOutOfRange);
}

TEST_CASE("vacuum fan interpolates velocity linearly and carries no mass") {
  sdw::InitialData data;
  data.left = sdw::State{1.0, 0.0};
  data.v = [](double) { return 1.0; };
  data.u = [](double x) { return x <= 0.0 ? 0.0 : 1.0; };
  sdw::PartitionSpec p;
  p.R = -0.5;
  auto cfg = sdw::discretize_initial(data, p, -2.0, 2.0, idflux(), zerok(),
                                     1.0, false, {}, {0.0});
  auto traj = sdw::track(cfg, 1.0);
  auto snap = sdw::sample(traj.final_config(), 1.0, {0.5, 0.25, 1.5});
  CHECK(snap.atoms.empty());
  CHECK(snap.u[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(snap.u[1] == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(snap.u[2] == doctest::Approx(1.0));
  // funnel_lo stays at -2 (left velocity 0), fan interior adds no mass
  CHECK(snap.m[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(snap.m[1] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(snap.m[2] == doctest::Approx(2.0 + 0.5).epsilon(1e-9));
}

TEST_CASE("two-phase tracking splits the merged mass by phase") {
  sdw::InitialData data;
  data.left = sdw::State{0.5, 2.0};
  data.w_left = 0.5;
  data.v = [](double) { return 0.5; };
  data.w = [](double) { return 0.5; };
  data.u = [](double x) { return x <= 0.0 ? 2.0 : (x <= 1.0 ? 0.0 : -2.0); };
  sdw::PartitionSpec p;
  p.R = -0.5;
  auto cfg = sdw::discretize_initial(data, p, -2.0, 3.0, idflux(), zerok(),
                                     1.5, true, {}, {0.0, 1.0});
  auto traj = sdw::track(cfg, 1.0);
  CHECK(traj.event_count() == 1);
  auto snap = sdw::sample(traj.final_config(), 1.0, {0.0});
  REQUIRE(snap.atoms.size() == 1);
  CHECK(snap.atoms[0].xi_v == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(snap.atoms[0].xi_w == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(snap.atoms[0].xi ==
        doctest::Approx(snap.atoms[0].xi_v + snap.atoms[0].xi_w)
            .epsilon(1e-12));
  CHECK(snap.atoms[0].chi == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("random tracking conserves totals and stays overcompressive") {
  std::mt19937 rng(90210);
  std::uniform_real_distribution<double> dens(0.2, 2.0);
  std::uniform_real_distribution<double> vel(-2.0, 2.0);
  std::uniform_int_distribution<int> npieces(2, 4);
  const auto flux = idflux();
  int delta_checks = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const int n = npieces(rng);
    std::vector<double> breaks(n), vs(n + 1), us(n + 1);
    for (int i = 0; i < n; ++i) breaks[i] = -1.0 + 2.5 * (i + 1) / (n + 1);
    for (int i = 0; i <= n; ++i) {
      vs[i] = dens(rng);
      us[i] = vel(rng);
    }
    std::sort(us.rbegin(), us.rend());  // decreasing: singular fronts only
    sdw::InitialData data;
    data.left = sdw::State{vs[0], us[0]};
    data.v = [&](double x) {
      int k = std::upper_bound(breaks.begin(), breaks.end(), x) -
              breaks.begin();
      return vs[k];
    };
    data.u = [&](double x) {
      int k = std::upper_bound(breaks.begin(), breaks.end(), x) -
              breaks.begin();
      return us[k];
    };
    sdw::PartitionSpec p;
    p.R = -1.5;
    p.eps = 1.0 / 16;
    auto cfg = sdw::discretize_initial(data, p, -8.0, 8.0, flux, zerok(),
                                       2.0, false, {}, breaks);
    auto traj = sdw::track(cfg, 2.0);

    const double m0 = total_mass(traj.configs.front(), 0.0);
    const double p0 = total_momentum(traj.configs.front(), 0.0);
    std::size_t prev_count = traj.configs.front().fronts.size();
    for (std::size_t ci = 0; ci < traj.configs.size(); ++ci) {
      const auto& c = traj.configs[ci];
      CHECK(c.fronts.size() <= prev_count);
      prev_count = c.fronts.size();
      const double tmid = 0.5 * (c.time + c.valid_to);
      CHECK(total_mass(c, tmid) == doctest::Approx(m0).epsilon(1e-7));
      CHECK(total_momentum(c, tmid) == doctest::Approx(p0).epsilon(1e-6));
      for (const auto& f : c.fronts) {
        if (!f.is_delta()) continue;
        const auto& d = std::get<sdw::DeltaFront>(f.node);
        const double chi = d.chi(tmid);
        const double fl = flux.f(d.left().orbit.at(tmid));
        const double fr = flux.f(d.right().orbit.at(tmid));
        const double slack = 1e-9 * (1.0 + std::fabs(fl) + std::fabs(fr));
        CHECK(flux.f(chi) <= fl + slack);
        CHECK(flux.f(chi) >= fr - slack);
        ++delta_checks;
      }
    }
  }
  CHECK(delta_checks > 50);
}

// ---------------------------------------------------------------------------
// Weak-formulation refinement study.
//
// The tracked field is an exact weak solution of its own discretized data, so
// testing against a smooth product bump phi(x,t) = X(x) G(t) whose support
// touches t = 0 isolates the initial-data sampling error, which shrinks like
// the cell width ~ eps^alpha. Both balance laws are checked:
//   R1 = int (G' P + G Q) dt + G(0) int X v0 dx,          P = int X dmu,
//   R2 = int (G' P2 + G Q2) dt + G(0) int X u0 v0 dx,     Q = int f(u) X' dmu.
// ---------------------------------------------------------------------------
namespace {

struct Bump {
  double x0, rx, rt;
  static double psi(double s) {
    const double z = 1.0 - s * s;
    return z > 0 ? std::exp(-1.0 / z) : 0.0;
  }
  static double dpsi(double s) {
    const double z = 1.0 - s * s;
    return z > 0 ? psi(s) * (-2.0 * s) / (z * z) : 0.0;
  }
  double X(double x) const { return psi((x - x0) / rx); }
  double dX(double x) const { return dpsi((x - x0) / rx) / rx; }
  double G(double t) const { return psi(t / rt); }
  double dG(double t) const { return dpsi(t / rt) / rt; }
};

double simpson(const std::function<double(double)>& g, double a, double b,
               int panels) {
  if (!(b > a)) return 0.0;
  const double h = (b - a) / (2 * panels);
  double s = g(a) + g(b);
  for (int i = 1; i < 2 * panels; ++i)
    s += g(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double integral_X(const Bump& bp, double a, double b) {
  a = std::max(a, bp.x0 - bp.rx);
  b = std::min(b, bp.x0 + bp.rx);
  if (!(b > a)) return 0.0;
  return simpson([&](double x) { return bp.X(x); }, a, b, 32);
}

// int (G' P + G Q) dt with P = int X dmu_t, Q = int f(u) X' dmu_t, taken
// moment-by-moment: moment 0 tests mass, moment 1 tests momentum.
double interior_term(const sdw::Trajectory& traj, const sdw::FluxSpec& flux,
                     const Bump& bp, int moment) {
  auto PQ = [&](const sdw::FrontConfiguration& cfg, double t, double& P,
                double& Q) {
    const std::size_t nf = cfg.fronts.size();
    std::vector<double> pos(nf);
    for (std::size_t j = 0; j < nf; ++j) pos[j] = cfg.fronts[j].position(t);
    P = 0;
    Q = 0;
    for (std::size_t k = 0; k < cfg.states.size(); ++k) {
      const double v = cfg.states[k].density();
      if (v == 0) continue;
      const double a = k == 0 ? cfg.funnel_lo(t) : pos[k - 1];
      const double b = k == nf ? cfg.funnel_hi(t) : pos[k];
      const double u = cfg.states[k].orbit.at(t);
      const double wt = moment == 0 ? 1.0 : u;
      P += v * wt * integral_X(bp, a, b);
      Q += v * wt * flux.f(u) * (bp.X(b) - bp.X(a));
    }
    for (std::size_t j = 0; j < nf; ++j) {
      if (!cfg.fronts[j].is_delta()) continue;
      const double xi = cfg.fronts[j].xi(t);
      const double chi = cfg.fronts[j].trace(t);
      const double wt = moment == 0 ? 1.0 : chi;
      P += xi * wt * bp.X(pos[j]);
      Q += xi * wt * flux.f(chi) * bp.dX(pos[j]);
    }
  };
  double acc = 0;
  for (const auto& cfg : traj.configs) {
    const double ta = std::max(cfg.time, 0.0);
    const double tb = std::min(cfg.valid_to, bp.rt);
    if (!(tb > ta)) continue;
    acc += simpson(
        [&](double t) {
          double P, Q;
          PQ(cfg, t, P, Q);
          return bp.dG(t) * P + bp.G(t) * Q;
        },
        ta, tb, 24);
  }
  return acc;
}

}  // namespace

TEST_CASE("weak-formulation residuals shrink with the partition width") {
  const auto flux = idflux();
  const auto coeff = zerok();
  auto v0 = [](double x) {
    return 1.0 + 0.15 * (std::clamp(x, -1.0, 1.0) + 1.0);
  };
  auto u0 = [](double x) { return std::clamp(1.0 - x, 0.0, 2.0); };
  const Bump bp{0.0, 0.8, 0.5};

  const double init_mass =
      simpson([&](double x) { return bp.X(x) * v0(x); }, -0.8, 0.8, 256);
  const double init_mom = simpson(
      [&](double x) { return bp.X(x) * u0(x) * v0(x); }, -0.8, 0.8, 256);

  std::vector<double> epss = {1.0 / 8, 1.0 / 32, 1.0 / 128, 1.0 / 512};
  std::vector<double> r1s, r2s;
  for (double eps : epss) {
    sdw::InitialData data;
    data.left = sdw::State{1.0, 2.0};
    data.v = v0;
    data.u = u0;
    sdw::PartitionSpec p;
    p.R = -1.5;
    p.eps = eps;
    auto cfg = sdw::discretize_initial(data, p, -3.0, 3.0, flux, coeff, 0.6,
                                       false, {}, {-1.0, 1.0});
    auto traj = sdw::track(cfg, 0.6);
    const double r1 =
        std::fabs(interior_term(traj, flux, bp, 0) + bp.G(0.0) * init_mass);
    const double r2 =
        std::fabs(interior_term(traj, flux, bp, 1) + bp.G(0.0) * init_mom);
    r1s.push_back(r1);
    r2s.push_back(r2);
  }

  auto fitted_order = [&](const std::vector<double>& rs) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const double lx = std::log(epss[i]), ly = std::log(rs[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double n = double(rs.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  CHECK(r1s.front() > r1s.back());
  CHECK(r2s.front() > r2s.back());
  CHECK(fitted_order(r1s) >= 0.4);
  CHECK(fitted_order(r2s) >= 0.4);
}
