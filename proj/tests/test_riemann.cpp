#include <cmath>
#include <random>
#include <variant>

#include "doctest.h"
#include "sdw/riemann.hpp"

namespace {

sdw::RiemannInput make_input(double vl, double ul, double vr, double ur,
                             sdw::FluxSpec flux = sdw::builtin_flux("identity"),
                             sdw::CoeffPtr coeff = sdw::CoefficientSpec::zero()) {
  sdw::RiemannInput in;
  in.left = {vl, ul};
  in.right = {vr, ur};
  in.flux = std::move(flux);
  in.coeff = std::move(coeff);
  return in;
}

}  // namespace

TEST_CASE("classify splits on the velocity jump") {
  CHECK(sdw::classify(make_input(1, 2, 4, 0)) == sdw::RiemannKind::DeltaShock);
  CHECK(sdw::classify(make_input(1, 0, 1, 1)) ==
        sdw::RiemannKind::ContactVacuum);
  CHECK(sdw::classify(make_input(1, 1, 2, 1)) ==
        sdw::RiemannKind::SingleContact);
}

TEST_CASE("chi_root solves the quadratic balance") {
  // (1,2)|(4,0) with identity flux: the balance polynomial collapses to
  // 3x^2 + 4x - 4 whose positive root is 2/3; cross-check with a blind
  // root search on the polynomial itself
  auto in = make_input(1, 2, 4, 0);
  const double oracle = sdw::find_root(
      [](double x) { return 3.0 * x * x + 4.0 * x - 4.0; }, 0.0, 2.0);
  for (double t : {0.0, 0.5, 1.0, 2.0}) {
    CHECK(sdw::chi_root(t, in) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(sdw::chi_root(t, in) == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("chi_root vanishes on odd-symmetric data") {
  auto id = make_input(1, 1, 1, -1);
  CHECK(sdw::chi_root(0.7, id) == doctest::Approx(0.0).epsilon(1e-12));
  auto go = make_input(1, 1, 1, -1, sdw::builtin_flux("geometric_optics"));
  CHECK(sdw::chi_root(0.7, go) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("chi_root with equal densities is the velocity midpoint") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> v(0.2, 3.0);
  for (int i = 0; i < 40; ++i) {
    double ul = u(rng), ur = u(rng);
    if (ul <= ur) std::swap(ul, ur);
    if (ul == ur) continue;
    const double dens = v(rng);
    auto in = make_input(dens, ul, dens, ur);
    CHECK(sdw::chi_root(0.0, in) ==
          doctest::Approx(0.5 * (ul + ur)).epsilon(1e-10));
  }
}

TEST_CASE("chi_root degenerates gracefully on one-sided vacuum") {
  CHECK(sdw::chi_root(0.0, make_input(0, 2, 1, -1)) ==
        doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(sdw::chi_root(0.0, make_input(1, 2, 0, -1)) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("xi_mass closed forms") {
  auto in = make_input(1, 2, 1, 0);
  in.delta_mass = 0;
  // equal densities, speed f(chi)=1: xi(t) = 2t along c(t) = t
  for (double t : {0.25, 1.0, 2.0})
    CHECK(sdw::xi_mass(t, t, in) == doctest::Approx(2.0 * t).epsilon(1e-10));

  auto sym = make_input(1, 2, 1, -2);
  sym.delta_mass = 2.0;
  CHECK(sdw::xi_mass(0.0, 0.0, sym) == 2.0);
  for (double t : {0.5, 1.0})
    CHECK(sdw::xi_mass(t, 0.0, sym) ==
          doctest::Approx(4.0 * t + 2.0).epsilon(1e-10));
}

TEST_CASE("solve_riemann produces the reference singular front") {
  auto sol = sdw::solve_riemann(make_input(1, 2, 4, 0), 1.0);
  REQUIRE(std::holds_alternative<sdw::DeltaFront>(sol));
  const auto& f = std::get<sdw::DeltaFront>(sol);
  CHECK(f.c(1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(f.chi(1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(f.xi(1.0) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(f.xi(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  // pure drag-free data: the per-time root coincides with one orbit
  CHECK(f.orbit_form_discrepancy() < 1e-9);
}

TEST_CASE("solve_riemann opens a symmetric vacuum fan") {
  auto sol = sdw::solve_riemann(make_input(1, -1, 1, 1), 1.0);
  REQUIRE(std::holds_alternative<sdw::WaveFan>(sol));
  const auto& fan = std::get<sdw::WaveFan>(sol);
  CHECK(fan.left_pos(1.0) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(fan.right_pos(1.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(fan.z(0.0, 1.0) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(fan.z(0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(fan.z(-0.25, 0.5) == doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("solve_riemann treats equal velocities as one contact") {
  auto sol = sdw::solve_riemann(make_input(1, 1, 1, 1), 1.0);
  REQUIRE(std::holds_alternative<sdw::WaveFan>(sol));
  const auto& fan = std::get<sdw::WaveFan>(sol);
  CHECK(fan.single);
  CHECK(fan.left_pos(0.8) == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(fan.right_pos(0.8) == doctest::Approx(fan.left_pos(0.8)).epsilon(1e-12));
}

TEST_CASE("solve_delta_riemann keeps symmetric point mass stationary") {
  auto in = make_input(1, 2, 1, -2);
  in.delta_mass = 2.0;
  in.delta_velocity = 0.0;
  auto f = sdw::solve_delta_riemann(in, 1.0);
  CHECK(f.xi(0.0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(f.chi(0.0) == doctest::Approx(0.0).epsilon(1e-10));
  for (double t : {0.3, 0.7, 1.0}) {
    CHECK(f.c(t) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(f.chi(t) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(f.xi(t) == doctest::Approx(4.0 * t + 2.0).epsilon(1e-9));
  }
}

TEST_CASE("solve_delta_riemann starts from the point-mass state") {
  std::mt19937 rng(31337);
  std::uniform_real_distribution<double> v(0.2, 3.0);
  std::uniform_real_distribution<double> du(0.2, 1.5);
  for (int i = 0; i < 10; ++i) {
    const double ur = -du(rng), ul = du(rng);
    const double ub = 0.5 * (ul + ur) + 0.1 * du(rng);
    auto in = make_input(v(rng), ul, v(rng), ur);
    in.delta_mass = 0.3 + du(rng);
    in.delta_velocity = std::min(std::max(ub, ur + 0.05), ul - 0.05);
    auto f = sdw::solve_delta_riemann(in, 1.0);
    CHECK(f.xi(0.0) == doctest::Approx(in.delta_mass).epsilon(1e-9));
    CHECK(f.chi(0.0) == doctest::Approx(in.delta_velocity).epsilon(1e-7));
  }
}

TEST_CASE("vanishing point mass recovers the jump-only front") {
  auto in = make_input(1, 2, 4, 0);
  in.delta_mass = 1e-8;
  in.delta_velocity = 2.0 / 3.0;
  auto f = sdw::solve_delta_riemann(in, 1.0);
  CHECK(f.chi(1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK(f.c(1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("singular fronts grow mass and stay between the traces") {
  std::mt19937 rng(2718);
  std::uniform_real_distribution<double> v(0.1, 4.0);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<sdw::CoeffPtr> coeffs = {
      sdw::CoefficientSpec::zero(), sdw::CoefficientSpec::constant(0.8, 0.3),
      sdw::CoefficientSpec::algebraic(1.0)};
  std::vector<sdw::FluxSpec> fluxes = {sdw::builtin_flux("identity"),
                                       sdw::builtin_flux("geometric_optics")};
  int built = 0;
  for (int i = 0; i < 60 && built < 25; ++i) {
    double ul = u(rng), ur = u(rng);
    if (ul <= ur) std::swap(ul, ur);
    if (ul - ur < 0.1) continue;
    auto in = make_input(v(rng), ul, v(rng), ur, fluxes[i % fluxes.size()],
                         coeffs[i % coeffs.size()]);
    auto sol = sdw::solve_riemann(in, 1.0);
    REQUIRE(std::holds_alternative<sdw::DeltaFront>(sol));
    const auto& f = std::get<sdw::DeltaFront>(sol);
    ++built;
    for (int k = 1; k <= 10; ++k) {
      const double t = k / 10.0;
      const double chi = f.chi(t);
      const double Ul = f.left().orbit.at(t), Ur = f.right().orbit.at(t);
      CHECK(chi < Ul + 1e-9);
      CHECK(chi > Ur - 1e-9);
      CHECK(in.flux.f(chi) < in.flux.f(Ul) + 1e-9);
      CHECK(in.flux.f(chi) > in.flux.f(Ur) - 1e-9);
      CHECK(f.xi(t) > 0.0);
    }
  }
  CHECK(built >= 20);
}

TEST_CASE("front balance derivatives match the jump relations") {
  // d(xi)/dt = c'[v] - [v f(U)] must hold for any flux; the momentum relation
  // d(xi*chi)/dt = c'[vU] - [vUf(U)] - kappa (chi - u_a) xi additionally needs
  // the drag-orbit closure, exact for the identity flux
  auto coeff = sdw::CoefficientSpec::constant(0.9, 0.4);

  auto fd = [](auto&& fn, double t, double h) {
    return (fn(t + h) - fn(t - h)) / (2.0 * h);
  };

  SUBCASE("mass relation under a non-identity flux") {
    auto in = make_input(1.5, 1.2, 0.7, -0.9,
                         sdw::builtin_flux("geometric_optics"), coeff);
    auto f = std::get<sdw::DeltaFront>(sdw::solve_riemann(in, 2.0));
    for (double t : {0.4, 1.0, 1.6}) {
      const double h = 1e-5;
      const double lhs = fd([&](double s) { return f.xi(s); }, t, h);
      const double Ul = f.left().orbit.at(t), Ur = f.right().orbit.at(t);
      const double cp = in.flux.f(f.chi(t));
      const double rhs = cp * (in.right.v - in.left.v) -
                         (in.right.v * in.flux.f(Ur) - in.left.v * in.flux.f(Ul));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }
  }

  SUBCASE("momentum relation under the identity flux") {
    auto in = make_input(2.0, 1.5, 0.5, -1.0, sdw::builtin_flux("identity"),
                         coeff);
    auto f = std::get<sdw::DeltaFront>(sdw::solve_riemann(in, 2.0));
    for (double t : {0.4, 1.0, 1.6}) {
      const double h = 1e-5;
      const double lhs =
          fd([&](double s) { return f.xi(s) * f.chi(s); }, t, h);
      const double Ul = f.left().orbit.at(t), Ur = f.right().orbit.at(t);
      const double chi = f.chi(t);
      const double rhs = chi * (in.right.v * Ur - in.left.v * Ul) -
                         (in.right.v * Ur * Ur - in.left.v * Ul * Ul) -
                         coeff->kappa(t) * (chi - coeff->ua(t)) * f.xi(t);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-5));
    }
  }
}

TEST_CASE("point-mass fronts stay inside the admissible region") {
  auto coeff = sdw::CoefficientSpec::algebraic(1.0, 0.2);
  auto in = make_input(1.0, 1.4, 2.0, -0.8, sdw::builtin_flux("identity"),
                       coeff);
  in.delta_mass = 0.5;
  in.delta_velocity = 0.1;
  auto f = sdw::solve_delta_riemann(in, 2.0);
  for (double t : {0.2, 0.8, 1.5, 2.0}) {
    const double lo = f.psi_right().psi_between(0.0, t);
    const double hi = f.psi_left().psi_between(0.0, t);
    CHECK(f.c(t) >= lo - 1e-7);
    CHECK(f.c(t) <= hi + 1e-7);
  }
}

TEST_CASE("fronts refuse to be sampled outside their lifetime") {
  auto f = std::get<sdw::DeltaFront>(
      sdw::solve_riemann(make_input(1, 1, 1, -1), 1.0));
  CHECK_THROWS_AS(f.c(5.0), sdw::TimeOutOfRange);
  CHECK_THROWS_AS(f.xi(-1.0), sdw::TimeOutOfRange);
}
