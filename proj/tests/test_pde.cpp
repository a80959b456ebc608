#include <catch_amalgamated.hpp>

#include <cmath>

#include "quncert/packets.hpp"
#include "quncert/pde.hpp"
#include "random_fields.hpp"

using namespace quncert;
using Catch::Matchers::WithinAbs;

namespace {

ComplexField packet_on(const Grid1D& g, EffectivePacketState s, const PhysicalParams& params = {}) {
  return make_extended_gaussian(s, g, params);
}

EvolveOptions steps(double dt, std::size_t n, std::size_t every = 1) {
  EvolveOptions o;
  o.dt = dt;
  o.n_steps = n;
  o.record_every = every;
  return o;
}

double max_quadratic_gap(const MomentSet& a, const MomentSet& b) {
  return std::max({std::abs(a.Q - b.Q), std::abs(a.mean_x - b.mean_x), std::abs(a.mean_p - b.mean_p),
                   std::abs(a.x2 - b.x2), std::abs(a.p2 - b.p2), std::abs(a.D - b.D)});
}

}  // namespace

TEST_CASE("free Gaussian spreads quadratically") {
  const PhysicalParams params;
  const auto g = build_grid(-32, 32, 1024);
  const auto rec = split_step_evolve(packet_on(g, {}), Potential::zero(), {}, params, steps(0.01, 200, 50));
  CHECK(rec.times.back() == Catch::Approx(2.0).epsilon(1e-15));
  CHECK_THAT(rec.moment_sets.back().x2, WithinAbs(2.0, 1e-6));
  for (std::size_t i = 0; i < rec.size(); ++i) {
    CHECK_THAT(rec.moment_sets[i].x2, WithinAbs(analytic_free_spread(rec.moment_sets[0], rec.times[i], params), 1e-9));
  }
}

TEST_CASE("free packet drifts with its momentum") {
  const PhysicalParams params;
  EffectivePacketState s;
  s.p = 1.0;
  const auto g = build_grid(-32, 32, 1024);
  const auto rec = split_step_evolve(packet_on(g, s), Potential::zero(), {}, params, steps(0.01, 300, 10));
  for (std::size_t i = 0; i < rec.size(); ++i) {
    CHECK_THAT(rec.moment_sets[i].mean_x, WithinAbs(rec.times[i], 1e-8));
  }
}

TEST_CASE("harmonic evolution revives after 2 pi") {
  const PhysicalParams params;
  EffectivePacketState s;
  s.q = 1.0;
  s.p = -0.5;
  s.alpha = 0.8;
  s.beta = 0.3;
  s.k = 1;
  const auto g = build_grid(-16, 16, 512);
  const std::size_t n = 2000;
  const double dt = 2.0 * M_PI / n;
  const auto rec = split_step_evolve(packet_on(g, s), Potential::harmonic(1.0), {}, params, steps(dt, n, 100));
  CHECK(max_quadratic_gap(rec.moment_sets.front(), rec.moment_sets.back()) < 1e-5);
}

TEST_CASE("analytic free spread examples") {
  const PhysicalParams params;
  const MomentSet m0{1.0, 0.0, 0.0, 1.0, 0.25, 0.0};
  CHECK(analytic_free_spread(m0, 2.0, params) == 2.0);
  CHECK(analytic_free_spread(m0, 0.0, params) == m0.x2);
  double prev = 0.0;
  for (double t = 10.0; t < 1e6; t *= 10.0) {
    const double v = analytic_free_spread(m0, t, params);
    CHECK(v > prev);
    prev = v;
  }
  CHECK(prev > 1e9);
}

TEST_CASE("analytic harmonic moments") {
  const PhysicalParams params{1.0, 1.5};
  const double omega = 0.8;

  SECTION("coherent ground state is stationary") {
    EffectivePacketState s;
    s.alpha = std::sqrt(params.hbar / (2.0 * params.mass * omega));
    const auto m0 = packet_kinematics(s, params);
    for (double t : {0.1, 0.7, 2.3, 9.0}) {
      const auto m = analytic_harmonic_moments(m0, omega, t, params);
      CHECK_THAT(m.x2, WithinAbs(m0.x2, 1e-14));
      CHECK_THAT(m.p2, WithinAbs(m0.p2, 1e-14));
      CHECK_THAT(m.D, WithinAbs(m0.D, 1e-14));
    }
  }

  SECTION("quadratic moments have period pi / omega and keep c") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
      const auto m0 = packet_kinematics(gen::random_packet(rng), params);
      const auto half = analytic_harmonic_moments(m0, omega, M_PI / omega, params);
      CHECK(gen::rel_err(half.x2, m0.x2) < 1e-12);
      CHECK(gen::rel_err(half.p2, m0.p2) < 1e-12);
      CHECK(gen::rel_err(half.D, m0.D) < 1e-12);
      const double c0 = uncertainties(m0, params).c;
      for (double t : {0.3, 1.1, 2.9}) {
        const auto m = analytic_harmonic_moments(m0, omega, t, params);
        CHECK(gen::rel_err(uncertainties(m, params).c, c0) < 1e-10);
        CHECK(m.p2 > 0.0);
        CHECK(m.x2 > 0.0);
      }
    }
  }

  SECTION("solves the moment equations") {
    const MomentSet m0{1.0, 0.4, -0.3, 1.2, 0.7, 0.25};
    const double h = 1e-4;
    const double mw2 = params.mass * omega * omega;
    for (double t : {0.2, 1.3}) {
      const auto a = analytic_harmonic_moments(m0, omega, t - h, params);
      const auto b = analytic_harmonic_moments(m0, omega, t + h, params);
      const auto m = analytic_harmonic_moments(m0, omega, t, params);
      CHECK_THAT((b.x2 - a.x2) / (2 * h), WithinAbs(2.0 * m.D / params.mass, 1e-7));
      CHECK_THAT((b.D - a.D) / (2 * h), WithinAbs(m.p2 / params.mass - mw2 * m.x2, 1e-7));
      CHECK_THAT((b.p2 - a.p2) / (2 * h), WithinAbs(-2.0 * mw2 * m.D, 1e-7));
      CHECK_THAT((b.mean_x - a.mean_x) / (2 * h), WithinAbs(m.mean_p / params.mass, 1e-7));
      CHECK_THAT((b.mean_p - a.mean_p) / (2 * h), WithinAbs(-mw2 * m.mean_x, 1e-7));
    }
  }

  SECTION("rejects non-positive frequency") {
    CHECK_THROWS_AS(analytic_harmonic_moments({}, 0.0, 1.0, params), InvalidArgument);
    CHECK_THROWS_AS(analytic_harmonic_moments({}, -1.0, 1.0, params), InvalidArgument);
  }
}

TEST_CASE("norm is conserved over ten thousand steps") {
  const PhysicalParams params;
  EffectivePacketState s;
  s.k = 2;
  s.beta = 0.5;
  const auto g = build_grid(-16, 16, 256);
  const auto rec = split_step_evolve(packet_on(g, s), Potential::harmonic(1.0), {}, params, steps(1e-3, 10000, 500));
  CHECK(rec.max_norm_drift < 1e-10);
}

TEST_CASE("uncertainty is conserved for zero and harmonic potentials") {
  const PhysicalParams params;
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 4; ++trial) {
    auto s = gen::random_packet(rng, 3);
    s.alpha = 0.7 + 0.3 * trial;
    s.q *= 0.3;
    s.p *= 0.3;
    const auto g = build_grid(-32, 32, 1024);
    const auto pot = trial % 2 == 0 ? Potential::zero() : Potential::harmonic(0.7);
    const auto rec = split_step_evolve(packet_on(g, s), pot, {}, params, steps(2e-3, 1500, 50));
    const double c0 = rec.uncertainty_sets.front().c;
    for (const auto& u : rec.uncertainty_sets) CHECK(std::abs(u.c - c0) / c0 < 1e-6);
  }
}

TEST_CASE("recorded moments satisfy the moment equations") {
  const PhysicalParams params;
  EffectivePacketState s;
  s.q = 0.5;
  s.p = 0.4;
  s.alpha = 0.9;
  s.beta = -0.2;
  s.k = 1;
  const double omega = 1.2;
  const auto g = build_grid(-16, 16, 512);
  const double dt = 1e-3;
  const auto rec = split_step_evolve(packet_on(g, s), Potential::harmonic(omega), {}, params, steps(dt, 3000));
  const double m = params.mass;
  const double mw2 = m * omega * omega;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < rec.size(); i += 37) {
    const auto& a = rec.moment_sets[i - 1];
    const auto& b = rec.moment_sets[i + 1];
    const auto& c = rec.moment_sets[i];
    const double scale = std::max({1.0, std::abs(c.x2), std::abs(c.p2)});
    worst = std::max(worst, std::abs((b.x2 - a.x2) / (2 * dt) - 2.0 * c.D / m) / scale);
    worst = std::max(worst, std::abs((b.D - a.D) / (2 * dt) - (c.p2 / m - mw2 * c.x2)) / scale);
    worst = std::max(worst, std::abs((b.p2 - a.p2) / (2 * dt) + 2.0 * mw2 * c.D) / scale);
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("Strang splitting is second order") {
  const PhysicalParams params;
  EffectivePacketState s;
  s.q = 1.0;
  s.alpha = 0.6;
  s.k = 1;
  const auto g = build_grid(-16, 16, 512);
  const double omega = 1.0;
  const double T = 1.0;
  const auto psi0 = packet_on(g, s);
  auto error_at = [&](std::size_t n) {
    const auto rec = split_step_evolve(psi0, Potential::harmonic(omega), {}, params, steps(T / n, n, n));
    const auto want = analytic_harmonic_moments(rec.moment_sets.front(), omega, T, params);
    return std::abs(rec.moment_sets.back().x2 - want.x2);
  };
  const double coarse = error_at(50);
  const double fine = error_at(100);
  const double ratio = coarse / fine;
  INFO("coarse " << coarse << " fine " << fine);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("quartic potential breaks uncertainty conservation") {
  const PhysicalParams params;
  EffectivePacketState s;
  s.q = 0.5;
  const auto g = build_grid(-16, 16, 512);
  const auto rec = split_step_evolve(packet_on(g, s), Potential::polynomial(0.0, 1.0, 0.1), {}, params,
                                     steps(1e-3, 2000, 100));
  CHECK(std::abs(rec.uncertainty_sets.back().c - rec.uncertainty_sets.front().c) > 1e-4);
}

TEST_CASE("bright soliton keeps its shape") {
  const PhysicalParams params;
  const double eta = 1.0;
  const auto g = build_grid(-32, 32, 1024);
  const auto psi0 = ComplexField::sample(g, [&](double x) { return cplx(eta / std::cosh(eta * x), 0.0); });
  NonlinearCoupling nl;
  nl.terms = {{1, -0.5}};
  const double T = 2.0;
  const auto rec = split_step_evolve(psi0, Potential::zero(), nl, params, steps(1e-3, 2000, 2000));
  const auto& psi = *rec.final_state;
  double worst = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const cplx want = psi0[j] * std::polar(1.0, eta * eta * T / 2.0);
    worst = std::max(worst, std::abs(psi[j] - want));
  }
  CHECK(worst < 1e-5);
  CHECK(rec.max_norm_drift < 1e-10);
}

TEST_CASE("field energy is conserved by linear evolution") {
  const PhysicalParams params;
  EffectivePacketState s;
  s.q = 1.0;
  s.k = 2;
  const auto g = build_grid(-16, 16, 512);
  const auto pot = Potential::harmonic(1.0);
  const auto psi0 = packet_on(g, s);
  const auto rec = split_step_evolve(psi0, pot, {}, params, steps(1e-3, 1000, 1000));
  const double e0 = field_energy(psi0, pot, {}, params);
  const double e1 = field_energy(*rec.final_state, pot, {}, params);
  CHECK(std::abs(e1 - e0) / e0 < 1e-6);
}

TEST_CASE("record cadence includes the first and last step") {
  const auto g = build_grid(-12, 12, 256);
  auto opts = steps(0.01, 10, 3);
  opts.snapshot_steps = {0, 4, 10, 99};
  const auto rec = split_step_evolve(packet_on(g, {}), Potential::zero(), {}, {}, opts);
  REQUIRE(rec.size() == 5);
  const std::vector<double> want{0.0, 0.03, 0.06, 0.09, 0.10};
  for (std::size_t i = 0; i < want.size(); ++i) CHECK_THAT(rec.times[i], WithinAbs(want[i], 1e-15));
  CHECK(rec.uncertainty_sets.size() == rec.size());
  REQUIRE(rec.snapshots.size() == 3);
  CHECK(rec.snapshots[1].step == 4);
  CHECK(rec.final_state.has_value());
  CHECK_NOTHROW(rec.validate());
}

TEST_CASE("evolution resumed from a stored state is bitwise identical") {
  const auto g = build_grid(-12, 12, 256);
  const auto psi0 = packet_on(g, {});
  const auto pot = Potential::polynomial(0.0, 1.0, 0.05);
  const auto full = split_step_evolve(psi0, pot, {}, {}, steps(0.01, 20));
  const auto first = split_step_evolve(psi0, pot, {}, {}, steps(0.01, 10));
  auto rest_opts = steps(0.01, 10);
  rest_opts.t0 = first.times.back();
  const auto rest = split_step_evolve(*first.final_state, pot, {}, {}, rest_opts);
  for (std::size_t j = 0; j < g.size(); ++j) CHECK((*full.final_state)[j] == (*rest.final_state)[j]);
}

TEST_CASE("evolution is deterministic") {
  const auto g = build_grid(-12, 12, 256);
  NonlinearCoupling nl;
  nl.terms = {{1, 0.3}, {2, -0.05}};
  const auto psi0 = packet_on(g, {});
  const auto a = split_step_evolve(psi0, Potential::harmonic(0.5), nl, {}, steps(0.01, 50));
  const auto b = split_step_evolve(psi0, Potential::harmonic(0.5), nl, {}, steps(0.01, 50));
  for (std::size_t j = 0; j < g.size(); ++j) CHECK((*a.final_state)[j] == (*b.final_state)[j]);
}

TEST_CASE("overflow aborts with the last good step") {
  const auto g = build_grid(-12, 12, 256);
  NonlinearCoupling nl;
  nl.terms = {{200, 1.0}};
  const auto psi0 = cplx(10.0, 0.0) * packet_on(g, {});
  try {
    (void)split_step_evolve(psi0, Potential::zero(), nl, {}, steps(0.01, 5));
    FAIL("expected EvolutionAborted");
  } catch (const EvolutionAborted& e) {
    CHECK(e.last_good_step() == 0);
    CHECK(e.partial().size() == 1);
  }
}

TEST_CASE("large time steps raise a stability warning") {
  const auto g = build_grid(-12, 12, 256);
  const auto rec = split_step_evolve(packet_on(g, {}), Potential::zero(), {}, {}, steps(0.1, 2));
  CHECK_FALSE(rec.diagnostics.clean());
  const auto ok = split_step_evolve(packet_on(g, {}), Potential::zero(), {}, {}, steps(1e-3, 2));
  CHECK(ok.diagnostics.clean());
}

TEST_CASE("evolve rejects invalid options") {
  const auto g = build_grid(-12, 12, 256);
  const auto psi0 = packet_on(g, {});
  CHECK_THROWS_AS(split_step_evolve(psi0, Potential::zero(), {}, {}, steps(0.0, 2)), InvalidArgument);
  CHECK_THROWS_AS(split_step_evolve(psi0, Potential::zero(), {}, {}, steps(-0.1, 2)), InvalidArgument);
  CHECK_THROWS_AS(split_step_evolve(psi0, Potential::zero(), {}, {}, steps(0.1, 2, 0)), InvalidArgument);
  NonlinearCoupling bad;
  bad.terms = {{0, 1.0}};
  CHECK_THROWS_AS(split_step_evolve(psi0, Potential::zero(), bad, {}, steps(0.01, 2)), InvalidArgument);
}

TEST_CASE("potential variants") {
  const PhysicalParams params{1.0, 2.0};
  CHECK_THROWS_AS(Potential::harmonic(-1.0), InvalidArgument);
  CHECK(Potential::harmonic(0.5).at(2.0, params) == 0.5 * 2.0 * 0.25 * 4.0);
  const auto poly = Potential(PolynomialPotential{{1.0, 2.0, 3.0, 4.0, 5.0}});
  const double x = 0.7;
  const double want = 1.0 + 2.0 * x + 3.0 * x * x / 2 + 4.0 * x * x * x / 6 + 5.0 * x * x * x * x / 24;
  CHECK_THAT(poly.at(x, params), WithinAbs(want, 1e-14));
  CHECK(Potential::polynomial(2.0, 0.0, 0.0).at(5.0, params) == 2.0);
  CHECK(Potential::zero().closes_quadratic_moments());
  CHECK(Potential::harmonic(1.0).closes_quadratic_moments());
  CHECK_FALSE(poly.closes_quadratic_moments());

  const auto g = build_grid(-1, 1, 16);
  CHECK_THROWS_AS(Potential(SampledPotential{g, std::vector<double>(15)}), InvalidArgument);
  std::vector<double> vals(16);
  for (std::size_t j = 0; j < 16; ++j) vals[j] = g.x(j) * g.x(j);
  const Potential sampled(SampledPotential{g, vals});
  CHECK(sampled.at(g.x(3), params) == vals[3]);
  CHECK_THROWS_AS(sampled.at(0.01, params), InvalidArgument);
  CHECK_THROWS_AS(sampled.sample_on(build_grid(-1, 1, 32), params), InvalidArgument);
  vals[2] = std::nan("");
  CHECK_THROWS_AS(Potential(SampledPotential{g, vals}), InvalidArgument);
}

TEST_CASE("nonlinear coupling densities") {
  NonlinearCoupling nl;
  nl.terms = {{1, 2.0}, {2, 3.0}};
  const double rho = 0.5;
  CHECK_THAT(nl.effective_potential(rho), WithinAbs(2.0 * 2.0 * rho + 3.0 * 1.5 * rho * rho, 1e-15));
  CHECK_THAT(nl.energy_density(rho), WithinAbs(2.0 * rho * rho + 1.5 * rho * rho * rho, 1e-15));
  CHECK(NonlinearCoupling{}.is_linear());
}
