#include <catch_amalgamated.hpp>

#include <cmath>

#include "quncert/effective.hpp"
#include "random_fields.hpp"

using namespace quncert;
using Catch::Matchers::WithinAbs;

namespace {

EffectiveHamiltonianSpec free_spec(double c) {
  EffectiveHamiltonianSpec spec;
  spec.c = c;
  return spec;
}

}  // namespace

TEST_CASE("effective energy examples") {
  EffectivePacketState s;
  CHECK(eff_energy(s, free_spec(0.25)) == 0.125);
  CHECK(eff_energy(s, free_spec(2.25)) == 1.125);

  s.beta = 0.7;
  s.p = 0.3;
  s.q = -1.2;
  auto spec = free_spec(0.25);
  spec.omega = 0.9;
  spec.V4 = 0.2;
  const double e = eff_energy(s, spec);
  s.beta = -0.7;
  CHECK(eff_energy(s, spec) == e);

  s.alpha = 0.0;
  CHECK_THROWS_AS(eff_energy(s, spec), InvalidArgument);
  s.alpha = -1.0;
  CHECK_THROWS_AS(eff_energy(s, spec), InvalidArgument);
}

TEST_CASE("effective energy parts") {
  EffectivePacketState s;
  s.q = 1.0;
  s.p = 2.0;
  s.alpha = 0.5;
  s.beta = 1.0;
  auto spec = free_spec(0.25);
  spec.omega = 2.0;
  spec.Q = 3.0;
  const auto e = eff_energy_parts(s, spec);
  CHECK_THAT(e.center, WithinAbs(2.0 + 2.0, 1e-15));
  CHECK_THAT(e.quadratic, WithinAbs(0.5 + 0.25 / (2 * 0.25) + 0.5 * 4.0 * 0.25, 1e-15));
  CHECK(e.per_particle == e.center + e.quadratic);
  CHECK(e.total == 3.0 * e.per_particle);
}

TEST_CASE("free conformal spreading") {
  EffectivePacketState s;
  const auto rec = integrate_effective(s, free_spec(0.25), 1e-3, 4000, 100);
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const double t = rec.times[i];
    const double a = rec.packet_states[i].alpha;
    CHECK_THAT(a * a, WithinAbs(1.0 + t * t / 4.0, 1e-8));
  }
}

TEST_CASE("free center drifts uniformly") {
  EffectivePacketState s;
  s.p = 1.0;
  const auto rec = integrate_effective(s, free_spec(0.25), 0.01, 500, 10);
  for (std::size_t i = 0; i < rec.size(); ++i) CHECK_THAT(rec.packet_states[i].q, WithinAbs(rec.times[i], 1e-12));
}

TEST_CASE("effective energy is conserved") {
  std::mt19937_64 rng(51);
  for (double omega : {0.0, 1.3}) {
    for (int trial = 0; trial < 5; ++trial) {
      auto s = gen::random_packet(rng, 3);
      s.alpha = 0.5 + 0.2 * trial;
      const auto spec = spec_for_packet(s, Potential::harmonic(omega), {});
      const auto rec = integrate_effective(s, spec, 1e-3, 10000, 1000);
      const double e0 = rec.energies.front();
      for (double e : rec.energies) CHECK(std::abs(e - e0) / std::abs(e0) < 1e-8);
    }
  }
}

TEST_CASE("Riccati closed form") {
  const PhysicalParams params;
  const cplx lambda0(0.4, 0.0);
  const auto lam = riccati_evolve(lambda0, 0.05, 200, params);
  REQUIRE(lam.size() == 201);
  CHECK(lam[0] == lambda0);
  for (std::size_t j = 1; j < lam.size(); ++j) {
    CHECK(std::abs(lam[j]) < std::abs(lam[j - 1]));
    CHECK(lam[j].real() > 0.0);
  }
  CHECK_THROWS_AS(riccati_evolve(cplx(0.0, 1.0), 0.1, 2, params), InvalidArgument);
  CHECK_THROWS_AS(riccati_evolve(cplx(-1.0, 0.0), 0.1, 2, params), InvalidArgument);
}

TEST_CASE("Riccati solution solves the Riccati equation") {
  const PhysicalParams params{0.7, 1.9};
  const cplx lambda0(0.8, -0.3);
  const double h = 1e-5;
  const auto lam = riccati_evolve(lambda0, h, 2, params);
  const cplx derivative = (lam[2] - lam[0]) / (2.0 * h);
  const cplx want = cplx(0.0, -2.0 * params.hbar / params.mass) * lam[1] * lam[1];
  CHECK(std::abs(derivative - want) < 1e-8);
}

TEST_CASE("Riccati and Hamiltonian trajectories agree") {
  std::mt19937_64 rng(52);
  for (double hbar : {1.0, 0.5}) {
    const PhysicalParams params{hbar, 1.4};
    for (int trial = 0; trial < 8; ++trial) {
      const auto s = gen::random_packet(rng, 4);
      const auto spec = spec_for_packet(s, Potential::zero(), params);
      const double dt = 2.5e-4;
      const auto rec = integrate_effective(s, spec, dt, 12000, 1);
      const auto lam = riccati_evolve(complex_width(s, params), dt, 12000, params);
      double worst = 0.0;
      for (std::size_t j = 0; j < lam.size(); j += 400) {
        const auto w = width_from_lambda(lam[j], s.k, params);
        worst = std::max({worst, std::abs(w.alpha - rec.packet_states[j].alpha),
                          std::abs(w.beta - rec.packet_states[j].beta)});
      }
      CHECK(worst < 1e-8);
    }
  }
}

TEST_CASE("width map inverts complex_width") {
  std::mt19937_64 rng(53);
  const PhysicalParams params{1.3, 1.0};
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = gen::random_packet(rng, 10);
    const auto w = width_from_lambda(complex_width(s, params), s.k, params);
    CHECK(gen::rel_err(w.alpha, s.alpha) < 1e-14);
    CHECK(std::abs(w.beta - s.beta) < 1e-13);
  }
}

TEST_CASE("conformal scaling maps solutions to solutions") {
  EffectivePacketState s;
  s.alpha = 0.8;
  s.beta = 0.3;
  const double c = 0.6;
  for (double scale : {0.5, 2.0, 3.7}) {
    EffectivePacketState scaled = s;
    scaled.alpha *= std::sqrt(scale);
    scaled.beta *= std::sqrt(scale);
    const auto a = integrate_effective(s, free_spec(c), 1e-3, 3000, 100);
    const auto b = integrate_effective(scaled, free_spec(scale * scale * c), 1e-3, 3000, 100);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK_THAT(b.packet_states[i].alpha, WithinAbs(std::sqrt(scale) * a.packet_states[i].alpha, 1e-8));
      CHECK_THAT(b.packet_states[i].beta, WithinAbs(std::sqrt(scale) * a.packet_states[i].beta, 1e-8));
    }
  }
}

TEST_CASE("integration overshoot is reported") {
  EffectivePacketState s;
  s.beta = -50.0;
  CHECK_THROWS_AS(integrate_effective(s, free_spec(1e-4), 0.5, 10), NumericalError);
  CHECK_THROWS_AS(integrate_effective(s, free_spec(0.25), 0.0, 10), InvalidArgument);
}

TEST_CASE("smeared potential examples") {
  const PhysicalParams params{1.0, 1.5};
  const double omega = 0.8;
  for (double alpha : {0.3, 1.0, 2.5}) {
    const auto h = smeared_potential(Potential::harmonic(omega), 0.0, alpha, params);
    const double want = 0.5 * params.mass * omega * omega * alpha * alpha;
    CHECK_THAT(h.quadrature, WithinAbs(want, 1e-12));
    CHECK_THAT(*h.closed_form, WithinAbs(want, 1e-15));
  }

  for (double q : {-2.0, 0.0, 3.0}) {
    for (double alpha : {0.2, 1.0, 4.0}) {
      const auto v = smeared_potential(Potential::polynomial(1.7, 0.0, 0.0), q, alpha, params);
      CHECK_THAT(v.quadrature, WithinAbs(1.7, 1e-12));
    }
  }

  const auto quartic = smeared_potential(Potential::polynomial(0.0, 0.0, 1.0), 0.0, 1.0, params);
  CHECK_THAT(quartic.quadrature, WithinAbs(0.125, 1e-12));
  CHECK_THAT(*quartic.closed_form, WithinAbs(0.125, 1e-15));
}

TEST_CASE("smeared quadrature matches the moment expansion for polynomials") {
  std::mt19937_64 rng(54);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const PhysicalParams params;
  for (int trial = 0; trial < 100; ++trial) {
    const Potential pot(PolynomialPotential{{u(rng), u(rng), u(rng), u(rng), u(rng)}});
    const double q = 2.0 * u(rng);
    const double alpha = 0.3 + std::abs(u(rng));
    const int k = trial % 6;
    const auto v = smeared_potential(pot, q, alpha, params, k);
    CHECK(gen::rel_err(v.quadrature, *v.closed_form) < 1e-12);
  }
}

TEST_CASE("smeared potential on a sampled grid") {
  const PhysicalParams params;
  const auto g = build_grid(-20, 20, 1024);
  std::vector<double> vals(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) vals[j] = 0.5 * g.x(j) * g.x(j);
  const Potential pot(SampledPotential{g, vals});
  const auto v = smeared_potential(pot, 1.0, 0.7, params, 2);
  CHECK_FALSE(v.closed_form.has_value());
  CHECK_THAT(v.quadrature, WithinAbs(0.5 * (1.0 + 0.49), 1e-10));
  CHECK_THROWS_AS(smeared_potential(pot, 19.0, 0.7, params), InvalidArgument);
  CHECK_THROWS_AS(smeared_potential(pot, 0.0, 0.01, params), InvalidArgument);
  CHECK_THROWS_AS(smeared_potential(pot, 0.0, -1.0, params), InvalidArgument);
}

TEST_CASE("fourth moment ratio matches the packet density") {
  const auto g = build_grid(-30, 30, 4096);
  for (int k = 0; k <= 6; ++k) {
    EffectivePacketState s;
    s.k = k;
    const auto psi = make_extended_gaussian(s, g, {});
    double m4 = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) m4 += std::pow(g.x(j), 4) * std::norm(psi[j]);
    CHECK_THAT(m4 * g.dx(), WithinAbs(fourth_moment_ratio(k), 1e-10));
  }
  CHECK(fourth_moment_ratio(0) == 3.0);
}

TEST_CASE("spec for a packet") {
  EffectivePacketState s;
  s.k = 2;
  s.Q = 1.5;
  const PhysicalParams params{0.5, 2.0};
  const auto spec = spec_for_packet(s, Potential::polynomial(0.3, 8.0, 0.1), params);
  CHECK(spec.c == packet_uncertainty(2, params));
  CHECK(spec.omega == 2.0);
  CHECK(spec.V4 == 0.1);
  CHECK(spec.V0 == 0.3);
  CHECK(spec.Q == 1.5);
  CHECK_THROWS_AS(spec_for_packet(s, Potential(PolynomialPotential{{0, 1, 0, 0, 0}}), params), InvalidArgument);
  CHECK_THROWS_AS(spec_for_packet(s, Potential::polynomial(0, -1, 0), params), InvalidArgument);
  const auto g = build_grid(-1, 1, 16);
  CHECK_THROWS_AS(spec_for_packet(s, Potential(SampledPotential{g, std::vector<double>(16)}), params),
                  InvalidArgument);
}

TEST_CASE("effective layer matches the field for a free level-0 packet") {
  EffectivePacketState s;
  const auto rep = compare_effective_vs_pde(s, Potential::zero(), 2.0, 1e-3, {});
  CHECK(rep.max_err_alpha2 < 1e-6);
  CHECK(rep.max_err_q < 1e-9);
  CHECK(rep.final_state_error < 1e-6);
}

TEST_CASE("effective layer matches the field for a free level-3 packet") {
  EffectivePacketState s;
  s.k = 3;
  s.beta = 0.2;
  const auto rep = compare_effective_vs_pde(s, Potential::zero(), 2.0, 1e-3, {});
  CHECK(rep.max_err_alpha2 < 1e-6);
  CHECK(rep.max_err_c < 1e-8);
  CHECK(rep.final_state_error < 1e-6);
}

TEST_CASE("field and effective moments agree for zero and harmonic potentials") {
  std::mt19937_64 rng(55);
  for (int k = 0; k <= 3; ++k) {
    for (double omega : {0.0, 1.0}) {
      auto s = gen::random_packet(rng, 0);
      s.k = k;
      s.q *= 0.5;
      s.p *= 0.5;
      s.alpha = 0.6 + 0.1 * k;
      s.beta *= 0.5;
      const auto pot = omega > 0.0 ? Potential::harmonic(omega) : Potential::zero();
      const auto rep = compare_effective_vs_pde(s, pot, 5.0, 1e-3, {});
      INFO("k=" << k << " omega=" << omega);
      CHECK(rep.max_rel_err_moments < 1e-5);
      CHECK(rep.final_state_error < 1e-5);
    }
  }
}

TEST_CASE("phase of a packet with norm and dimensionful constants") {
  EffectivePacketState s;
  s.k = 1;
  s.q = 0.5;
  s.p = -0.4;
  s.alpha = 0.8;
  s.Q = 2.0;
  s.gamma = 0.3;
  const PhysicalParams params{0.6, 1.7};
  const auto rep = compare_effective_vs_pde(s, Potential::polynomial(0.2, 1.5, 0.0), 3.0, 1e-3, params);
  CHECK(rep.final_state_error < 1e-5);
  CHECK(rep.max_rel_err_moments < 1e-5);
}

TEST_CASE("quartic potential departs from the effective layer") {
  EffectivePacketState s;
  s.q = 1.0;
  const auto rep = compare_effective_vs_pde(s, Potential::polynomial(0.0, 1.0, 0.1), 5.0, 1e-3, {});
  CHECK(rep.max_err_c > 1e-4);
  CHECK(rep.max_rel_err_moments > 1e-5);
}

TEST_CASE("comparison rejects bad input") {
  const EffectivePacketState s;
  CHECK_THROWS_AS(compare_effective_vs_pde(s, Potential::zero(), 0.0, 0.1, {}), InvalidArgument);
  CHECK_THROWS_AS(compare_effective_vs_pde(s, Potential::zero(), 1.0, 0.0, {}), InvalidArgument);
  CHECK_THROWS_AS(compare_effective_vs_pde(s, Potential::zero(), 1.0, 2.0, {}), InvalidArgument);
}
