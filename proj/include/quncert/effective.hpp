#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "quncert/core.hpp"
#include "quncert/packets.hpp"
#include "quncert/pde.hpp"
#include "quncert/trajectory.hpp"

namespace quncert {

/// Effective Hamiltonian of an extended packet in V(x) = V0 + m omega^2 x^2/2 + V4 x^4/24.
/// Quantities are per particle; the norm Q only scales totals.
struct EffectiveHamiltonianSpec {
  double c = 0.25;  // conformal coupling, (2k+1)^2 hbar^2 / 4 for a level-k packet
  double mass = 1.0;
  double hbar = 1.0;
  double omega = 0.0;
  double V4 = 0.0;
  double V0 = 0.0;
  double Q = 1.0;
  int k = 0;  // fixes the fourth central moment of the smeared quartic term

  void validate() const;
  PhysicalParams params() const { return {hbar, mass}; }
};

/// Spec for a packet in `pot`. Sampled potentials and polynomials that are odd or have V2 < 0
/// are not representable.
EffectiveHamiltonianSpec spec_for_packet(const EffectivePacketState& s, const Potential& pot,
                                         const PhysicalParams& params);

/// <(x-q)^4> / alpha^4 for a level-k packet: 3 (2k^2 + 2k + 1) / (2k+1)^2.
double fourth_moment_ratio(int k);

struct EffectiveEnergy {
  double center = 0.0;      // p^2/2m + V(q)
  double quadratic = 0.0;   // beta^2/2m + c/(2m alpha^2) + smeared potential beyond V(q)
  double per_particle = 0.0;
  double total = 0.0;       // Q * per_particle
};

/// p^2/2m + V(q) + beta^2/2m + c/(2m alpha^2) + <V>_smeared - V(q), per particle.
double eff_energy(const EffectivePacketState& s, const EffectiveHamiltonianSpec& spec);
EffectiveEnergy eff_energy_parts(const EffectivePacketState& s, const EffectiveHamiltonianSpec& spec);

/// Closed-form moments of the packet with the coupling taken from `spec` (not from s.k).
MomentSet effective_moments(const EffectivePacketState& s, const EffectiveHamiltonianSpec& spec);

/// Fixed-step RK4 on (q, p, alpha, beta, gamma):
///   q' = p/m,  p' = -dU/dq,  alpha' = beta/m,  beta' = c/(m alpha^3) - dU/dalpha,
///   gamma' = (p^2/2m - V(q) - c/(m alpha^2)) / hbar.
/// Records step 0, every `record_every` steps, and the final step. Energies are totals.
TrajectoryRecord integrate_effective(const EffectivePacketState& s0, const EffectiveHamiltonianSpec& spec,
                                     double dt, std::size_t n_steps, std::size_t record_every = 1);

/// Exact solution of lambda' = -(2 i hbar/m) lambda^2 at t = j dt, j = 0..n_steps.
std::vector<cplx> riccati_evolve(cplx lambda0, double dt, std::size_t n_steps, const PhysicalParams& params);

struct WidthPair {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Inverse of complex_width: alpha = sqrt((2k+1)/(4 Re lambda)), beta = -2 hbar alpha Im lambda.
WidthPair width_from_lambda(cplx lambda, int k, const PhysicalParams& params);

struct SmearedPotential {
  double quadrature = 0.0;
  std::optional<double> closed_form;  // moment expansion; absent for sampled potentials
};

/// Average of V over the level-k packet density centered at q with spread alpha.
/// Sampled potentials are averaged on their own grid, which must hold the whole packet.
SmearedPotential smeared_potential(const Potential& pot, double q, double alpha, const PhysicalParams& params,
                                   int k = 0);

struct ComparisonReport {
  std::vector<double> times;
  double max_err_q = 0.0;
  double max_err_p = 0.0;
  double max_err_alpha2 = 0.0;
  double max_err_c = 0.0;
  double max_rel_err_moments = 0.0;  // over Q, <x>, <p>, <x^2>, <p^2>, <D>, relative to max(1, |value|)
  double final_state_error = 0.0;    // ||psi_pde - psi_eff|| / ||psi_pde|| at T, phase included
  TrajectoryRecord pde;
  TrajectoryRecord effective;
  Diagnostics diagnostics;
};

/// Runs the field and the effective layer from one packet and compares them on a common time grid.
/// The grid is sized from the effective trajectory unless one is given.
ComparisonReport compare_effective_vs_pde(const EffectivePacketState& s0, const Potential& pot, double T, double dt,
                                          const PhysicalParams& params,
                                          const std::optional<Grid1D>& grid = std::nullopt);

}  // namespace quncert
