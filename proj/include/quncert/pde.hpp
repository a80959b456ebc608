#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "quncert/core.hpp"
#include "quncert/moments.hpp"
#include "quncert/trajectory.hpp"

namespace quncert {

struct ZeroPotential {};

/// V(x) = m omega^2 x^2 / 2.
struct HarmonicPotential {
  double omega = 0.0;
};

/// Taylor form V(x) = sum_{n=0}^{4} taylor[n] x^n / n!.
struct PolynomialPotential {
  std::array<double, 5> taylor{};
};

/// Values given directly on a grid.
struct SampledPotential {
  Grid1D grid;
  std::vector<double> values;
};

class Potential {
 public:
  using Variant = std::variant<ZeroPotential, HarmonicPotential, PolynomialPotential, SampledPotential>;

  Potential() = default;
  Potential(Variant v);  // NOLINT: implicit from any alternative

  static Potential zero() { return Potential(ZeroPotential{}); }
  static Potential harmonic(double omega) { return Potential(HarmonicPotential{omega}); }
  /// V0 + V2 x^2/2 + V4 x^4/24.
  static Potential polynomial(double v0, double v2, double v4) {
    return Potential(PolynomialPotential{{v0, 0.0, v2, 0.0, v4}});
  }

  const Variant& variant() const noexcept { return v_; }
  bool is_zero() const noexcept { return std::holds_alternative<ZeroPotential>(v_); }
  bool is_harmonic() const noexcept { return std::holds_alternative<HarmonicPotential>(v_); }

  /// Zero and harmonic potentials keep the quadratic moment equations closed.
  bool closes_quadratic_moments() const noexcept { return is_zero() || is_harmonic(); }

  /// V at an arbitrary position. Sampled potentials are only defined on their own grid points.
  double at(double x, const PhysicalParams& params) const;

  std::vector<double> sample_on(const Grid1D& grid, const PhysicalParams& params) const;

  void validate() const;

 private:
  Variant v_ = ZeroPotential{};
};

/// Self-interaction sum_n kappa_n/n |psi|^{2(n+1)} in the field Hamiltonian.
struct NonlinearCoupling {
  std::vector<std::pair<int, double>> terms;  // (n >= 1, kappa_n)

  bool is_linear() const noexcept { return terms.empty(); }
  void validate() const;

  /// d/d(conj psi) of the energy density divided by psi: sum kappa_n (n+1)/n rho^n.
  double effective_potential(double rho) const noexcept;
  /// sum kappa_n/n rho^{n+1}.
  double energy_density(double rho) const noexcept;
};

struct EvolveOptions {
  double dt = 1e-3;
  std::size_t n_steps = 0;
  std::size_t record_every = 1;
  /// Steps at which full states are kept in the record.
  std::vector<std::size_t> snapshot_steps;
  /// Time assigned to the initial state.
  double t0 = 0.0;
};

/// Thrown when the state stops being finite; carries everything recorded before that.
class EvolutionAborted : public NumericalError {
 public:
  EvolutionAborted(const std::string& what, std::size_t last_good_step, TrajectoryRecord partial)
      : NumericalError(what), last_good_step_(last_good_step), partial_(std::move(partial)) {}

  std::size_t last_good_step() const noexcept { return last_good_step_; }
  const TrajectoryRecord& partial() const noexcept { return partial_; }

 private:
  std::size_t last_good_step_;
  TrajectoryRecord partial_;
};

/// Strang splitting: half potential phase, exact kinetic step in wavenumber space, half
/// potential phase. The nonlinear part of the potential uses the density at the start of each
/// half step. Moments are recorded at step 0, every `record_every` steps, and at the final step.
TrajectoryRecord split_step_evolve(const ComplexField& psi0, const Potential& pot,
                                   const NonlinearCoupling& nl, const PhysicalParams& params,
                                   const EvolveOptions& opts);

/// Field Hamiltonian: integral of hbar^2/2m |psi'|^2 + V |psi|^2 + sum kappa_n/n |psi|^{2(n+1)}.
double field_energy(const ComplexField& psi, const Potential& pot, const NonlinearCoupling& nl,
                    const PhysicalParams& params);

/// Exact free law <x^2>(t) = <x^2>_0 + 2<D>_0 t/m + <p^2>_0 t^2/m^2.
double analytic_free_spread(const MomentSet& m0, double t, const PhysicalParams& params);

/// Exact solution of the closed harmonic moment system, including the constant mode
/// <p^2> + m^2 omega^2 <x^2>. Linear moments follow classical harmonic motion.
MomentSet analytic_harmonic_moments(const MomentSet& m0, double omega, double t,
                                    const PhysicalParams& params);

}  // namespace quncert
