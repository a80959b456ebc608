#pragma once

#include "quncert/core.hpp"

namespace quncert {

/// The six field observables of a wave-function. Not divided by Q: mean_x = integral of x|psi|^2.
struct MomentSet {
  double Q = 0.0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  double x2 = 0.0;
  double p2 = 0.0;
  double D = 0.0;
};

/// Imaginary parts of the nominally real integrals; large values mean the grid misrepresents psi.
struct MomentDiagnostics {
  double imag_mean_p = 0.0;
  double imag_p2 = 0.0;
  double imag_D = 0.0;
  bool real_valued = true;
  bool boundary_ok = true;
};

struct UncertaintySet {
  // Normalized (means divided by Q); NaN when Q == 0.
  double sigma_x2 = 0.0;
  double sigma_p2 = 0.0;
  double sigma_D = 0.0;
  double c = 0.0;
  bool sigma_defined = true;

  // Raw Casimir <x^2><p^2> - <D>^2 of the unnormalized observables.
  double casimir_C = 0.0;

  // Q-weighted deviations and their Casimir, which equals Q^4 c.
  double varsigma_x = 0.0;
  double varsigma_p = 0.0;
  double varsigma_D = 0.0;
  double varsigma_c = 0.0;
};

/// Quadratures of |psi|^2, x|psi|^2, -i hbar conj(psi) psi', x^2|psi|^2, -hbar^2 conj(psi) psi''
/// and -i hbar conj(psi)(x psi' + psi/2) on a 1D grid.
MomentSet compute_moment_set(const ComplexField& psi, const PhysicalParams& params,
                             MomentDiagnostics* diag = nullptr);

UncertaintySet uncertainties(const MomentSet& m, const PhysicalParams& params);

/// varsigma_c - hbar^2 Q^4 / 4; reduces to c - hbar^2/4 for normalized states.
double robertson_schrodinger_margin(const UncertaintySet& u, double Q, const PhysicalParams& params);

/// Relative tolerance used for real-valuedness and inequality checks: 1e-9 * max(1, |value|).
inline double moment_tolerance(double value) noexcept {
  return 1e-9 * (value > 1.0 ? value : (value < -1.0 ? -value : 1.0));
}

}  // namespace quncert
