#pragma once

#include "quncert/core.hpp"
#include "quncert/moments.hpp"

namespace quncert {

inline constexpr int kMaxHermiteLevel = 20;

/// Reduced phase-space point of the extended Gaussian ansatz.
struct EffectivePacketState {
  double q = 0.0;      // mean position
  double p = 0.0;      // mean momentum
  double alpha = 1.0;  // position spread sigma_x
  double beta = 0.0;   // momentum conjugate to alpha
  double gamma = 0.0;  // global phase
  int k = 0;           // uncertainty excitation level
  double Q = 1.0;      // norm

  void validate() const;
};

/// lambda = (2k+1)/(4 alpha^2) - (i/(2 hbar)) beta/alpha.
cplx complex_width(const EffectivePacketState& s, const PhysicalParams& params);

/// Physicists' Hermite polynomial H_k(z) by upward recursion H_{k+1} = 2z H_k - 2k H_{k-1}.
double hermite_poly(int k, double z);

/// |integral of H_k H_l exp(-z^2) - delta_kl sqrt(pi) 2^k k!| by periodic quadrature, k, l <= 10.
double hermite_orthogonality_residual(int k, int l);

/// Half-width a grid centered on q should have so the packet decays at the boundary:
/// 8 alpha sqrt(2k+1). Momentum is carried by the phase and costs no width.
double recommended_half_width(const EffectivePacketState& s);

/// psi(x) = N e^{i gamma} H_k(sqrt(2 Re lambda)(x-q)) e^{i p (x-q)/hbar} e^{-lambda (x-q)^2}.
/// N starts from the closed-form norm Q = N^2 2^k k! alpha sqrt(2 pi/(2k+1)) and is then
/// rescaled once so that quadrature(|psi|^2) = Q on this grid. A packet that does not decay at
/// the boundary is reported in `diag`.
ComplexField make_extended_gaussian(const EffectivePacketState& s, const Grid1D& grid,
                                    const PhysicalParams& params, Diagnostics* diag = nullptr);

/// Closed-form moments of the ansatz, scaled by Q:
/// <x> = q, <p> = p, <x^2> = q^2 + alpha^2, <p^2> = p^2 + beta^2 + (2k+1)^2 hbar^2/(4 alpha^2),
/// <D> = pq + alpha beta.
MomentSet packet_kinematics(const EffectivePacketState& s, const PhysicalParams& params);

/// (2k+1)^2 hbar^2 / 4.
double packet_uncertainty(int k, const PhysicalParams& params);

}  // namespace quncert
