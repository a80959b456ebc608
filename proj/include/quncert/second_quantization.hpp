#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "quncert/core.hpp"

namespace quncert {

enum class SecondQuantizedOp { Qhat, Xhat, Phat, Kx, Kp, KD, VarsigmaX, VarsigmaP, VarsigmaD, CasimirC, ReducedC };

std::string_view op_name(SecondQuantizedOp op) noexcept;
/// Inverse of op_name; throws InvalidArgument for unknown names.
SecondQuantizedOp op_from_name(std::string_view name);

/// The six generators act directly; every other operator is a composition of them.
bool is_generator(SecondQuantizedOp op) noexcept;

/// A term c * G1 G2 ... Gr of generators; acts as c * G1(G2(...(Gr phi))).
struct OpTerm {
  cplx coeff{1.0, 0.0};
  std::vector<SecondQuantizedOp> factors;
};

/// The defining expansion of an operator in generators:
///   varsigma_x = Q Kx - X X,  varsigma_p = Q Kp - P P,  varsigma_D = Q KD - (X P + P X)/2,
///   C = (Kp Kx + Kx Kp)/2 - KD KD,  c = (vx vp + vp vx)/2 - vD vD expanded.
std::vector<OpTerm> expansion(SecondQuantizedOp op);

enum class Symmetrize { yes, no };

/// Average over all permutations of the axes. Every permutation orbit is set to one shared value,
/// so a second pass reproduces the first bit for bit. Needs a cubic grid.
ComplexField symmetrize(const ComplexField& phi);

/// Test function of an N-point correlation functional, N in {1, 2, 3}.
class CorrelationFunction {
 public:
  /// Symmetrizes unless told not to. Boundary decay failures are reported in `diag`.
  explicit CorrelationFunction(ComplexField phi, Symmetrize sym = Symmetrize::yes, Diagnostics* diag = nullptr);

  int N() const noexcept { return static_cast<int>(phi_.grid().dims()); }
  const ComplexField& phi() const noexcept { return phi_; }
  const GridND& grid() const noexcept { return phi_.grid(); }
  bool symmetrized() const noexcept { return symmetrized_; }

 private:
  ComplexField phi_;
  bool symmetrized_;
};

/// Induced action on test functions:
///   Q -> N phi, X -> (sum x_i) phi, P -> i hbar sum d_i phi, Kx -> (sum x_i^2) phi,
///   Kp -> -hbar^2 sum d_i^2 phi, KD -> i hbar (sum x_i d_i + N/2) phi,
/// composites by composition. The result keeps the input's symmetrization.
CorrelationFunction apply_op(SecondQuantizedOp op, const CorrelationFunction& cf, const PhysicalParams& params);

/// Sum of terms applied by composition.
CorrelationFunction apply_expansion(const std::vector<OpTerm>& terms, const CorrelationFunction& cf,
                                    const PhysicalParams& params);

/// CasimirC or ReducedC through their generator expansions.
CorrelationFunction casimir_apply(SecondQuantizedOp which, const CorrelationFunction& cf,
                                  const PhysicalParams& params);

/// Direct angular forms: N = 2 gives hbar^2 (-L^2 - 1) phi with L = x d_y - y d_x (the Casimir C);
/// N = 3 gives 9 hbar^2 (-J^2/3 - 1) phi with J = x d_y - y d_x + y d_z - z d_y + z d_x - x d_z
/// (the reduced Casimir).
CorrelationFunction angular_form_apply(const CorrelationFunction& cf, const PhysicalParams& params);

/// Orthonormal frame used for three-particle eigenmodes: e3 is (1,1,1)/sqrt3.
inline constexpr double kFrameE1[3] = {0.70710678118654752440, -0.70710678118654752440, 0.0};
inline constexpr double kFrameE2[3] = {0.40824829046386301637, 0.40824829046386301637, -0.81649658092772603273};

/// N = 2: (x + i y)^n e^{-(x^2+y^2)/2}, symmetrized.
/// N = 3: (u + i v)^n e^{-r^2/2} with u, v the coordinates along kFrameE1, kFrameE2. Returned
/// without symmetrization: the symmetric projection of this mode vanishes unless n is a multiple of 3.
CorrelationFunction make_eigenmode(int N, int n, const GridND& grid);

struct RayleighResult {
  double value = 0.0;
  double residual = 0.0;  // ||O phi - value phi|| / ||phi||
};

using OpAction = std::function<CorrelationFunction(const CorrelationFunction&)>;

RayleighResult rayleigh_quotient(const OpAction& op, const CorrelationFunction& cf);

/// coeff * op, or coeff * identity when op is empty.
struct OpMultiple {
  cplx coeff{0.0, 0.0};
  std::optional<SecondQuantizedOp> op;
};

/// ||(a b - b a - expected) phi|| / ||phi||.
double commutator_residual(SecondQuantizedOp a, SecondQuantizedOp b, const OpMultiple& expected,
                           const CorrelationFunction& cf, const PhysicalParams& params);

/// Psi[psi] = integral of phi(x_1..x_N) psi(x_1)...psi(x_N). psi lives on the 1D grid of every axis.
cplx evaluate_functional(const CorrelationFunction& cf, const ComplexField& psi);

/// Integral of |phi| |psi|...|psi|, the scale against which functional values are compared.
double evaluate_abs_functional(const CorrelationFunction& cf, const ComplexField& psi);

struct FunctionalCheck {
  cplx via_action;      // evaluate_functional(apply_op(op, cf), psi)
  cplx via_derivative;  // field form of op acting on the functional, by finite differences in psi
  double discrepancy = 0.0;
  double step = 0.0;
  bool step_adjusted = false;
};

/// Field form of a generator, G = integral of f_G(psi)(x) delta/delta psi(x):
///   f_Q = psi, f_X = x psi, f_P = -i hbar psi', f_Kx = x^2 psi, f_Kp = -hbar^2 psi'',
///   f_KD = -i hbar (x psi' + psi/2).
ComplexField field_direction(SecondQuantizedOp generator, const ComplexField& psi, const PhysicalParams& params);

/// Applies op in its field-theoretic form by numerical differentiation of the functional in psi
/// and compares with the induced test-function action. Generators use per-sample central
/// differences with step 1e-6 max|psi| / dx; composites nest exact-for-quartics directional
/// differences along the field forms of their factors. The discrepancy is
/// |a - b| / max(|a|, |b|, sum over terms of the absolute functional of the term's action).
FunctionalCheck functional_derivative_check(SecondQuantizedOp op, const CorrelationFunction& cf,
                                            const ComplexField& psi, const PhysicalParams& params);

}  // namespace quncert
