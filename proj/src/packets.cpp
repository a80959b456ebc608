#include "quncert/packets.hpp"

#include <cmath>
#include <sstream>

namespace quncert {

void EffectivePacketState::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("packet alpha must be positive");
  if (k < 0 || k > kMaxHermiteLevel) {
    throw InvalidArgument("packet level k must be in [0, " + std::to_string(kMaxHermiteLevel) + "]");
  }
  if (!(Q > 0.0) || !std::isfinite(Q)) throw InvalidArgument("packet norm Q must be positive");
  if (!std::isfinite(q) || !std::isfinite(p) || !std::isfinite(beta) || !std::isfinite(gamma)) {
    throw InvalidArgument("packet parameters must be finite");
  }
}

cplx complex_width(const EffectivePacketState& s, const PhysicalParams& params) {
  const double two_k1 = 2.0 * s.k + 1.0;
  return {two_k1 / (4.0 * s.alpha * s.alpha), -s.beta / (2.0 * params.hbar * s.alpha)};
}

double hermite_poly(int k, double z) {
  if (k < 0) throw InvalidArgument("hermite_poly: negative level");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * z;
  for (int j = 1; j < k; ++j) {
    const double next = 2.0 * z * cur - 2.0 * j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite_orthogonality_residual(int k, int l) {
  if (k < 0 || l < 0 || k > 10 || l > 10) {
    throw InvalidArgument("hermite_orthogonality_residual: levels must lie in [0, 10]");
  }
  // exp(-z^2) H_10^2 is below 1e-30 of its peak by |z| = 14.
  const Grid1D grid(-20.0, 20.0, 2048);
  double sum = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double z = grid.x(j);
    sum += hermite_poly(k, z) * hermite_poly(l, z) * std::exp(-z * z);
  }
  sum *= grid.dx();
  const double expected = k == l ? std::sqrt(M_PI) * std::ldexp(std::tgamma(k + 1.0), k) : 0.0;
  return std::abs(sum - expected);
}

double recommended_half_width(const EffectivePacketState& s) {
  return std::abs(s.q) + 8.0 * s.alpha * std::sqrt(2.0 * s.k + 1.0);
}

ComplexField make_extended_gaussian(const EffectivePacketState& s, const Grid1D& grid,
                                    const PhysicalParams& params, Diagnostics* diag) {
  s.validate();
  params.validate();
  const cplx lambda = complex_width(s, params);
  const double scale = std::sqrt(2.0 * lambda.real());
  const double closed_norm2 = std::ldexp(std::tgamma(s.k + 1.0), s.k) * s.alpha *
                              std::sqrt(2.0 * M_PI / (2.0 * s.k + 1.0));
  const double amplitude = std::sqrt(s.Q / closed_norm2);
  const cplx phase = std::polar(1.0, s.gamma);

  std::vector<cplx> v(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double u = grid.x(j) - s.q;
    const cplx expo = cplx(0.0, s.p * u / params.hbar) - lambda * (u * u);
    v[j] = amplitude * phase * hermite_poly(s.k, scale * u) * std::exp(expo);
  }

  double norm = 0.0;
  for (const auto& a : v) norm += std::norm(a);
  norm *= grid.dx();
  if (!(norm > 0.0)) throw NumericalError("make_extended_gaussian: packet vanishes on the grid");
  const double fix = std::sqrt(s.Q / norm);
  for (auto& a : v) a *= fix;

  ComplexField psi(GridND(grid), std::move(v));
  if (diag != nullptr) {
    const auto decay = check_boundary_decay(psi);
    if (!decay.ok) {
      std::ostringstream os;
      os << "packet does not decay at the grid boundary (|psi| = " << decay.max_boundary
         << "); recommended half-width around q is " << recommended_half_width(s);
      diag->warn(os.str());
    }
  }
  return psi;
}

double packet_uncertainty(int k, const PhysicalParams& params) {
  const double two_k1 = 2.0 * k + 1.0;
  return two_k1 * two_k1 * params.hbar * params.hbar / 4.0;
}

MomentSet packet_kinematics(const EffectivePacketState& s, const PhysicalParams& params) {
  s.validate();
  params.validate();
  const double two_k1 = 2.0 * s.k + 1.0;
  const double hbar = params.hbar;
  MomentSet m;
  m.Q = s.Q;
  m.mean_x = s.Q * s.q;
  m.mean_p = s.Q * s.p;
  m.x2 = s.Q * (s.q * s.q + s.alpha * s.alpha);
  m.p2 = s.Q * (s.p * s.p + s.beta * s.beta +
                two_k1 * two_k1 * hbar * hbar / (4.0 * s.alpha * s.alpha));
  m.D = s.Q * (s.p * s.q + s.alpha * s.beta);
  return m;
}

}  // namespace quncert
