#include "quncert/moments.hpp"

#include <cmath>
#include <limits>

#include "quncert/fft.hpp"

namespace quncert {

MomentSet compute_moment_set(const ComplexField& psi, const PhysicalParams& params,
                             MomentDiagnostics* diag) {
  params.validate();
  const auto& g = psi.grid();
  if (g.dims() != 1) throw InvalidArgument("compute_moment_set needs a 1D field");
  const auto& axis = g.axis(0);
  const auto n = axis.size();

  // One forward transform feeds both derivatives.
  std::vector<cplx> spec(psi.values().begin(), psi.values().end());
  const auto& plan = fft_plan(g);
  plan.forward(spec);
  const auto k = axis.wavenumbers();
  const auto k_odd = axis.wavenumbers_odd();
  std::vector<cplx> d1(n), d2(n);
  for (std::size_t j = 0; j < n; ++j) {
    d1[j] = spec[j] * cplx(0.0, k_odd[j]);
    d2[j] = spec[j] * (-k[j] * k[j]);
  }
  plan.inverse(d1);
  plan.inverse(d2);

  double q = 0.0, sx = 0.0, sx2 = 0.0;
  cplx sp{0.0, 0.0}, sp2{0.0, 0.0}, sd{0.0, 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    const double x = axis.x(j);
    const cplx a = psi[j];
    const cplx ca = std::conj(a);
    const double rho = std::norm(a);
    q += rho;
    sx += x * rho;
    sx2 += x * x * rho;
    sp += ca * d1[j];
    sp2 += ca * d2[j];
    sd += ca * (x * d1[j] + 0.5 * a);
  }
  const double dx = axis.dx();
  const double hbar = params.hbar;
  const cplx mi{0.0, -1.0};
  const cplx p = mi * hbar * sp * dx;
  const cplx p2 = -hbar * hbar * sp2 * dx;
  const cplx d = mi * hbar * sd * dx;

  MomentSet m;
  m.Q = q * dx;
  m.mean_x = sx * dx;
  m.x2 = sx2 * dx;
  m.mean_p = p.real();
  m.p2 = p2.real();
  m.D = d.real();

  if (diag != nullptr) {
    diag->imag_mean_p = p.imag();
    diag->imag_p2 = p2.imag();
    diag->imag_D = d.imag();
    diag->real_valued = std::abs(p.imag()) < moment_tolerance(m.mean_p) * std::max(1.0, m.Q) &&
                        std::abs(p2.imag()) < moment_tolerance(m.p2) * std::max(1.0, m.Q) &&
                        std::abs(d.imag()) < moment_tolerance(m.D) * std::max(1.0, m.Q);
    diag->boundary_ok = check_boundary_decay(psi).ok;
  }
  return m;
}

UncertaintySet uncertainties(const MomentSet& m, const PhysicalParams& params) {
  params.validate();
  UncertaintySet u;
  if (m.Q > 0.0) {
    const double x = m.mean_x / m.Q;
    const double p = m.mean_p / m.Q;
    u.sigma_x2 = m.x2 / m.Q - x * x;
    u.sigma_p2 = m.p2 / m.Q - p * p;
    u.sigma_D = m.D / m.Q - x * p;
    u.c = difference_of_products(u.sigma_x2, u.sigma_p2, u.sigma_D, u.sigma_D);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    u.sigma_x2 = u.sigma_p2 = u.sigma_D = u.c = nan;
    u.sigma_defined = false;
  }
  u.casimir_C = difference_of_products(m.x2, m.p2, m.D, m.D);
  u.varsigma_x = difference_of_products(m.Q, m.x2, m.mean_x, m.mean_x);
  u.varsigma_p = difference_of_products(m.Q, m.p2, m.mean_p, m.mean_p);
  u.varsigma_D = difference_of_products(m.Q, m.D, m.mean_x, m.mean_p);
  u.varsigma_c = difference_of_products(u.varsigma_x, u.varsigma_p, u.varsigma_D, u.varsigma_D);
  return u;
}

double robertson_schrodinger_margin(const UncertaintySet& u, double Q, const PhysicalParams& params) {
  params.validate();
  const double q2 = Q * Q;
  return u.varsigma_c - params.hbar * params.hbar * q2 * q2 / 4.0;
}

}  // namespace quncert
