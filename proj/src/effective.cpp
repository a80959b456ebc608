#include "quncert/effective.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace quncert {

void EffectiveHamiltonianSpec::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("conformal coupling c must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidArgument("mass must be positive");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidArgument("hbar must be positive");
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw InvalidArgument("omega must be non-negative");
  if (!std::isfinite(V4) || !std::isfinite(V0)) throw InvalidArgument("potential coefficients must be finite");
  if (!(Q > 0.0) || !std::isfinite(Q)) throw InvalidArgument("Q must be positive");
  if (k < 0 || k > kMaxHermiteLevel) throw InvalidArgument("packet level k out of range");
}

EffectiveHamiltonianSpec spec_for_packet(const EffectivePacketState& s, const Potential& pot,
                                         const PhysicalParams& params) {
  s.validate();
  params.validate();
  EffectiveHamiltonianSpec spec;
  spec.c = packet_uncertainty(s.k, params);
  spec.mass = params.mass;
  spec.hbar = params.hbar;
  spec.Q = s.Q;
  spec.k = s.k;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, HarmonicPotential>) {
          spec.omega = p.omega;
        } else if constexpr (std::is_same_v<T, PolynomialPotential>) {
          if (p.taylor[1] != 0.0 || p.taylor[3] != 0.0 || p.taylor[2] < 0.0) {
            throw InvalidArgument("effective dynamics needs an even polynomial with V2 >= 0");
          }
          spec.V0 = p.taylor[0];
          spec.omega = std::sqrt(p.taylor[2] / params.mass);
          spec.V4 = p.taylor[4];
        } else if constexpr (std::is_same_v<T, SampledPotential>) {
          throw InvalidArgument("effective dynamics does not accept sampled potentials");
        }
      },
      pot.variant());
  return spec;
}

double fourth_moment_ratio(int k) {
  if (k < 0) throw InvalidArgument("packet level must be non-negative");
  const double two_k1 = 2.0 * k + 1.0;
  return 3.0 * (2.0 * k * k + 2.0 * k + 1.0) / (two_k1 * two_k1);
}

namespace {

struct Vec5 {
  double q, p, alpha, beta, gamma;
};

Vec5 axpy(const Vec5& y, double h, const Vec5& d) {
  return {y.q + h * d.q, y.p + h * d.p, y.alpha + h * d.alpha, y.beta + h * d.beta, y.gamma + h * d.gamma};
}

double center_potential(double q, const EffectiveHamiltonianSpec& spec) {
  const double q2 = q * q;
  return spec.V0 + 0.5 * spec.mass * spec.omega * spec.omega * q2 + spec.V4 * q2 * q2 / 24.0;
}

/// Smeared potential minus V(q).
double spread_potential(double q, double alpha, const EffectiveHamiltonianSpec& spec) {
  const double a2 = alpha * alpha;
  const double mu4 = fourth_moment_ratio(spec.k);
  return 0.5 * spec.mass * spec.omega * spec.omega * a2 + spec.V4 * (6.0 * q * q * a2 + mu4 * a2 * a2) / 24.0;
}

Vec5 rhs(const Vec5& y, const EffectiveHamiltonianSpec& spec) {
  const double m = spec.mass;
  const double w2 = spec.omega * spec.omega;
  const double a2 = y.alpha * y.alpha;
  const double mu4 = fourth_moment_ratio(spec.k);
  const double dU_dq = m * w2 * y.q + spec.V4 * (y.q * y.q * y.q / 6.0 + 0.5 * y.q * a2);
  const double dU_da = m * w2 * y.alpha + spec.V4 * (0.5 * y.q * y.q * y.alpha + mu4 * a2 * y.alpha / 6.0);
  Vec5 d;
  d.q = y.p / m;
  d.p = -dU_dq;
  d.alpha = y.beta / m;
  d.beta = spec.c / (m * a2 * y.alpha) - dU_da;
  d.gamma = (y.p * y.p / (2.0 * m) - center_potential(y.q, spec) - spec.c / (m * a2)) / spec.hbar;
  return d;
}

}  // namespace

EffectiveEnergy eff_energy_parts(const EffectivePacketState& s, const EffectiveHamiltonianSpec& spec) {
  spec.validate();
  if (!(s.alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  const double m = spec.mass;
  EffectiveEnergy e;
  e.center = s.p * s.p / (2.0 * m) + center_potential(s.q, spec);
  e.quadratic = s.beta * s.beta / (2.0 * m) + spec.c / (2.0 * m * s.alpha * s.alpha) +
                spread_potential(s.q, s.alpha, spec);
  e.per_particle = e.center + e.quadratic;
  e.total = spec.Q * e.per_particle;
  return e;
}

double eff_energy(const EffectivePacketState& s, const EffectiveHamiltonianSpec& spec) {
  return eff_energy_parts(s, spec).per_particle;
}

MomentSet effective_moments(const EffectivePacketState& s, const EffectiveHamiltonianSpec& spec) {
  MomentSet m;
  m.Q = s.Q;
  m.mean_x = s.Q * s.q;
  m.mean_p = s.Q * s.p;
  m.x2 = s.Q * (s.q * s.q + s.alpha * s.alpha);
  m.p2 = s.Q * (s.p * s.p + s.beta * s.beta + spec.c / (s.alpha * s.alpha));
  m.D = s.Q * (s.p * s.q + s.alpha * s.beta);
  return m;
}

TrajectoryRecord integrate_effective(const EffectivePacketState& s0, const EffectiveHamiltonianSpec& spec,
                                     double dt, std::size_t n_steps, std::size_t record_every) {
  s0.validate();
  spec.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (record_every == 0) throw InvalidArgument("record_every must be >= 1");
  const auto params = spec.params();

  TrajectoryRecord rec;
  auto record = [&](std::size_t step, const Vec5& y) {
    EffectivePacketState s = s0;
    s.q = y.q;
    s.p = y.p;
    s.alpha = y.alpha;
    s.beta = y.beta;
    s.gamma = y.gamma;
    const auto m = effective_moments(s, spec);
    rec.times.push_back(static_cast<double>(step) * dt);
    rec.packet_states.push_back(s);
    rec.moment_sets.push_back(m);
    rec.uncertainty_sets.push_back(uncertainties(m, params));
    rec.energies.push_back(eff_energy_parts(s, spec).total);
  };

  Vec5 y{s0.q, s0.p, s0.alpha, s0.beta, s0.gamma};
  record(0, y);
  for (std::size_t step = 1; step <= n_steps; ++step) {
    const Vec5 k1 = rhs(y, spec);
    const Vec5 k2 = rhs(axpy(y, 0.5 * dt, k1), spec);
    const Vec5 k3 = rhs(axpy(y, 0.5 * dt, k2), spec);
    const Vec5 k4 = rhs(axpy(y, dt, k3), spec);
    Vec5 next;
    next.q = y.q + dt / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
    next.p = y.p + dt / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
    next.alpha = y.alpha + dt / 6.0 * (k1.alpha + 2.0 * k2.alpha + 2.0 * k3.alpha + k4.alpha);
    next.beta = y.beta + dt / 6.0 * (k1.beta + 2.0 * k2.beta + 2.0 * k3.beta + k4.beta);
    next.gamma = y.gamma + dt / 6.0 * (k1.gamma + 2.0 * k2.gamma + 2.0 * k3.gamma + k4.gamma);
    if (!(next.alpha > 0.0) || !std::isfinite(next.alpha) || !std::isfinite(next.beta) ||
        !std::isfinite(next.q) || !std::isfinite(next.p) || !std::isfinite(next.gamma)) {
      std::ostringstream os;
      os << "effective integration lost alpha > 0 at step " << step << " (t = " << step * dt
         << "); use a smaller dt";
      throw NumericalError(os.str());
    }
    y = next;
    if (step % record_every == 0 || step == n_steps) record(step, y);
  }
  return rec;
}

std::vector<cplx> riccati_evolve(cplx lambda0, double dt, std::size_t n_steps, const PhysicalParams& params) {
  params.validate();
  if (!(lambda0.real() > 0.0) || !std::isfinite(lambda0.imag())) {
    throw InvalidArgument("riccati_evolve needs Re lambda0 > 0");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  const cplx inv0 = 1.0 / lambda0;
  std::vector<cplx> out(n_steps + 1);
  out[0] = lambda0;
  for (std::size_t j = 1; j <= n_steps; ++j) {
    const double t = static_cast<double>(j) * dt;
    out[j] = 1.0 / (inv0 + cplx(0.0, 2.0 * params.hbar * t / params.mass));
  }
  return out;
}

WidthPair width_from_lambda(cplx lambda, int k, const PhysicalParams& params) {
  if (!(lambda.real() > 0.0)) throw InvalidArgument("Re lambda must be positive");
  if (k < 0) throw InvalidArgument("packet level must be non-negative");
  WidthPair w;
  w.alpha = std::sqrt((2.0 * k + 1.0) / (4.0 * lambda.real()));
  w.beta = -2.0 * params.hbar * w.alpha * lambda.imag();
  return w;
}

namespace {

/// Level-k packet density at offset u from the center; integrates to one.
double packet_density(int k, double u, double alpha) {
  const double scale = std::sqrt(2.0 * k + 1.0) / (alpha * std::sqrt(2.0));
  const double z = scale * u;
  const double h = hermite_poly(k, z);
  return h * h * std::exp(-z * z) * scale / (std::sqrt(M_PI) * std::ldexp(std::tgamma(k + 1.0), k));
}

std::optional<double> smeared_closed_form(const Potential& pot, double q, double alpha,
                                          const PhysicalParams& params, int k) {
  const double a2 = alpha * alpha;
  return std::visit(
      [&](const auto& p) -> std::optional<double> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ZeroPotential>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, HarmonicPotential>) {
          return 0.5 * params.mass * p.omega * p.omega * (q * q + a2);
        } else if constexpr (std::is_same_v<T, PolynomialPotential>) {
          const auto& t = p.taylor;
          const double curvature = t[2] + t[3] * q + 0.5 * t[4] * q * q;
          return pot.at(q, params) + 0.5 * curvature * a2 + t[4] * fourth_moment_ratio(k) * a2 * a2 / 24.0;
        } else {
          return std::nullopt;
        }
      },
      pot.variant());
}

}  // namespace

SmearedPotential smeared_potential(const Potential& pot, double q, double alpha, const PhysicalParams& params,
                                   int k) {
  params.validate();
  pot.validate();
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be positive");
  if (!std::isfinite(q)) throw InvalidArgument("q must be finite");
  if (k < 0 || k > kMaxHermiteLevel) throw InvalidArgument("packet level k out of range");

  SmearedPotential out;
  out.closed_form = smeared_closed_form(pot, q, alpha, params, k);

  double sum = 0.0;
  if (const auto* sampled = std::get_if<SampledPotential>(&pot.variant())) {
    const Grid1D& g = sampled->grid;
    if (alpha < 2.0 * g.dx()) throw InvalidArgument("sampled potential grid does not resolve the packet");
    const double peak = packet_density(k, 0.0, alpha) + packet_density(k, alpha, alpha);
    const double edge = std::max(packet_density(k, g.x(0) - q, alpha), packet_density(k, g.x(g.size() - 1) - q, alpha));
    if (edge > 1e-12 * peak) throw InvalidArgument("sampled potential grid does not contain the packet");
    for (std::size_t j = 0; j < g.size(); ++j) sum += sampled->values[j] * packet_density(k, g.x(j) - q, alpha);
    sum *= g.dx();
  } else {
    // Rectangle rule in the packet's natural variable; the density is negligible beyond zmax.
    const double zmax = std::sqrt(4.0 * k + 2.0) + 10.0;
    const std::size_t n = 4096;
    const double dz = 2.0 * zmax / static_cast<double>(n);
    const double u_per_z = alpha * std::sqrt(2.0) / std::sqrt(2.0 * k + 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double u = (-zmax + static_cast<double>(j) * dz) * u_per_z;
      sum += pot.at(q + u, params) * packet_density(k, u, alpha);
    }
    sum *= dz * u_per_z;
  }
  if (!std::isfinite(sum)) throw NumericalError("smeared potential diverges");
  out.quadrature = sum;
  return out;
}

namespace {

Grid1D grid_for_run(const TrajectoryRecord& eff, const EffectiveHamiltonianSpec& spec, int k) {
  double reach = 0.0, alpha_max = 0.0, kmax = 0.0;
  for (const auto& s : eff.packet_states) {
    alpha_max = std::max(alpha_max, s.alpha);
    reach = std::max(reach, std::abs(s.q));
    const double sigma_p = std::sqrt(s.beta * s.beta + spec.c / (s.alpha * s.alpha));
    kmax = std::max(kmax, (std::abs(s.p) + 10.0 * std::sqrt(2.0 * k + 1.0) * sigma_p) / spec.hbar);
  }
  const double half = reach + 8.0 * alpha_max * std::sqrt(2.0 * k + 1.0) + 2.0;
  std::size_t n = 256;
  while (static_cast<double>(n) < 2.0 * half * kmax / M_PI) {
    n *= 2;
    if (n > (std::size_t{1} << 18)) throw InvalidArgument("packet needs more than 2^18 grid points");
  }
  return build_grid(-half, half, n);
}

}  // namespace

ComparisonReport compare_effective_vs_pde(const EffectivePacketState& s0, const Potential& pot, double T, double dt,
                                          const PhysicalParams& params, const std::optional<Grid1D>& grid) {
  s0.validate();
  params.validate();
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("T must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt) || dt > T) throw InvalidArgument("dt must be positive and at most T");
  const auto spec = spec_for_packet(s0, pot, params);
  const auto n = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  const double step = T / static_cast<double>(n);
  const std::size_t every = std::max<std::size_t>(1, n / 500);

  ComparisonReport rep;
  rep.effective = integrate_effective(s0, spec, step, n, every);
  const Grid1D g = grid ? *grid : grid_for_run(rep.effective, spec, s0.k);
  const auto psi0 = make_extended_gaussian(s0, g, params, &rep.diagnostics);

  EvolveOptions opts;
  opts.dt = step;
  opts.n_steps = n;
  opts.record_every = every;
  rep.pde = split_step_evolve(psi0, pot, {}, params, opts);
  for (auto& w : rep.pde.diagnostics.warnings) rep.diagnostics.warn(w);

  rep.times = rep.pde.times;
  for (std::size_t i = 0; i < rep.pde.size(); ++i) {
    const auto& a = rep.pde.moment_sets[i];
    const auto& b = rep.effective.moment_sets[i];
    const auto& s = rep.effective.packet_states[i];
    const auto& u = rep.pde.uncertainty_sets[i];
    rep.max_err_q = std::max(rep.max_err_q, std::abs(a.mean_x / a.Q - s.q));
    rep.max_err_p = std::max(rep.max_err_p, std::abs(a.mean_p / a.Q - s.p));
    rep.max_err_alpha2 = std::max(rep.max_err_alpha2, std::abs(u.sigma_x2 - s.alpha * s.alpha));
    rep.max_err_c = std::max(rep.max_err_c, std::abs(u.c - spec.c));
    const std::array<std::pair<double, double>, 6> pairs{
        {{a.Q, b.Q}, {a.mean_x, b.mean_x}, {a.mean_p, b.mean_p}, {a.x2, b.x2}, {a.p2, b.p2}, {a.D, b.D}}};
    for (const auto& [x, y] : pairs) {
      rep.max_rel_err_moments = std::max(rep.max_rel_err_moments, std::abs(x - y) / std::max(1.0, std::abs(y)));
    }
  }

  const auto psi_eff = make_extended_gaussian(rep.effective.packet_states.back(), g, params);
  const auto diff = *rep.pde.final_state - psi_eff;
  rep.final_state_error = l2_norm(diff) / l2_norm(*rep.pde.final_state);
  return rep;
}

}  // namespace quncert
