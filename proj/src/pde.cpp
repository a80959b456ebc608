#include "quncert/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "quncert/fft.hpp"

namespace quncert {

Potential::Potential(Variant v) : v_(std::move(v)) { validate(); }

void Potential::validate() const {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, HarmonicPotential>) {
          if (!(p.omega >= 0.0) || !std::isfinite(p.omega)) {
            throw InvalidArgument("harmonic omega must be finite and non-negative");
          }
        } else if constexpr (std::is_same_v<T, PolynomialPotential>) {
          for (double c : p.taylor) {
            if (!std::isfinite(c)) throw InvalidArgument("polynomial coefficients must be finite");
          }
        } else if constexpr (std::is_same_v<T, SampledPotential>) {
          if (p.values.size() != p.grid.size()) {
            throw InvalidArgument("sampled potential does not match its grid");
          }
          for (double v : p.values) {
            if (!std::isfinite(v)) throw InvalidArgument("sampled potential values must be finite");
          }
        }
      },
      v_);
}

double Potential::at(double x, const PhysicalParams& params) const {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ZeroPotential>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, HarmonicPotential>) {
          return 0.5 * params.mass * p.omega * p.omega * x * x;
        } else if constexpr (std::is_same_v<T, PolynomialPotential>) {
          // Horner on sum taylor[n] x^n / n!.
          double acc = p.taylor[4] / 4.0;
          acc = p.taylor[3] + x * acc;
          acc = p.taylor[2] + x * acc / 3.0;
          acc = p.taylor[1] + x * acc / 2.0;
          return p.taylor[0] + x * acc;
        } else {
          const double pos = (x - p.grid.x_min()) / p.grid.dx();
          const double j = std::round(pos);
          if (std::abs(pos - j) > 1e-9 || j < 0.0 || j >= static_cast<double>(p.grid.size())) {
            throw InvalidArgument("sampled potential is only defined on its grid points");
          }
          return p.values[static_cast<std::size_t>(j)];
        }
      },
      v_);
}

std::vector<double> Potential::sample_on(const Grid1D& grid, const PhysicalParams& params) const {
  if (const auto* s = std::get_if<SampledPotential>(&v_)) {
    if (!(s->grid == grid)) throw InvalidArgument("sampled potential lives on a different grid");
    return s->values;
  }
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) v[j] = at(grid.x(j), params);
  return v;
}

void NonlinearCoupling::validate() const {
  for (const auto& [n, kappa] : terms) {
    if (n < 1) throw InvalidArgument("nonlinear order n must be >= 1");
    if (!std::isfinite(kappa)) throw InvalidArgument("nonlinear coupling must be finite");
  }
}

double NonlinearCoupling::effective_potential(double rho) const noexcept {
  double v = 0.0;
  for (const auto& [n, kappa] : terms) v += kappa * (n + 1.0) / n * std::pow(rho, n);
  return v;
}

double NonlinearCoupling::energy_density(double rho) const noexcept {
  double e = 0.0;
  for (const auto& [n, kappa] : terms) e += kappa / n * std::pow(rho, n + 1);
  return e;
}

namespace {

bool all_finite(std::span<const cplx> v) {
  for (const auto& a : v) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
  }
  return true;
}

}  // namespace

TrajectoryRecord split_step_evolve(const ComplexField& psi0, const Potential& pot,
                                   const NonlinearCoupling& nl, const PhysicalParams& params,
                                   const EvolveOptions& opts) {
  params.validate();
  pot.validate();
  nl.validate();
  if (!(opts.dt > 0.0) || !std::isfinite(opts.dt)) throw InvalidArgument("dt must be positive");
  if (opts.record_every == 0) throw InvalidArgument("record_every must be >= 1");
  if (!std::isfinite(opts.t0)) throw InvalidArgument("t0 must be finite");
  const auto& grid = psi0.grid();
  if (grid.dims() != 1) throw InvalidArgument("split_step_evolve needs a 1D field");
  const Grid1D& axis = grid.axis(0);
  const std::size_t n = axis.size();
  const double hbar = params.hbar;
  const double mass = params.mass;
  const double dt = opts.dt;

  TrajectoryRecord rec;
  if (!check_boundary_decay(psi0).ok) {
    rec.diagnostics.warn("initial state does not decay at the grid boundary");
  }
  const double kmax = M_PI / axis.dx();
  const double stiffness = dt * hbar * kmax * kmax / (2.0 * mass);
  if (stiffness > M_PI / 4.0) {
    std::ostringstream os;
    os << "dt*hbar*kmax^2/2m = " << stiffness << " exceeds pi/4; the kinetic phase is under-resolved";
    rec.diagnostics.warn(os.str());
  }

  const auto k = axis.wavenumbers();
  std::vector<cplx> kinetic(n);
  for (std::size_t j = 0; j < n; ++j) {
    kinetic[j] = std::polar(1.0, -hbar * k[j] * k[j] * dt / (2.0 * mass));
  }
  const auto v = pot.sample_on(axis, params);
  std::vector<cplx> half_phase(n);
  for (std::size_t j = 0; j < n; ++j) half_phase[j] = std::polar(1.0, -v[j] * dt / (2.0 * hbar));

  const bool linear = nl.is_linear();
  auto potential_half = [&](std::vector<cplx>& psi) {
    if (linear) {
      for (std::size_t j = 0; j < n; ++j) psi[j] *= half_phase[j];
    } else {
      for (std::size_t j = 0; j < n; ++j) {
        const double w = v[j] + nl.effective_potential(std::norm(psi[j]));
        psi[j] *= std::polar(1.0, -w * dt / (2.0 * hbar));
      }
    }
  };

  std::vector<std::size_t> snaps = opts.snapshot_steps;
  std::sort(snaps.begin(), snaps.end());
  auto next_snap = snaps.begin();

  double q0 = 0.0;
  auto record = [&](std::size_t step, const std::vector<cplx>& psi) {
    ComplexField f(grid, psi);
    const auto m = compute_moment_set(f, params);
    if (step == 0) q0 = m.Q;
    rec.times.push_back(opts.t0 + static_cast<double>(step) * dt);
    rec.moment_sets.push_back(m);
    rec.uncertainty_sets.push_back(uncertainties(m, params));
    if (q0 > 0.0) rec.max_norm_drift = std::max(rec.max_norm_drift, std::abs(m.Q - q0) / q0);
  };
  auto maybe_snapshot = [&](std::size_t step, const std::vector<cplx>& psi) {
    while (next_snap != snaps.end() && *next_snap < step) ++next_snap;
    if (next_snap != snaps.end() && *next_snap == step) {
      rec.snapshots.push_back({step, opts.t0 + static_cast<double>(step) * dt, ComplexField(grid, psi)});
      ++next_snap;
    }
  };

  std::vector<cplx> psi(psi0.values().begin(), psi0.values().end());
  const auto& plan = fft_plan(grid);
  record(0, psi);
  maybe_snapshot(0, psi);

  for (std::size_t step = 1; step <= opts.n_steps; ++step) {
    potential_half(psi);
    plan.forward(psi);
    for (std::size_t j = 0; j < n; ++j) psi[j] *= kinetic[j];
    plan.inverse(psi);
    potential_half(psi);

    if (!all_finite(psi)) {
      std::ostringstream os;
      os << "state became non-finite at step " << step << "; reduce dt or the coupling";
      throw EvolutionAborted(os.str(), step - 1, std::move(rec));
    }
    if (step % opts.record_every == 0 || step == opts.n_steps) record(step, psi);
    maybe_snapshot(step, psi);
  }

  rec.final_state.emplace(grid, std::move(psi));
  return rec;
}

double field_energy(const ComplexField& psi, const Potential& pot, const NonlinearCoupling& nl,
                    const PhysicalParams& params) {
  const auto m = compute_moment_set(psi, params);
  const Grid1D& axis = psi.grid().axis(0);
  const auto v = pot.sample_on(axis, params);
  double pe = 0.0;
  for (std::size_t j = 0; j < axis.size(); ++j) {
    const double rho = std::norm(psi[j]);
    pe += v[j] * rho + nl.energy_density(rho);
  }
  return m.p2 / (2.0 * params.mass) + pe * axis.dx();
}

double analytic_free_spread(const MomentSet& m0, double t, const PhysicalParams& params) {
  params.validate();
  const double m = params.mass;
  return m0.x2 + (2.0 * m0.D / m) * t + (m0.p2 / (m * m)) * t * t;
}

MomentSet analytic_harmonic_moments(const MomentSet& m0, double omega, double t,
                                    const PhysicalParams& params) {
  params.validate();
  if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidArgument("omega must be positive");
  const double m = params.mass;
  const double mw = m * omega;
  const double mw2 = mw * mw;

  // p2 + m^2 w^2 x2 is constant; (p2 - m^2 w^2 x2, 2 m w D) rotates at 2w.
  const double e = m0.p2 + mw2 * m0.x2;
  const double u0 = m0.p2 - mw2 * m0.x2;
  const double v0 = 2.0 * mw * m0.D;
  const double c2 = std::cos(2.0 * omega * t);
  const double s2 = std::sin(2.0 * omega * t);
  const double u = u0 * c2 - v0 * s2;
  const double v = v0 * c2 + u0 * s2;

  const double c1 = std::cos(omega * t);
  const double s1 = std::sin(omega * t);

  MomentSet r;
  r.Q = m0.Q;
  r.mean_x = m0.mean_x * c1 + m0.mean_p / mw * s1;
  r.mean_p = m0.mean_p * c1 - mw * m0.mean_x * s1;
  r.p2 = 0.5 * (e + u);
  r.x2 = 0.5 * (e - u) / mw2;
  r.D = v / (2.0 * mw);
  return r;
}

}  // namespace quncert
