#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include "quncert/cli.hpp"
#include "quncert/effective.hpp"
#include "quncert/io.hpp"
#include "quncert/moments.hpp"
#include "quncert/second_quantization.hpp"

namespace quncert {

namespace fs = std::filesystem;

namespace {

double default_tol(Experiment e) {
  switch (e) {
    case Experiment::make_packet:
    case Experiment::effective:
    case Experiment::algebra_check:
      return 1e-8;
    case Experiment::evolve:
    case Experiment::spectrum:
      return 1e-6;
    case Experiment::compare:
      return 1e-5;
  }
  return 1e-8;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string csv_row(std::initializer_list<double> values) {
  std::string s;
  for (double v : values) {
    if (!s.empty()) s += ',';
    s += format_double(v);
  }
  return s + '\n';
}

double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

/// Grid holding the packet over `horizon`, with the wavenumber range its momentum spread needs.
Grid1D auto_grid(const EffectivePacketState& s, const Potential& pot, const PhysicalParams& params, double horizon) {
  const double root = std::sqrt(2.0 * s.k + 1.0);
  const double sigma_p = std::sqrt(s.beta * s.beta + root * root * root * root * params.hbar * params.hbar /
                                                         (4.0 * s.alpha * s.alpha));
  double h = horizon;
  if (const auto* harm = std::get_if<HarmonicPotential>(&pot.variant()); harm && harm->omega > 0.0) {
    h = std::min(h, M_PI / harm->omega);
  }
  const double half = std::abs(s.q) + std::abs(s.p) * h / params.mass +
                      8.0 * root * (s.alpha + sigma_p * h / params.mass) + 2.0;
  const double kmax = (std::abs(s.p) + 10.0 * root * sigma_p) / params.hbar;
  std::size_t n = 256;
  while (static_cast<double>(n) < 2.0 * half * kmax / M_PI) {
    n *= 2;
    if (n > (std::size_t{1} << 20)) throw InvalidArgument("default grid would exceed 2^20 points; pass --grid");
  }
  return build_grid(-half, half, n);
}

Grid1D sector_axis(const RunConfig& cfg, int N) {
  if (cfg.grid) return cfg.grid->build();
  return N == 3 ? build_grid(-9.6, 9.6, 64) : build_grid(-12.0, 12.0, 256);
}

/// Three anisotropic Gaussians with complex amplitudes, centers in the unit ball, widths near 1.
ComplexField random_test_function(const GridND& g, std::mt19937_64& rng) {
  const std::size_t N = g.dims();
  std::uniform_real_distribution<double> center(-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0));
  std::uniform_real_distribution<double> width(0.9, 1.0);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::vector<cplx> v(g.size());
  for (int term = 0; term < 3; ++term) {
    const cplx a{amp(rng), amp(rng)};
    double c[3], w[3];
    for (std::size_t d = 0; d < N; ++d) {
      c[d] = center(rng);
      w[d] = width(rng);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto idx = g.unflatten(i);
      double e = 0.0;
      for (std::size_t d = 0; d < N; ++d) {
        const double u = (g.axis(d).x(idx[d]) - c[d]) / w[d];
        e += 0.5 * u * u;
      }
      v[i] += a * std::exp(-e);
    }
  }
  return ComplexField(g, std::move(v));
}

ComplexField scaled_packet(const RunConfig& cfg, const Grid1D& g, Diagnostics* diag) {
  const auto psi = make_extended_gaussian(cfg.packet, g, cfg.params, diag);
  return cplx(std::sqrt(cfg.Q), 0.0) * psi;
}

struct Ctx {
  const RunConfig& cfg;
  double tol;
  RunOutcome out;
  Diagnostics diag;

  fs::path artifact(const std::string& name) {
    auto p = cfg.out_dir / name;
    out.artifacts.push_back(p);
    return p;
  }
  void require(bool ok) {
    if (!ok) out.status = kExitTolerance;
  }
};

void make_packet(Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  const auto g = cfg.grid ? cfg.grid->build() : auto_grid(cfg.packet, cfg.potential, cfg.params, 0.0);
  const auto psi = scaled_packet(cfg, g, &ctx.diag);
  snapshot_state(psi, cfg.params, ctx.artifact("packet.bin"));

  MomentDiagnostics md;
  const auto m = compute_moment_set(psi, cfg.params, &md);
  TrajectoryRecord rec;
  rec.times = {0.0};
  rec.moment_sets = {m};
  rec.uncertainty_sets = {uncertainties(m, cfg.params)};
  export_trajectory(rec, ctx.artifact("packet_moments.csv"));

  const double two_k1 = 2.0 * cfg.packet.k + 1.0;
  const double c_want = two_k1 * two_k1 * cfg.params.hbar * cfg.params.hbar / 4.0;
  const double q_err = std::abs(m.Q - cfg.Q) / cfg.Q;
  const double c_err = std::abs(rec.uncertainty_sets[0].c - c_want) / c_want;
  ctx.require(q_err <= ctx.tol && c_err <= ctx.tol);
  ctx.out.summary = "make-packet n=" + std::to_string(g.size()) + " Q_err=" + fmt(q_err) +
                    " c=" + format_double(rec.uncertainty_sets[0].c) + " c_err=" + fmt(c_err) +
                    " margin=" + fmt(robertson_schrodinger_margin(rec.uncertainty_sets[0], m.Q, cfg.params));
}

void evolve(Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  const double T = cfg.dt * static_cast<double>(cfg.n_steps);
  std::optional<ComplexField> psi0;
  if (cfg.initial_state) {
    auto loaded = load_state(*cfg.initial_state);
    if (loaded.params.hbar != cfg.params.hbar || loaded.params.mass != cfg.params.mass) {
      throw InvalidArgument("initial state was written with different hbar or mass");
    }
    if (loaded.state.grid().dims() != 1) throw InvalidArgument("initial state must be one-dimensional");
    psi0 = std::move(loaded.state);
  } else {
    const auto g = cfg.grid ? cfg.grid->build() : auto_grid(cfg.packet, cfg.potential, cfg.params, T);
    psi0 = scaled_packet(cfg, g, &ctx.diag);
  }

  EvolveOptions opts;
  opts.dt = cfg.dt;
  opts.n_steps = cfg.n_steps;
  opts.record_every = cfg.record_every;
  opts.t0 = cfg.t0;
  const auto rec = split_step_evolve(*psi0, cfg.potential, cfg.coupling, cfg.params, opts);
  for (const auto& w : rec.diagnostics.warnings) ctx.diag.warn(w);
  export_trajectory(rec, ctx.artifact("trajectory.csv"));
  snapshot_state(*rec.final_state, cfg.params, ctx.artifact("final_state.bin"));

  std::string summary = "evolve T=" + format_double(T) + " rows=" + std::to_string(rec.size()) +
                        " norm_drift=" + fmt(rec.max_norm_drift);
  ctx.require(rec.max_norm_drift <= ctx.tol);

  const bool linear = cfg.coupling.is_linear();
  if (linear && cfg.potential.closes_quadratic_moments()) {
    const double c0 = rec.uncertainty_sets.front().c;
    double drift = 0.0;
    for (const auto& u : rec.uncertainty_sets) drift = std::max(drift, std::abs(u.c - c0) / c0);
    summary += " c_drift=" + fmt(drift);
    ctx.require(drift <= ctx.tol);

    const auto& m0 = rec.moment_sets.front();
    double err = 0.0;
    for (std::size_t i = 0; i < rec.size(); ++i) {
      const double t = rec.times[i] - rec.times.front();
      const auto& m = rec.moment_sets[i];
      if (cfg.potential.is_zero()) {
        err = std::max(err, rel(m.x2, analytic_free_spread(m0, t, cfg.params)));
      } else {
        const double omega = std::get<HarmonicPotential>(cfg.potential.variant()).omega;
        const auto want = analytic_harmonic_moments(m0, omega, t, cfg.params);
        err = std::max({err, rel(m.x2, want.x2), rel(m.p2, want.p2), rel(m.D, want.D)});
      }
    }
    summary += std::string(cfg.potential.is_zero() ? " free_spread_err=" : " harmonic_err=") + fmt(err);
    ctx.require(err <= ctx.tol);
  }
  summary += " final_x2=" + format_double(rec.moment_sets.back().x2);
  ctx.out.summary = summary;
}

void effective(Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.coupling.is_linear()) throw InvalidArgument("the effective layer covers the linear equation only");
  auto spec = spec_for_packet(cfg.packet, cfg.potential, cfg.params);
  spec.Q = cfg.Q;
  const auto rec = integrate_effective(cfg.packet, spec, cfg.dt, cfg.n_steps, cfg.record_every);

  std::string csv = "t,q,p,alpha,beta,gamma,energy,Q,mean_x,mean_p,x2,p2,D,c\n";
  double e_drift = 0.0, c_err = 0.0;
  const double e0 = rec.energies.front();
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const auto& s = rec.packet_states[i];
    const auto& m = rec.moment_sets[i];
    const auto& u = rec.uncertainty_sets[i];
    csv += csv_row({rec.times[i], s.q, s.p, s.alpha, s.beta, s.gamma, rec.energies[i], m.Q, m.mean_x, m.mean_p,
                    m.x2, m.p2, m.D, u.c});
    e_drift = std::max(e_drift, std::abs(rec.energies[i] - e0) / std::max(1.0, std::abs(e0)));
    c_err = std::max(c_err, std::abs(u.c - spec.c) / spec.c);
  }
  write_text_file(ctx.artifact("effective.csv"), csv);
  ctx.require(e_drift <= ctx.tol && c_err <= ctx.tol);
  ctx.out.summary = "effective rows=" + std::to_string(rec.size()) + " energy=" + format_double(e0) +
                    " energy_drift=" + fmt(e_drift) + " c_err=" + fmt(c_err) +
                    " final_alpha=" + format_double(rec.packet_states.back().alpha);
}

void compare(Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.coupling.is_linear()) throw InvalidArgument("compare covers the linear equation only");
  const double T = cfg.dt * static_cast<double>(cfg.n_steps);
  std::optional<Grid1D> grid;
  if (cfg.grid) grid = cfg.grid->build();
  const auto rep = compare_effective_vs_pde(cfg.packet, cfg.potential, T, cfg.dt, cfg.params, grid);
  for (const auto& w : rep.diagnostics.warnings) ctx.diag.warn(w);

  std::string csv = "t,pde_mean_x,eff_q,pde_mean_p,eff_p,pde_sigma_x2,eff_alpha2,pde_c,eff_c\n";
  double alpha2_err = 0.0;
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    const auto& m = rep.pde.moment_sets[i];
    const auto& u = rep.pde.uncertainty_sets[i];
    const auto& s = rep.effective.packet_states[i];
    const double a2 = s.alpha * s.alpha;
    csv += csv_row({rep.times[i], m.mean_x / m.Q, s.q, m.mean_p / m.Q, s.p, u.sigma_x2, a2, u.c,
                    rep.effective.uncertainty_sets[i].c});
    alpha2_err = std::max(alpha2_err, std::abs(u.sigma_x2 - a2) / a2);
  }
  write_text_file(ctx.artifact("compare.csv"), csv);
  ctx.require(alpha2_err <= ctx.tol && rep.max_rel_err_moments <= ctx.tol);
  ctx.out.summary = "compare T=" + format_double(T) + " alpha2_rel_err=" + fmt(alpha2_err) +
                    " moments_rel_err=" + fmt(rep.max_rel_err_moments) + " c_err=" + fmt(rep.max_err_c) +
                    " final_state_err=" + fmt(rep.final_state_error);
}

void spectrum(Ctx& ctx) {
  const auto& cfg = ctx.cfg;
  const int N = cfg.N.value_or(2);
  const auto axis = sector_axis(cfg, N);
  const auto grid = GridND::cube(axis, static_cast<std::size_t>(N));
  const auto& params = cfg.params;
  const double h2 = params.hbar * params.hbar;

  std::string csv = "n,method,eigenvalue,expected,residual\n";
  double worst_value = 0.0, worst_residual = 0.0;
  auto record = [&](int n, const char* method, const RayleighResult& r, double expected) {
    csv += std::to_string(n) + ',' + method + ',' + format_double(r.value) + ',' + format_double(expected) + ',' +
           format_double(r.residual) + '\n';
    worst_value = std::max(worst_value, rel(r.value, expected));
    worst_residual = std::max(worst_residual, r.residual);
  };

  if (N == 1) {
    std::mt19937_64 rng(cfg.seed);
    const CorrelationFunction cf(random_test_function(grid, rng), Symmetrize::yes, &ctx.diag);
    record(0, "composed", rayleigh_quotient([&](const auto& f) { return casimir_apply(SecondQuantizedOp::CasimirC, f, params); }, cf),
           -0.75 * h2);
  } else {
    const auto which = N == 2 ? SecondQuantizedOp::CasimirC : SecondQuantizedOp::ReducedC;
    const double scale = N == 2 ? h2 : 9.0 * h2;
    for (int n = 0; n <= cfg.n_max; ++n) {
      const auto mode = make_eigenmode(N, n, grid);
      const double expected = scale * (n * n - 1);
      record(n, "composed", rayleigh_quotient([&](const auto& f) { return casimir_apply(which, f, params); }, mode),
             expected);
      record(n, "angular", rayleigh_quotient([&](const auto& f) { return angular_form_apply(f, params); }, mode),
             expected);
    }
  }
  write_text_file(ctx.artifact("spectrum.csv"), csv);
  ctx.require(worst_value <= ctx.tol && worst_residual <= ctx.tol);
  ctx.out.summary = "spectrum N=" + std::to_string(N) + " n_max=" + std::to_string(N == 1 ? 0 : cfg.n_max) +
                    " max_eigenvalue_err=" + fmt(worst_value) + " max_residual=" + fmt(worst_residual);
}

void algebra_check(Ctx& ctx) {
  using Op = SecondQuantizedOp;
  const auto& cfg = ctx.cfg;
  const auto& params = cfg.params;
  const cplx ih{0.0, params.hbar};
  struct Commutator {
    Op a, b;
    const char* expected_name;
    OpMultiple expected;
  };
  const Commutator table[] = {
      {Op::Kx, Op::Kp, "-4i*hbar*KD", {-4.0 * ih, Op::KD}},
      {Op::KD, Op::Kx, "+2i*hbar*Kx", {2.0 * ih, Op::Kx}},
      {Op::KD, Op::Kp, "-2i*hbar*Kp", {-2.0 * ih, Op::Kp}},
      {Op::Qhat, Op::Kx, "0", {}},
      {Op::Qhat, Op::Kp, "0", {}},
      {Op::Qhat, Op::KD, "0", {}},
  };

  std::vector<int> sectors;
  if (cfg.N) {
    sectors.push_back(*cfg.N);
  } else {
    sectors = {1, 2, 3};
  }
  std::mt19937_64 rng(cfg.seed);
  std::string csv = "# random test functions from std::mt19937_64 seeded with " + std::to_string(cfg.seed) + "\n";
  csv += "N,trial,a,b,expected,residual\n";
  double worst[6] = {};
  for (int N : sectors) {
    const auto grid = GridND::cube(sector_axis(cfg, N), static_cast<std::size_t>(N));
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const CorrelationFunction cf(random_test_function(grid, rng), Symmetrize::yes, &ctx.diag);
      for (std::size_t c = 0; c < std::size(table); ++c) {
        const double r = commutator_residual(table[c].a, table[c].b, table[c].expected, cf, params);
        worst[c] = std::max(worst[c], r);
        csv += std::to_string(N) + ',' + std::to_string(trial) + ',' + std::string(op_name(table[c].a)) + ',' +
               std::string(op_name(table[c].b)) + ',' + table[c].expected_name + ',' + format_double(r) + '\n';
      }
    }
  }
  write_text_file(ctx.artifact("algebra_check.csv"), csv);
  std::string summary = "algebra-check trials=" + std::to_string(cfg.trials);
  for (std::size_t c = 0; c < std::size(table); ++c) {
    summary += " [" + std::string(op_name(table[c].a)) + "," + std::string(op_name(table[c].b)) + "]=" + fmt(worst[c]);
    ctx.require(worst[c] <= ctx.tol);
  }
  ctx.out.summary = summary;
}

}  // namespace

RunOutcome run(const RunConfig& config) {
  config.validate();
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + config.out_dir.string() + ": " + ec.message());

  Ctx ctx{config, config.tol.value_or(default_tol(config.experiment)), {}, {}};
  switch (config.experiment) {
    case Experiment::make_packet:
      make_packet(ctx);
      break;
    case Experiment::evolve:
      evolve(ctx);
      break;
    case Experiment::effective:
      effective(ctx);
      break;
    case Experiment::compare:
      compare(ctx);
      break;
    case Experiment::spectrum:
      spectrum(ctx);
      break;
    case Experiment::algebra_check:
      algebra_check(ctx);
      break;
  }
  ctx.out.summary += ctx.out.status == kExitOk ? " PASS" : " FAIL tol=" + fmt(ctx.tol);
  for (const auto& w : ctx.diag.warnings) ctx.out.summary += " [warning: " + w + "]";
  return ctx.out;
}

int run_reporting(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const auto outcome = run(config);
    out << outcome.summary << '\n';
    return outcome.status;
  } catch (const ConfigSyntaxError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace quncert
