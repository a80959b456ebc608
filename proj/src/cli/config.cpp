#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <ostream>

#include "quncert/cli.hpp"

namespace quncert {

namespace {

constexpr std::pair<Experiment, std::string_view> kExperiments[] = {
    {Experiment::make_packet, "make-packet"}, {Experiment::evolve, "evolve"},
    {Experiment::effective, "effective"},     {Experiment::compare, "compare"},
    {Experiment::spectrum, "spectrum"},       {Experiment::algebra_check, "algebra-check"},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view s, std::string_view what) {
  // strtod accepts the usual exponent and sign forms; require the whole token to be consumed.
  const std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size()) {
    throw ConfigSyntaxError("'" + buf + "' is not a number in " + std::string(what));
  }
  return v;
}

long long to_integer(std::string_view s, std::string_view what) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigSyntaxError("'" + std::string(s) + "' is not an integer in " + std::string(what));
  }
  return v;
}

}  // namespace

std::string_view experiment_name(Experiment e) noexcept {
  for (const auto& [x, name] : kExperiments) {
    if (x == e) return name;
  }
  return "?";
}

Experiment experiment_from_name(std::string_view name) {
  for (const auto& [x, n] : kExperiments) {
    if (n == name) return x;
  }
  throw ConfigSyntaxError("unknown experiment '" + std::string(name) + "'");
}

GridSpec parse_grid(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw ConfigSyntaxError("--grid takes min,max,n");
  const auto n = to_integer(parts[2], "--grid");
  if (n < 0) throw ConfigSyntaxError("--grid point count must be non-negative");
  return {to_double(parts[0], "--grid"), to_double(parts[1], "--grid"), static_cast<std::size_t>(n)};
}

EffectivePacketState parse_packet(std::string_view text, double& Q) {
  const auto parts = split(text, ',');
  if (parts.size() != 6 && parts.size() != 7) throw ConfigSyntaxError("--packet takes q,p,alpha,beta,gamma,k[,Q]");
  EffectivePacketState s;
  s.q = to_double(parts[0], "--packet");
  s.p = to_double(parts[1], "--packet");
  s.alpha = to_double(parts[2], "--packet");
  s.beta = to_double(parts[3], "--packet");
  s.gamma = to_double(parts[4], "--packet");
  const auto k = to_integer(parts[5], "--packet");
  if (k < 0 || k > 1000) throw ConfigSyntaxError("--packet level k out of range");
  s.k = static_cast<int>(k);
  Q = parts.size() == 7 ? to_double(parts[6], "--packet") : 1.0;
  return s;
}

Potential parse_potential(std::string_view text) {
  text = trim(text);
  if (text == "zero") return Potential::zero();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigSyntaxError("--potential takes zero, harmonic:OMEGA or poly:V0,V2,V4");
  const auto kind = text.substr(0, colon);
  const auto args = split(text.substr(colon + 1), ',');
  if (kind == "harmonic" && args.size() == 1) return Potential::harmonic(to_double(args[0], "--potential"));
  if (kind == "poly" && args.size() == 3) {
    return Potential::polynomial(to_double(args[0], "--potential"), to_double(args[1], "--potential"),
                                 to_double(args[2], "--potential"));
  }
  throw ConfigSyntaxError("--potential takes zero, harmonic:OMEGA or poly:V0,V2,V4");
}

NonlinearCoupling parse_kappa(std::string_view text) {
  NonlinearCoupling nl;
  if (trim(text).empty()) return nl;
  for (const auto term : split(text, ',')) {
    const auto colon = term.find(':');
    if (colon == std::string_view::npos) throw ConfigSyntaxError("--kappa takes n:value,...");
    const auto n = to_integer(trim(term.substr(0, colon)), "--kappa");
    if (n < -1000 || n > 1000) throw ConfigSyntaxError("--kappa order out of range");
    nl.terms.emplace_back(static_cast<int>(n), to_double(trim(term.substr(colon + 1)), "--kappa"));
  }
  return nl;
}

void RunConfig::validate() const {
  params.validate();
  packet.validate();
  potential.validate();
  coupling.validate();
  if (grid) grid->build();
  if (!(Q > 0.0) || !std::isfinite(Q)) throw InvalidArgument("Q must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (n_steps == 0) throw InvalidArgument("steps must be at least 1");
  if (record_every == 0) throw InvalidArgument("record-every must be at least 1");
  if (!std::isfinite(t0)) throw InvalidArgument("t0 must be finite");
  if (n_max < 0 || n_max > 40) throw InvalidArgument("n-max must lie in [0, 40]");
  if (N && (*N < 1 || *N > 3)) throw InvalidArgument("N must be 1, 2 or 3");
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  if (tol && (!(*tol > 0.0) || !std::isfinite(*tol))) throw InvalidArgument("tol must be positive");
  if (experiment == Experiment::spectrum && N && *N == 1 && n_max != 0) {
    // One-point functions carry the single Casimir value; only n = 0 exists.
    throw InvalidArgument("spectrum for N = 1 has only n-max = 0");
  }
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uncertainty-moment dynamics and second-quantized sl(2,R) checks"};
  app.set_config("--config", "", "TOML or INI file with option values; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  std::string grid, packet, potential = "zero", kappa, initial_state, out_dir = ".";
  RunConfig cfg;
  std::optional<double> tol;
  std::optional<int> N;
  app.add_option("--grid", grid, "min,max,n");
  app.add_option("--packet", packet, "q,p,alpha,beta,gamma,k[,Q]");
  app.add_option("--potential", potential, "zero | harmonic:OMEGA | poly:V0,V2,V4");
  app.add_option("--kappa", kappa, "nonlinear couplings n:value,...");
  app.add_option("--dt", cfg.dt, "time step");
  app.add_option("--steps", cfg.n_steps, "number of steps");
  app.add_option("--record-every", cfg.record_every, "record every n steps");
  app.add_option("--t0", cfg.t0, "start time (evolve)");
  app.add_option("--initial-state", initial_state, "state snapshot to start from (evolve)");
  app.add_option("--out", out_dir, "output directory")->envname("QUNCERT_OUT");
  app.add_option("--hbar", cfg.params.hbar, "reduced Planck constant");
  app.add_option("--mass", cfg.params.mass, "particle mass");
  app.add_option("--seed", cfg.seed, "seed for randomized suites");
  app.add_option("--n-max", cfg.n_max, "largest eigenmode index (spectrum)");
  app.add_option("--N", N, "sector: number of points");
  app.add_option("--trials", cfg.trials, "random test functions per sector (algebra-check)");
  app.add_option("--tol", tol, "tolerance deciding the exit status");

  for (const auto& [e, name] : kExperiments) app.add_subcommand(std::string(name), "");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  }

  try {
    cfg.experiment = experiment_from_name(app.get_subcommands().front()->get_name());
    if (!grid.empty()) cfg.grid = parse_grid(grid);
    if (!packet.empty()) cfg.packet = parse_packet(packet, cfg.Q);
    cfg.potential = parse_potential(potential);
    cfg.coupling = parse_kappa(kappa);
    if (!initial_state.empty()) cfg.initial_state = initial_state;
    cfg.out_dir = out_dir;
    cfg.N = N;
    cfg.tol = tol;
  } catch (const ConfigSyntaxError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return run_reporting(cfg, out, err);
}

}  // namespace quncert
