#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quncert/core.hpp"
#include "quncert/packets.hpp"
#include "quncert/pde.hpp"

namespace quncert {

/// Malformed command line or config value. Maps to exit status 2.
class ConfigSyntaxError : public Error {
 public:
  using Error::Error;
};

enum class Experiment { make_packet, evolve, effective, compare, spectrum, algebra_check };

std::string_view experiment_name(Experiment e) noexcept;
Experiment experiment_from_name(std::string_view name);

inline constexpr int kExitOk = 0;
inline constexpr int kExitTolerance = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitNumerical = 4;

struct GridSpec {
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t n = 0;

  Grid1D build() const { return Grid1D(x_min, x_max, n); }
};

struct RunConfig {
  Experiment experiment = Experiment::make_packet;

  std::optional<GridSpec> grid;  // per-experiment default when empty
  EffectivePacketState packet;
  double Q = 1.0;
  Potential potential;
  NonlinearCoupling coupling;

  double dt = 1e-3;
  std::size_t n_steps = 1000;
  std::size_t record_every = 10;
  double t0 = 0.0;
  std::optional<std::filesystem::path> initial_state;

  std::filesystem::path out_dir = ".";
  PhysicalParams params;

  std::uint64_t seed = 1;
  int n_max = 4;
  std::optional<int> N;  // all sectors when empty (algebra-check); 2 for spectrum
  int trials = 20;
  std::optional<double> tol;  // per-experiment default when empty

  void validate() const;
};

/// "min,max,n"
GridSpec parse_grid(std::string_view text);
/// "q,p,alpha,beta,gamma,k" or with a trailing ",Q"; returns Q through `Q`.
EffectivePacketState parse_packet(std::string_view text, double& Q);
/// "zero", "harmonic:OMEGA" or "poly:V0,V2,V4"
Potential parse_potential(std::string_view text);
/// "n:value,n:value,..."; empty text is the linear equation.
NonlinearCoupling parse_kappa(std::string_view text);

struct RunOutcome {
  int status = kExitOk;
  std::string summary;  // one line
  std::vector<std::filesystem::path> artifacts;
};

/// Executes one experiment and writes its artifacts into config.out_dir. Library errors propagate.
RunOutcome run(const RunConfig& config);

/// run() with errors mapped to exit statuses; prints the summary to `out` and errors to `err`.
int run_reporting(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command-line entry: subcommand, flags, optional --config file (flags win), QUNCERT_OUT.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace quncert
