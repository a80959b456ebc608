#include "quncert/trajectory.hpp"

namespace quncert {

void TrajectoryRecord::validate() const {
  const auto n = times.size();
  auto check = [n](std::size_t len, const char* name) {
    if (len != 0 && len != n) {
      throw InvalidArgument(std::string("trajectory series '") + name + "' has the wrong length");
    }
  };
  check(moment_sets.size(), "moment_sets");
  check(uncertainty_sets.size(), "uncertainty_sets");
  check(packet_states.size(), "packet_states");
  check(energies.size(), "energies");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(times[i] > times[i - 1])) throw InvalidArgument("trajectory times must strictly increase");
  }
}

}  // namespace quncert
