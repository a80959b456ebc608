#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "quncert/core.hpp"
#include "quncert/moments.hpp"
#include "quncert/packets.hpp"

namespace quncert {

struct StateSnapshot {
  std::size_t step = 0;
  double t = 0.0;
  ComplexField state;
};

/// Time series of moments and, for effective runs, packet parameters.
/// Invariants: every non-empty series has times.size() entries; times strictly increase.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<MomentSet> moment_sets;
  std::vector<UncertaintySet> uncertainty_sets;

  std::vector<EffectivePacketState> packet_states;
  std::vector<double> energies;

  std::vector<StateSnapshot> snapshots;
  std::optional<ComplexField> final_state;

  double max_norm_drift = 0.0;  // max |Q(t) - Q(0)| / Q(0) over recorded rows
  Diagnostics diagnostics;

  std::size_t size() const noexcept { return times.size(); }
  void validate() const;
};

}  // namespace quncert
