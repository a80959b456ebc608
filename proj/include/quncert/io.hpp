#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "quncert/core.hpp"
#include "quncert/trajectory.hpp"

namespace quncert {

/// Shortest round-trip-safe decimal form used in every CSV artifact (%.17g).
std::string format_double(double v);

inline constexpr std::string_view kTrajectoryHeader = "t,Q,mean_x,mean_p,x2,p2,D,sigma_x2,sigma_p2,sigma_D,c,casimir_C";

/// One row per recorded time under kTrajectoryHeader. Throws InvalidArgument for an empty record.
std::string trajectory_csv(const TrajectoryRecord& rec);

/// Writes trajectory_csv(rec); I/O failures throw IoError.
void export_trajectory(const TrajectoryRecord& rec, const std::filesystem::path& path);

/// Replaces the file at `path` with `contents`. Throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// Binary state file, little-endian:
///   "QUNCSNAP", u32 version, u32 dims, per axis {f64 x_min, f64 x_max, u64 n}, f64 hbar, f64 mass,
///   u64 count, count pairs of f64 (re, im) in grid order, u32 crc32 of everything before it.
inline constexpr std::string_view kSnapshotMagic = "QUNCSNAP";
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct LoadedState {
  ComplexField state;
  PhysicalParams params;
};

void snapshot_state(const ComplexField& psi, const PhysicalParams& params, const std::filesystem::path& path);

/// Inverse of snapshot_state, bit for bit. Bad magic, version, checksum or length throws IoError.
LoadedState load_state(const std::filesystem::path& path);

}  // namespace quncert
