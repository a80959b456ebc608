#include "quncert/io.hpp"

#include <zlib.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <tuple>

namespace quncert {

static_assert(std::endian::native == std::endian::little, "snapshot format assumes a little-endian host");

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory_csv(const TrajectoryRecord& rec) {
  if (rec.size() == 0) throw InvalidArgument("cannot export an empty trajectory");
  rec.validate();
  if (rec.moment_sets.size() != rec.size() || rec.uncertainty_sets.size() != rec.size()) {
    throw InvalidArgument("trajectory has no moment rows to export");
  }
  std::string out(kTrajectoryHeader);
  out += '\n';
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const auto& m = rec.moment_sets[i];
    const auto& u = rec.uncertainty_sets[i];
    const double row[] = {rec.times[i], m.Q,  m.mean_x,    m.mean_p,   m.x2, m.p2,
                          m.D,          u.sigma_x2, u.sigma_p2, u.sigma_D, u.c,  u.casimir_C};
    for (std::size_t c = 0; c < std::size(row); ++c) {
      if (c > 0) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  f.flush();
  if (!f) throw IoError("failed writing " + path.string());
}

void export_trajectory(const TrajectoryRecord& rec, const std::filesystem::path& path) {
  write_text_file(path, trajectory_csv(rec));
}

namespace {

template <class T>
void put(std::string& buf, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  buf.append(bytes, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  template <class T>
  T get() {
    if (data_.size() - pos_ < sizeof(T)) throw IoError("snapshot is truncated");
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string_view take(std::size_t n) {
    if (data_.size() - pos_ < n) throw IoError("snapshot is truncated");
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t pos() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::uint32_t checksum(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  constexpr std::size_t kChunk = 1u << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
    const std::size_t n = std::min(kChunk, bytes.size() - off);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + off), static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

void snapshot_state(const ComplexField& psi, const PhysicalParams& params, const std::filesystem::path& path) {
  params.validate();
  std::string buf(kSnapshotMagic);
  put<std::uint32_t>(buf, kSnapshotVersion);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(psi.grid().dims()));
  for (const auto& a : psi.grid().axes()) {
    put<double>(buf, a.x_min());
    put<double>(buf, a.x_max());
    put<std::uint64_t>(buf, a.size());
  }
  put<double>(buf, params.hbar);
  put<double>(buf, params.mass);
  put<std::uint64_t>(buf, psi.size());
  for (const auto& z : psi.values()) {
    put<double>(buf, z.real());
    put<double>(buf, z.imag());
  }
  put<std::uint32_t>(buf, checksum(buf));
  write_text_file(path, buf);
}

LoadedState load_state(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  const std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) throw IoError("failed reading " + path.string());

  Reader r(data);
  if (r.take(kSnapshotMagic.size()) != kSnapshotMagic) throw IoError(path.string() + " is not a state snapshot");
  const auto version = r.get<std::uint32_t>();
  if (version != kSnapshotVersion) throw IoError("unsupported snapshot version " + std::to_string(version));
  const auto dims = r.get<std::uint32_t>();
  if (dims < 1 || dims > GridND::kMaxDims) throw IoError("snapshot has an invalid dimension count");
  std::vector<std::tuple<double, double, std::uint64_t>> axes;
  for (std::uint32_t a = 0; a < dims; ++a) {
    const auto lo = r.get<double>();
    const auto hi = r.get<double>();
    const auto n = r.get<std::uint64_t>();
    axes.emplace_back(lo, hi, n);
  }
  PhysicalParams params;
  params.hbar = r.get<double>();
  params.mass = r.get<double>();
  const auto count = r.get<std::uint64_t>();
  if (count > r.remaining() / 16) throw IoError("snapshot is truncated");
  const std::size_t body_end = r.pos() + 16 * count;
  if (data.size() != body_end + 4) throw IoError("snapshot length does not match its header");
  std::uint32_t stored;
  std::memcpy(&stored, data.data() + body_end, 4);
  if (stored != checksum(std::string_view(data).substr(0, body_end))) throw IoError("snapshot checksum mismatch");

  try {
    std::vector<Grid1D> grid_axes;
    for (const auto& [lo, hi, n] : axes) grid_axes.emplace_back(lo, hi, static_cast<std::size_t>(n));
    GridND grid(std::move(grid_axes));
    if (grid.size() != count) throw IoError("snapshot sample count does not match its grid");
    params.validate();
    std::vector<cplx> v(count);
    for (auto& z : v) {
      const double re = r.get<double>();
      const double im = r.get<double>();
      z = {re, im};
    }
    return {ComplexField(std::move(grid), std::move(v)), params};
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("snapshot header is invalid: ") + e.what());
  }
}

}  // namespace quncert
