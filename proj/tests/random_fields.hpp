#pragma once

#include <cmath>
#include <random>

#include "quncert/core.hpp"

namespace gen {

inline quncert::cplx random_complex(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng)};
}

/// Sum of `count` Gaussians with random complex amplitudes, centers in [-1.5, 1.5], widths in [0.5, 1.0].
inline quncert::ComplexField random_gaussian_sum(const quncert::Grid1D& g, std::mt19937_64& rng,
                                                 int count) {
  std::uniform_real_distribution<double> center(-1.5, 1.5);
  std::uniform_real_distribution<double> width(0.5, 1.0);
  std::uniform_real_distribution<double> kick(-1.5, 1.5);
  std::vector<quncert::cplx> v(g.size());
  for (int i = 0; i < count; ++i) {
    const quncert::cplx amp = random_complex(rng);
    const double c = center(rng);
    const double w = width(rng);
    const double k = kick(rng);
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double u = (g.x(j) - c) / w;
      v[j] += amp * std::exp(-0.5 * u * u) * std::polar(1.0, k * g.x(j));
    }
  }
  return quncert::ComplexField(quncert::GridND(g), std::move(v));
}

}  // namespace gen

#include "quncert/packets.hpp"

namespace gen {

/// Grid wide enough in x and fine enough in k for an extended packet.
inline quncert::Grid1D grid_for_packet(const quncert::EffectivePacketState& s,
                                       const quncert::PhysicalParams& params = {}) {
  const double half = quncert::recommended_half_width(s) + 2.0;
  const double two_k1 = 2.0 * s.k + 1.0;
  const double sigma_k =
      std::sqrt(s.beta * s.beta + two_k1 * two_k1 * params.hbar * params.hbar / (4.0 * s.alpha * s.alpha)) /
      params.hbar;
  const double kmax = std::abs(s.p) / params.hbar + 10.0 * std::sqrt(two_k1) * sigma_k;
  std::size_t n = 64;
  while (static_cast<double>(n) < 2.0 * half * kmax / M_PI) n *= 2;
  return quncert::build_grid(s.q - half, s.q + half, n);
}

inline quncert::EffectivePacketState random_packet(std::mt19937_64& rng, int k_max = 5) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> level(0, k_max);
  quncert::EffectivePacketState s;
  s.q = -3.0 + 6.0 * unit(rng);
  s.p = -3.0 + 6.0 * unit(rng);
  s.alpha = 0.3 * std::pow(10.0, unit(rng));  // [0.3, 3]
  s.beta = -2.0 + 4.0 * unit(rng);
  s.gamma = 2.0 * M_PI * unit(rng);
  s.k = level(rng);
  return s;
}

inline double norm2(const quncert::ComplexField& f) {
  double s = 0.0;
  for (const auto& a : f.values()) s += std::norm(a);
  return s * f.grid().cell_volume();
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace gen
