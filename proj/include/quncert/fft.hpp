#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "quncert/core.hpp"

namespace quncert {

/// In-place complex FFT of a fixed row-major shape. Plans are built with FFTW_ESTIMATE,
/// so repeated transforms of identical input are bit-identical.
class FftPlan {
 public:
  explicit FftPlan(std::vector<int> shape);
  ~FftPlan();

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void forward(std::span<cplx> data) const;
  /// Inverse transform including the 1/n normalization.
  void inverse(std::span<cplx> data) const;

  std::size_t size() const noexcept { return size_; }

 private:
  std::vector<int> shape_;
  std::size_t size_ = 1;
  void* forward_ = nullptr;
  void* backward_ = nullptr;
};

/// Shared plan for a shape; safe to call from several threads.
const FftPlan& fft_plan(const GridND& grid);

}  // namespace quncert
