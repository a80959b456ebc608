#include "quncert/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

namespace quncert {

namespace {

// FFTW's planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

FftPlan::FftPlan(std::vector<int> shape) : shape_(std::move(shape)) {
  if (shape_.empty()) throw InvalidArgument("FftPlan: empty shape");
  for (int n : shape_) {
    if (n <= 0) throw InvalidArgument("FftPlan: non-positive extent");
    size_ *= static_cast<std::size_t>(n);
  }
  std::vector<cplx> scratch(size_);
  const int rank = static_cast<int>(shape_.size());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  forward_ = fftw_plan_dft(rank, shape_.data(), as_fftw(scratch.data()), as_fftw(scratch.data()),
                           FFTW_FORWARD, flags);
  backward_ = fftw_plan_dft(rank, shape_.data(), as_fftw(scratch.data()),
                            as_fftw(scratch.data()), FFTW_BACKWARD, flags);
  if (forward_ == nullptr || backward_ == nullptr) throw NumericalError("FFTW planning failed");
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  if (forward_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  if (backward_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

void FftPlan::forward(std::span<cplx> data) const {
  if (data.size() != size_) throw InvalidArgument("FftPlan::forward: size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(forward_), as_fftw(data.data()), as_fftw(data.data()));
}

void FftPlan::inverse(std::span<cplx> data) const {
  if (data.size() != size_) throw InvalidArgument("FftPlan::inverse: size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(backward_), as_fftw(data.data()), as_fftw(data.data()));
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& v : data) v *= scale;
}

const FftPlan& fft_plan(const GridND& grid) {
  std::vector<int> shape;
  for (const auto& axis : grid.axes()) shape.push_back(static_cast<int>(axis.size()));

  // The planner mutex must outlive the cache, whose plans lock it on destruction.
  planner_mutex();
  static std::mutex cache_mutex;
  static std::map<std::vector<int>, std::unique_ptr<FftPlan>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[shape];
  if (!slot) slot = std::make_unique<FftPlan>(shape);
  return *slot;
}

}  // namespace quncert
