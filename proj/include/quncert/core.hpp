#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace quncert {

using cplx = std::complex<double>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or invariant of an input value does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A computation produced non-finite values or otherwise broke down.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing an artifact failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Non-fatal findings collected while a computation proceeds.
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
  bool clean() const noexcept { return warnings.empty(); }
};

struct PhysicalParams {
  double hbar = 1.0;
  double mass = 1.0;

  void validate() const;
};

/// Uniform periodic grid: x_j = x_min + j*dx for j = 0..n-1, dx = (x_max - x_min)/n.
class Grid1D {
 public:
  Grid1D(double x_min, double x_max, std::size_t n);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double dx() const noexcept { return dx_; }
  double length() const noexcept { return x_max_ - x_min_; }
  std::size_t size() const noexcept { return n_; }
  double x(std::size_t j) const noexcept { return x_min_ + static_cast<double>(j) * dx_; }

  std::vector<double> points() const;

  /// Angular wavenumbers in FFT order: 0, 1, ..., n/2-1, -n/2, ..., -1 (times 2*pi/L).
  std::vector<double> wavenumbers() const;

  /// As wavenumbers(), but with the Nyquist entry set to zero (used for odd derivative orders).
  std::vector<double> wavenumbers_odd() const;

  bool operator==(const Grid1D&) const = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_;
};

Grid1D build_grid(double x_min, double x_max, std::size_t n);

/// Tensor product of 1..3 Grid1D axes. Flat storage is row-major: the last axis varies fastest.
class GridND {
 public:
  static constexpr std::size_t kMaxDims = 3;

  explicit GridND(std::vector<Grid1D> axes);
  GridND(const Grid1D& axis);  // NOLINT: a 1D grid is a GridND

  /// The same axis repeated `dims` times.
  static GridND cube(const Grid1D& axis, std::size_t dims);

  std::size_t dims() const noexcept { return axes_.size(); }
  const Grid1D& axis(std::size_t a) const { return axes_.at(a); }
  const std::vector<Grid1D>& axes() const noexcept { return axes_; }
  std::size_t size() const noexcept { return size_; }
  std::size_t stride(std::size_t a) const { return strides_.at(a); }
  double cell_volume() const noexcept;

  /// Per-axis index of a flat position.
  std::array<std::size_t, kMaxDims> unflatten(std::size_t flat) const noexcept;

  /// True when every axis is the same Grid1D.
  bool is_cubic() const noexcept;

  bool operator==(const GridND& other) const { return axes_ == other.axes_; }

 private:
  std::vector<Grid1D> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

/// Complex samples on a GridND; immutable once built, and every value is finite.
class ComplexField {
 public:
  ComplexField(GridND grid, std::vector<cplx> values);

  static ComplexField zeros(GridND grid);

  template <class F>
  static ComplexField sample(const Grid1D& grid, F&& f) {
    std::vector<cplx> v(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) v[j] = f(grid.x(j));
    return ComplexField(GridND(grid), std::move(v));
  }

  const GridND& grid() const noexcept { return grid_; }
  std::span<const cplx> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  /// Moves the sample buffer out, leaving this field empty.
  std::vector<cplx> take_values() && { return std::move(values_); }

 private:
  GridND grid_;
  std::vector<cplx> values_;
};

ComplexField operator+(const ComplexField& a, const ComplexField& b);
ComplexField operator-(const ComplexField& a, const ComplexField& b);
ComplexField operator*(cplx s, const ComplexField& f);

/// Largest |f| at the two outermost samples of every axis.
struct BoundaryDecay {
  double max_boundary = 0.0;
  double threshold = 0.0;
  bool ok = true;
};

/// Threshold is tol * max(1, max|f|).
BoundaryDecay check_boundary_decay(const ComplexField& f, double tol = 1e-12);

/// Rectangle rule: sum_j f_j * cell volume.
cplx quadrature(const ComplexField& f);

/// Grid inner product <a, b> = sum conj(a_j) b_j * cell volume.
cplx inner_product(const ComplexField& a, const ComplexField& b);

/// L2 norm with the grid measure.
double l2_norm(const ComplexField& f);

/// d^order f / dx_axis^order through the FFT. Nyquist mode is dropped for odd orders.
/// Fields that do not decay at the boundary are flagged in `diag` but still differentiated.
ComplexField spectral_derivative(const ComplexField& f, std::size_t axis, int order,
                                 Diagnostics* diag = nullptr);

/// Sum_k |F_k|^2 * dV / n, the wavenumber-space counterpart of quadrature(|f|^2).
double spectral_power(const ComplexField& f);

/// a*b - c*d with an fma correction term (Kahan's difference of products).
double difference_of_products(double a, double b, double c, double d) noexcept;

bool is_power_of_two(std::size_t n) noexcept;

}  // namespace quncert
