#include "quncert/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "quncert/fft.hpp"

namespace quncert {

void PhysicalParams::validate() const {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidArgument("hbar must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidArgument("mass must be positive");
}

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

Grid1D::Grid1D(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    std::ostringstream os;
    os << "grid interval [" << x_min << ", " << x_max << "] is degenerate";
    throw InvalidArgument(os.str());
  }
  if (n < 16 || !is_power_of_two(n)) {
    throw InvalidArgument("grid size " + std::to_string(n) + " must be a power of two >= 16");
  }
  dx_ = (x_max - x_min) / static_cast<double>(n);
}

std::vector<double> Grid1D::points() const {
  std::vector<double> xs(n_);
  for (std::size_t j = 0; j < n_; ++j) xs[j] = x(j);
  return xs;
}

std::vector<double> Grid1D::wavenumbers() const {
  std::vector<double> k(n_);
  const double dk = 2.0 * M_PI / length();
  const auto half = static_cast<std::ptrdiff_t>(n_ / 2);
  for (std::size_t j = 0; j < n_; ++j) {
    auto m = static_cast<std::ptrdiff_t>(j);
    if (m >= half) m -= static_cast<std::ptrdiff_t>(n_);
    k[j] = dk * static_cast<double>(m);
  }
  return k;
}

std::vector<double> Grid1D::wavenumbers_odd() const {
  auto k = wavenumbers();
  k[n_ / 2] = 0.0;
  return k;
}

Grid1D build_grid(double x_min, double x_max, std::size_t n) { return Grid1D(x_min, x_max, n); }

GridND::GridND(std::vector<Grid1D> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > kMaxDims) {
    throw InvalidArgument("GridND supports 1 to 3 axes");
  }
  strides_.assign(axes_.size(), 1);
  for (std::size_t a = axes_.size() - 1; a > 0; --a) strides_[a - 1] = strides_[a] * axes_[a].size();
  size_ = strides_[0] * axes_[0].size();
}

GridND::GridND(const Grid1D& axis) : GridND(std::vector<Grid1D>{axis}) {}

GridND GridND::cube(const Grid1D& axis, std::size_t dims) {
  return GridND(std::vector<Grid1D>(dims, axis));
}

double GridND::cell_volume() const noexcept {
  double v = 1.0;
  for (const auto& a : axes_) v *= a.dx();
  return v;
}

std::array<std::size_t, GridND::kMaxDims> GridND::unflatten(std::size_t flat) const noexcept {
  std::array<std::size_t, kMaxDims> idx{};
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    idx[a] = flat / strides_[a];
    flat -= idx[a] * strides_[a];
  }
  return idx;
}

bool GridND::is_cubic() const noexcept {
  return std::all_of(axes_.begin(), axes_.end(), [&](const Grid1D& g) { return g == axes_[0]; });
}

ComplexField::ComplexField(GridND grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("field has " + std::to_string(values_.size()) + " samples, grid needs " +
                          std::to_string(grid_.size()));
  }
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw InvalidArgument("field contains a non-finite sample");
    }
  }
}

ComplexField ComplexField::zeros(GridND grid) {
  const auto n = grid.size();
  return ComplexField(std::move(grid), std::vector<cplx>(n));
}

namespace {

void require_same_grid(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("fields live on different grids");
}

}  // namespace

ComplexField operator+(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b);
  std::vector<cplx> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
  return ComplexField(a.grid(), std::move(v));
}

ComplexField operator-(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b);
  std::vector<cplx> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
  return ComplexField(a.grid(), std::move(v));
}

ComplexField operator*(cplx s, const ComplexField& f) {
  std::vector<cplx> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s * f[i];
  return ComplexField(f.grid(), std::move(v));
}

BoundaryDecay check_boundary_decay(const ComplexField& f, double tol) {
  const auto& g = f.grid();
  double peak = 0.0;
  for (const auto& v : f.values()) peak = std::max(peak, std::abs(v));

  BoundaryDecay out;
  out.threshold = tol * std::max(1.0, peak);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto idx = g.unflatten(i);
    bool on_face = false;
    for (std::size_t a = 0; a < g.dims(); ++a) {
      on_face = on_face || idx[a] == 0 || idx[a] + 1 == g.axis(a).size();
    }
    if (on_face) out.max_boundary = std::max(out.max_boundary, std::abs(f[i]));
  }
  out.ok = out.max_boundary < out.threshold;
  return out;
}

cplx quadrature(const ComplexField& f) {
  cplx sum{0.0, 0.0};
  for (const auto& v : f.values()) sum += v;
  return sum * f.grid().cell_volume();
}

cplx inner_product(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b);
  cplx sum{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
  return sum * a.grid().cell_volume();
}

double l2_norm(const ComplexField& f) {
  double sum = 0.0;
  for (const auto& v : f.values()) sum += std::norm(v);
  return std::sqrt(sum * f.grid().cell_volume());
}

ComplexField spectral_derivative(const ComplexField& f, std::size_t axis, int order,
                                 Diagnostics* diag) {
  const auto& g = f.grid();
  if (axis >= g.dims()) throw InvalidArgument("spectral_derivative: axis out of range");
  if (order != 1 && order != 2) throw InvalidArgument("spectral_derivative: order must be 1 or 2");

  if (diag != nullptr) {
    const auto decay = check_boundary_decay(f);
    if (!decay.ok) {
      std::ostringstream os;
      os << "boundary decay violated: |f| = " << decay.max_boundary << " on the grid boundary";
      diag->warn(os.str());
    }
  }

  const auto k = order == 1 ? g.axis(axis).wavenumbers_odd() : g.axis(axis).wavenumbers();
  std::vector<cplx> mult(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) {
    mult[j] = order == 1 ? cplx(0.0, k[j]) : cplx(-k[j] * k[j], 0.0);
  }

  std::vector<cplx> data(f.values().begin(), f.values().end());
  const auto& plan = fft_plan(g);
  plan.forward(data);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= mult[g.unflatten(i)[axis]];
  plan.inverse(data);
  return ComplexField(g, std::move(data));
}

double spectral_power(const ComplexField& f) {
  std::vector<cplx> data(f.values().begin(), f.values().end());
  fft_plan(f.grid()).forward(data);
  double sum = 0.0;
  for (const auto& v : data) sum += std::norm(v);
  return sum * f.grid().cell_volume() / static_cast<double>(f.size());
}

double difference_of_products(double a, double b, double c, double d) noexcept {
  const double cd = c * d;
  const double err = std::fma(-c, d, cd);
  const double diff = std::fma(a, b, -cd);
  return diff + err;
}

}  // namespace quncert
