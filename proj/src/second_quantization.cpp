#include "quncert/second_quantization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <span>

#include "quncert/fft.hpp"

namespace quncert {

namespace {

using Op = SecondQuantizedOp;

constexpr std::array<std::pair<Op, std::string_view>, 11> kNames{{
    {Op::Qhat, "Qhat"},
    {Op::Xhat, "Xhat"},
    {Op::Phat, "Phat"},
    {Op::Kx, "Kx"},
    {Op::Kp, "Kp"},
    {Op::KD, "KD"},
    {Op::VarsigmaX, "VarsigmaX"},
    {Op::VarsigmaP, "VarsigmaP"},
    {Op::VarsigmaD, "VarsigmaD"},
    {Op::CasimirC, "CasimirC"},
    {Op::ReducedC, "ReducedC"},
}};

std::vector<OpTerm> product(const std::vector<OpTerm>& a, const std::vector<OpTerm>& b) {
  std::vector<OpTerm> out;
  for (const auto& s : a) {
    for (const auto& t : b) {
      OpTerm u;
      u.coeff = s.coeff * t.coeff;
      u.factors = s.factors;
      u.factors.insert(u.factors.end(), t.factors.begin(), t.factors.end());
      out.push_back(std::move(u));
    }
  }
  return out;
}

std::vector<OpTerm> scaled(std::vector<OpTerm> terms, cplx s) {
  for (auto& t : terms) t.coeff *= s;
  return terms;
}

void append(std::vector<OpTerm>& to, const std::vector<OpTerm>& from) { to.insert(to.end(), from.begin(), from.end()); }

/// Per-axis coordinate of every flat index.
std::vector<std::vector<double>> coordinates(const GridND& g) {
  std::vector<std::vector<double>> c(g.dims(), std::vector<double>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unflatten(i);
    for (std::size_t a = 0; a < g.dims(); ++a) c[a][i] = g.axis(a).x(idx[a]);
  }
  return c;
}

/// Per-axis wavenumber of every flat index; odd = true drops the Nyquist entry.
std::vector<std::vector<double>> wavenumber_table(const GridND& g, bool odd) {
  std::vector<std::vector<double>> per_axis;
  for (std::size_t a = 0; a < g.dims(); ++a) {
    per_axis.push_back(odd ? g.axis(a).wavenumbers_odd() : g.axis(a).wavenumbers());
  }
  std::vector<std::vector<double>> k(g.dims(), std::vector<double>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unflatten(i);
    for (std::size_t a = 0; a < g.dims(); ++a) k[a][i] = per_axis[a][idx[a]];
  }
  return k;
}

std::vector<cplx> to_spectrum(std::span<const cplx> v, const GridND& g) {
  std::vector<cplx> s(v.begin(), v.end());
  fft_plan(g).forward(s);
  return s;
}

/// d_a f for every axis from one forward transform.
std::vector<std::vector<cplx>> gradient(const ComplexField& f) {
  const auto& g = f.grid();
  const auto spectrum = to_spectrum(f.values(), g);
  const auto k = wavenumber_table(g, true);
  std::vector<std::vector<cplx>> out;
  for (std::size_t a = 0; a < g.dims(); ++a) {
    std::vector<cplx> d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = spectrum[i] * cplx(0.0, k[a][i]);
    fft_plan(g).inverse(d);
    out.push_back(std::move(d));
  }
  return out;
}

/// Inverse transform of spectrum * m(i).
template <class M>
std::vector<cplx> spectral_multiply(const ComplexField& f, M&& m) {
  const auto& g = f.grid();
  auto s = to_spectrum(f.values(), g);
  for (std::size_t i = 0; i < g.size(); ++i) s[i] *= m(i);
  fft_plan(g).inverse(s);
  return s;
}

ComplexField apply_generator(Op op, const ComplexField& f, const PhysicalParams& params) {
  const auto& g = f.grid();
  const std::size_t n = g.size();
  const double dims = static_cast<double>(g.dims());
  const double hbar = params.hbar;
  std::vector<cplx> out(n);
  switch (op) {
    case Op::Qhat:
      for (std::size_t i = 0; i < n; ++i) out[i] = dims * f[i];
      break;
    case Op::Xhat:
    case Op::Kx: {
      const auto x = coordinates(g);
      for (std::size_t i = 0; i < n; ++i) {
        double w = 0.0;
        for (const auto& xa : x) w += op == Op::Xhat ? xa[i] : xa[i] * xa[i];
        out[i] = w * f[i];
      }
      break;
    }
    case Op::Phat: {
      const auto k = wavenumber_table(g, true);
      out = spectral_multiply(f, [&](std::size_t i) {
        double s = 0.0;
        for (const auto& ka : k) s += ka[i];
        return cplx(0.0, s) * cplx(0.0, hbar);
      });
      break;
    }
    case Op::Kp: {
      const auto k = wavenumber_table(g, false);
      out = spectral_multiply(f, [&](std::size_t i) {
        double s = 0.0;
        for (const auto& ka : k) s += ka[i] * ka[i];
        return cplx(hbar * hbar * s, 0.0);
      });
      break;
    }
    case Op::KD: {
      const auto x = coordinates(g);
      const auto d = gradient(f);
      for (std::size_t i = 0; i < n; ++i) {
        cplx s = 0.5 * dims * f[i];
        for (std::size_t a = 0; a < g.dims(); ++a) s += x[a][i] * d[a][i];
        out[i] = cplx(0.0, hbar) * s;
      }
      break;
    }
    default:
      throw InvalidArgument("not a generator");
  }
  return ComplexField(g, std::move(out));
}

ComplexField apply_term(const OpTerm& term, const ComplexField& f, const PhysicalParams& params) {
  ComplexField cur = f;
  for (auto it = term.factors.rbegin(); it != term.factors.rend(); ++it) cur = apply_generator(*it, cur, params);
  return term.coeff * cur;
}

ComplexField apply_raw(Op op, const ComplexField& f, const PhysicalParams& params) {
  if (is_generator(op)) return apply_generator(op, f, params);
  ComplexField sum = ComplexField::zeros(f.grid());
  for (const auto& t : expansion(op)) sum = sum + apply_term(t, f, params);
  return sum;
}

CorrelationFunction rewrap(ComplexField f, const CorrelationFunction& like) {
  return CorrelationFunction(std::move(f), like.symmetrized() ? Symmetrize::yes : Symmetrize::no);
}

void require_cubic(const GridND& g) {
  if (g.dims() > 1 && !g.is_cubic()) throw InvalidArgument("multi-particle test functions need a cubic grid");
}

}  // namespace

std::string_view op_name(SecondQuantizedOp op) noexcept {
  for (const auto& [o, name] : kNames) {
    if (o == op) return name;
  }
  return "?";
}

SecondQuantizedOp op_from_name(std::string_view name) {
  for (const auto& [o, n] : kNames) {
    if (n == name) return o;
  }
  throw InvalidArgument("unknown operator '" + std::string(name) + "'");
}

bool is_generator(SecondQuantizedOp op) noexcept {
  switch (op) {
    case Op::Qhat:
    case Op::Xhat:
    case Op::Phat:
    case Op::Kx:
    case Op::Kp:
    case Op::KD:
      return true;
    default:
      return false;
  }
}

std::vector<OpTerm> expansion(SecondQuantizedOp op) {
  const cplx one{1.0, 0.0};
  const cplx half{0.5, 0.0};
  switch (op) {
    case Op::VarsigmaX:
      return {{one, {Op::Qhat, Op::Kx}}, {-one, {Op::Xhat, Op::Xhat}}};
    case Op::VarsigmaP:
      return {{one, {Op::Qhat, Op::Kp}}, {-one, {Op::Phat, Op::Phat}}};
    case Op::VarsigmaD:
      return {{one, {Op::Qhat, Op::KD}}, {-half, {Op::Xhat, Op::Phat}}, {-half, {Op::Phat, Op::Xhat}}};
    case Op::CasimirC:
      return {{half, {Op::Kp, Op::Kx}}, {half, {Op::Kx, Op::Kp}}, {-one, {Op::KD, Op::KD}}};
    case Op::ReducedC: {
      const auto vx = expansion(Op::VarsigmaX);
      const auto vp = expansion(Op::VarsigmaP);
      const auto vd = expansion(Op::VarsigmaD);
      std::vector<OpTerm> out = scaled(product(vx, vp), half);
      append(out, scaled(product(vp, vx), half));
      append(out, scaled(product(vd, vd), -one));
      return out;
    }
    default:
      return {{one, {op}}};
  }
}

ComplexField symmetrize(const ComplexField& phi) {
  const auto& g = phi.grid();
  require_cubic(g);
  const std::size_t dims = g.dims();
  if (dims == 1) return phi;
  const std::size_t n = g.axis(0).size();
  std::vector<cplx> v(phi.values().begin(), phi.values().end());

  // Mean as v0 + sum (vi - v0)/count: equal members give back v0 exactly.
  auto settle = [&v](std::span<const std::size_t> members) {
    const cplx v0 = v[members[0]];
    cplx acc{0.0, 0.0};
    for (std::size_t m = 1; m < members.size(); ++m) acc += v[members[m]] - v0;
    const cplx mean = v0 + acc / static_cast<double>(members.size());
    for (std::size_t m : members) v[m] = mean;
  };

  if (dims == 2) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const std::array<std::size_t, 2> orbit{i * n + j, j * n + i};
        settle(orbit);
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        for (std::size_t k = j; k < n; ++k) {
          std::array<std::size_t, 3> idx{i, j, k};
          std::array<std::size_t, 6> members{};
          std::size_t count = 0;
          do {
            members[count++] = (idx[0] * n + idx[1]) * n + idx[2];
          } while (std::next_permutation(idx.begin(), idx.end()));
          if (count > 1) settle(std::span<const std::size_t>(members.data(), count));
        }
      }
    }
  }
  return ComplexField(g, std::move(v));
}

CorrelationFunction::CorrelationFunction(ComplexField phi, Symmetrize sym, Diagnostics* diag)
    : phi_(sym == Symmetrize::yes ? symmetrize(phi) : std::move(phi)), symmetrized_(sym == Symmetrize::yes) {
  require_cubic(phi_.grid());
  if (diag != nullptr) {
    const auto decay = check_boundary_decay(phi_);
    if (!decay.ok) diag->warn("test function does not decay at the grid boundary");
  }
}

CorrelationFunction apply_op(SecondQuantizedOp op, const CorrelationFunction& cf, const PhysicalParams& params) {
  params.validate();
  return rewrap(apply_raw(op, cf.phi(), params), cf);
}

CorrelationFunction apply_expansion(const std::vector<OpTerm>& terms, const CorrelationFunction& cf,
                                    const PhysicalParams& params) {
  params.validate();
  ComplexField sum = ComplexField::zeros(cf.grid());
  for (const auto& t : terms) sum = sum + apply_term(t, cf.phi(), params);
  return rewrap(std::move(sum), cf);
}

CorrelationFunction casimir_apply(SecondQuantizedOp which, const CorrelationFunction& cf,
                                  const PhysicalParams& params) {
  if (which != Op::CasimirC && which != Op::ReducedC) {
    throw InvalidArgument("casimir_apply takes CasimirC or ReducedC");
  }
  return apply_expansion(expansion(which), cf, params);
}

CorrelationFunction angular_form_apply(const CorrelationFunction& cf, const PhysicalParams& params) {
  params.validate();
  const int N = cf.N();
  if (N != 2 && N != 3) throw InvalidArgument("angular form exists for N = 2 and N = 3 only");
  const auto& g = cf.grid();
  const auto x = coordinates(g);

  // Rotation generator: sum over the cyclic pairs (a, b) of x_a d_b - x_b d_a.
  const std::vector<std::pair<int, int>> pairs =
      N == 2 ? std::vector<std::pair<int, int>>{{0, 1}} : std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 0}};
  auto rotate = [&](const ComplexField& f) {
    const auto d = gradient(f);
    std::vector<cplx> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      cplx s{0.0, 0.0};
      for (const auto& [a, b] : pairs) s += x[a][i] * d[b][i] - x[b][i] * d[a][i];
      out[i] = s;
    }
    return ComplexField(g, std::move(out));
  };

  const auto r2 = rotate(rotate(cf.phi()));
  const double h2 = params.hbar * params.hbar;
  const double scale = N == 2 ? h2 : 9.0 * h2;
  const double weight = N == 2 ? 1.0 : 1.0 / 3.0;
  std::vector<cplx> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = scale * (-weight * r2[i] - cf.phi()[i]);
  return rewrap(ComplexField(g, std::move(out)), cf);
}

CorrelationFunction make_eigenmode(int N, int n, const GridND& grid) {
  if (N != 2 && N != 3) throw InvalidArgument("eigenmodes exist for N = 2 and N = 3 only");
  if (n < 0) throw InvalidArgument("eigenmode index must be non-negative");
  if (static_cast<int>(grid.dims()) != N) throw InvalidArgument("grid dimension does not match N");
  require_cubic(grid);
  const auto x = coordinates(grid);
  std::vector<cplx> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double u = 0.0, w = 0.0, r2 = 0.0;
    if (N == 2) {
      u = x[0][i];
      w = x[1][i];
      r2 = u * u + w * w;
    } else {
      for (int a = 0; a < 3; ++a) {
        u += kFrameE1[a] * x[a][i];
        w += kFrameE2[a] * x[a][i];
        r2 += x[a][i] * x[a][i];
      }
    }
    v[i] = std::pow(cplx(u, w), n) * std::exp(-0.5 * r2);
  }
  return CorrelationFunction(ComplexField(grid, std::move(v)), N == 2 ? Symmetrize::yes : Symmetrize::no);
}

RayleighResult rayleigh_quotient(const OpAction& op, const CorrelationFunction& cf) {
  const double norm2 = inner_product(cf.phi(), cf.phi()).real();
  if (!(norm2 > 0.0)) throw InvalidArgument("rayleigh_quotient needs a non-zero test function");
  const auto image = op(cf);
  RayleighResult r;
  r.value = inner_product(cf.phi(), image.phi()).real() / norm2;
  r.residual = l2_norm(image.phi() - cplx(r.value, 0.0) * cf.phi()) / std::sqrt(norm2);
  return r;
}

double commutator_residual(SecondQuantizedOp a, SecondQuantizedOp b, const OpMultiple& expected,
                           const CorrelationFunction& cf, const PhysicalParams& params) {
  const auto& phi = cf.phi();
  const double norm = l2_norm(phi);
  if (!(norm > 0.0)) throw InvalidArgument("commutator_residual needs a non-zero test function");
  const auto ab = apply_op(a, apply_op(b, cf, params), params);
  const auto ba = apply_op(b, apply_op(a, cf, params), params);
  const ComplexField target = expected.op ? apply_op(*expected.op, cf, params).phi() : phi;
  return l2_norm(ab.phi() - ba.phi() - expected.coeff * target) / norm;
}

namespace {

void require_matching(const CorrelationFunction& cf, const ComplexField& psi) {
  if (psi.grid().dims() != 1) throw InvalidArgument("psi must live on a 1D grid");
  for (const auto& axis : cf.grid().axes()) {
    if (!(axis == psi.grid().axis(0))) throw InvalidArgument("psi grid does not match the test-function grid");
  }
}

/// Contracts phi with psi on every axis. `Abs` contracts |phi| with |psi| instead.
template <bool Abs>
cplx contract(std::span<const cplx> phi, std::size_t dims, std::size_t n, std::span<const cplx> psi, double dx) {
  auto val = [](cplx z) { return Abs ? cplx(std::abs(z), 0.0) : z; };
  // Reduce the last axis repeatedly.
  std::vector<cplx> cur(phi.begin(), phi.end());
  std::size_t len = cur.size();
  if constexpr (Abs) {
    for (auto& z : cur) z = val(z);
  }
  for (std::size_t d = 0; d < dims; ++d) {
    const std::size_t outer = len / n;
    std::vector<cplx> next(outer);
    for (std::size_t o = 0; o < outer; ++o) {
      cplx s{0.0, 0.0};
      const cplx* row = cur.data() + o * n;
      for (std::size_t j = 0; j < n; ++j) s += row[j] * val(psi[j]);
      next[o] = s * dx;
    }
    cur = std::move(next);
    len = outer;
  }
  return cur[0];
}

cplx functional_value(const ComplexField& phi, std::span<const cplx> psi) {
  const auto& g = phi.grid();
  return contract<false>(phi.values(), g.dims(), g.axis(0).size(), psi, g.axis(0).dx());
}

double abs_functional_value(const ComplexField& phi, std::span<const cplx> psi) {
  const auto& g = phi.grid();
  return contract<true>(phi.values(), g.dims(), g.axis(0).size(), psi, g.axis(0).dx()).real();
}

double vec_norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& a : v) s += std::norm(a);
  return std::sqrt(s);
}

/// d/de F(e) at 0 from four samples; exact when F is a polynomial of degree <= 4.
template <class F>
cplx five_point(F&& f, double h) {
  return (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h);
}

/// (G_i G_{i+1} ... Psi)[psi] by nested directional differences along the field forms.
cplx nested_action(const ComplexField& phi, const std::vector<Op>& factors, std::size_t i,
                   const ComplexField& psi, const PhysicalParams& params) {
  if (i == factors.size()) return functional_value(phi, psi.values());
  const auto dir = field_direction(factors[i], psi, params);
  const double dn = vec_norm(dir.values());
  if (dn == 0.0) return {0.0, 0.0};
  const double h = 0.5 * vec_norm(psi.values()) / dn;
  return five_point(
      [&](double e) { return nested_action(phi, factors, i + 1, psi + cplx(e, 0.0) * dir, params); }, h);
}

}  // namespace

cplx evaluate_functional(const CorrelationFunction& cf, const ComplexField& psi) {
  require_matching(cf, psi);
  return functional_value(cf.phi(), psi.values());
}

double evaluate_abs_functional(const CorrelationFunction& cf, const ComplexField& psi) {
  require_matching(cf, psi);
  return abs_functional_value(cf.phi(), psi.values());
}

ComplexField field_direction(SecondQuantizedOp generator, const ComplexField& psi, const PhysicalParams& params) {
  if (psi.grid().dims() != 1) throw InvalidArgument("field forms act on 1D fields");
  const auto& axis = psi.grid().axis(0);
  const double hbar = params.hbar;
  const std::size_t n = axis.size();
  std::vector<cplx> out(n);
  switch (generator) {
    case Op::Qhat:
      return psi;
    case Op::Xhat:
      for (std::size_t j = 0; j < n; ++j) out[j] = axis.x(j) * psi[j];
      break;
    case Op::Kx:
      for (std::size_t j = 0; j < n; ++j) out[j] = axis.x(j) * axis.x(j) * psi[j];
      break;
    case Op::Phat: {
      const auto d = spectral_derivative(psi, 0, 1);
      for (std::size_t j = 0; j < n; ++j) out[j] = cplx(0.0, -hbar) * d[j];
      break;
    }
    case Op::Kp: {
      const auto d = spectral_derivative(psi, 0, 2);
      for (std::size_t j = 0; j < n; ++j) out[j] = -hbar * hbar * d[j];
      break;
    }
    case Op::KD: {
      const auto d = spectral_derivative(psi, 0, 1);
      for (std::size_t j = 0; j < n; ++j) out[j] = cplx(0.0, -hbar) * (axis.x(j) * d[j] + 0.5 * psi[j]);
      break;
    }
    default:
      throw InvalidArgument("field forms exist for generators only");
  }
  return ComplexField(psi.grid(), std::move(out));
}

FunctionalCheck functional_derivative_check(SecondQuantizedOp op, const CorrelationFunction& cf,
                                            const ComplexField& psi, const PhysicalParams& params) {
  params.validate();
  require_matching(cf, psi);
  FunctionalCheck out;
  const auto image = apply_op(op, cf, params);
  out.via_action = functional_value(image.phi(), psi.values());

  double scale = 0.0;
  for (const auto& t : expansion(op)) {
    scale += std::abs(t.coeff) * abs_functional_value(apply_term(t, cf.phi(), params), psi.values());
  }

  if (is_generator(op)) {
    const auto& axis = psi.grid().axis(0);
    double peak = 0.0;
    for (const auto& a : psi.values()) peak = std::max(peak, std::abs(a));
    double h = 1e-6 * peak / axis.dx();
    if (!(h > 0.0) || !std::isfinite(h)) {
      h = 1e-6 / axis.dx();
      out.step_adjusted = true;
    }
    out.step = h;
    const auto f = field_direction(op, psi, params);
    std::vector<cplx> work(psi.values().begin(), psi.values().end());
    cplx sum{0.0, 0.0};
    for (std::size_t j = 0; j < work.size(); ++j) {
      const cplx keep = work[j];
      work[j] = keep + h;
      const cplx plus = functional_value(cf.phi(), work);
      work[j] = keep - h;
      const cplx minus = functional_value(cf.phi(), work);
      work[j] = keep;
      sum += f[j] * (plus - minus) / (2.0 * h);
    }
    out.via_derivative = sum;
  } else {
    cplx sum{0.0, 0.0};
    for (const auto& t : expansion(op)) sum += t.coeff * nested_action(cf.phi(), t.factors, 0, psi, params);
    out.via_derivative = sum;
  }

  const double denom = std::max({std::abs(out.via_action), std::abs(out.via_derivative), scale});
  out.discrepancy = denom > 0.0 ? std::abs(out.via_action - out.via_derivative) / denom : 0.0;
  return out;
}

}  // namespace quncert
