#include "wlab/testfns.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wlab/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

namespace wlab {

namespace {

constexpr int kJet = TestFunction::kMaxOrder + 2;
using Jet = std::array<double, kJet>;

Jet jet_mul(const Jet& a, const Jet& b) {
  Jet c{};
  for (int n = 0; n < kJet; ++n)
    for (int k = 0; k <= n; ++k) c[n] += a[k] * b[n - k];
  return c;
}

Jet jet_recip(const Jet& a) {
  Jet b{};
  b[0] = 1.0 / a[0];
  for (int n = 1; n < kJet; ++n) {
    double s = 0.0;
    for (int k = 1; k <= n; ++k) s += a[k] * b[n - k];
    b[n] = -s * b[0];
  }
  return b;
}

Jet jet_exp(const Jet& a) {
  Jet e{};
  e[0] = std::exp(a[0]);
  for (int n = 1; n < kJet; ++n) {
    double s = 0.0;
    for (int k = 1; k <= n; ++k) s += k * a[k] * e[n - k];
    e[n] = s / n;
  }
  return e;
}

// exp(-1/t) as a Taylor jet around t0 > 0 with linear seed t0 + dt
Jet bump_jet(double t0, double dt) {
  Jet t{};
  t[0] = t0;
  t[1] = dt;
  Jet r = jet_recip(t);
  for (auto& v : r) v = -v;
  return jet_exp(r);
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double binom(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

std::vector<double> poly_derivative(std::vector<double> c, int order) {
  for (int r = 0; r < order; ++r) {
    if (c.size() <= 1) return {};
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * static_cast<double>(k);
    c = std::move(d);
  }
  return c;
}

double horner(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ',';
    s += fmt(v[k]);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view s, std::string_view id) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, v);
  if (s.empty() || res.ec != std::errc() || res.ptr != end)
    throw std::invalid_argument("bad number '" + std::string(s) + "' in function id '" + std::string(id) + "'");
  return v;
}

std::vector<double> to_list(std::string_view s, std::string_view id) {
  std::vector<double> out;
  if (s.empty()) return out;
  for (auto part : split(s, ',')) out.push_back(to_double(part, id));
  return out;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double sampled_value(const Sampled& s, double x) {
  const auto& g = s.grid;
  if (x < g.front() || x > g.back()) return 0.0;
  auto it = std::upper_bound(g.begin(), g.end(), x);
  if (it == g.end()) return s.values.back();
  const std::size_t k = static_cast<std::size_t>(it - g.begin());
  const double t = (x - g[k - 1]) / (g[k] - g[k - 1]);
  return s.values[k - 1] + t * (s.values[k] - s.values[k - 1]);
}

double cutoff_value(const SmoothCutoff& c, double x) {
  const double t = (c.outer - std::abs(x)) / (c.outer - c.inner);
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

}  // namespace

void smooth_step(double t, int n, double* out) {
  for (int k = 0; k <= n; ++k) out[k] = 0.0;
  if (t <= 0.0) return;
  if (t >= 1.0) {
    out[0] = 1.0;
    return;
  }
  const Jet a = bump_jet(t, 1.0);
  const Jet b = bump_jet(1.0 - t, -1.0);
  Jet sum{};
  for (int k = 0; k < kJet; ++k) sum[k] = a[k] + b[k];
  const Jet s = jet_mul(a, jet_recip(sum));
  for (int k = 0; k <= n; ++k) out[k] = s[k] * factorial(k);
}

TestFunction::TestFunction(FunctionKind kind, double scale) : kind_(std::move(kind)), scale_(scale) {
  std::visit(overloaded{
                 [](const Monomial& m) {
                   if (m.degree < 0) throw DomainError("monomial degree must be nonnegative");
                 },
                 [](const Polynomial&) {},
                 [](const GaussianBump& g) {
                   if (!(g.width > 0.0)) throw DomainError("gaussian bump width must be positive");
                 },
                 [](const SmoothCutoff& c) {
                   if (!(c.inner >= 0.0 && c.outer > c.inner)) throw DomainError("cutoff needs 0 <= inner < outer");
                 },
                 [](const ResolventReal& r) {
                   if (r.z.imag() == 0.0) throw DomainError("resolvent test function needs Im z != 0");
                 },
                 [](const ResolventImag& r) {
                   if (r.z.imag() == 0.0) throw DomainError("resolvent test function needs Im z != 0");
                 },
                 [](const Sampled& s) {
                   if (s.grid.size() < 2 || s.grid.size() != s.values.size())
                     throw DomainError("sampled function needs matching grid/values of length >= 2");
                   if (!std::is_sorted(s.grid.begin(), s.grid.end(), std::less_equal<>()) ||
                       std::adjacent_find(s.grid.begin(), s.grid.end()) != s.grid.end())
                     throw DomainError("sampled grid must be strictly increasing");
                 },
             },
             kind_);
}

TestFunction TestFunction::parse(std::string_view id) {
  std::string_view body = id;
  double scale = 1.0;
  if (auto star = body.find('*'); star != std::string_view::npos) {
    scale = to_double(body.substr(0, star), id);
    body = body.substr(star + 1);
  }
  const auto colon = body.find(':');
  const std::string_view name = body.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : body.substr(colon + 1);
  const auto args = split(rest, ':');
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (rest.empty() || args.size() < lo || args.size() > hi)
      throw std::invalid_argument("wrong number of arguments in function id '" + std::string(id) + "'");
  };
  if (name == "zero" && rest.empty()) return TestFunction(Polynomial{}, scale);
  if (name == "monomial") {
    need(1, 1);
    const double d = to_double(args[0], id);
    if (d != std::floor(d) || d < 0 || d > 64) throw std::invalid_argument("bad monomial degree in '" + std::string(id) + "'");
    return TestFunction(Monomial{static_cast<int>(d)}, scale);
  }
  if (name == "poly") {
    need(1, 1);
    return TestFunction(Polynomial{to_list(args[0], id)}, scale);
  }
  if (name == "gauss") {
    need(2, 3);
    GaussianBump g{to_double(args[0], id), to_double(args[1], id), {}};
    if (args.size() == 3) g.poly = to_list(args[2], id);
    return TestFunction(g, scale);
  }
  if (name == "cutoff") {
    need(2, 2);
    return TestFunction(SmoothCutoff{to_double(args[0], id), to_double(args[1], id)}, scale);
  }
  if (name == "resre" || name == "resim") {
    need(2, 2);
    const cplx z(to_double(args[0], id), to_double(args[1], id));
    if (name == "resre") return TestFunction(ResolventReal{z}, scale);
    return TestFunction(ResolventImag{z}, scale);
  }
  if (name == "sampled") {
    need(1, 1);
    const auto parts = split(args[0], '/');
    if (parts.size() != 2) throw std::invalid_argument("sampled id needs 'grid/values' in '" + std::string(id) + "'");
    return TestFunction(Sampled{to_list(parts[0], id), to_list(parts[1], id)}, scale);
  }
  throw std::invalid_argument("unknown function id '" + std::string(id) + "'");
}

std::string TestFunction::id() const {
  std::string base = std::visit(
      overloaded{
          [](const Monomial& m) { return "monomial:" + std::to_string(m.degree); },
          [](const Polynomial& p) { return p.coeffs.empty() ? std::string("zero") : "poly:" + join(p.coeffs); },
          [](const GaussianBump& g) {
            std::string s = "gauss:" + fmt(g.center) + ":" + fmt(g.width);
            if (!g.poly.empty()) s += ":" + join(g.poly);
            return s;
          },
          [](const SmoothCutoff& c) { return "cutoff:" + fmt(c.inner) + ":" + fmt(c.outer); },
          [](const ResolventReal& r) { return "resre:" + fmt(r.z.real()) + ":" + fmt(r.z.imag()); },
          [](const ResolventImag& r) { return "resim:" + fmt(r.z.real()) + ":" + fmt(r.z.imag()); },
          [](const Sampled& s) { return "sampled:" + join(s.grid) + "/" + join(s.values); },
      },
      kind_);
  if (scale_ != 1.0) base = fmt(scale_) + "*" + base;
  return base;
}

int TestFunction::max_derivative_order() const {
  return std::holds_alternative<Sampled>(kind_) ? 0 : kMaxOrder;
}

std::optional<Interval> TestFunction::support_hint() const {
  if (const auto* c = std::get_if<SmoothCutoff>(&kind_)) return Interval{-c->outer, c->outer};
  if (const auto* s = std::get_if<Sampled>(&kind_)) return Interval{s->grid.front(), s->grid.back()};
  if (is_zero()) return Interval{0.0, 0.0};
  return std::nullopt;
}

bool TestFunction::is_zero() const {
  if (scale_ == 0.0) return true;
  if (const auto* p = std::get_if<Polynomial>(&kind_))
    return std::all_of(p->coeffs.begin(), p->coeffs.end(), [](double c) { return c == 0.0; });
  if (const auto* g = std::get_if<GaussianBump>(&kind_))
    return !g->poly.empty() && std::all_of(g->poly.begin(), g->poly.end(), [](double c) { return c == 0.0; });
  if (const auto* s = std::get_if<Sampled>(&kind_))
    return std::all_of(s->values.begin(), s->values.end(), [](double c) { return c == 0.0; });
  return false;
}

bool TestFunction::integrable() const {
  if (is_zero()) return true;
  return !std::holds_alternative<Monomial>(kind_) && !std::holds_alternative<Polynomial>(kind_);
}

std::optional<std::vector<double>> TestFunction::polynomial() const {
  std::vector<double> c;
  if (const auto* m = std::get_if<Monomial>(&kind_)) {
    c.assign(static_cast<std::size_t>(m->degree) + 1, 0.0);
    c.back() = 1.0;
  } else if (const auto* p = std::get_if<Polynomial>(&kind_)) {
    c = p->coeffs;
  } else {
    return std::nullopt;
  }
  for (auto& v : c) v *= scale_;
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  return c;
}

std::optional<double> TestFunction::effective_radius() const {
  if (is_zero()) return 0.0;
  if (const auto* g = std::get_if<GaussianBump>(&kind_))
    return std::abs(g->center) + g->width * (12.0 + static_cast<double>(g->poly.size()));
  if (const auto* c = std::get_if<SmoothCutoff>(&kind_)) return c->outer;
  if (const auto* s = std::get_if<Sampled>(&kind_)) return std::max(std::abs(s->grid.front()), std::abs(s->grid.back()));
  return std::nullopt;
}

std::vector<double> TestFunction::derivatives(double x, int n) const {
  if (n < 0) throw DomainError("negative derivative order");
  if (n > max_derivative_order())
    throw DomainError("derivative order " + std::to_string(n) + " unavailable for " + id());
  std::vector<double> d(static_cast<std::size_t>(n) + 1, 0.0);
  std::visit(overloaded{
                 [&](const Monomial& m) {
                   for (int k = 0; k <= n && k <= m.degree; ++k)
                     d[k] = factorial(m.degree) / factorial(m.degree - k) * std::pow(x, m.degree - k);
                 },
                 [&](const Polynomial& p) {
                   for (int k = 0; k <= n; ++k) d[k] = horner(poly_derivative(p.coeffs, k), x);
                 },
                 [&](const GaussianBump& g) {
                   const double u = (x - g.center) / g.width;
                   const double base = std::exp(-0.5 * u * u);
                   // G^(k) = (-1/w)^k He_k(u) G
                   std::vector<double> gk(static_cast<std::size_t>(n) + 1);
                   double he_prev = 1.0, he = u;
                   for (int k = 0; k <= n; ++k) {
                     double hek;
                     if (k == 0) {
                       hek = 1.0;
                     } else if (k == 1) {
                       hek = u;
                     } else {
                       const double next = u * he - (k - 1) * he_prev;
                       he_prev = he;
                       he = next;
                       hek = he;
                     }
                     gk[k] = std::pow(-1.0 / g.width, k) * hek * base;
                   }
                   if (g.poly.empty()) {
                     d = gk;
                     return;
                   }
                   std::vector<double> pk(static_cast<std::size_t>(n) + 1);
                   for (int k = 0; k <= n; ++k) pk[k] = horner(poly_derivative(g.poly, k), x);
                   for (int k = 0; k <= n; ++k)
                     for (int m = 0; m <= k; ++m) d[k] += binom(k, m) * pk[k - m] * gk[m];
                 },
                 [&](const SmoothCutoff& c) {
                   const double w = c.outer - c.inner;
                   const double t = (c.outer - std::abs(x)) / w;
                   std::array<double, kJet> s{};
                   smooth_step(t, n, s.data());
                   // d/dx = -sign(x)/w d/dt
                   const double dtdx = x >= 0.0 ? -1.0 / w : 1.0 / w;
                   double f = 1.0;
                   for (int k = 0; k <= n; ++k) {
                     d[k] = s[k] * f;
                     f *= dtdx;
                   }
                 },
                 [&](const ResolventReal& r) {
                   const cplx inv = 1.0 / (x - r.z);
                   cplx p = inv;
                   for (int k = 0; k <= n; ++k) {
                     d[k] = p.real();
                     p *= -static_cast<double>(k + 1) * inv;
                   }
                 },
                 [&](const ResolventImag& r) {
                   const cplx inv = 1.0 / (x - r.z);
                   cplx p = inv;
                   for (int k = 0; k <= n; ++k) {
                     d[k] = p.imag();
                     p *= -static_cast<double>(k + 1) * inv;
                   }
                 },
                 [&](const Sampled& s) { d[0] = sampled_value(s, x); },
             },
             kind_);
  for (auto& v : d) v *= scale_;
  return d;
}

double TestFunction::evaluate(double x, int order) const {
  if (order == 0) {
    // fast paths for plain evaluation
    if (const auto* c = std::get_if<SmoothCutoff>(&kind_)) return scale_ * cutoff_value(*c, x);
    if (const auto* s = std::get_if<Sampled>(&kind_)) return scale_ * sampled_value(*s, x);
  }
  if (order > max_derivative_order())
    throw DomainError("derivative order " + std::to_string(order) + " unavailable for " + id());
  return derivatives(x, order)[static_cast<std::size_t>(order)];
}

// ---------------------------------------------------------------- Fourier

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

cplx gaussian_ft(const GaussianBump& g, double k) {
  const double w = g.width;
  const cplx base = w * std::exp(cplx(-0.5 * w * w * k * k, -k * g.center));
  if (g.poly.empty()) return base;
  // d^n/dk^n exp(q) = H_n(k) exp(q), H_{n+1} = H_n' + q' H_n, q' = -i c - w^2 k
  const cplx a(0.0, -g.center);
  const double b = -w * w;
  std::vector<cplx> h{cplx(1.0)};
  cplx total = g.poly[0];
  cplx in(1.0);
  for (std::size_t n = 1; n < g.poly.size(); ++n) {
    std::vector<cplx> next(h.size() + 1, cplx(0.0));
    for (std::size_t t = 1; t < h.size(); ++t) next[t - 1] += static_cast<double>(t) * h[t];
    for (std::size_t t = 0; t < h.size(); ++t) {
      next[t] += a * h[t];
      next[t + 1] += b * h[t];
    }
    h = std::move(next);
    in *= cplx(0.0, 1.0);
    cplx hv(0.0);
    for (auto it = h.rbegin(); it != h.rend(); ++it) hv = hv * k + *it;
    total += g.poly[n] * in * hv;
  }
  return total * base;
}

cplx cutoff_ft(const SmoothCutoff& c, double k, double tol) {
  if (std::abs(k) > 16.0) {
    // Six integrations by parts: F(k) = FT[h^(6)](k) / (ik)^6. The quadrature error is then
    // divided by k^6, which keeps the far tail usable in the Sobolev integral.
    constexpr int m = 6;
    const TestFunction h(c);
    const double w = c.outer - c.inner;
    const auto pieces = static_cast<int>(std::ceil(2.0 * std::abs(k) * w / std::numbers::pi)) + 32;
    const double step = w / pieces;
    double acc = 0.0;
    for (int t = 0; t < pieces; ++t) {
      const double a = c.inner + t * step;
      acc += boost::math::quadrature::gauss<double, 20>::integrate(
          [&](double x) { return h.evaluate(x, m) * std::cos(k * x); }, a, a + step);
    }
    return 2.0 * kInvSqrt2Pi * acc / std::pow(k, m) * (m % 4 == 0 ? 1.0 : -1.0);
  }
  // even function: 2/sqrt(2 pi) * integral_0^outer h(x) cos(kx) dx
  const double plateau = std::abs(k) < 1e-12 ? c.inner : std::sin(k * c.inner) / k;
  const double ramp =
      integrate([&](double x) { return cutoff_value(c, x) * std::cos(k * x); }, c.inner, c.outer, tol, 25).value;
  return 2.0 * kInvSqrt2Pi * (plateau + ramp);
}

cplx sampled_ft(const Sampled& s, double k) {
  cplx total(0.0);
  for (std::size_t t = 0; t + 1 < s.grid.size(); ++t) {
    const double a = s.grid[t];
    const double h = s.grid[t + 1] - a;
    const double va = s.values[t];
    const double dv = s.values[t + 1] - va;
    const double kh = k * h;
    cplx i0, i1;
    if (std::abs(kh) < 0.05) {
      // Taylor series of the segment integrals
      cplx term(1.0);
      i0 = i1 = 0.0;
      for (int n = 0; n < 12; ++n) {
        i0 += term / factorial(n + 1);
        i1 += term / (factorial(n) * (n + 2));
        term *= cplx(0.0, -kh);
      }
      i0 *= h;
      i1 *= h * h;
    } else {
      const cplx e = std::exp(cplx(0.0, -kh));
      i0 = (1.0 - e) / cplx(0.0, k);
      i1 = (e * cplx(1.0, kh) - 1.0) / (k * k);
    }
    total += std::exp(cplx(0.0, -k * a)) * (va * i0 + dv / h * i1);
  }
  return kInvSqrt2Pi * total;
}

}  // namespace

cplx fourier_transform(const TestFunction& f, double k, double tol) {
  if (f.is_zero()) return 0.0;
  if (!f.integrable()) throw DomainError("fourier transform undefined for non-integrable " + f.id());
  const cplx v = std::visit(
      overloaded{
          [&](const GaussianBump& g) { return gaussian_ft(g, k); },
          [&](const SmoothCutoff& c) { return cutoff_ft(c, k, tol); },
          [&](const ResolventImag& r) {
            const double y = r.z.imag();
            const double sg = y > 0 ? 1.0 : -1.0;
            return sg * std::sqrt(std::numbers::pi / 2) * std::exp(cplx(-std::abs(k) * std::abs(y), -k * r.z.real()));
          },
          [&](const ResolventReal& r) {
            const double y = r.z.imag();
            const double sk = k > 0 ? 1.0 : (k < 0 ? -1.0 : 0.0);
            return cplx(0.0, -sk) * std::sqrt(std::numbers::pi / 2) *
                   std::exp(cplx(-std::abs(k) * std::abs(y), -k * r.z.real()));
          },
          [&](const Sampled& s) { return sampled_ft(s, k); },
          [&](const auto&) -> cplx { throw DomainError("fourier transform undefined"); },
      },
      f.kind());
  return f.scale() * v;
}

// ---------------------------------------------------------------- norms

namespace {

// Supremum of s with f in H_s (infinity for smooth, rapidly decaying kinds).
double sobolev_limit(const TestFunction& f) {
  if (const auto* s = std::get_if<Sampled>(&f.kind())) {
    if (s->values.front() != 0.0 || s->values.back() != 0.0) return 0.5;
    return 1.5;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

NormEstimate sobolev_norm(const TestFunction& f, double s) {
  if (!(s > 0.5)) throw DomainError("sobolev index must exceed 1/2");
  if (f.is_zero()) return {};
  if (!f.integrable()) throw DomainError("sobolev norm undefined for non-integrable " + f.id());
  const double limit = sobolev_limit(f);
  if (s >= limit)
    throw NotInSpaceError(f.id() + " is not in H_s for s = " + fmt(s) + " (limit " + fmt(limit) + ")", 0.0);

  auto integrand = [&](double k) {
    const double a = std::abs(fourier_transform(f, k, 1e-13));
    if (a == 0.0) return 0.0;
    return std::exp(2.0 * s * std::log1p(2.0 * k) + 2.0 * std::log(a));
  };
  double k0 = 1.0;
  if (const auto* g = std::get_if<GaussianBump>(&f.kind())) k0 = 1.0 / g->width;
  if (const auto* c = std::get_if<SmoothCutoff>(&f.kind())) k0 = 1.0 / (c->outer - c->inner);
  if (const auto* r = std::get_if<ResolventImag>(&f.kind())) k0 = 1.0 / std::abs(r->z.imag());
  if (const auto* r = std::get_if<ResolventReal>(&f.kind())) k0 = 1.0 / std::abs(r->z.imag());

  double total = 0.0, err = 0.0, prev = -1.0, tail = 0.0;
  int shrinking = 0;
  double a = 0.0, b = k0;
  for (int panel = 0; panel < 200; ++panel) {
    const auto r = integrate(integrand, a, b, 1e-12, 12);
    total += r.value;
    err += r.error;
    const double c = r.value;
    if (prev > 0.0 && c < prev) {
      ++shrinking;
    } else if (prev >= 0.0) {
      shrinking = 0;
    }
    if (c <= 1e-15 * total && panel > 2) break;
    if (shrinking >= 3 && prev > 0.0) {
      const double ratio = c / prev;
      tail = c * ratio / (1.0 - ratio);
      if (tail <= 1e-9 * total) break;
    }
    prev = c;
    a = b;
    b *= 2.0;
    if (panel == 199) throw NotInSpaceError("sobolev integral did not converge for " + f.id(), std::sqrt(total));
  }
  total += tail;
  err += tail;
  NormEstimate out;
  out.value = std::sqrt(2.0 * total);
  out.error = out.value > 0.0 ? err / out.value : 0.0;
  return out;
}

double cn_norm(const TestFunction& f, int n, double L) {
  if (n > f.max_derivative_order()) throw DomainError("derivative order unavailable for " + f.id());
  const int pts = 4001;
  double best = 0.0;
  for (int t = 0; t < pts; ++t) {
    const double x = -L + 2.0 * L * t / (pts - 1);
    const auto d = f.derivatives(x, n);
    for (double v : d) best = std::max(best, std::abs(v));
  }
  return best;
}

namespace {

// Decay exponent p with |f^(k)(x)| ~ |x|^-p at infinity; +inf for compact/rapid decay.
double decay_exponent(const TestFunction& f, int k) {
  if (std::holds_alternative<ResolventReal>(f.kind())) return k + 1.0;
  if (std::holds_alternative<ResolventImag>(f.kind())) return k + 2.0;
  return std::numeric_limits<double>::infinity();
}

double weighted_l1(const TestFunction& f, int n, int weight_power) {
  if (f.is_zero()) return 0.0;
  if (!f.integrable()) return std::numeric_limits<double>::infinity();
  if (n > f.max_derivative_order()) throw DomainError("derivative order unavailable for " + f.id());
  double best = 0.0;
  for (int k = 0; k <= n; ++k) {
    if (decay_exponent(f, k) - weight_power <= 1.0) return std::numeric_limits<double>::infinity();
    auto g = [&](double x) {
      const double w = weight_power ? std::abs(x) + 1.0 : 1.0;
      return w * std::abs(f.evaluate(x, k));
    };
    double v = 0.0;
    if (auto r = f.effective_radius()) {
      const double c = std::holds_alternative<GaussianBump>(f.kind()) ? std::get<GaussianBump>(f.kind()).center : 0.0;
      const double lo = std::holds_alternative<GaussianBump>(f.kind()) ? c - (*r - std::abs(c)) : -*r;
      const double hi = std::holds_alternative<GaussianBump>(f.kind()) ? c + (*r - std::abs(c)) : *r;
      std::vector<double> cuts{lo, hi};
      if (const auto* s = std::get_if<Sampled>(&f.kind())) cuts = s->grid;
      if (const auto* cut = std::get_if<SmoothCutoff>(&f.kind())) cuts = {-cut->outer, -cut->inner, 0.0, cut->inner, cut->outer};
      for (std::size_t t = 0; t + 1 < cuts.size(); ++t) v += integrate(g, cuts[t], cuts[t + 1], 1e-11, 20).value;
    } else {
      double x0 = 0.0;
      if (const auto* r2 = std::get_if<ResolventReal>(&f.kind())) x0 = r2->z.real();
      if (const auto* r2 = std::get_if<ResolventImag>(&f.kind())) x0 = r2->z.real();
      const double inf = std::numeric_limits<double>::infinity();
      v = integrate(g, -inf, x0, 1e-11, 20).value + integrate(g, x0, inf, 1e-11, 20).value;
    }
    best = std::max(best, v);
  }
  return best;
}

}  // namespace

double l1n_norm(const TestFunction& f, int n) { return weighted_l1(f, n, 0); }
double l1n_plus_norm(const TestFunction& f, int n) { return weighted_l1(f, n, 1); }

FunctionNorms function_norms(const TestFunction& f, double s, int n, double L) {
  FunctionNorms out;
  out.sobolev_s = sobolev_norm(f, s).value;
  out.cn = cn_norm(f, n, L);
  out.l1n = l1n_norm(f, n);
  out.l1n_plus = l1n_plus_norm(f, n);
  return out;
}

// ---------------------------------------------------------------- HS extension

Extension hs_extension(const double* d, int l, double y) {
  Extension e{};
  const double ay = std::abs(y);
  if (ay >= 1.0) return e;
  // sigma(y) = 1 on |y| <= 1/2, 0 for |y| >= 1
  double st[2];
  smooth_step(2.0 * (1.0 - ay), 1, st);
  const double sig = st[0];
  const double dsig = -2.0 * st[1] * (y >= 0.0 ? 1.0 : -1.0);
  cplx sum(0.0), iy_n(1.0);
  const cplx iy(0.0, y);
  double fact = 1.0;
  for (int n = 0; n <= l; ++n) {
    if (n > 0) {
      iy_n *= iy;
      fact *= n;
    }
    sum += d[n] * iy_n / fact;
  }
  e.ftilde = sum * sig;
  e.dbar = 0.5 * sum * cplx(0.0, 1.0) * dsig + 0.5 * d[l + 1] * iy_n * sig / fact;
  return e;
}

Extension hs_extension(const TestFunction& f, int l, cplx z) {
  if (l < 0 || l + 1 > f.max_derivative_order())
    throw DomainError("extension of order " + std::to_string(l) + " needs derivatives unavailable for " + f.id());
  const auto d = f.derivatives(z.real(), l + 1);
  return hs_extension(d.data(), l, z.imag());
}

}  // namespace wlab
