#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "wlab/quadrature.hpp"
#include "wlab/semicircle.hpp"
#include "wlab/testfns.hpp"

using namespace wlab;

namespace {

// E eta^k for eta ~ semicircle(sigma): Catalan numbers times sigma^k.
double semicircle_moment(int k, double sigma) {
  if (k % 2) return 0.0;
  const int m = k / 2;
  double c = 1.0;
  for (int j = 0; j < m; ++j) c = c * 2.0 * (2.0 * j + 1.0) / (j + 2.0);
  return c * std::pow(sigma, k);
}

EntryFunctionals catalan_functionals(const std::vector<double>& c, double s) {
  EntryFunctionals out;
  double mean = 0.0, second = 0.0;
  for (std::size_t n = 0; n < c.size(); ++n) {
    const int k = static_cast<int>(n);
    mean += c[n] * semicircle_moment(k, s);
    out.alpha += c[n] * semicircle_moment(k + 1, s) / s;
    out.beta += c[n] * (semicircle_moment(k + 2, s) - s * s * semicircle_moment(k, s)) / (s * s);
    for (std::size_t m = 0; m < c.size(); ++m) second += c[n] * c[m] * semicircle_moment(k + static_cast<int>(m), s);
  }
  out.mean = mean;
  out.omega2 = second - mean * mean;
  return out;
}

const std::vector<const char*> kCatalog = {"monomial:1", "monomial:2",   "monomial:3",         "monomial:4",
                                           "poly:1,-2,0.5,0.25", "gauss:0:1", "gauss:0.5:0.7:1,2", "cutoff:0.5:1",
                                           "resre:0.3:1",        "resim:-0.2:0.5", "2.5*gauss:0:0.8"};

}  // namespace

TEST_SUITE("semicircle") {
  TEST_CASE("density values and normalization") {
    const SemicircleParams p(1.0);
    CHECK(density(0.0, p) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
    CHECK(density(2.0, p) == 0.0);
    CHECK(density(1.0, p) == doctest::Approx(std::sqrt(3.0) / (2 * std::numbers::pi)).epsilon(1e-14));
    CHECK(density(5.0, p) == 0.0);
    for (double s : {0.5, 1.0, 2.3}) {
      const SemicircleParams q(s);
      const double mass = integrate([&](double x) { return density(x, q); }, -2 * s, 2 * s, 1e-13).value;
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK_THROWS_AS(SemicircleParams(0.0), DomainError);
  }

  TEST_CASE("Stieltjes transform closed forms") {
    const SemicircleParams p(1.0);
    const cplx g3 = stieltjes(3.0, p);
    CHECK(std::abs(g3 - (3.0 - std::sqrt(5.0)) / 2.0) <= 1e-12);
    const cplx g2i = stieltjes(cplx(0, 2), p);
    CHECK(std::abs(g2i - cplx(0, 1.0 - std::sqrt(2.0))) <= 1e-12);
    const cplx big = stieltjes(1e6, p);
    CHECK(std::abs(big * 1e6 - 1.0) <= 1e-11);
    CHECK(std::abs(stieltjes(-3.0, p) + g3) <= 1e-12);
    CHECK_THROWS_AS(stieltjes(1.5, p), DomainError);
    CHECK_THROWS_AS(stieltjes(-2.0, p), DomainError);
  }

  TEST_CASE("Stieltjes quadratic residual, branch and scaling on a grid") {
    for (double s : {1.0, 0.7, 1.9}) {
      const SemicircleParams p(s);
      int count = 0;
      for (int a = 0; a < 10; ++a)
        for (int b = 0; b < 10; ++b) {
          cplx z(-5.0 + a * 1.1, -3.0 + b * 0.65 + 0.01);
          const cplx g = stieltjes(z, p);
          CHECK(std::abs(s * s * g * g - z * g + 1.0) <= 1e-12 * std::max(1.0, std::abs(z * g)));
          if (z.imag() != 0.0) CHECK(g.imag() * z.imag() < 0.0);
          // g_sigma(z) = g_1(z / sigma) / sigma
          CHECK(std::abs(g - stieltjes(z / s, SemicircleParams(1.0)) / s) <= 1e-12);
          ++count;
        }
      CHECK(count == 100);
    }
  }

  TEST_CASE("Stieltjes transform matches direct quadrature") {
    const SemicircleParams p(1.0);
    for (cplx z : {cplx(0, 1), cplx(2.5, 0.3), cplx(-1, -0.5), cplx(4, 0)}) {
      const auto v = semicircle_expect(
          [&](double x) {
            const cplx r = 1.0 / (z - x);
            return std::array<double, 2>{r.real(), r.imag()};
          },
          2, 1.0);
      CHECK(std::abs(stieltjes(z, p) - cplx(v[0], v[1])) <= 1e-10);
    }
  }

  TEST_CASE("derivative of the Stieltjes transform") {
    const SemicircleParams p(1.3);
    for (cplx z : {cplx(3, 0), cplx(0.4, 1.1), cplx(-2, -0.7)}) {
      const double h = 1e-5;
      const cplx fd = (stieltjes(z + h, p) - stieltjes(z - h, p)) / (2 * h);
      CHECK(std::abs(stieltjes_derivative(z, p) - fd) <= 1e-8);
    }
  }

  TEST_CASE("entry functionals of monomials") {
    const SemicircleParams p(1.0);
    const auto f1 = entry_functionals(TestFunction::parse("monomial:1"), p);
    const auto f2 = entry_functionals(TestFunction::parse("monomial:2"), p);
    const auto f3 = entry_functionals(TestFunction::parse("monomial:3"), p);
    CHECK(std::abs(f1.alpha - 1) <= 1e-12);
    CHECK(std::abs(f1.beta) <= 1e-12);
    CHECK(std::abs(f1.omega2 - 1) <= 1e-12);
    CHECK(std::abs(f2.alpha) <= 1e-12);
    CHECK(std::abs(f2.beta - 1) <= 1e-12);
    CHECK(std::abs(f2.omega2 - 1) <= 1e-12);
    CHECK(std::abs(f3.alpha - 2) <= 1e-12);
    CHECK(std::abs(f3.beta) <= 1e-12);
    CHECK(std::abs(f3.omega2 - 5) <= 1e-12);
  }

  TEST_CASE("entry functionals of polynomials against Catalan moments") {
    for (double s : {1.0, 0.6, 1.7}) {
      const std::vector<double> c{0.3, -1.0, 0.75, 0.5, -0.2, 0.1};
      const auto got = entry_functionals(TestFunction(Polynomial{c}), SemicircleParams(s));
      const auto ref = catalan_functionals(c, s);
      const double scale = std::max(1.0, ref.omega2);
      CHECK(std::abs(got.alpha - ref.alpha) <= 1e-12 * scale);
      CHECK(std::abs(got.beta - ref.beta) <= 1e-12 * scale);
      CHECK(std::abs(got.omega2 - ref.omega2) <= 1e-12 * scale);
      CHECK(std::abs(got.mean - ref.mean) <= 1e-12 * scale);
    }
  }

  TEST_CASE("functional invariants over the catalog") {
    const SemicircleParams p(1.0);
    const SemicircleRule rule(2000, 1.0);
    for (const std::string id : kCatalog) {
      CAPTURE(id);
      const TestFunction f = TestFunction::parse(id);
      const auto fn = entry_functionals(f, p);
      CHECK(fn.omega2 >= 0.0);
      CHECK(fn.omega2 - fn.alpha * fn.alpha >= -1e-12);
      CHECK(fn.omega2 - fn.alpha * fn.alpha - fn.beta * fn.beta >= -1e-12);
      // double-integral form: omega^2 = (1/2) E (f(x) - f(y))^2 over independent x, y
      std::vector<double> fx(rule.nodes.size());
      for (std::size_t a = 0; a < fx.size(); ++a) fx[a] = f(rule.nodes[a]);
      double dbl = 0.0;
      for (std::size_t a = 0; a < fx.size(); ++a)
        for (std::size_t b = 0; b < fx.size(); ++b) dbl += 0.5 * rule.weights[a] * rule.weights[b] * (fx[a] - fx[b]) * (fx[a] - fx[b]);
      CHECK(std::abs(dbl - fn.omega2) <= 1e-8 * std::max(1.0, fn.omega2));
      const auto scaled = entry_functionals(f.scaled(-2.5), p);
      CHECK(std::abs(scaled.alpha + 2.5 * fn.alpha) <= 1e-10 * std::max(1.0, std::abs(fn.alpha)));
      CHECK(std::abs(scaled.omega2 - 6.25 * fn.omega2) <= 1e-10 * std::max(1.0, fn.omega2));
    }
  }

  TEST_CASE("prediction examples") {
    const SemicircleParams p(1.0);
    const auto x = predict_entry_fluctuation(TestFunction::parse("monomial:1"), p, 0.0, Symmetry::RealSymmetric, true);
    CHECK(std::abs(x.limit_variance) <= 1e-12);
    CHECK(std::abs(x.coeff_w - 1.0) <= 1e-12);
    const auto rad = predict_entry_fluctuation(TestFunction::parse("monomial:2"), p, -2.0, Symmetry::RealSymmetric, true);
    CHECK(std::abs(rad.limit_variance) <= 1e-12);
    const auto cube = predict_entry_fluctuation(TestFunction::parse("monomial:3"), p, 0.0, Symmetry::RealSymmetric, false);
    CHECK(std::abs(cube.limit_variance - 1.0) <= 1e-12);
    CHECK(std::abs(cube.coeff_w - 2.0) <= 1e-12);
    // diag Hermitian with the Rademacher-like floor kappa4 = -sigma^4
    const auto herm = predict_entry_fluctuation(TestFunction::parse("monomial:2"), p, -1.0, Symmetry::Hermitian, true);
    CHECK(std::abs(herm.limit_variance) <= 1e-12);
    CHECK_THROWS_AS(
        predict_entry_fluctuation(TestFunction::parse("monomial:2"), p, -3.0, Symmetry::RealSymmetric, true),
        DomainError);
  }

  TEST_CASE("GOE and GUE consistency identities") {
    for (double s : {1.0, 1.4}) {
      const SemicircleParams p(s);
      for (const char* id : kCatalog) {
        CAPTURE(id);
        const TestFunction f = TestFunction::parse(id);
        const auto fn = entry_functionals(f, p);
        const auto off = predict_entry_fluctuation(fn, p, 0.0, Symmetry::RealSymmetric, false);
        const auto dg = predict_entry_fluctuation(fn, p, 0.0, Symmetry::RealSymmetric, true);
        const auto hoff = predict_entry_fluctuation(fn, p, 0.0, Symmetry::Hermitian, false);
        const auto hdg = predict_entry_fluctuation(fn, p, 0.0, Symmetry::Hermitian, true);
        const double a2 = fn.alpha * fn.alpha, scale = std::max(1.0, fn.omega2);
        CHECK(std::abs(off.limit_variance + a2 - fn.omega2) <= 1e-12 * scale);
        CHECK(std::abs(dg.limit_variance + 2 * a2 - 2 * fn.omega2) <= 1e-12 * scale);
        CHECK(std::abs(hoff.limit_variance + a2 - fn.omega2) <= 1e-12 * scale);
        CHECK(std::abs(hdg.limit_variance + a2 - fn.omega2) <= 1e-12 * scale);
        CHECK(std::abs(off.coeff_w - fn.alpha / s) <= 1e-15 * scale);
      }
    }
  }

  TEST_CASE("phi closed forms") {
    const SemicircleParams p(1.0);
    CHECK(std::abs(phi(3.0, 3.0, p) - 0.1708204) <= 1e-6);
    CHECK(std::abs(phi(3.0, 4.0, p) - 0.1140168) <= 1e-6);
    const double g3 = (3 - std::sqrt(5.0)) / 2, g4 = 2 - std::sqrt(3.0);
    CHECK(std::abs(phi(3.0, 4.0, p) - (g3 - g4)) <= 1e-12);
    CHECK(std::abs(phi_kernels(3.0, 3.0, p).phi_pm) <= 1e-15);
    // continuity across the derivative switch
    const cplx z(0.3, 1.2);
    CHECK(std::abs(phi(z, z + cplx(1e-7, 0), p) - phi(z, z + cplx(2e-6, 0), p)) <= 1e-5);
    CHECK_THROWS_AS(phi(1.0, 3.0, p), DomainError);
  }

  TEST_CASE("phi kernels: closed form versus quadrature on 20 pairs") {
    const SemicircleParams p(1.0);
    const std::vector<cplx> pts{{0, 2}, {0.5, 1}, {-1.2, 0.6}, {3, 0}, {-2.5, 0}, {1, -0.8}, {0.1, 0.3}};
    int pairs = 0;
    for (std::size_t a = 0; a < pts.size() && pairs < 20; ++a)
      for (std::size_t b = a; b < pts.size() && pairs < 20; ++b, ++pairs) {
        const auto cf = phi_kernels(pts[a], pts[b], p);
        const auto qd = phi_kernels_quadrature(pts[a], pts[b], p);
        CHECK(std::abs(cf.phi - qd.phi) <= 1e-8);
        CHECK(std::abs(cf.phi_pp - qd.phi_pp) <= 1e-8);
        CHECK(std::abs(cf.phi_mm - qd.phi_mm) <= 1e-8);
        CHECK(std::abs(cf.phi_pm - qd.phi_pm) <= 1e-8);
        const auto sw = phi_kernels(pts[b], pts[a], p);
        CHECK(std::abs(cf.phi_pp - sw.phi_pp) <= 1e-12);
        CHECK(std::abs(cf.phi_mm - sw.phi_mm) <= 1e-12);
      }
    CHECK(pairs == 20);
  }

  TEST_CASE("field covariance examples") {
    const SemicircleParams p(1.0);
    const cplx z(0, 2);
    const auto off = predict_field_covariance(z, z, p, 0.0, Symmetry::RealSymmetric, {1, 2});
    CHECK(std::abs(off.re_re - phi_kernels_quadrature(z, z, p).phi_pp) <= 1e-8);
    const auto dg = predict_field_covariance(3.0, 3.0, p, 0.0, Symmetry::RealSymmetric, {1, 1});
    CHECK(std::abs(dg.im_im) <= 1e-15);
    const auto herm = predict_field_covariance(cplx(0.4, 1.5), cplx(0.4, 1.5), p, 0.0, Symmetry::Hermitian, {1, 2});
    CHECK(std::abs(herm.re_im) <= 1e-15);
    // the fourth cumulant enters only on the diagonal
    const auto k0 = predict_field_covariance(z, z, p, 0.0, Symmetry::RealSymmetric, {1, 1});
    const auto k2 = predict_field_covariance(z, z, p, -2.0, Symmetry::RealSymmetric, {1, 1});
    const cplx g = stieltjes(z, p);
    CHECK(std::abs(k2.im_im - k0.im_im + 2.0 * g.imag() * g.imag()) <= 1e-14);
    const auto o2 = predict_field_covariance(z, z, p, -2.0, Symmetry::RealSymmetric, {1, 2});
    CHECK(o2.re_re == off.re_re);
  }
}
