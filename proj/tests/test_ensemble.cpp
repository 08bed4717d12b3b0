#include <cmath>
#include <numbers>
#include <vector>

#include <omp.h>

#include "doctest.h"
#include "wlab/ensemble.hpp"
#include "wlab/experiments.hpp"
#include "wlab/stats.hpp"

using namespace wlab;

namespace {

// int_{|x| >= c} x^4 phi(x) dx for a standard normal.
double gaussian_tail4(double c) {
  const double phi = std::exp(-0.5 * c * c) / std::sqrt(2 * std::numbers::pi);
  return 2.0 * ((c * c * c + 3 * c) * phi + 3.0 * 0.5 * std::erfc(c / std::sqrt(2.0)));
}

EnsembleProfile row1_rademacher(std::size_t n) {
  auto p = EnsembleProfile::goe(n);
  p.row_laws.push_back({1, EntryLaw::rademacher()});
  return p;
}

}  // namespace

TEST_SUITE("ensemble") {
  TEST_CASE("entry laws are standardized") {
    for (const auto& law : {EntryLaw::gaussian(), EntryLaw::rademacher(), EntryLaw::uniform(), EntryLaw::two_point(0.3),
                            EntryLaw::student(7.0)}) {
      CAPTURE(law.id());
      CHECK(std::abs(law.expect([](double x) { return x; })) <= 1e-9);
      CHECK(law.expect([](double x) { return x * x; }) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(law.expect([](double x) { return x * x * x * x; }) == doctest::Approx(law.fourth_moment()).epsilon(1e-7));
      CHECK(EntryLaw::parse(law.id()) == law);
    }
    CHECK(EntryLaw::gaussian().fourth_moment() == doctest::Approx(3.0));
    CHECK(EntryLaw::rademacher().fourth_moment() == doctest::Approx(1.0));
    CHECK(EntryLaw::uniform().fourth_moment() == doctest::Approx(1.8));
    CHECK(EntryLaw::gaussian().complex_fourth_moment() == doctest::Approx(2.0));
    CHECK_THROWS(EntryLaw::student(4.0));
    CHECK_THROWS(EntryLaw::parse("cauchy"));
  }

  TEST_CASE("empirical moments match exact moments within 4 standard errors") {
    for (const auto& law : {EntryLaw::gaussian(), EntryLaw::rademacher(), EntryLaw::uniform(), EntryLaw::two_point(0.3),
                            EntryLaw::student(9.0)}) {
      CAPTURE(law.id());
      MomentAccumulator x, x2, x4;
      EntryStream s(314, 0, 1, 2);
      for (int k = 0; k < 100000; ++k) {
        const double v = law.draw(s);
        x.push(v);
        x2.push(v * v);
        x4.push(v * v * v * v);
      }
      CHECK(std::abs(x.mean()) <= 4 * x.mean_stderr());
      CHECK(std::abs(x2.mean() - 1.0) <= 4 * x2.mean_stderr());
      CHECK(std::abs(x4.mean() - law.fourth_moment()) <= 4 * x4.mean_stderr());
    }
  }

  TEST_CASE("sample examples and symmetry") {
    EnsembleProfile one = EnsembleProfile::goe(1);
    one.diag_law = EntryLaw::rademacher();
    one.diag_sigma1 = 1.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const double w = sample<double>(one, seed)(0, 0);
      CHECK((w == 1.0 || w == -1.0));
    }
    const auto w = sample<double>(EnsembleProfile::goe(40), 3);
    CHECK(w == w.transpose());
    const auto h = sample<cplx>(EnsembleProfile::gue(40), 3);
    CHECK(h == h.adjoint());
    for (int i = 0; i < 40; ++i) CHECK(h(i, i).imag() == 0.0);
  }

  TEST_CASE("GOE off-diagonal mean at N = 2048") {
    const std::size_t n = 2048;
    const auto w = sample<double>(EnsembleProfile::goe(n), 11);
    double sum = 0.0;
    for (std::size_t j = 1; j < n; ++j)
      for (std::size_t i = 0; i < j; ++i) sum += w(i, j);
    const double pairs = 0.5 * n * (n - 1.0);
    CHECK(std::abs(sum / pairs) <= 4.0 / std::sqrt(0.5 * n * n));
  }

  TEST_CASE("reproducible regardless of thread count") {
    const auto p = row1_rademacher(64);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto a = sample<double>(p, 77, 5);
    const auto ac = sample<cplx>(EnsembleProfile::gue(64), 77, 5);
    omp_set_num_threads(4);
    const auto b = sample<double>(p, 77, 5, Exec::Parallel);
    const auto bc = sample<cplx>(EnsembleProfile::gue(64), 77, 5, Exec::Parallel);
    omp_set_num_threads(saved);
    CHECK(a == b);
    CHECK(ac == bc);
    CHECK(a == sample<double>(p, 77, 5, Exec::Serial));
    CHECK(a != sample<double>(p, 78, 5));
    // rows sampled alone equal the same rows of the full matrix
    const auto rows = sample_rows<double>(p, 77, 5, {0, 13});
    CHECK(rows.row(0) == a.row(0));
    CHECK(rows.row(1) == a.row(13));
    CHECK(draw_entry<double>(p, 77, 5, 2, 9) == a(2, 9));
  }

  TEST_CASE("row law overrides are symmetric") {
    const auto p = row1_rademacher(8);
    CHECK(p.law_at(0, 5) == EntryLaw::rademacher());
    CHECK(p.law_at(5, 0) == EntryLaw::rademacher());
    CHECK(p.law_at(3, 5) == EntryLaw::gaussian());
    const auto w = sample<double>(p, 2);
    for (int j = 1; j < 8; ++j) CHECK(std::abs(w(0, j)) == 1.0);
  }

  TEST_CASE("truncation leaves bounded laws unchanged and is idempotent") {
    auto p = EnsembleProfile::goe(50);
    p.law = EntryLaw::rademacher();
    p.diag_law = EntryLaw::rademacher();
    const auto w = sample<double>(p, 9);
    const double eps = 2.0 / std::sqrt(50.0);  // threshold 2 > sqrt(2) diag scale
    const auto t = truncate_regularize(w, p, eps, 9);
    CHECK(t.w == w);
    CHECK(t.changed == 0);

    const auto g = EnsembleProfile::goe(50);
    const auto wg = sample<double>(g, 9);
    const double eg = default_truncation_eps(50);
    const auto once = truncate_regularize(wg, g, eg, 9);
    CHECK(once.w.cwiseAbs().maxCoeff() <= eg * std::sqrt(50.0));
    CHECK(once.w == once.w.transpose());
    // unchanged entries were in range and not replaced
    std::size_t kept = 0;
    for (int j = 0; j < 50; ++j)
      for (int i = 0; i <= j; ++i) kept += once.w(i, j) == wg(i, j);
    CHECK(kept + once.changed == 50 * 51 / 2);
  }

  TEST_CASE("truncation repair restores mean and variance") {
    const std::size_t n = 400;
    const double eps = std::pow(static_cast<double>(n), -0.125);
    const double c = eps * std::sqrt(static_cast<double>(n));
    const auto off = repair_law_check(EntryLaw::gaussian(), 1.0, c, false, false, 100000, 1);
    CHECK(std::abs(off.mean_re) <= 3 * off.mean_se + 1e-12);
    CHECK(std::abs(off.variance - 1.0) <= 3 * off.variance_se + 1e-12);
    const auto two = repair_law_check(EntryLaw::two_point(0.2), 1.0, 1.5, false, false, 100000, 2);
    CHECK(std::abs(two.mean_re) <= 3 * two.mean_se + 1e-12);
    CHECK(std::abs(two.variance - 1.0) <= 3 * two.variance_se + 1e-12);
    CHECK(two.changed_fraction > 0.0);
    // diagonal: only the mean is restored
    const auto diag = repair_law_check(EntryLaw::two_point(0.2), std::sqrt(2.0), 1.5, true, false, 100000, 3);
    CHECK(std::abs(diag.mean_re) <= 3 * diag.mean_se);
    CHECK(diag.variance <= 2.0);
    CHECK(diag.changed_fraction > 0.0);
    CHECK_THROWS_AS(EntryRepair::build(EntryLaw::gaussian(), 1.0, 0.5, false, false), DomainError);
  }

  TEST_CASE("Lindeberg functionals") {
    auto rad = EnsembleProfile::goe(100);
    rad.law = EntryLaw::rademacher();
    CHECK(lindeberg(rad, 100, 0.5, LindebergVariant::OffDiagL).value == 0.0);

    const auto g = EnsembleProfile::goe(16);
    const double v = lindeberg(g, 16, 1.0, LindebergVariant::OffDiagL).value;
    CHECK(v == doctest::Approx(gaussian_tail4(4.0) * 15.0 / 32.0).epsilon(1e-8));
    CHECK(tail_moment(EntryLaw::gaussian(), 1.0, 4.0, 4, false) == doctest::Approx(gaussian_tail4(4.0)).epsilon(1e-8));

    const auto p = row1_rademacher(64);
    for (auto variant : {LindebergVariant::OffDiagL, LindebergVariant::DiagSmall, LindebergVariant::RowL}) {
      double prev = INFINITY;
      for (double e : {0.05, 0.1, 0.2, 0.4, 1.0, 2.0}) {
        const double val = lindeberg(p, 64, e, variant, std::size_t{2}).value;
        CHECK(val >= 0.0);
        CHECK(val <= prev);
        prev = val;
      }
    }
    CHECK_THROWS_AS(lindeberg(p, 64, 1.0, LindebergVariant::RowL), DomainError);
  }

  TEST_CASE("row moments") {
    const std::size_t n = 100;
    const auto g = row_moments(EnsembleProfile::goe(n), n, 3);
    CHECK(g.m4_row == doctest::Approx(3.0 * (n - 1) / n));
    CHECK(std::abs(g.kappa4_limit) <= 1e-12);
    const auto r = row_moments(row1_rademacher(n), n, 1);
    CHECK(r.m4_row == doctest::Approx(static_cast<double>(n - 1) / n));
    CHECK(r.kappa4_limit == doctest::Approx(-2.0));
    // the 1/N-normalized row value sits 1/N below the floor; the N-1 average respects it
    CHECK(r.kappa4_row == doctest::Approx(static_cast<double>(n - 1) / n - 3.0));
    CHECK(r.kappa4_limit >= -2.0 - 1e-12);
    // row 2 sees one Rademacher neighbour out of N - 1
    CHECK(row_moments(row1_rademacher(n), n, 2).kappa4_limit == doctest::Approx(-2.0 / (n - 1)));
    const auto h = row_moments(EnsembleProfile::gue(n), n, 1);
    CHECK(std::abs(h.kappa4_limit) <= 1e-12);
    CHECK(h.kappa4_limit >= -1.0);
    CHECK_THROWS_AS(row_moments(EnsembleProfile::goe(n), n, n + 1), DomainError);
  }
}
