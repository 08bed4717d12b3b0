#include <cmath>
#include <vector>

#include "doctest.h"
#include "wlab/experiments.hpp"

using namespace wlab;

TEST_SUITE("experiments") {
  TEST_CASE("f = x leaves no residual on the diagonal") {
    const auto r = entry_fluctuation_mc(EnsembleProfile::goe(128), TestFunction::parse("monomial:1"), Entry{1, 1}, 128,
                                        200, 5);
    CHECK(r.predicted.coeff_w == doctest::Approx(1.0));
    CHECK(r.residual_var <= 1e-20);
    CHECK(r.raw_var == doctest::Approx(r.w_var).epsilon(1e-10));
    CHECK(r.raw_var >= 0.0);
    CHECK(r.replicas == 200);
  }

  TEST_CASE("reports are deterministic and schedule independent") {
    const auto f = TestFunction::parse("gauss:0:1");
    const std::vector<Entry> entries{{1, 1}, {1, 2}};
    McOptions serial;
    serial.exec = Exec::Serial;
    const auto a = entry_fluctuation_mc(EnsembleProfile::goe(48), f, entries, 48, 70, 9, serial);
    const auto b = entry_fluctuation_mc(EnsembleProfile::goe(48), f, entries, 48, 70, 9);
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(a.entries[k].raw_var == b.entries[k].raw_var);
      CHECK(a.entries[k].residual_var == b.entries[k].residual_var);
      CHECK(a.entries[k].skew == b.entries[k].skew);
    }
    CHECK(a.correlation == b.correlation);
    const auto c = entry_fluctuation_mc(EnsembleProfile::goe(48), f, entries, 48, 70, 10);
    CHECK(c.entries[0].raw_var != a.entries[0].raw_var);
  }

  TEST_CASE("kept samples reproduce the residual moments") {
    McOptions opt;
    opt.keep_samples = true;
    const auto r = entry_fluctuation_mc(EnsembleProfile::goe(64), TestFunction::parse("monomial:2"), Entry{1, 2}, 64, 90,
                                        3, opt);
    REQUIRE(r.samples.size() == 90);
    MomentAccumulator acc;
    for (double v : r.samples) acc.push(v);
    CHECK(acc.variance() == doctest::Approx(r.residual_var).epsilon(1e-9));
  }

  TEST_CASE("raw and residual variances decompose through W") {
    const auto r = entry_fluctuation_mc(EnsembleProfile::goe(256), TestFunction::parse("poly:0,1,1"), Entry{1, 2}, 256,
                                        2000, 21);
    const double lhs = r.raw_var;
    const double rhs = r.residual_var + r.predicted.coeff_w * r.predicted.coeff_w * r.w_var;
    CHECK(std::abs(lhs - rhs) <= 3 * std::hypot(r.raw_var_se, r.residual_var_se));
  }

  TEST_CASE("centering by the semicircle target agrees with self-centering at N = 1024") {
    const auto r = entry_fluctuation_mc(EnsembleProfile::goe(1024), TestFunction::parse("monomial:2"), Entry{1, 1}, 1024,
                                        1000, 4);
    CHECK(std::abs(r.centering_gap_se) <= 3.0);
  }

  TEST_CASE("independence check") {
    const auto f = TestFunction::parse("monomial:1");
    CHECK(independence_check(EnsembleProfile::goe(64), f, {{1, 1}, {1, 2}, {2, 2}}, 64, 2500, 8) <= 0.08);
    const double same = independence_check(EnsembleProfile::goe(32), TestFunction::parse("monomial:2"),
                                           {{1, 2}, {1, 2}}, 32, 100, 1);
    CHECK(same == doctest::Approx(1.0));
    CHECK_THROWS_AS(independence_check(EnsembleProfile::goe(8), f, {{2, 1}}, 8, 10, 1), DomainError);
  }

  TEST_CASE("resolvent scan preconditions and shapes") {
    const auto p = EnsembleProfile::goe(16);
    CHECK_THROWS_AS(resolvent_scaling_scan(p, cplx(0, 2), {16, 32, 64}, {20}, 1), DomainError);
    CHECK_THROWS_AS(resolvent_scaling_scan(p, cplx(0, 2), {16, 32, 32, 64}, {20}, 1), DomainError);
    CHECK_THROWS_AS(resolvent_scaling_scan(p, cplx(1, 0), {16, 32, 48, 64}, {20}, 1), DomainError);
    const auto scan = resolvent_scaling_scan(p, cplx(0, 2), {16, 24, 32, 48}, {40}, 3);
    for (const auto& rep : scan.reports) {
      CHECK(rep.ns.size() == 4);
      CHECK(rep.values.size() == 4);
      for (double v : rep.values) CHECK(v >= 0.0);
    }
    CHECK(scan.get(ScalingQuantity::VarEntry).values[0] > 0.0);
  }

  TEST_CASE("resolvent scan is covariant under sigma scaling") {
    // X -> cX maps R(z) to R(z/c)/c and g_sigma accordingly, so the scan at (2 sigma, 2z) halves every bias
    const auto p1 = EnsembleProfile::goe(16, 1.0);
    const auto p2 = EnsembleProfile::goe(16, 2.0);
    const auto s1 = resolvent_scaling_scan(p1, cplx(0, 2), {16, 24, 32, 48}, {40}, 3);
    const auto s2 = resolvent_scaling_scan(p2, cplx(0, 4), {16, 24, 32, 48}, {40}, 3);
    const auto& b1 = s1.get(ScalingQuantity::BiasDiag);
    const auto& b2 = s2.get(ScalingQuantity::BiasDiag);
    for (std::size_t k = 0; k < 4; ++k) CHECK(b2.values[k] == doctest::Approx(0.5 * b1.values[k]).epsilon(1e-8));
    CHECK(s2.get(ScalingQuantity::VarEntry).slope == doctest::Approx(s1.get(ScalingQuantity::VarEntry).slope).epsilon(1e-8));
  }

  TEST_CASE("master equation residual at large |z|") {
    const auto r = master_equation_residual(EnsembleProfile::goe(64), cplx(0, 10), 64, 200, 2);
    CHECK(r.diag <= 10.0 / 64);
    CHECK(r.offdiag <= 10.0 / 64);
    CHECK(r.diag_se >= 0.0);
  }

  TEST_CASE("resolvent field small run") {
    const auto rep = resolvent_field_mc(EnsembleProfile::goe(64), 2, {cplx(0, 2), cplx(0.5, 1.5)}, 64, 300, 4);
    CHECK(rep.kappa4.size() == 2);
    CHECK_FALSE(rep.table.empty());
    for (const auto& c : rep.table) {
      CHECK(std::isfinite(c.empirical));
      CHECK(c.rel_error >= 0.0);
    }
    CHECK_THROWS_AS(resolvent_field_mc(EnsembleProfile::goe(64), 5, {cplx(0, 2)}, 64, 10, 1), DomainError);
    CHECK_THROWS_AS(resolvent_field_mc(EnsembleProfile::goe(64), 2, {cplx(1, 0)}, 64, 10, 1), DomainError);
  }

  TEST_CASE("field far outside the support has negligible imaginary parts") {
    const auto rep = resolvent_field_mc(EnsembleProfile::goe(64), 2, {cplx(3, 0)}, 64, 400, 6);
    for (const auto& c : rep.table)
      if (c.component == "im_im") CHECK(std::abs(c.empirical) <= 1e-12);
  }

  TEST_CASE("variance bound diagnostic invariants") {
    const auto p = EnsembleProfile::goe(32);
    const std::vector<std::size_t> ns{32, 48, 64};
    const auto zero = variance_bound_diagnostic(p, TestFunction::zero(), 3.5, ns, 30, 1);
    for (double r : zero.ratios) CHECK(r == 0.0);
    const auto f = TestFunction::parse("gauss:0:1");
    const auto a = variance_bound_diagnostic(p, f, 3.5, ns, 30, 1);
    const auto b = variance_bound_diagnostic(p, f.scaled(3.0), 3.5, ns, 30, 1);
    for (std::size_t k = 0; k < ns.size(); ++k) CHECK(b.ratios[k] == doctest::Approx(a.ratios[k]).epsilon(1e-9));
    CHECK_THROWS_AS(variance_bound_diagnostic(p, f, 2.5, ns, 30, 1), DomainError);
    CHECK_THROWS(variance_bound_diagnostic(p, TestFunction::parse("monomial:2"), 3.5, ns, 30, 1));
  }

  TEST_CASE("truncation sequence and demo") {
    double prev_eps = INFINITY, prev_c = 0.0;
    for (std::size_t n : {100, 400, 1600, 6400}) {
      const double e = default_truncation_eps(n);
      CHECK(e < prev_eps);
      CHECK(e * std::sqrt(static_cast<double>(n)) > prev_c);
      prev_eps = e;
      prev_c = e * std::sqrt(static_cast<double>(n));
    }
    const std::vector<std::size_t> ns{50, 100, 200};
    std::vector<double> eps;
    for (auto n : ns) eps.push_back(default_truncation_eps(n));
    const auto pts = truncation_demo(EnsembleProfile::goe(50), ns, eps, 20, 3);
    REQUIRE(pts.size() == 3);
    for (std::size_t k = 1; k < 3; ++k) CHECK(pts[k].exact_probability < pts[k - 1].exact_probability);
    for (const auto& pt : pts) {
      CHECK(pt.changed_fraction >= 0.0);
      CHECK(pt.changed_fraction <= 1.0);
    }
  }

  TEST_CASE("norm convergence small run") {
    const auto r = norm_convergence(EnsembleProfile::goe(256), 256, 10, 2, 0.5);
    CHECK(r.norms.size() == 10);
    CHECK(r.within == 10);
  }
}
