// Acceptance run: one PASS/FAIL line per criterion. With arguments, only the listed criteria run.
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "wlab/ensemble.hpp"
#include "wlab/experiments.hpp"
#include "wlab/qform.hpp"
#include "wlab/semicircle.hpp"
#include "wlab/spectral.hpp"
#include "wlab/testfns.hpp"

using namespace wlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [miss]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string num(double v) { return fmt("%.6g", v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

EnsembleProfile row1_rademacher(std::size_t n) {
  auto p = EnsembleProfile::goe(n);
  p.row_laws.push_back({1, EntryLaw::rademacher()});
  return p;
}

const std::vector<const char*> kCatalog = {
    "monomial:1", "monomial:2",     "monomial:3",  "monomial:4",     "poly:1,-2,0.5,0.25", "gauss:0:1",
    "gauss:0.5:0.7:1,2", "cutoff:0.5:1", "resre:0.3:1", "resim:-0.2:0.5", "2.5*gauss:0:0.8"};

// 1. semicircle functionals of x, x^2, x^3
Outcome analytic_functionals() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const double want[3][3] = {{1, 0, 1}, {0, 1, 1}, {2, 0, 5}};
  for (int d = 1; d <= 3; ++d) {
    const auto fn = entry_functionals(TestFunction(Monomial{d}), SemicircleParams(1.0));
    const double err = std::max({std::abs(fn.alpha - want[d - 1][0]), std::abs(fn.beta - want[d - 1][1]),
                                 std::abs(fn.omega2 - want[d - 1][2])});
    o.expect(err <= 1e-10, "x^" + std::to_string(d) + " err " + num(err));
  }
  const double t = seconds_since(t0);
  o.expect(t < 1.0, "time " + fmt("%.3fs", t));
  return o;
}

// 2. Stieltjes transform
Outcome stieltjes_residual() {
  Outcome o;
  const SemicircleParams p(1.0);
  double worst = 0.0;
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b) {
      // points at distance >= 0.05 from [-2, 2], both half-planes and the real axis beyond the edges
      const double x = -4.0 + 8.0 * a / 9.0;
      const double y = b < 5 ? 0.05 + 0.6 * b : -(0.05 + 0.6 * (b - 5));
      const cplx z(x, y);
      const cplx g = stieltjes(z, p);
      worst = std::max(worst, std::abs(g * g - z * g + 1.0));
    }
  o.expect(worst <= 1e-12, "grid residual " + num(worst));
  const double e3 = std::abs(stieltjes(cplx(3, 0), p) - (3 - std::sqrt(5.0)) / 2);
  const double e2i = std::abs(stieltjes(cplx(0, 2), p) - cplx(0, 1 - std::sqrt(2.0)));
  o.expect(e3 <= 1e-12, "g(3) err " + num(e3));
  o.expect(e2i <= 1e-12, "g(2i) err " + num(e2i));
  return o;
}

// 3. phi kernels: closed form vs quadrature, and reference values
Outcome phi_duality() {
  Outcome o;
  const SemicircleParams p(1.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> re(-3.0, 3.0), im(0.2, 2.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const cplx z(re(rng), im(rng) * (k % 3 ? 1.0 : -1.0)), w(re(rng), im(rng));
    const auto a = phi_kernels(z, w, p), b = phi_kernels_quadrature(z, w, p);
    worst = std::max({worst, std::abs(a.phi_pp - b.phi_pp), std::abs(a.phi_mm - b.phi_mm), std::abs(a.phi_pm - b.phi_pm),
                      std::abs(a.phi - b.phi)});
  }
  o.expect(worst <= 1e-8, "20 pairs max diff " + num(worst));
  const double p33 = phi(cplx(3, 0), cplx(3, 0), p).real(), p34 = phi(cplx(3, 0), cplx(4, 0), p).real();
  o.expect(std::abs(p33 - 0.1708204) <= 1e-6, "phi(3,3) " + fmt("%.8f", p33));
  o.expect(std::abs(p34 - 0.1140168) <= 1e-6, "phi(3,4) " + fmt("%.8f", p34));
  return o;
}

// 4. GOE/GUE variance identities over the catalog
Outcome consistency_identities() {
  Outcome o;
  const SemicircleParams p(1.0);
  double worst = 0.0;
  for (const char* id : kCatalog) {
    const auto fn = entry_functionals(TestFunction::parse(id), p);
    const double scale = std::max(1.0, fn.omega2);
    const auto off = predict_entry_fluctuation(fn, p, 0.0, Symmetry::RealSymmetric, false);
    const auto dg = predict_entry_fluctuation(fn, p, 0.0, Symmetry::RealSymmetric, true);
    const auto hoff = predict_entry_fluctuation(fn, p, 0.0, Symmetry::Hermitian, false);
    const auto hdg = predict_entry_fluctuation(fn, p, 0.0, Symmetry::Hermitian, true);
    const double a2 = fn.alpha * fn.alpha;
    // d^2 + alpha^2 = omega^2 off the diagonal; 2(omega^2 - alpha^2) + 2 alpha^2 = 2 omega^2 on it (GOE, sigma1^2 = 2)
    worst = std::max(worst, std::abs(off.limit_variance + a2 - fn.omega2) / scale);
    worst = std::max(worst, std::abs(dg.limit_variance + 2.0 * a2 - 2.0 * fn.omega2) / scale);
    worst = std::max(worst, std::abs(hoff.limit_variance + a2 - fn.omega2) / scale);
    worst = std::max(worst, std::abs(hdg.limit_variance + a2 - fn.omega2) / scale);
  }
  o.expect(worst <= 1e-12, std::to_string(kCatalog.size()) + " functions, max residual " + num(worst));
  return o;
}

// 5. Helffer-Sjostrand vs spectral calculus
Outcome hs_oracle() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = 64;
  const Eigen::MatrixXd x = sample<double>(EnsembleProfile::goe(n), 7) / std::sqrt(static_cast<double>(n));
  const auto d = eigh(x);
  const auto f = TestFunction::parse("gauss:0:1");
  const Eigen::MatrixXd exact = apply_function(d, f);
  const auto base = hs_grid_for(operator_norm(d), f, 800, 400);
  const auto fine = hs_grid_for(operator_norm(d), f, 1600, 800);
  const double dev = (hs_apply(x, f, 3, base) - exact).cwiseAbs().maxCoeff();
  const double dev2 = (hs_apply(x, f, 3, fine) - exact).cwiseAbs().maxCoeff();
  o.expect(dev <= 1e-3, "800x400 dev " + num(dev));
  o.expect(dev2 <= dev, "1600x800 dev " + num(dev2));
  const double t = seconds_since(t0);
  o.expect(t < 120.0, "time " + fmt("%.1fs", t));
  return o;
}

// 6. resolvent derivative identities
Outcome derivative_identity() {
  Outcome o;
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::size_t> dim(1, 32);
  std::uniform_real_distribution<double> re(-3.0, 3.0), im(0.3, 3.0);
  double worst = 0.0;
  int diag = 0;
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = dim(rng);
    const Eigen::MatrixXd x = sample<double>(EnsembleProfile::goe(n), 600 + k) / std::sqrt(static_cast<double>(n));
    const cplx z(re(rng), (k % 2 ? 1.0 : -1.0) * im(rng));
    std::uniform_int_distribution<std::size_t> idx(0, n - 1);
    const std::size_t p = idx(rng);
    const std::size_t q = k % 4 == 0 ? p : idx(rng);
    diag += p == q;
    worst = std::max(worst, resolvent_derivative_check(x, z, p, q, 1e-6));
  }
  o.expect(worst <= 1e-6, "50 cases (" + std::to_string(diag) + " diagonal), max rel err " + num(worst));
  return o;
}

std::string fluct(const FluctuationReport& e) {
  return "(" + std::to_string(e.entry.i) + "," + std::to_string(e.entry.j) + ") raw " + num(e.raw_var) + " skew " +
         num(e.skew) + " kurt " + num(e.excess_kurtosis);
}

// 7. entry CLT for x^2 under GOE
Outcome entry_clt() {
  Outcome o;
  const auto run = entry_fluctuation_mc(EnsembleProfile::goe(1024), TestFunction::parse("monomial:2"),
                                        {{1, 2}, {1, 1}}, 1024, 4000, 7);
  const auto& off = run.entries[0];
  const auto& dg = run.entries[1];
  o.expect(std::abs(off.raw_var - 1.0) <= 0.1, "off-diag " + fluct(off));
  o.expect(std::abs(dg.raw_var - 2.0) <= 0.2, "diag " + fluct(dg));
  for (const auto* e : {&off, &dg})
    if (e->residual_var > 0.1)
      o.expect(std::abs(e->skew) <= 0.15 && std::abs(e->excess_kurtosis) <= 0.3,
               "normality (" + std::to_string(e->entry.i) + "," + std::to_string(e->entry.j) + ")");
  return o;
}

// 8. fourth-cumulant row effect
Outcome row_effect() {
  Outcome o;
  const auto run = entry_fluctuation_mc(row1_rademacher(1024), TestFunction::parse("monomial:2"), {{1, 1}, {2, 2}}, 1024,
                                        4000, 8);
  o.expect(run.entries[0].raw_var <= 0.1, "(1,1) raw " + num(run.entries[0].raw_var));
  o.expect(std::abs(run.entries[1].raw_var - 2.0) <= 0.2, "(2,2) raw " + num(run.entries[1].raw_var));
  return o;
}

// 9. asymptotic independence
Outcome independence() {
  Outcome o;
  const double c = independence_check(EnsembleProfile::goe(1024), TestFunction::parse("monomial:2"),
                                      {{1, 1}, {1, 2}, {2, 2}}, 1024, 4000, 9);
  o.expect(c <= 0.08, "max |corr| " + num(c));
  return o;
}

// 10. resolvent scaling rates
Outcome resolvent_scaling() {
  Outcome o;
  const auto scan =
      resolvent_scaling_scan(EnsembleProfile::goe(64), cplx(0, 2), {64, 128, 256, 512, 1024}, {400}, 10);
  auto check = [&](ScalingQuantity q, double lo, double hi) {
    const auto& r = scan.get(q);
    o.expect(r.fitted && !r.degenerate && r.slope >= lo && r.slope <= hi,
             std::string(to_string(q)) + " slope " + num(r.slope) + " +- " + num(r.slope_stderr));
  };
  check(ScalingQuantity::VarEntry, -1.25, -0.75);
  check(ScalingQuantity::BiasDiag, -1.4, -0.6);
  check(ScalingQuantity::MasterDiag, -1.4, -0.6);
  return o;
}

// 11. resolvent field covariances
Outcome resolvent_field() {
  Outcome o;
  for (const auto& [name, prof] : {std::pair{"kappa4=0", EnsembleProfile::goe(512)}, std::pair{"kappa4=-2", row1_rademacher(512)}}) {
    const auto rep = resolvent_field_mc(prof, 2, {cplx(0, 2)}, 512, 10000, 11);
    o.expect(rep.max_rel_error <= 0.15,
             std::string(name) + " " + std::to_string(rep.table.size()) + " comparisons, max rel err " +
                 num(rep.max_rel_error));
  }
  return o;
}

QFormSpec qspec(QFormCase c, QFormMatrixKind m, EntryLaw law, std::size_t n = 1024) {
  QFormSpec s;
  s.qcase = c;
  s.n = n;
  s.matrix = m;
  s.law = law;
  return s;
}

// 12. quadratic-form CLTs
Outcome quadratic_forms() {
  Outcome o;
  const auto g = qform_mc(qspec(QFormCase::Real, QFormMatrixKind::Identity, EntryLaw::gaussian()), 10000, 121);
  o.expect(std::abs(g.variance - 2.0) <= 0.05 * 2.0, "real gaussian var " + num(g.variance));
  const auto r = qform_mc(qspec(QFormCase::Real, QFormMatrixKind::Identity, EntryLaw::rademacher()), 10000, 122);
  o.expect(r.variance <= 1e-12, "rademacher var " + num(r.variance));
  const auto u = qform_mc(qspec(QFormCase::Real, QFormMatrixKind::DiagRamp, EntryLaw::uniform()), 10000, 123);
  o.expect(std::abs(u.variance - 4.0 / 15.0) <= 0.1 * 4.0 / 15.0, "uniform ramp var " + num(u.variance));
  const auto c = qform_mc(qspec(QFormCase::Complex, QFormMatrixKind::Identity, EntryLaw::gaussian()), 10000, 124);
  o.expect(std::abs(c.variance - 1.0) <= 0.05, "complex gaussian var " + num(c.variance));
  auto fr = qspec(QFormCase::Real, QFormMatrixKind::FrozenResolventRe, EntryLaw::gaussian());
  fr.frozen_seed = 1;
  const auto f = qform_mc(fr, 10000, 125);
  o.expect(std::abs(f.variance - f.predicted.v2) <= 0.05 * f.predicted.v2,
           "frozen Re R(2i) var " + num(f.variance) + " vs " + num(f.predicted.v2));

  // full enumeration at N = 8
  double worst = 0.0;
  for (auto qc : {QFormCase::Real, QFormCase::Complex}) {
    EntryStream s(12, 0, 0, 0);
    Eigen::MatrixXcd b(8, 8);
    for (int j = 0; j < 8; ++j)
      for (int i = 0; i <= j; ++i) {
        const cplx v = (i == j || qc == QFormCase::Real) ? cplx(s.normal(), 0) : cplx(s.normal(), s.normal());
        b(i, j) = v;
        b(j, i) = std::conj(v);
      }
    std::vector<EntryLaw> laws;
    std::vector<double> k4;
    for (int i = 0; i < 8; ++i) {
      laws.push_back(i % 2 ? EntryLaw::two_point(0.25) : EntryLaw::rademacher());
      k4.push_back(qc == QFormCase::Real ? laws.back().fourth_moment() - 3.0 : laws.back().complex_fourth_moment() - 2.0);
    }
    const double exact = qform_variance_enumeration(b, laws, qc);
    worst = std::max(worst, std::abs(exact - qform_predict(b, k4, qc).v2) / std::max(1.0, exact));
  }
  o.expect(worst <= 1e-10, "enumeration N=8 diff " + num(worst));

  // r = 2 families
  const std::size_t n = 512;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n), zero = Eigen::MatrixXcd::Zero(n, n);
  QFormFamily fam{QFormCase::Real, n, 2, {id, id, id, id}, {EntryLaw::gaussian(), EntryLaw::gaussian()}};
  const auto m = qform_matrix_mc(fam, 10000, 126);
  // components: G11, G12, G22
  o.expect(std::abs(m.components[1].variance - 1.0) <= 0.1, "Var G12 " + num(m.components[1].variance));
  o.expect(std::abs(m.components[0].variance - 2.0) <= 0.2, "Var G11 " + num(m.components[0].variance));
  const double c01 = std::abs(m.correlation(0, 1));
  o.expect(c01 <= 0.08, "|corr(G11,G12)| " + num(c01));
  QFormFamily zfam{QFormCase::Real, n, 2, {id, zero, zero, id}, {EntryLaw::gaussian(), EntryLaw::gaussian()}};
  const auto mz = qform_matrix_mc(zfam, 2000, 127);
  o.expect(mz.components[1].variance <= 1e-24, "B12=0 Var G12 " + num(mz.components[1].variance));
  QFormFamily cfam{QFormCase::Complex, n, 2, {id, id, id, id}, {EntryLaw::gaussian(), EntryLaw::gaussian()}};
  const auto mc = qform_matrix_mc(cfam, 10000, 128);
  // components: G11, Re G12, Im G12, G22
  o.expect(std::abs(mc.components[1].variance - 0.5) <= 0.05 && std::abs(mc.components[2].variance - 0.5) <= 0.05,
           "complex Re/Im G12 var " + num(mc.components[1].variance) + "/" + num(mc.components[2].variance));
  return o;
}

// 13. truncation construction
Outcome truncation() {
  Outcome o;
  struct Case {
    const char* name;
    EntryLaw law;
    double scale, c;
    bool diagonal, complex_entry;
  };
  const double c400 = std::pow(400.0, -0.125) * std::sqrt(400.0);
  const std::vector<Case> cases{{"gaussian N=400 eps=N^-1/8", EntryLaw::gaussian(), 1.0, c400, false, false},
                                {"gaussian c=2.5", EntryLaw::gaussian(), 1.0, 2.5, false, false},
                                {"gaussian diag c=2.5", EntryLaw::gaussian(), std::sqrt(2.0), 2.5, true, false},
                                {"student6 complex c=2.5", EntryLaw::student(6.0), 1.0, 2.5, false, true},
                                {"twopoint0.3 c=1.5", EntryLaw::two_point(0.3), 1.0, 1.5, false, false}};
  std::uint64_t seed = 130;
  for (const auto& cs : cases) {
    const auto r = repair_law_check(cs.law, cs.scale, cs.c, cs.diagonal, cs.complex_entry, 100000, seed++);
    const bool mean_ok = std::abs(r.mean_re) <= 3 * r.mean_se + 1e-12 && std::abs(r.mean_im) <= 3 * r.mean_se + 1e-12;
    // the diagonal repair restores the mean only; its second moment stays bounded by sigma_1^2
    const bool var_ok = cs.diagonal ? r.variance <= r.target_variance + 3 * r.variance_se
                                    : std::abs(r.variance - r.target_variance) <= 3 * r.variance_se + 1e-12;
    const bool ok = mean_ok && var_ok;
    o.expect(ok, std::string(cs.name) + " mean " + num(r.mean_re) + " var " + num(r.variance) + "/" +
                     num(r.target_variance) + " se " + num(r.variance_se));
  }
  const std::vector<std::size_t> ns{100, 400, 1600};
  std::vector<double> eps;
  for (auto n : ns) eps.push_back(default_truncation_eps(n));
  const auto pts = truncation_demo(EnsembleProfile::goe(100), ns, eps, 100, 13);
  bool dec = true;
  std::string probs;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k > 0) dec = dec && pts[k].exact_probability < pts[k - 1].exact_probability;
    probs += (k ? ", " : "") + num(pts[k].exact_probability) + " (MC " + num(pts[k].changed_fraction) + ")";
  }
  o.expect(dec, "P(W~!=W) " + probs);
  auto bounded = EnsembleProfile::goe(200);
  bounded.law = EntryLaw::rademacher();
  bounded.diag_law = EntryLaw::uniform();
  const Eigen::MatrixXd w = sample<double>(bounded, 13);
  const auto t = truncate_regularize(w, bounded, default_truncation_eps(200), 13);
  o.expect(t.w == w && t.changed == 0, "bounded laws unchanged");
  return o;
}

// 14. operator norm convergence
Outcome norm_limit() {
  Outcome o;
  const auto r = norm_convergence(EnsembleProfile::goe(2048), 2048, 100, 14, 0.08);
  o.expect(r.within >= 95, std::to_string(r.within) + "/100 within 0.08 of 2");
  return o;
}

// 15. variance bound diagnostic
Outcome variance_bound() {
  Outcome o;
  const auto vb = variance_bound_diagnostic(EnsembleProfile::goe(128), TestFunction::parse("gauss:0:1"), 3.5,
                                            {128, 256, 512, 1024}, 200, 15);
  std::string rs;
  for (double r : vb.ratios) rs += (rs.empty() ? "" : ", ") + num(r);
  o.expect(std::isfinite(vb.max_over_min) && vb.max_over_min <= 4.0, "ratios " + rs + " max/min " + num(vb.max_over_min));
  return o;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 16. determinism across thread counts
Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "wlab-acceptance-16";
  fs::remove_all(root);
  fs::create_directories(root);
  struct Run {
    const char* command;
    std::vector<std::string> extra;
  };
  const std::vector<Run> runs{
      {"simulate", {"--n", "128", "--replicas", "200", "--f", "gauss:0:1"}},
      {"resolvent", {"--ns", "32,48,64,96", "--replicas", "100"}},
      {"field", {"--n", "64", "--replicas", "300"}},
      {"qform", {"--n", "256", "--replicas", "500"}},
  };
  const int saved = omp_get_max_threads();
  for (const auto& r : runs) {
    std::string out[2];
    for (int t = 0; t < 2; ++t) {
      const fs::path dir = root / (std::string(r.command) + "-" + std::to_string(t));
      std::vector<std::string> args{"wigner-lab", r.command, "--seed", "16", "--threads", t ? "4" : "1", "--out", dir.string()};
      args.insert(args.end(), r.extra.begin(), r.extra.end());
      std::vector<const char*> argv;
      for (const auto& a : args) argv.push_back(a.c_str());
      wlab::cli::cli_main(static_cast<int>(argv.size()), argv.data());
      out[t] = read_file(dir / (std::string(r.command) + ".csv"));
    }
    o.expect(!out[0].empty() && out[0] == out[1], std::string(r.command) + " csv " + std::to_string(out[0].size()) + " bytes");
  }
  omp_set_num_threads(saved);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{
      analytic_functionals, stieltjes_residual, phi_duality, consistency_identities, hs_oracle, derivative_identity,
      entry_clt,           row_effect,         independence, resolvent_scaling,   resolvent_field, quadratic_forms,
      truncation,          norm_limit,         variance_bound, determinism};
  std::vector<int> selected;
  for (int a = 1; a < argc; ++a) selected.push_back(std::stoi(argv[a]));
  if (selected.empty())
    for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) selected.push_back(k);

  int failed = 0;
  for (int k : selected) {
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "no criterion %d\n", k);
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k - 1]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %2d: %s (%.1fs) %s\n", k, o.pass ? "PASS" : "FAIL", seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
