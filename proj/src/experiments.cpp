#include "wlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "wlab/replicas.hpp"
#include "wlab/spectral.hpp"

namespace wlab {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) { return splitmix64(seed ^ splitmix64(tag + 0x51ED27ull)); }

double re(double v) { return v; }
double im(double) { return 0.0; }
double re(cplx v) { return v.real(); }
double im(cplx v) { return v.imag(); }

struct ExcursionCount {
  std::size_t checked = 0, exceeded = 0;
  void merge(const ExcursionCount& o) {
    checked += o.checked;
    exceeded += o.exceeded;
  }
};

// f(X)_ij and W_ij for a fixed list of entries, by the cheapest exact route for f.
template <class Scalar>
class EntrySampler {
 public:
  EntrySampler(const EnsembleProfile& p, const TestFunction& f, const std::vector<Entry>& entries, const McOptions& opt)
      : p_(p), f_(f), entries_(entries), opt_(opt) {
    p_.validate();
    for (const auto& e : entries_) {
      if (e.i < 1 || e.i > e.j || e.j > p_.n) throw DomainError("entries must satisfy 1 <= i <= j <= N");
      for (std::size_t k : {e.i - 1, e.j - 1})
        if (std::find(idx_.begin(), idx_.end(), k) == idx_.end()) idx_.push_back(k);
    }
    poly_ = f_.polynomial();
    while (poly_ && !poly_->empty() && poly_->back() == 0.0) poly_->pop_back();
    sqrt_n_ = std::sqrt(static_cast<double>(p_.n));
  }

  std::size_t slot(std::size_t k) const {
    return static_cast<std::size_t>(std::find(idx_.begin(), idx_.end(), k) - idx_.begin());
  }

  // Fills fx[e] = f(X)_ij and w[e] = W_ij for each entry.
  void eval(std::uint64_t seed, std::uint64_t r, std::vector<Scalar>& fx, std::vector<Scalar>& w,
            ExcursionCount& exc) const {
    fx.assign(entries_.size(), Scalar(0.0));
    w.assign(entries_.size(), Scalar(0.0));
    const bool check = opt_.excursion_stride > 0 && r % opt_.excursion_stride == 0;
    const double edge = 2.0 * p_.sigma + opt_.excursion_delta;
    if (poly_ && poly_->size() <= 3) {
      const Mat<Scalar> rows = sample_rows<Scalar>(p_, seed, r, idx_) / sqrt_n_;
      const auto& c = *poly_;
      for (std::size_t e = 0; e < entries_.size(); ++e) {
        const auto a = static_cast<Eigen::Index>(slot(entries_[e].i - 1));
        const auto b = static_cast<Eigen::Index>(slot(entries_[e].j - 1));
        const auto jj = static_cast<Eigen::Index>(entries_[e].j - 1);
        const Scalar xij = rows(a, jj);
        Scalar v = c.size() > 1 ? c[1] * xij : Scalar(0.0);
        if (entries_[e].diagonal() && !c.empty()) v += c[0];
        // (X^2)_ij = sum_k X_ik conj(X_jk)
        if (c.size() > 2) v += c[2] * rows.row(b).dot(rows.row(a));
        fx[e] = v;
        w[e] = xij * sqrt_n_;
      }
      if (check) {
        const Mat<Scalar> x = sample<Scalar>(p_, seed, r, Exec::Serial) / sqrt_n_;
        exc.checked++;
        exc.exceeded += operator_norm(eigenvalues<Scalar>(x)) > edge;
      }
      return;
    }
    const Mat<Scalar> x = sample<Scalar>(p_, seed, r, Exec::Serial) / sqrt_n_;
    for (std::size_t e = 0; e < entries_.size(); ++e)
      w[e] = x(static_cast<Eigen::Index>(entries_[e].i - 1), static_cast<Eigen::Index>(entries_[e].j - 1)) * sqrt_n_;
    if (poly_) {
      for (std::size_t e = 0; e < entries_.size(); ++e)
        fx[e] = polynomial_entry<Scalar>(x, *poly_, entries_[e].i - 1, entries_[e].j - 1);
      if (check) {
        exc.checked++;
        exc.exceeded += operator_norm(eigenvalues<Scalar>(x)) > edge;
      }
      return;
    }
    const auto n = static_cast<Eigen::Index>(p_.n);
    Mat<Scalar> probes = Mat<Scalar>::Zero(n, static_cast<Eigen::Index>(idx_.size()));
    for (std::size_t k = 0; k < idx_.size(); ++k) probes(static_cast<Eigen::Index>(idx_[k]), static_cast<Eigen::Index>(k)) = 1.0;
    const auto ps = project_spectrum<Scalar>(x, probes);
    const Mat<Scalar> fm = ps.apply(f_);
    for (std::size_t e = 0; e < entries_.size(); ++e)
      fx[e] = fm(static_cast<Eigen::Index>(slot(entries_[e].i - 1)), static_cast<Eigen::Index>(slot(entries_[e].j - 1)));
    exc.checked++;
    exc.exceeded += operator_norm(ps.eigenvalues) > edge;
  }

 private:
  EnsembleProfile p_;
  TestFunction f_;
  std::vector<Entry> entries_;
  McOptions opt_;
  std::vector<std::size_t> idx_;
  std::optional<std::vector<double>> poly_;
  double sqrt_n_ = 1.0;
};

struct FluctuationState {
  std::vector<MomentAccumulator> raw_re, raw_im, res_re, res_im, w_re, w_im, target_sq;
  CovarianceAccumulator cov;
  ExcursionCount exc;
  std::vector<std::vector<double>> samples;  // residual real parts in replica order, when kept

  FluctuationState(std::size_t k, bool keep)
      : raw_re(k), raw_im(k), res_re(k), res_im(k), w_re(k), w_im(k), target_sq(k), cov(k),
        samples(keep ? k : 0) {}

  void merge(const FluctuationState& o) {
    for (std::size_t e = 0; e < raw_re.size(); ++e) {
      raw_re[e].merge(o.raw_re[e]);
      raw_im[e].merge(o.raw_im[e]);
      res_re[e].merge(o.res_re[e]);
      res_im[e].merge(o.res_im[e]);
      w_re[e].merge(o.w_re[e]);
      w_im[e].merge(o.w_im[e]);
      target_sq[e].merge(o.target_sq[e]);
    }
    for (std::size_t e = 0; e < samples.size(); ++e)
      samples[e].insert(samples[e].end(), o.samples[e].begin(), o.samples[e].end());
    cov.merge(o.cov);
    exc.merge(o.exc);
  }
};

template <class Scalar>
FluctuationRun fluctuation_impl(const EnsembleProfile& profile, const TestFunction& f, const std::vector<Entry>& entries,
                                std::size_t n, std::size_t replicas, std::uint64_t seed, const McOptions& opt) {
  if (replicas < 2) throw DomainError("need at least 2 replicas");
  if (entries.empty()) throw DomainError("no entries requested");
  const EnsembleProfile p = profile.with_n(n);
  const EntrySampler<Scalar> sampler(p, f, entries, opt);
  const SemicircleParams sp(p.sigma);
  const EntryFunctionals fn = entry_functionals(f, sp);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const std::size_t k = entries.size();

  std::vector<SemicirclePrediction> pred;
  for (const auto& e : entries)
    pred.push_back(predict_entry_fluctuation(fn, sp, row_moments(p, n, e.i).kappa4_limit, p.symmetry, e.diagonal()));

  const FluctuationState state = run_replicas(replicas, opt.exec, FluctuationState(k, opt.keep_samples), [&](std::size_t r, FluctuationState& s) {
    std::vector<Scalar> fx, w;
    sampler.eval(seed, r, fx, w, s.exc);
    std::vector<double> row(k);
    for (std::size_t e = 0; e < k; ++e) {
      const Scalar v = sqrt_n * fx[e];
      const Scalar res = v - pred[e].coeff_w * w[e];
      const double target = entries[e].diagonal() ? sqrt_n * fn.mean : 0.0;
      s.raw_re[e].push(re(v));
      s.raw_im[e].push(im(v));
      s.res_re[e].push(re(res));
      s.res_im[e].push(im(res));
      s.w_re[e].push(re(w[e]));
      s.w_im[e].push(im(w[e]));
      s.target_sq[e].push(std::norm(cplx(re(v) - target, im(v))));
      if (!s.samples.empty()) s.samples[e].push_back(re(res));
      row[e] = re(v);
    }
    s.cov.push(row);
  });

  FluctuationRun run;
  run.excursion = {state.exc.checked, state.exc.exceeded, opt.excursion_delta};
  run.correlation.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      run.correlation(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = state.cov.correlation(a, b);

  for (std::size_t e = 0; e < k; ++e) {
    FluctuationReport rep;
    rep.entry = entries[e];
    rep.f_id = f.id();
    rep.n = n;
    rep.replicas = replicas;
    rep.raw_var = state.raw_re[e].variance() + state.raw_im[e].variance();
    rep.raw_var_se = std::hypot(state.raw_re[e].variance_stderr(), state.raw_im[e].variance_stderr());
    rep.residual_var = state.res_re[e].variance() + state.res_im[e].variance();
    rep.residual_var_se = std::hypot(state.res_re[e].variance_stderr(), state.res_im[e].variance_stderr());
    rep.w_var = state.w_re[e].variance() + state.w_im[e].variance();
    rep.target_centered_var = state.target_sq[e].mean();
    rep.centering_gap_se = rep.raw_var_se > 0.0 ? (rep.target_centered_var - rep.raw_var) / rep.raw_var_se : 0.0;
    if (replicas >= 20) {
      const NormalityStat ns = normality_stat(state.res_re[e]);
      rep.skew = ns.skew;
      rep.excess_kurtosis = ns.excess_kurtosis;
      rep.jb_stat = ns.jb;
      rep.degenerate = ns.degenerate;
    }
    rep.predicted = pred[e];
    const double var_w = entries[e].diagonal() ? p.diag_sigma1 * p.diag_sigma1 : p.sigma * p.sigma;
    rep.predicted_raw_var = pred[e].limit_variance + pred[e].coeff_w * pred[e].coeff_w * var_w;
    if (opt.keep_samples) rep.samples = state.samples[e];
    run.entries.push_back(rep);
  }
  return run;
}

template <class Fn>
auto dispatch(Symmetry s, Fn&& fn) {
  if (s == Symmetry::RealSymmetric) return fn(double{});
  return fn(cplx{});
}

}  // namespace

FluctuationRun entry_fluctuation_mc(const EnsembleProfile& profile, const TestFunction& f,
                                    const std::vector<Entry>& entries, std::size_t n, std::size_t replicas,
                                    std::uint64_t seed, const McOptions& opt) {
  return dispatch(profile.symmetry, [&](auto tag) {
    return fluctuation_impl<decltype(tag)>(profile, f, entries, n, replicas, seed, opt);
  });
}

FluctuationReport entry_fluctuation_mc(const EnsembleProfile& profile, const TestFunction& f, Entry entry,
                                       std::size_t n, std::size_t replicas, std::uint64_t seed, const McOptions& opt) {
  return entry_fluctuation_mc(profile, f, std::vector<Entry>{entry}, n, replicas, seed, opt).entries.front();
}

double independence_check(const EnsembleProfile& profile, const TestFunction& f, const std::vector<Entry>& entries,
                          std::size_t n, std::size_t replicas, std::uint64_t seed, const McOptions& opt) {
  const FluctuationRun run = entry_fluctuation_mc(profile, f, entries, n, replicas, seed, opt);
  double worst = 0.0;
  for (Eigen::Index a = 0; a < run.correlation.rows(); ++a)
    for (Eigen::Index b = a + 1; b < run.correlation.cols(); ++b)
      worst = std::max(worst, std::abs(run.correlation(a, b)));
  return worst;
}

// ---------------------------------------------------------------- resolvent scaling

const char* to_string(ScalingQuantity q) {
  switch (q) {
    case ScalingQuantity::BiasDiag: return "bias_diag";
    case ScalingQuantity::VarEntry: return "var_entry";
    case ScalingQuantity::MeanOffdiag: return "mean_offdiag";
    case ScalingQuantity::MasterDiag: return "master_diag";
    case ScalingQuantity::MasterOffdiag: return "master_offdiag";
  }
  return "?";
}

const ScalingReport& ScalingScan::get(ScalingQuantity q) const {
  for (const auto& r : reports)
    if (r.quantity == q) return r;
  throw DomainError(std::string("scan has no ") + to_string(q) + " report");
}

namespace {

struct ComplexMean {
  MomentAccumulator re, im;
  void push(cplx v) {
    re.push(v.real());
    im.push(v.imag());
  }
  void merge(const ComplexMean& o) {
    re.merge(o.re);
    im.merge(o.im);
  }
  cplx mean() const { return {re.mean(), im.mean()}; }
  double mean_se() const { return std::hypot(re.mean_stderr(), im.mean_stderr()); }
  double variance() const { return re.variance() + im.variance(); }
  double variance_se() const { return std::hypot(re.variance_stderr(), im.variance_stderr()); }
};

struct ScanState {
  ComplexMean diag, offmean, master_d, master_o;
  std::vector<ComplexMean> pairs;
  explicit ScanState(std::size_t npairs) : pairs(npairs) {}
  void merge(const ScanState& o) {
    diag.merge(o.diag);
    offmean.merge(o.offmean);
    master_d.merge(o.master_d);
    master_o.merge(o.master_o);
    for (std::size_t k = 0; k < pairs.size(); ++k) pairs[k].merge(o.pairs[k]);
  }
};

template <class Scalar>
ScanState scan_one(const EnsembleProfile& p, cplx z, std::size_t replicas, std::uint64_t seed, const McOptions& opt) {
  const std::size_t n = p.n;
  const auto nn = static_cast<Eigen::Index>(n);
  const double nd = static_cast<double>(n);
  const double s2 = p.sigma * p.sigma;
  const Eigen::Index nprobe = std::min<Eigen::Index>(4, nn);
  const bool pooled = p.row_exchangeable();
  Mat<Scalar> probes = Mat<Scalar>::Zero(nn, nprobe + (pooled ? 1 : 0));
  for (Eigen::Index k = 0; k < nprobe; ++k) probes(k, k) = 1.0;
  if (pooled) probes.col(nprobe).setConstant(1.0 / std::sqrt(nd));
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index a = 0; a < nprobe; ++a)
    for (Eigen::Index b = a + 1; b < nprobe; ++b) {
      pairs.emplace_back(a, b);
      if (!pooled) break;  // without exchangeability only R12 is the target
    }
  if (!pooled) pairs.resize(std::min<std::size_t>(pairs.size(), 1));

  return run_replicas(replicas, opt.exec, ScanState(pairs.size()), [&](std::size_t r, ScanState& s) {
    const Mat<Scalar> x = sample<Scalar>(p, seed, r, Exec::Serial) / std::sqrt(nd);
    const auto ps = project_spectrum<Scalar>(x, probes);
    const Eigen::MatrixXcd rb = ps.resolvent(z);
    cplx tr(0.0);
    for (Eigen::Index k = 0; k < nn; ++k) tr += 1.0 / (z - ps.eigenvalues(k));
    tr /= nd;
    for (std::size_t k = 0; k < pairs.size(); ++k) s.pairs[k].push(rb(pairs[k].first, pairs[k].second));
    if (pooled) {
      const cplx off = (nd * rb(nprobe, nprobe) - nd * tr) / (nd * (nd - 1.0));
      s.diag.push(tr);
      s.offmean.push(off);
      s.master_d.push(z * tr - 1.0 - s2 * tr * tr);
      s.master_o.push(z * off - s2 * off * tr);
    } else {
      const cplx r11 = rb(0, 0);
      const cplx r12 = nprobe > 1 ? rb(0, 1) : cplx(0.0);
      s.diag.push(r11);
      s.offmean.push(r12);
      s.master_d.push(z * r11 - 1.0 - s2 * r11 * tr);
      s.master_o.push(z * r12 - s2 * r12 * tr);
    }
  });
}

void finish(ScalingReport& rep) {
  rep.degenerate = false;
  bool positive = true;
  for (std::size_t k = 0; k < rep.values.size(); ++k) {
    if (rep.values[k] <= 3.0 * rep.std_errors[k]) rep.degenerate = true;
    if (!(rep.values[k] > 0.0)) positive = false;
  }
  if (positive && rep.values.size() >= 4) {
    std::vector<double> ns(rep.ns.begin(), rep.ns.end());
    const SlopeFit fit = loglog_slope(ns, rep.values);
    rep.slope = fit.slope;
    rep.slope_stderr = fit.stderr;
    rep.fitted = true;
  }
  if (rep.degenerate) rep.note = "value within 3 standard errors of zero: Monte Carlo noise floor";
}

}  // namespace

ScalingScan resolvent_scaling_scan(const EnsembleProfile& profile, cplx z, const std::vector<std::size_t>& ns,
                                   const std::vector<std::size_t>& replicas, std::uint64_t seed, const McOptions& opt) {
  if (z.imag() == 0.0) throw DomainError("resolvent scan needs Im z != 0");
  if (ns.size() < 4) throw DomainError("resolvent scan needs at least 4 sizes");
  for (std::size_t k = 1; k < ns.size(); ++k)
    if (ns[k] <= ns[k - 1]) throw DomainError("sizes must be strictly increasing");
  if (replicas.size() != 1 && replicas.size() != ns.size())
    throw DomainError("replica list must hold one count or one per size");
  const cplx g = stieltjes(z, SemicircleParams(profile.sigma));
  bool fifth = profile.law.finite_fifth_moment() && profile.diag_law.finite_fifth_moment();
  for (const auto& rl : profile.row_laws) fifth = fifth && rl.law.finite_fifth_moment();

  ScalingScan scan;
  scan.z = z;
  for (auto q : {ScalingQuantity::BiasDiag, ScalingQuantity::VarEntry, ScalingQuantity::MeanOffdiag,
                 ScalingQuantity::MasterDiag, ScalingQuantity::MasterOffdiag}) {
    ScalingReport r;
    r.quantity = q;
    scan.reports.push_back(r);
  }
  auto at = [&](ScalingQuantity q) -> ScalingReport& {
    for (auto& r : scan.reports)
      if (r.quantity == q) return r;
    throw DomainError("missing report");
  };

  for (std::size_t k = 0; k < ns.size(); ++k) {
    const std::size_t n = ns[k];
    if (n < 2) throw DomainError("sizes must be at least 2");
    const std::size_t reps = replicas.size() == 1 ? replicas[0] : replicas[k];
    if (reps < 2) throw DomainError("need at least 2 replicas");
    const EnsembleProfile p = profile.with_n(n);
    const std::uint64_t sd = mix_seed(seed, n);
    const ScanState s = dispatch(p.symmetry, [&](auto tag) { return scan_one<decltype(tag)>(p, z, reps, sd, opt); });
    auto push = [&](ScalingQuantity q, double v, double se) {
      auto& r = at(q);
      r.ns.push_back(n);
      r.values.push_back(v);
      r.std_errors.push_back(se);
    };
    push(ScalingQuantity::BiasDiag, std::abs(s.diag.mean() - g), s.diag.mean_se());
    double var = 0.0, var_se2 = 0.0;
    for (const auto& pr : s.pairs) {
      var += pr.variance();
      var_se2 += pr.variance_se() * pr.variance_se();
    }
    const double np = static_cast<double>(s.pairs.size());
    push(ScalingQuantity::VarEntry, var / np, std::sqrt(var_se2) / np);
    if (fifth) push(ScalingQuantity::MeanOffdiag, std::abs(s.offmean.mean()), s.offmean.mean_se());
    push(ScalingQuantity::MasterDiag, std::abs(s.master_d.mean()), s.master_d.mean_se());
    push(ScalingQuantity::MasterOffdiag, std::abs(s.master_o.mean()), s.master_o.mean_se());
  }
  for (auto& r : scan.reports) {
    if (r.quantity == ScalingQuantity::MeanOffdiag && !fifth) {
      r.note = "skipped: an entry law lacks a finite fifth moment";
      continue;
    }
    finish(r);
  }
  return scan;
}

MasterResidual master_equation_residual(const EnsembleProfile& profile, cplx z, std::size_t n, std::size_t replicas,
                                        std::uint64_t seed, const McOptions& opt) {
  if (z.imag() == 0.0) throw DomainError("master equation residual needs Im z != 0");
  if (n < 2 || replicas < 2) throw DomainError("need N >= 2 and at least 2 replicas");
  const EnsembleProfile p = profile.with_n(n);
  const ScanState s =
      dispatch(p.symmetry, [&](auto tag) { return scan_one<decltype(tag)>(p, z, replicas, mix_seed(seed, n), opt); });
  MasterResidual m;
  m.diag = std::abs(s.master_d.mean());
  m.diag_se = s.master_d.mean_se();
  m.offdiag = std::abs(s.master_o.mean());
  m.offdiag_se = s.master_o.mean_se();
  return m;
}

// ---------------------------------------------------------------- resolvent field

namespace {

struct FieldState {
  CovarianceAccumulator exact, linear;
  explicit FieldState(std::size_t d) : exact(d), linear(d) {}
  void merge(const FieldState& o) {
    exact.merge(o.exact);
    linear.merge(o.linear);
  }
};

std::vector<FieldComparison> field_table(const CovarianceAccumulator& acc, const std::vector<Entry>& entries,
                                         const std::vector<cplx>& zs, const SemicircleParams& sp,
                                         const std::vector<double>& kappa4, Symmetry sym, double& max_rel) {
  const std::size_t nz = zs.size();
  auto index = [&](std::size_t e, std::size_t t, int part) { return (e * nz + t) * 2 + static_cast<std::size_t>(part); };
  std::vector<FieldComparison> table;
  max_rel = 0.0;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const double k4 = kappa4[entries[e].i - 1];
    for (std::size_t t = 0; t < nz; ++t) {
      const FieldCovariance vz = predict_field_covariance(zs[t], zs[t], sp, k4, sym, entries[e]);
      for (std::size_t u = t; u < nz; ++u) {
        const FieldCovariance vw = predict_field_covariance(zs[u], zs[u], sp, k4, sym, entries[e]);
        const FieldCovariance pr = predict_field_covariance(zs[t], zs[u], sp, k4, sym, entries[e]);
        struct Item {
          const char* name;
          int a, b;
          double pred, va, vb;
        };
        std::vector<Item> items{{"re_re", 0, 0, pr.re_re, vz.re_re, vw.re_re},
                                {"im_im", 1, 1, pr.im_im, vz.im_im, vw.im_im},
                                {"re_im", 0, 1, pr.re_im, vz.re_re, vw.im_im}};
        if (u != t) items.push_back({"im_re", 1, 0, pr.im_re, vz.im_im, vw.re_re});
        for (const auto& it : items) {
          FieldComparison c;
          c.entry = entries[e];
          c.zi = t;
          c.wi = u;
          c.component = it.name;
          c.empirical = acc.covariance(index(e, t, it.a), index(e, u, it.b));
          c.predicted = it.pred;
          const double geo = std::sqrt(std::max(0.0, it.va) * std::max(0.0, it.vb));
          if (std::abs(it.pred) > 1e-9 * std::max(1.0, geo)) {
            c.scale = std::abs(it.pred);
          } else if (geo > 1e-12) {
            c.scale = geo;
          } else {
            c.scale = 1.0;
            c.absolute = true;
          }
          c.rel_error = std::abs(c.empirical - c.predicted) / c.scale;
          if (!c.absolute) max_rel = std::max(max_rel, c.rel_error);
          table.push_back(c);
        }
      }
    }
  }
  return table;
}

template <class Scalar>
FieldCovarianceReport field_impl(const EnsembleProfile& profile, std::size_t m, const std::vector<cplx>& zs,
                                 std::size_t n, std::size_t replicas, std::uint64_t seed, const McOptions& opt) {
  const EnsembleProfile p = profile.with_n(n);
  p.validate();
  const SemicircleParams sp(p.sigma);
  std::vector<cplx> gs;
  for (cplx z : zs) gs.push_back(stieltjes(z, sp));
  std::vector<Entry> entries;
  for (std::size_t i = 1; i <= m; ++i)
    for (std::size_t j = i; j <= m; ++j) entries.push_back({i, j});
  const std::size_t dim = entries.size() * zs.size() * 2;
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const auto mm = static_cast<Eigen::Index>(m);

  const FieldState st = run_replicas(replicas, opt.exec, FieldState(dim), [&](std::size_t r, FieldState& s) {
    const Mat<Scalar> w = sample<Scalar>(p, seed, r, Exec::Serial);
    const Mat<Scalar> x = w / sqrt_n;
    const auto corners = corner_resolvent_krylov<Scalar>(x, zs, m);
    const Eigen::MatrixXcd wm = w.topLeftCorner(mm, mm).template cast<cplx>();
    std::vector<double> ve(dim), vl(dim);
    for (std::size_t t = 0; t < zs.size(); ++t) {
      const cplx g = gs[t];
      const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(mm, mm);
      const Eigen::MatrixXcd y = sqrt_n * (eye / g - corners[t].inverse()) - wm;
      const Eigen::MatrixXcd lin = (sqrt_n * (corners[t] - g * eye) - g * g * wm) / (g * g);
      for (std::size_t e = 0; e < entries.size(); ++e) {
        const auto i = static_cast<Eigen::Index>(entries[e].i - 1), j = static_cast<Eigen::Index>(entries[e].j - 1);
        const std::size_t base = (e * zs.size() + t) * 2;
        ve[base] = y(i, j).real();
        ve[base + 1] = y(i, j).imag();
        vl[base] = lin(i, j).real();
        vl[base + 1] = lin(i, j).imag();
      }
    }
    s.exact.push(ve);
    s.linear.push(vl);
  });

  FieldCovarianceReport rep;
  rep.m = m;
  rep.n = n;
  rep.replicas = replicas;
  rep.z_list = zs;
  for (std::size_t i = 1; i <= m; ++i) rep.kappa4.push_back(row_moments(p, n, i).kappa4_limit);
  rep.table = field_table(st.exact, entries, zs, sp, rep.kappa4, p.symmetry, rep.max_rel_error);
  rep.linearized_table = field_table(st.linear, entries, zs, sp, rep.kappa4, p.symmetry, rep.linearized_max_rel_error);
  return rep;
}

}  // namespace

FieldCovarianceReport resolvent_field_mc(const EnsembleProfile& profile, std::size_t m, const std::vector<cplx>& z_list,
                                         std::size_t n, std::size_t replicas, std::uint64_t seed, const McOptions& opt) {
  if (m < 1 || m > 4) throw DomainError("field dimension m must lie in 1..4");
  if (m >= n) throw DomainError("field dimension must be below N");
  if (z_list.empty()) throw DomainError("empty z list");
  for (cplx z : z_list)
    if (z.imag() == 0.0 && std::abs(z.real()) <= 2.0 * profile.sigma)
      throw DomainError("real z must lie outside the semicircle support");
  if (replicas < 2) throw DomainError("need at least 2 replicas");
  return dispatch(profile.symmetry,
                  [&](auto tag) { return field_impl<decltype(tag)>(profile, m, z_list, n, replicas, seed, opt); });
}

// ---------------------------------------------------------------- variance bound

VarianceBound variance_bound_diagnostic(const EnsembleProfile& profile, const TestFunction& f, double s,
                                        const std::vector<std::size_t>& ns, std::size_t replicas, std::uint64_t seed,
                                        Entry entry, const McOptions& opt) {
  if (!(s > 3.0)) throw DomainError("variance bound needs s > 3");
  if (replicas < 2) throw DomainError("need at least 2 replicas");
  VarianceBound out;
  out.norm = f.is_zero() ? 0.0 : sobolev_norm(f, s).value;
  McOptions o = opt;
  o.excursion_stride = 0;
  for (std::size_t n : ns) {
    double var = 0.0;
    if (!f.is_zero()) {
      const FluctuationRun run = entry_fluctuation_mc(profile, f, std::vector<Entry>{entry}, n, replicas, mix_seed(seed, n), o);
      var = run.entries[0].raw_var / static_cast<double>(n);
    }
    out.ns.push_back(n);
    out.variances.push_back(var);
    out.ratios.push_back(out.norm > 0.0 ? static_cast<double>(n) * var / (out.norm * out.norm) : 0.0);
  }
  const auto [lo, hi] = std::minmax_element(out.ratios.begin(), out.ratios.end());
  out.max_over_min = *lo > 0.0 ? *hi / *lo : (*hi > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  return out;
}

// ---------------------------------------------------------------- norm convergence

namespace {

struct IndexedValues {
  std::vector<std::pair<std::size_t, double>> items;
  void merge(const IndexedValues& o) { items.insert(items.end(), o.items.begin(), o.items.end()); }
};

}  // namespace

NormConvergence norm_convergence(const EnsembleProfile& profile, std::size_t n, std::size_t replicas, std::uint64_t seed,
                                 double tolerance, const McOptions& opt) {
  const EnsembleProfile p = profile.with_n(n);
  p.validate();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const IndexedValues v = run_replicas(replicas, opt.exec, IndexedValues{}, [&](std::size_t r, IndexedValues& s) {
    const double nrm = dispatch(p.symmetry, [&](auto tag) {
      using S = decltype(tag);
      return operator_norm(eigenvalues<S>(Mat<S>(sample<S>(p, seed, r, Exec::Serial) / sqrt_n)));
    });
    s.items.emplace_back(r, nrm);
  });
  NormConvergence out;
  out.n = n;
  out.replicas = replicas;
  out.tolerance = tolerance;
  for (const auto& [r, x] : v.items) {
    out.norms.push_back(x);
    out.within += std::abs(x - 2.0 * p.sigma) <= tolerance;
  }
  return out;
}

// ---------------------------------------------------------------- truncation

double default_truncation_eps(std::size_t n) {
  const double nd = static_cast<double>(n);
  return (1.2 + 0.6 * std::log(nd)) / std::sqrt(nd);
}

namespace {

// P(|W| > c) for one entry
double exceed_probability(const EntryLaw& law, double scale, double c, bool complex_entry) {
  const double t = c / scale;
  if (!complex_entry) {
    const double bp[2] = {-t, t};
    return law.expect([&](double x) { return std::abs(x) > t ? 1.0 : 0.0; }, bp);
  }
  const double rad = std::sqrt(2.0) * t;
  const double radii[1] = {rad};
  return law.expect2([&](double a, double b) { return a * a + b * b > rad * rad ? 1.0 : 0.0; }, radii);
}

double change_probability(const EntryLaw& law, double scale, double c, bool diagonal, bool complex_entry) {
  const EntryRepair rep = EntryRepair::build(law, scale, c, diagonal, complex_entry && !diagonal);
  const double q = exceed_probability(law, scale, c, complex_entry && !diagonal);
  return rep.weight + (1.0 - rep.weight) * q;
}

struct TruncState {
  std::size_t changed_replicas = 0;
  double changed_entries = 0.0;
  void merge(const TruncState& o) {
    changed_replicas += o.changed_replicas;
    changed_entries += o.changed_entries;
  }
};

}  // namespace

std::vector<TruncationPoint> truncation_demo(const EnsembleProfile& profile, const std::vector<std::size_t>& ns,
                                             const std::vector<double>& eps, std::size_t replicas, std::uint64_t seed,
                                             const McOptions& opt) {
  if (eps.size() != ns.size()) throw DomainError("one epsilon per size is required");
  if (replicas < 1) throw DomainError("need at least 1 replica");
  std::vector<TruncationPoint> out;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const std::size_t n = ns[k];
    const EnsembleProfile p = profile.with_n(n);
    p.validate();
    const double c = eps[k] * std::sqrt(static_cast<double>(n));
    const bool cx = p.symmetry == Symmetry::Hermitian;
    const std::uint64_t sd = mix_seed(seed, n);

    // exact P(W~ != W): entries change independently
    double log_same = static_cast<double>(n) * std::log1p(-change_probability(p.diag_law, p.diag_sigma1, c, true, false));
    std::map<std::string, std::pair<EntryLaw, double>> counts;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        if (p.row_exchangeable()) break;
        const EntryLaw& law = p.law_at(i, j);
        auto& slot = counts.try_emplace(law.id(), law, 0.0).first->second;
        slot.second += 1.0;
      }
    if (p.row_exchangeable())
      counts.emplace(p.law.id(), std::make_pair(p.law, 0.5 * static_cast<double>(n) * static_cast<double>(n - 1)));
    for (const auto& [id, lc] : counts)
      log_same += lc.second * std::log1p(-change_probability(lc.first, p.sigma, c, false, cx));

    const TruncState st = run_replicas(replicas, opt.exec, TruncState{}, [&](std::size_t r, TruncState& s) {
      const std::size_t changed = dispatch(p.symmetry, [&](auto tag) {
        using S = decltype(tag);
        const Mat<S> w = sample<S>(p, sd, r, Exec::Serial);
        return truncate_regularize<S>(w, p, eps[k], sd, r).changed;
      });
      s.changed_replicas += changed > 0;
      s.changed_entries += static_cast<double>(changed);
    });
    TruncationPoint pt;
    pt.n = n;
    pt.eps = eps[k];
    pt.threshold = c;
    pt.replicas = replicas;
    pt.changed_replicas = st.changed_replicas;
    pt.changed_fraction = static_cast<double>(st.changed_replicas) / static_cast<double>(replicas);
    pt.exact_probability = -std::expm1(log_same);
    pt.mean_changed_entries = st.changed_entries / static_cast<double>(replicas);
    out.push_back(pt);
  }
  return out;
}

namespace {

struct RepairState {
  MomentAccumulator re, im;
  std::size_t changed = 0;
  void merge(const RepairState& o) {
    re.merge(o.re);
    im.merge(o.im);
    changed += o.changed;
  }
};

}  // namespace

RepairCheck repair_law_check(const EntryLaw& law, double scale, double c, bool diagonal, bool complex_entry,
                             std::size_t draws, std::uint64_t seed) {
  if (draws < 2) throw DomainError("need at least 2 draws");
  const bool cx = complex_entry && !diagonal;
  const EntryRepair rep = EntryRepair::build(law, scale, c, diagonal, cx);
  const RepairState st = run_replicas(draws, Exec::Parallel, RepairState{}, [&](std::size_t d, RepairState& s) {
    const auto lo = static_cast<std::uint32_t>(d), hi = static_cast<std::uint32_t>(d >> 32);
    EntryStream src(seed, 0, lo, hi, 0);
    EntryStream rs(seed, 0, lo, hi, 1);
    if (cx) {
      const double a = law.draw(src), b = law.draw(src);
      const cplx w = scale * cplx(a, b) / std::sqrt(2.0);
      const cplx v = rep.apply(w, rs);
      s.re.push(v.real());
      s.im.push(v.imag());
      s.changed += v != w;
    } else {
      const double w = scale * law.draw(src);
      const double v = rep.apply(w, rs);
      s.re.push(v);
      s.im.push(0.0);
      s.changed += v != w;
    }
  });
  RepairCheck out;
  out.draws = draws;
  out.mean_re = st.re.mean();
  out.mean_im = st.im.mean();
  out.mean_se = std::hypot(st.re.mean_stderr(), st.im.mean_stderr());
  out.variance = st.re.variance() + st.im.variance();
  out.variance_se = std::hypot(st.re.variance_stderr(), st.im.variance_stderr());
  out.target_variance = scale * scale;
  out.changed_fraction = static_cast<double>(st.changed) / static_cast<double>(draws);
  return out;
}

}  // namespace wlab
