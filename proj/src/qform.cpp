#include "wlab/qform.hpp"

#include <cmath>

#include "wlab/replicas.hpp"
#include "wlab/spectral.hpp"
#include "wlab/stats.hpp"

namespace wlab {

namespace {

constexpr std::uint32_t kQFormPurpose = 2;

bool is_real_matrix(const Eigen::MatrixXcd& b) {
  return b.imag().cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff());
}

void check_hermitian(const Eigen::MatrixXcd& b, const char* what) {
  if (b.rows() != b.cols()) throw DomainError(std::string(what) + " must be square");
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if ((b - b.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw DomainError(std::string(what) + " must be self-adjoint");
}

bool is_diagonal(const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd off = b;
  off.diagonal().setZero();
  return off.cwiseAbs().maxCoeff() == 0.0;
}

double law_kappa4(const EntryLaw& law, QFormCase c) {
  return c == QFormCase::Real ? law.fourth_moment() - 3.0 : law.complex_fourth_moment() - 2.0;
}

// One coordinate of y from its own stream.
cplx draw_coordinate(const EntryLaw& law, QFormCase c, std::uint64_t seed, std::uint64_t r, std::size_t i, std::size_t s) {
  EntryStream st(seed, r, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(s), kQFormPurpose);
  const double a = law.draw(st);
  if (c == QFormCase::Real) return {a, 0.0};
  const double b = law.draw(st);
  return cplx(a, b) / std::sqrt(2.0);
}

}  // namespace

const char* to_string(QFormCase c) { return c == QFormCase::Real ? "real" : "complex"; }

const EntryLaw& QFormSpec::law_at(std::size_t i) const {
  for (const auto& cl : coordinate_laws)
    if (cl.row == i) return cl.law;
  return law;
}

double QFormSpec::kappa4(std::size_t i) const { return law_kappa4(law_at(i), qcase); }

void QFormSpec::validate() const {
  if (n < 1) throw DomainError("quadratic form needs N >= 1");
  for (const auto& cl : coordinate_laws)
    if (cl.row < 1 || cl.row > n) throw DomainError("coordinate law index outside 1..N");
  if (matrix == QFormMatrixKind::Explicit) {
    if (static_cast<std::size_t>(explicit_b.rows()) != n) throw DomainError("explicit B must be N x N");
    check_hermitian(explicit_b, "B");
    if (qcase == QFormCase::Real && !is_real_matrix(explicit_b)) throw DomainError("real case needs a real symmetric B");
  }
  if ((matrix == QFormMatrixKind::FrozenResolventRe || matrix == QFormMatrixKind::FrozenResolventIm) && z.imag() == 0.0)
    throw DomainError("frozen resolvent needs Im z != 0");
}

Eigen::MatrixXcd QFormSpec::build_matrix() const {
  validate();
  const auto nn = static_cast<Eigen::Index>(n);
  switch (matrix) {
    case QFormMatrixKind::Identity: return Eigen::MatrixXcd::Identity(nn, nn);
    case QFormMatrixKind::DiagRamp: {
      Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(nn, nn);
      for (Eigen::Index i = 0; i < nn; ++i) b(i, i) = static_cast<double>(i + 1) / static_cast<double>(n);
      return b;
    }
    case QFormMatrixKind::FrozenResolventRe:
    case QFormMatrixKind::FrozenResolventIm: {
      const double sn = std::sqrt(static_cast<double>(n));
      Eigen::MatrixXcd r;
      if (qcase == QFormCase::Real) {
        const Mat<double> x = sample<double>(EnsembleProfile::goe(n), frozen_seed, 0) / sn;
        r = resolvent(eigh<double>(x), z).entries;
      } else {
        const Mat<cplx> x = sample<cplx>(EnsembleProfile::gue(n), frozen_seed, 0) / sn;
        r = resolvent(eigh<cplx>(x), z).entries;
      }
      Eigen::MatrixXcd b = matrix == QFormMatrixKind::FrozenResolventRe ? Eigen::MatrixXcd(0.5 * (r + r.adjoint()))
                                                                       : Eigen::MatrixXcd((r - r.adjoint()) / cplx(0.0, 2.0));
      b = 0.5 * (b + b.adjoint()).eval();
      if (qcase == QFormCase::Real) b = b.real().cast<cplx>();
      return b;
    }
    case QFormMatrixKind::Explicit: return explicit_b;
  }
  return {};
}

QFormPrediction qform_predict(const Eigen::MatrixXcd& b, const std::vector<double>& kappa4, QFormCase qcase) {
  check_hermitian(b, "B");
  const auto n = b.rows();
  if (static_cast<Eigen::Index>(kappa4.size()) != n) throw DomainError("one kappa4 per coordinate is required");
  const double nd = static_cast<double>(n);
  QFormPrediction p;
  p.a2 = b.cwiseAbs2().sum() / nd;  // Tr(B* B)/N
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) s += std::norm(b(i, i)) * kappa4[static_cast<std::size_t>(i)];
  p.a1 = s / nd;
  p.v2 = qcase == QFormCase::Real ? p.a1 + 2.0 * p.a2 : p.a1 + p.a2;
  const double tol = 1e-10 * std::max(1.0, p.a2);
  if (p.v2 < -tol) throw DomainError("negative quadratic-form variance");
  p.v2 = std::max(p.v2, 0.0);
  return p;
}

QFormPrediction qform_predict(const QFormSpec& spec) {
  const Eigen::MatrixXcd b = spec.build_matrix();
  std::vector<double> k4(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) k4[i] = spec.kappa4(i + 1);
  return qform_predict(b, k4, spec.qcase);
}

namespace {

struct QState {
  MomentAccumulator acc;
  void merge(const QState& o) { acc.merge(o.acc); }
};

}  // namespace

QFormReport qform_mc(const QFormSpec& spec, std::size_t replicas, std::uint64_t seed, Exec exec) {
  if (replicas < 2) throw DomainError("need at least 2 replicas");
  const Eigen::MatrixXcd b = spec.build_matrix();
  std::vector<double> k4(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) k4[i] = spec.kappa4(i + 1);
  const QFormPrediction pred = qform_predict(b, k4, spec.qcase);
  const bool diag = is_diagonal(b);
  const bool real = spec.qcase == QFormCase::Real;
  const Eigen::MatrixXd br = b.real();
  const double tr = b.trace().real();
  const double sn = std::sqrt(static_cast<double>(spec.n));
  const auto nn = static_cast<Eigen::Index>(spec.n);
  std::vector<const EntryLaw*> laws(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) laws[i] = &spec.law_at(i + 1);

  const QState st = run_replicas(replicas, exec, QState{}, [&](std::size_t r, QState& s) {
    double form = 0.0;
    if (real) {
      Eigen::VectorXd y(nn);
      for (Eigen::Index i = 0; i < nn; ++i)
        y(i) = draw_coordinate(*laws[static_cast<std::size_t>(i)], spec.qcase, seed, r, static_cast<std::size_t>(i), 0).real();
      form = diag ? (br.diagonal().array() * y.array().square()).sum() : y.dot(br * y);
    } else {
      Eigen::VectorXcd y(nn);
      for (Eigen::Index i = 0; i < nn; ++i)
        y(i) = draw_coordinate(*laws[static_cast<std::size_t>(i)], spec.qcase, seed, r, static_cast<std::size_t>(i), 0);
      form = diag ? (b.diagonal().real().array() * y.array().abs2()).sum() : y.dot(b * y).real();
    }
    s.acc.push((form - tr) / sn);
  });

  QFormReport rep;
  rep.n = spec.n;
  rep.replicas = replicas;
  rep.mean = st.acc.mean();
  rep.mean_se = st.acc.mean_stderr();
  rep.variance = st.acc.variance();
  rep.variance_se = st.acc.variance_stderr();
  if (replicas >= 20) {
    const NormalityStat ns = normality_stat(st.acc);
    rep.skew = ns.skew;
    rep.excess_kurtosis = ns.excess_kurtosis;
    rep.jb_stat = ns.jb;
    rep.degenerate = ns.degenerate;
  }
  rep.b_norm = operator_norm(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(b, Eigen::EigenvaluesOnly).eigenvalues());
  rep.predicted = pred;
  return rep;
}

double qform_variance_enumeration(const Eigen::MatrixXcd& b, const std::vector<EntryLaw>& laws, QFormCase qcase) {
  check_hermitian(b, "B");
  const auto n = static_cast<std::size_t>(b.rows());
  if (n < 1 || n > 8) throw DomainError("enumeration is limited to 1 <= N <= 8");
  if (laws.size() != n) throw DomainError("one law per coordinate is required");
  // per-coordinate outcomes (value, probability)
  std::vector<std::vector<std::pair<cplx, double>>> outcomes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto at = laws[i].support();
    if (qcase == QFormCase::Real) {
      for (auto [v, p] : at) outcomes[i].push_back({cplx(v, 0.0), p});
    } else {
      for (auto [va, pa] : at)
        for (auto [vb, pb] : at) outcomes[i].push_back({cplx(va, vb) / std::sqrt(2.0), pa * pb});
    }
  }
  const double tr = b.trace().real();
  std::vector<std::size_t> pick(n, 0);
  Eigen::VectorXcd y(static_cast<Eigen::Index>(n));
  double total = 0.0;
  while (true) {
    double prob = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      y(static_cast<Eigen::Index>(i)) = outcomes[i][pick[i]].first;
      prob *= outcomes[i][pick[i]].second;
    }
    const double dev = y.dot(b * y).real() - tr;
    total += prob * dev * dev;
    std::size_t k = 0;
    while (k < n && ++pick[k] == outcomes[k].size()) pick[k++] = 0;
    if (k == n) break;
  }
  return total / static_cast<double>(n);
}

double qform_lindeberg(const QFormSpec& spec, double eps) {
  spec.validate();
  if (!(eps > 0.0)) throw DomainError("lindeberg needs eps > 0");
  const double cut = eps * std::sqrt(static_cast<double>(spec.n));
  auto term = [&](const EntryLaw& law) {
    if (spec.qcase == QFormCase::Real) {
      const double t = std::sqrt(1.0 + cut), u = std::sqrt(std::max(0.0, 1.0 - cut));
      const double bp[4] = {-t, -u, u, t};
      return law.expect(
          [&](double a) {
            const double d = a * a - 1.0;
            return std::abs(d) > cut ? d * d : 0.0;
          },
          bp);
    }
    const double radii[2] = {std::sqrt(2.0 * std::max(0.0, 1.0 - cut)), std::sqrt(2.0 * (1.0 + cut))};
    return law.expect2(
        [&](double a, double b) {
          const double d = 0.5 * (a * a + b * b) - 1.0;
          return std::abs(d) > cut ? d * d : 0.0;
        },
        radii);
  };
  double sum = 0.0;
  if (spec.coordinate_laws.empty()) {
    sum = static_cast<double>(spec.n) * term(spec.law);
  } else {
    for (std::size_t i = 1; i <= spec.n; ++i) sum += term(spec.law_at(i));
  }
  return sum / static_cast<double>(spec.n);
}

void QFormFamily::validate() const {
  if (r < 1 || r > 4) throw DomainError("family size r must lie in 1..4");
  if (n < 1) throw DomainError("family needs N >= 1");
  if (blocks.size() != r * r) throw DomainError("family needs r*r blocks");
  if (laws.size() != r) throw DomainError("family needs one law per vector");
  const auto nn = static_cast<Eigen::Index>(n);
  for (std::size_t s = 0; s < r; ++s)
    for (std::size_t t = 0; t < r; ++t) {
      const auto& b = block(s, t);
      if (b.rows() != nn || b.cols() != nn) throw DomainError("family blocks must be N x N");
      const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
      if ((b - block(t, s).adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw DomainError("family symmetry violated: B^{s,t} must equal (B^{t,s})*");
      if (qcase == QFormCase::Real && !is_real_matrix(b)) throw DomainError("real case needs real blocks");
    }
}

namespace {

struct MState {
  CovarianceAccumulator cov;
  std::vector<MomentAccumulator> acc;
  explicit MState(std::size_t d) : cov(d), acc(d) {}
  void merge(const MState& o) {
    cov.merge(o.cov);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k].merge(o.acc[k]);
  }
};

}  // namespace

MatrixQFormReport qform_matrix_mc(const QFormFamily& fam, std::size_t replicas, std::uint64_t seed, Exec exec) {
  fam.validate();
  if (replicas < 2) throw DomainError("need at least 2 replicas");
  const double nd = static_cast<double>(fam.n);
  const double sn = std::sqrt(nd);
  const auto nn = static_cast<Eigen::Index>(fam.n);
  const bool real = fam.qcase == QFormCase::Real;

  // components: G_ss (real) and, for s < t, G_st (real case) or Re/Im G_st (complex case)
  MatrixQFormReport rep;
  struct Slot {
    std::size_t s, t;
    bool imag;
  };
  std::vector<Slot> slots;
  for (std::size_t s = 0; s < fam.r; ++s)
    for (std::size_t t = s; t < fam.r; ++t) {
      const auto& b = fam.block(s, t);
      const double a2 = b.cwiseAbs2().sum() / nd;
      QFormComponent c;
      c.s = s + 1;
      c.t = t + 1;
      c.part = "re";
      if (s == t) {
        double a1 = 0.0;
        const double k4 = law_kappa4(fam.laws[s], fam.qcase);
        for (Eigen::Index i = 0; i < nn; ++i) a1 += std::norm(b(i, i)) * k4;
        a1 /= nd;
        c.predicted = real ? a1 + 2.0 * a2 : a1 + a2;
        rep.components.push_back(c);
        slots.push_back({s, t, false});
      } else if (real) {
        c.predicted = a2;
        rep.components.push_back(c);
        slots.push_back({s, t, false});
      } else {
        c.predicted = 0.5 * a2;
        rep.components.push_back(c);
        slots.push_back({s, t, false});
        c.part = "im";
        rep.components.push_back(c);
        slots.push_back({s, t, true});
      }
    }
  std::vector<double> traces(fam.r);
  for (std::size_t s = 0; s < fam.r; ++s) traces[s] = fam.block(s, s).trace().real();

  const MState st = run_replicas(replicas, exec, MState(slots.size()), [&](std::size_t rr, MState& ms) {
    std::vector<Eigen::VectorXcd> ys(fam.r, Eigen::VectorXcd(nn));
    for (std::size_t s = 0; s < fam.r; ++s)
      for (Eigen::Index i = 0; i < nn; ++i)
        ys[s](i) = draw_coordinate(fam.laws[s], fam.qcase, seed, rr, static_cast<std::size_t>(i), s);
    std::vector<double> row(slots.size());
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const auto& sl = slots[k];
      cplx g = ys[sl.s].dot(fam.block(sl.s, sl.t) * ys[sl.t]);
      if (sl.s == sl.t) g -= traces[sl.s];
      g /= sn;
      row[k] = sl.imag ? g.imag() : g.real();
      ms.acc[k].push(row[k]);
    }
    ms.cov.push(row);
  });

  rep.replicas = replicas;
  const auto d = static_cast<Eigen::Index>(slots.size());
  rep.correlation.resize(d, d);
  for (std::size_t k = 0; k < slots.size(); ++k) {
    rep.components[k].variance = st.acc[k].variance();
    rep.components[k].variance_se = st.acc[k].variance_stderr();
    for (std::size_t l = 0; l < slots.size(); ++l) {
      const double c = st.cov.correlation(k, l);
      rep.correlation(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = c;
      if (l != k && std::isfinite(c)) rep.max_abs_corr = std::max(rep.max_abs_corr, std::abs(c));
    }
  }
  return rep;
}

}  // namespace wlab
