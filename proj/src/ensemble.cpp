#include "wlab/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace wlab {

namespace {

constexpr std::uint32_t kSamplePurpose = 0;
constexpr std::uint32_t kRepairPurpose = 1;

double abs2(double x) { return x * x; }
double abs2(cplx x) { return std::norm(x); }

}  // namespace

EnsembleProfile EnsembleProfile::goe(std::size_t n, double sigma) {
  EnsembleProfile p;
  p.n = n;
  p.sigma = sigma;
  p.diag_sigma1 = std::sqrt(2.0) * sigma;
  return p;
}

EnsembleProfile EnsembleProfile::gue(std::size_t n, double sigma) {
  EnsembleProfile p;
  p.symmetry = Symmetry::Hermitian;
  p.n = n;
  p.sigma = sigma;
  p.diag_sigma1 = sigma;
  return p;
}

const EntryLaw& EnsembleProfile::law_at(std::size_t i, std::size_t j) const {
  const std::size_t lo = std::min(i, j) + 1, hi = std::max(i, j) + 1;
  const EntryLaw* hit = nullptr;
  std::size_t best = 0;
  for (const auto& r : row_laws) {
    if ((r.row == lo || r.row == hi) && (!hit || r.row < best)) {
      hit = &r.law;
      best = r.row;
    }
  }
  return hit ? *hit : law;
}

EnsembleProfile EnsembleProfile::with_n(std::size_t n_new) const {
  EnsembleProfile p = *this;
  p.n = n_new;
  return p;
}

void EnsembleProfile::validate() const {
  if (n < 1) throw DomainError("ensemble dimension must be at least 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive");
  if (!(diag_sigma1 > 0.0) || !std::isfinite(diag_sigma1)) throw DomainError("diag_sigma1 must be positive");
  for (const auto& r : row_laws)
    if (r.row < 1) throw DomainError("row overrides are 1-based");
}

template <class Scalar>
Scalar draw_entry(const EnsembleProfile& p, std::uint64_t seed, std::uint64_t index, std::size_t i, std::size_t j) {
  EntryStream s(seed, index, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), kSamplePurpose);
  if (i == j) return Scalar(p.diag_sigma1 * p.diag_law.draw(s));
  const EntryLaw& law = p.law_at(i, j);
  if constexpr (is_complex_v<Scalar>) {
    const double a = law.draw(s);
    const double b = law.draw(s);
    return Scalar(a, b) * (p.sigma / std::sqrt(2.0));
  } else {
    return p.sigma * law.draw(s);
  }
}

template <class Scalar>
Mat<Scalar> sample(const EnsembleProfile& p, std::uint64_t seed, std::uint64_t index, Exec exec) {
  p.validate();
  if ((p.symmetry == Symmetry::Hermitian) != is_complex_v<Scalar>)
    throw DomainError("matrix scalar type does not match the profile symmetry");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(p.n);
  Mat<Scalar> w(n, n);
  auto fill_row = [&](std::ptrdiff_t i) {
    for (std::ptrdiff_t j = i; j < n; ++j) {
      const Scalar v = draw_entry<Scalar>(p, seed, index, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      w(i, j) = v;
      if constexpr (is_complex_v<Scalar>) {
        w(j, i) = std::conj(v);
      } else {
        w(j, i) = v;
      }
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < n; ++i) fill_row(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) fill_row(i);
  }
  return w;
}

template <class Scalar>
Mat<Scalar> sample_rows(const EnsembleProfile& p, std::uint64_t seed, std::uint64_t index,
                        const std::vector<std::size_t>& rows) {
  p.validate();
  if ((p.symmetry == Symmetry::Hermitian) != is_complex_v<Scalar>)
    throw DomainError("matrix scalar type does not match the profile symmetry");
  Mat<Scalar> out(static_cast<std::ptrdiff_t>(rows.size()), static_cast<std::ptrdiff_t>(p.n));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t i = rows[r];
    if (i >= p.n) throw DomainError("row index out of range");
    for (std::size_t j = 0; j < p.n; ++j) {
      Scalar v;
      if (j >= i) {
        v = draw_entry<Scalar>(p, seed, index, i, j);
      } else {
        v = draw_entry<Scalar>(p, seed, index, j, i);
        if constexpr (is_complex_v<Scalar>) v = std::conj(v);
      }
      out(static_cast<std::ptrdiff_t>(r), static_cast<std::ptrdiff_t>(j)) = v;
    }
  }
  return out;
}

// ---------------------------------------------------------------- truncation

double tail_moment(const EntryLaw& law, double scale, double c, int power, bool complex_entry) {
  const double t = c / scale;
  if (!complex_entry) {
    const double bp[2] = {-t, t};
    return std::pow(scale, power) *
           law.expect([&](double x) { return std::abs(x) >= t ? std::pow(std::abs(x), power) : 0.0; }, bp);
  }
  // |W|^2 = scale^2 (a^2 + b^2) / 2
  const double r = std::sqrt(2.0) * t;
  const double radii[1] = {r};
  return std::pow(scale, power) * law.expect2(
                                      [&](double a, double b) {
                                        const double q = 0.5 * (a * a + b * b);
                                        return q >= t * t ? std::pow(q, 0.5 * power) : 0.0;
                                      },
                                      radii);
}

EntryRepair EntryRepair::build(const EntryLaw& law, double scale, double c, bool diagonal, bool complex_entry) {
  if (!(c > 0.0)) throw DomainError("truncation threshold must be positive");
  EntryRepair r;
  r.threshold = c;
  r.diagonal = diagonal;
  const double t = c / scale;
  cplx mu_bar(0.0);  // E of the truncated entry W 1{|W| <= c}
  double gamma2 = 0.0;
  if (!complex_entry || diagonal) {
    const double bp[2] = {-t, t};
    mu_bar = -scale * law.expect([&](double x) { return std::abs(x) > t ? x : 0.0; }, bp);
    gamma2 = scale * scale * law.expect([&](double x) { return std::abs(x) > t ? x * x : 0.0; }, bp);
  } else {
    const double rad = std::sqrt(2.0) * t;
    const double radii[1] = {rad};
    auto outside = [&](double a, double b) { return a * a + b * b > rad * rad; };
    const double ma = law.expect2([&](double a, double b) { return outside(a, b) ? a : 0.0; }, radii);
    const double mb = law.expect2([&](double a, double b) { return outside(a, b) ? b : 0.0; }, radii);
    mu_bar = -scale / std::sqrt(2.0) * cplx(ma, mb);
    gamma2 = 0.5 * scale * scale *
             law.expect2([&](double a, double b) { return outside(a, b) ? a * a + b * b : 0.0; }, radii);
  }
  const double tau = std::abs(mu_bar);
  const double tiny = 1e-15 * scale;
  if (diagonal) {
    if (tau <= tiny) return r;
    r.weight = tau / c;
    if (r.weight > 1.0) throw DomainError("infeasible repair: diagonal mixture weight exceeds 1");
    r.atom = -(1.0 - r.weight) * mu_bar.real() / r.weight;
    return r;
  }
  if (gamma2 <= tiny * tiny && tau <= tiny) return r;
  const double s_bar = scale * scale - gamma2;
  if (c * c <= s_bar) throw DomainError("infeasible repair: threshold below the truncated standard deviation");
  r.weight = gamma2 / (c * c - s_bar);
  if (r.weight > 1.0) throw DomainError("infeasible repair: mixture weight exceeds 1");
  if (tau > tiny) {
    const double d = (1.0 - r.weight) * tau / (r.weight * c);
    if (d > 1.0) throw DomainError("infeasible repair: mean cannot be restored with atoms at the threshold");
    r.plus_prob = 0.5 * (1.0 + d);
    r.direction = -mu_bar / tau;
  }
  return r;
}

template <class Scalar>
Scalar EntryRepair::apply(Scalar w, EntryStream& s, bool* truncated, bool* replaced) const {
  const bool cut = std::sqrt(abs2(w)) > threshold;
  if (truncated) *truncated = cut;
  if (weight > 0.0 && s.uniform() < weight) {
    if (replaced) *replaced = true;
    if (diagonal) return Scalar(atom);
    const double sign = s.uniform() < plus_prob ? 1.0 : -1.0;
    if constexpr (is_complex_v<Scalar>) {
      return sign * threshold * direction;
    } else {
      return sign * threshold * direction.real();
    }
  }
  if (replaced) *replaced = false;
  return cut ? Scalar(0.0) : w;
}

template <class Scalar>
TruncationResult<Scalar> truncate_regularize(const Mat<Scalar>& w, const EnsembleProfile& p, double eps_n,
                                             std::uint64_t seed, std::uint64_t index) {
  const std::size_t n = static_cast<std::size_t>(w.rows());
  if (w.cols() != w.rows()) throw DomainError("truncate_regularize needs a square matrix");
  const double c = eps_n * std::sqrt(static_cast<double>(n));
  if (!(c > 1e-12)) throw DomainError("truncation threshold eps_N sqrt(N) below the numerical floor");
  const bool cx = is_complex_v<Scalar>;

  // one repair per distinct law, built up front (the mixture weights may be infeasible)
  const EntryRepair diag = EntryRepair::build(p.diag_law, p.diag_sigma1, c, true, false);
  std::map<std::string, EntryRepair> off;
  off.emplace(p.law.id(), EntryRepair::build(p.law, p.sigma, c, false, cx));
  for (const auto& r : p.row_laws)
    if (!off.count(r.law.id())) off.emplace(r.law.id(), EntryRepair::build(r.law, p.sigma, c, false, cx));

  const EntryRepair& default_off = off.at(p.law.id());

  TruncationResult<Scalar> out;
  out.w = w;
  const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n);
  std::size_t truncated = 0, replaced = 0, changed = 0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : truncated, replaced, changed)
  for (std::ptrdiff_t i = 0; i < nn; ++i) {
    for (std::ptrdiff_t j = i; j < nn; ++j) {
      const EntryRepair& rep =
          i == j ? diag
                 : (p.row_exchangeable() ? default_off
                                         : off.at(p.law_at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).id()));
      EntryStream s(seed, index, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), kRepairPurpose);
      bool cut = false, rep_used = false;
      const Scalar v = rep.apply(w(i, j), s, &cut, &rep_used);
      truncated += cut;
      replaced += rep_used;
      changed += (v != w(i, j));
      out.w(i, j) = v;
      if constexpr (is_complex_v<Scalar>) {
        out.w(j, i) = std::conj(v);
      } else {
        out.w(j, i) = v;
      }
    }
  }
  out.truncated = truncated;
  out.replaced = replaced;
  out.changed = changed;
  return out;
}

// ---------------------------------------------------------------- Lindeberg, moments

LindebergReport lindeberg(const EnsembleProfile& p, std::size_t n, double epsilon, LindebergVariant variant,
                          std::optional<std::size_t> row) {
  if (n < 1) throw DomainError("lindeberg needs N >= 1");
  if (!(epsilon > 0.0)) throw DomainError("lindeberg needs epsilon > 0");
  const bool cx = p.symmetry == Symmetry::Hermitian;
  const double nd = static_cast<double>(n);
  LindebergReport rep;
  rep.variant = variant;
  rep.epsilon = epsilon;
  std::map<std::string, double> cache;
  auto tail4 = [&](const EntryLaw& law, double c) {
    auto it = cache.find(law.id());
    if (it != cache.end()) return it->second;
    const double v = tail_moment(law, p.sigma, c, 4, cx);
    cache.emplace(law.id(), v);
    return v;
  };
  switch (variant) {
    case LindebergVariant::DiagSmall: {
      rep.value = tail_moment(p.diag_law, p.diag_sigma1, epsilon * std::sqrt(nd), 2, false);
      break;
    }
    case LindebergVariant::OffDiagL: {
      const double c = epsilon * std::sqrt(nd);
      double sum = 0.0;
      if (p.row_exchangeable()) {
        sum = 0.5 * nd * (nd - 1.0) * tail4(p.law, c);
      } else {
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j) sum += tail4(p.law_at(i, j), c);
      }
      rep.value = sum / (nd * nd);
      break;
    }
    case LindebergVariant::RowL: {
      if (!row || *row < 1 || *row > n) throw DomainError("RowL variant needs a row in 1..N");
      const double c = epsilon * std::pow(nd, 0.25);
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != *row - 1) sum += tail4(p.law_at(*row - 1, j), c);
      rep.value = sum / nd;
      break;
    }
  }
  return rep;
}

RowMoments row_moments(const EnsembleProfile& p, std::size_t n, std::size_t row) {
  if (row < 1 || row > n) throw DomainError("row_moments: row must lie in 1..N");
  const bool cx = p.symmetry == Symmetry::Hermitian;
  const double s4 = std::pow(p.sigma, 4);
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == row - 1) continue;
    const EntryLaw& law = p.law_at(row - 1, j);
    sum += s4 * (cx ? law.complex_fourth_moment() : law.fourth_moment());
  }
  RowMoments m;
  m.m4_row = sum / static_cast<double>(n);
  m.kappa4_row = m.m4_row - (cx ? 2.0 : 3.0) * s4;
  m.kappa4_limit = (n > 1 ? sum / static_cast<double>(n - 1) : 0.0) - (cx ? 2.0 : 3.0) * s4;
  return m;
}

template double draw_entry<double>(const EnsembleProfile&, std::uint64_t, std::uint64_t, std::size_t, std::size_t);
template cplx draw_entry<cplx>(const EnsembleProfile&, std::uint64_t, std::uint64_t, std::size_t, std::size_t);
template Mat<double> sample<double>(const EnsembleProfile&, std::uint64_t, std::uint64_t, Exec);
template Mat<cplx> sample<cplx>(const EnsembleProfile&, std::uint64_t, std::uint64_t, Exec);
template Mat<double> sample_rows<double>(const EnsembleProfile&, std::uint64_t, std::uint64_t,
                                         const std::vector<std::size_t>&);
template Mat<cplx> sample_rows<cplx>(const EnsembleProfile&, std::uint64_t, std::uint64_t,
                                     const std::vector<std::size_t>&);
template double EntryRepair::apply<double>(double, EntryStream&, bool*, bool*) const;
template cplx EntryRepair::apply<cplx>(cplx, EntryStream&, bool*, bool*) const;
template TruncationResult<double> truncate_regularize<double>(const Mat<double>&, const EnsembleProfile&, double,
                                                              std::uint64_t, std::uint64_t);
template TruncationResult<cplx> truncate_regularize<cplx>(const Mat<cplx>&, const EnsembleProfile&, double,
                                                          std::uint64_t, std::uint64_t);

}  // namespace wlab
