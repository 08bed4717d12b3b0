#include "wlab/stats.hpp"

#include <cmath>
#include <stdexcept>

#include "wlab/common.hpp"

namespace wlab {

void MomentAccumulator::push(double x) {
  const double n1 = static_cast<double>(n_);
  ++n_;
  const double n = static_cast<double>(n_);
  const double delta = x - mean_;
  const double dn = delta / n;
  const double dn2 = dn * dn;
  const double term1 = delta * dn * n1;
  mean_ += dn;
  m4_ += term1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * m2_ - 4.0 * dn * m3_;
  m3_ += term1 * dn * (n - 2.0) - 3.0 * dn * m2_;
  // Kahan step on the second moment
  const double y = term1 - m2c_;
  const double t = m2_ + y;
  m2c_ = (t - m2_) - y;
  m2_ = t;
}

void MomentAccumulator::merge(const MomentAccumulator& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double d = o.mean_ - mean_;
  const double d2 = d * d;
  const double a2 = m2_ - m2c_;
  const double b2 = o.m2_ - o.m2c_;

  const double m2 = a2 + b2 + d2 * na * nb / n;
  const double m3 = m3_ + o.m3_ + d * d2 * na * nb * (na - nb) / (n * n) + 3.0 * d * (na * b2 - nb * a2) / n;
  const double m4 = m4_ + o.m4_ + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                    6.0 * d2 * (na * na * b2 + nb * nb * a2) / (n * n) + 4.0 * d * (na * o.m3_ - nb * m3_) / n;
  // weighted mean, symmetric in the two operands
  mean_ = (na * mean_ + nb * o.mean_) / n;
  n_ += o.n_;
  m2_ = m2;
  m2c_ = 0.0;
  m3_ = m3;
  m4_ = m4;
}

double MomentAccumulator::variance() const {
  if (n_ < 2) return 0.0;
  const double v = m2_ / static_cast<double>(n_ - 1);
  return v < 0.0 ? 0.0 : v;
}

double MomentAccumulator::population_variance() const {
  if (n_ == 0) return 0.0;
  const double v = m2_ / static_cast<double>(n_);
  return v < 0.0 ? 0.0 : v;
}

double MomentAccumulator::skewness() const {
  const double v = population_variance();
  if (v <= 0.0) return 0.0;
  return (m3_ / static_cast<double>(n_)) / std::pow(v, 1.5);
}

double MomentAccumulator::excess_kurtosis() const {
  const double v = population_variance();
  if (v <= 0.0) return 0.0;
  return (m4_ / static_cast<double>(n_)) / (v * v) - 3.0;
}

double MomentAccumulator::variance_stderr() const {
  if (n_ < 2) return 0.0;
  const double n = static_cast<double>(n_);
  const double v = population_variance();
  const double mu4 = m4_ / n;
  const double s = (mu4 - v * v) / n;
  return s > 0.0 ? std::sqrt(s) : 0.0;
}

double MomentAccumulator::mean_stderr() const {
  if (n_ < 2) return 0.0;
  return std::sqrt(variance() / static_cast<double>(n_));
}

NormalityStat normality_stat(const MomentAccumulator& acc) {
  if (acc.count() < 20) throw DomainError("normality_stat needs at least 20 observations");
  NormalityStat s;
  const double v = acc.population_variance();
  const double scale = std::abs(acc.mean()) + 1.0;
  if (!(v > 1e-28 * scale * scale)) {
    s.degenerate = true;
    return s;
  }
  s.skew = acc.skewness();
  s.excess_kurtosis = acc.excess_kurtosis();
  const double n = static_cast<double>(acc.count());
  s.jb = n * (s.skew * s.skew / 6.0 + s.excess_kurtosis * s.excess_kurtosis / 24.0);
  return s;
}

CovarianceAccumulator::CovarianceAccumulator(std::size_t dim)
    : dim_(dim), mean_(dim, 0.0), comoment_(dim * dim, 0.0), delta_(dim, 0.0) {}

void CovarianceAccumulator::push(std::span<const double> x) {
  if (x.size() != dim_) throw std::invalid_argument("CovarianceAccumulator: dimension mismatch");
  ++n_;
  const double n = static_cast<double>(n_);
  for (std::size_t a = 0; a < dim_; ++a) {
    delta_[a] = x[a] - mean_[a];
    mean_[a] += delta_[a] / n;
  }
  // C += delta_old * (x - mean_new)^T
  for (std::size_t a = 0; a < dim_; ++a) {
    double* row = &comoment_[a * dim_];
    const double da = delta_[a];
    for (std::size_t b = 0; b < dim_; ++b) row[b] += da * (x[b] - mean_[b]);
  }
}

void CovarianceAccumulator::merge(const CovarianceAccumulator& o) {
  if (o.dim_ != dim_) throw std::invalid_argument("CovarianceAccumulator: dimension mismatch");
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double n = na + nb;
  for (std::size_t a = 0; a < dim_; ++a) delta_[a] = o.mean_[a] - mean_[a];
  for (std::size_t a = 0; a < dim_; ++a)
    for (std::size_t b = 0; b < dim_; ++b)
      comoment_[a * dim_ + b] += o.comoment_[a * dim_ + b] + delta_[a] * delta_[b] * na * nb / n;
  for (std::size_t a = 0; a < dim_; ++a) mean_[a] = (na * mean_[a] + nb * o.mean_[a]) / n;
  n_ += o.n_;
}

double CovarianceAccumulator::covariance(std::size_t a, std::size_t b) const {
  if (n_ < 2) return 0.0;
  // the running update is only symmetric up to round-off
  return 0.5 * (comoment_[a * dim_ + b] + comoment_[b * dim_ + a]) / static_cast<double>(n_ - 1);
}

double CovarianceAccumulator::correlation(std::size_t a, std::size_t b) const {
  const double va = covariance(a, a);
  const double vb = covariance(b, b);
  if (va <= 0.0 || vb <= 0.0) return 0.0;
  return covariance(a, b) / std::sqrt(va * vb);
}

SlopeFit loglog_slope(std::span<const double> ns, std::span<const double> values) {
  if (ns.size() != values.size()) throw std::invalid_argument("loglog_slope: size mismatch");
  const std::size_t k = ns.size();
  if (k < 4) throw DomainError("loglog_slope needs at least 4 points");
  std::vector<double> x(k), y(k);
  for (std::size_t t = 0; t < k; ++t) {
    if (!(values[t] > 0.0) || !(ns[t] > 0.0)) throw DomainError("loglog_slope: nonpositive value");
    x[t] = std::log(ns[t]);
    y[t] = std::log(values[t]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t t = 0; t < k; ++t) {
    mx += x[t];
    my += y[t];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t t = 0; t < k; ++t) {
    sxx += (x[t] - mx) * (x[t] - mx);
    sxy += (x[t] - mx) * (y[t] - my);
  }
  if (sxx <= 0.0) throw DomainError("loglog_slope: abscissae are all equal");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t t = 0; t < k; ++t) {
    const double r = y[t] - fit.intercept - fit.slope * x[t];
    rss += r * r;
  }
  fit.stderr = std::sqrt(rss / static_cast<double>(k - 2) / sxx);
  return fit;
}

}  // namespace wlab
