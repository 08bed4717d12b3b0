#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wlab {

// One-pass central moments up to order four, mergeable across threads.
class MomentAccumulator {
 public:
  void push(double x);
  void merge(const MomentAccumulator& other);

  [[nodiscard]] std::size_t count() const { return n_; }
  [[nodiscard]] double mean() const { return mean_; }
  [[nodiscard]] double m2() const { return m2_; }
  [[nodiscard]] double m3() const { return m3_; }
  [[nodiscard]] double m4() const { return m4_; }
  // Sample variance m2/(n-1); tiny negative round-off is clamped at 0.
  [[nodiscard]] double variance() const;
  [[nodiscard]] double population_variance() const;
  [[nodiscard]] double skewness() const;
  [[nodiscard]] double excess_kurtosis() const;
  // Standard error of variance() from the fourth central moment.
  [[nodiscard]] double variance_stderr() const;
  [[nodiscard]] double mean_stderr() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m2c_ = 0.0;  // compensation for m2
  double m3_ = 0.0;
  double m4_ = 0.0;
};

struct NormalityStat {
  double skew = 0.0;
  double excess_kurtosis = 0.0;
  double jb = 0.0;
  bool degenerate = false;
};

// Jarque-Bera style summary; requires at least 20 observations.
NormalityStat normality_stat(const MomentAccumulator& acc);

// Running means and co-moments of a fixed-size vector of observations.
class CovarianceAccumulator {
 public:
  explicit CovarianceAccumulator(std::size_t dim = 0);
  void push(std::span<const double> x);
  void merge(const CovarianceAccumulator& other);

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t count() const { return n_; }
  [[nodiscard]] double mean(std::size_t a) const { return mean_[a]; }
  [[nodiscard]] double covariance(std::size_t a, std::size_t b) const;
  [[nodiscard]] double correlation(std::size_t a, std::size_t b) const;

 private:
  std::size_t dim_;
  std::size_t n_ = 0;
  std::vector<double> mean_;
  std::vector<double> comoment_;  // row-major dim x dim
  std::vector<double> delta_;
};

struct SlopeFit {
  double slope = 0.0;
  double stderr = 0.0;
  double intercept = 0.0;
};

// Least squares on (log n, log value).
SlopeFit loglog_slope(std::span<const double> ns, std::span<const double> values);

}  // namespace wlab
