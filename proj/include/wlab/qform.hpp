#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wlab/ensemble.hpp"
#include "wlab/laws.hpp"

namespace wlab {

// Real case: real standardized coordinates. Complex case: y = (a + ib)/sqrt(2) with a, b
// independent copies of the law, so E y^2 = 0 and E|y|^2 = 1.
enum class QFormCase { Real, Complex };
const char* to_string(QFormCase c);

enum class QFormMatrixKind { Identity, DiagRamp, FrozenResolventRe, FrozenResolventIm, Explicit };

struct QFormSpec {
  QFormCase qcase = QFormCase::Real;
  std::size_t n = 0;
  QFormMatrixKind matrix = QFormMatrixKind::Identity;
  // Frozen resolvent: one GOE (real case) or GUE (complex case) sample with this seed, X = W/sqrt(N);
  // B is the self-adjoint part (R + R*)/2 or (R - R*)/(2i).
  cplx z{0.0, 2.0};
  std::uint64_t frozen_seed = 0;
  Eigen::MatrixXcd explicit_b;
  EntryLaw law = EntryLaw::gaussian();
  std::vector<RowLaw> coordinate_laws;  // per-coordinate overrides, 1-based

  [[nodiscard]] const EntryLaw& law_at(std::size_t i) const;  // 1-based
  [[nodiscard]] double kappa4(std::size_t i) const;           // 1-based
  [[nodiscard]] Eigen::MatrixXcd build_matrix() const;
  void validate() const;
};

struct QFormPrediction {
  double a1 = 0.0;
  double a2 = 0.0;
  double v2 = 0.0;
};

QFormPrediction qform_predict(const QFormSpec& spec);
QFormPrediction qform_predict(const Eigen::MatrixXcd& b, const std::vector<double>& kappa4, QFormCase qcase);

struct QFormReport {
  std::size_t n = 0;
  std::size_t replicas = 0;
  double mean = 0.0;
  double mean_se = 0.0;
  double variance = 0.0;
  double variance_se = 0.0;
  double skew = 0.0;
  double excess_kurtosis = 0.0;
  double jb_stat = 0.0;
  bool degenerate = false;
  double b_norm = 0.0;  // ||B||, recorded because boundedness is assumed, not enforced
  QFormPrediction predicted;
};

// Distribution of (y*By - Tr B)/sqrt(N) across replicas.
QFormReport qform_mc(const QFormSpec& spec, std::size_t replicas, std::uint64_t seed, Exec exec = Exec::Parallel);

// E[(y*By - Tr B)^2]/N by full enumeration of the coordinate outcomes; discrete laws, N <= 8.
double qform_variance_enumeration(const Eigen::MatrixXcd& b, const std::vector<EntryLaw>& laws, QFormCase qcase);

// (1/N) sum_j E[ ||y_j|^2 - 1|^2 1{||y_j|^2 - 1| > eps sqrt(N)} ]
double qform_lindeberg(const QFormSpec& spec, double eps);

// r x r family B^{s,t} with (B^{s,t})* = B^{t,s}, stored row-major, and one law per vector.
struct QFormFamily {
  QFormCase qcase = QFormCase::Real;
  std::size_t n = 0;
  std::size_t r = 0;
  std::vector<Eigen::MatrixXcd> blocks;
  std::vector<EntryLaw> laws;

  [[nodiscard]] const Eigen::MatrixXcd& block(std::size_t s, std::size_t t) const { return blocks[s * r + t]; }
  void validate() const;
};

struct QFormComponent {
  std::size_t s = 1, t = 1;  // 1-based
  std::string part;          // "re" or "im"
  double variance = 0.0;
  double variance_se = 0.0;
  double predicted = 0.0;
};

struct MatrixQFormReport {
  std::size_t replicas = 0;
  std::vector<QFormComponent> components;
  Eigen::MatrixXd correlation;  // between components, in the order listed
  double max_abs_corr = 0.0;
};

MatrixQFormReport qform_matrix_mc(const QFormFamily& family, std::size_t replicas, std::uint64_t seed,
                                  Exec exec = Exec::Parallel);

}  // namespace wlab
