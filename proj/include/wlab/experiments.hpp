#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wlab/ensemble.hpp"
#include "wlab/semicircle.hpp"
#include "wlab/stats.hpp"
#include "wlab/testfns.hpp"

namespace wlab {

struct McOptions {
  Exec exec = Exec::Parallel;
  // Every k-th replica is checked for ||X|| > 2 sigma + delta when the sampler does not
  // diagonalize anyway; 0 disables the check.
  std::size_t excursion_stride = 100;
  double excursion_delta = 0.1;
  // Keep the per-replica residuals (real parts) of every entry, e.g. for histograms.
  bool keep_samples = false;
};

struct ExcursionEstimate {
  std::size_t checked = 0;
  std::size_t exceeded = 0;
  double delta = 0.1;
  [[nodiscard]] double probability() const {
    return checked ? static_cast<double>(exceeded) / static_cast<double>(checked) : 0.0;
  }
};

// Statistics of sqrt(N)(f(X)_ij - m) across replicas, m the cross-replica mean. Hermitian
// off-diagonal entries are complex; their variances are E|.|^2 (sum of Re and Im parts) and the
// normality summary uses the real part.
struct FluctuationReport {
  Entry entry;
  std::string f_id;
  std::size_t n = 0;
  std::size_t replicas = 0;
  double raw_var = 0.0;
  double raw_var_se = 0.0;
  double residual_var = 0.0;  // after subtracting coeff_w * W_ij
  double residual_var_se = 0.0;
  double w_var = 0.0;  // sample variance of W_ij
  // Second moment about the semicircle target instead of the sample mean, and its difference
  // from raw_var in units of raw_var_se.
  double target_centered_var = 0.0;
  double centering_gap_se = 0.0;
  double skew = 0.0;
  double excess_kurtosis = 0.0;
  double jb_stat = 0.0;
  bool degenerate = false;
  SemicirclePrediction predicted;
  double predicted_raw_var = 0.0;  // limit_variance + coeff_w^2 Var(W_ij)
  std::vector<double> samples;     // filled when McOptions::keep_samples is set
};

struct FluctuationRun {
  std::vector<FluctuationReport> entries;
  Eigen::MatrixXd correlation;  // of the normalized raw fluctuations (real parts)
  ExcursionEstimate excursion;
};

FluctuationRun entry_fluctuation_mc(const EnsembleProfile& profile, const TestFunction& f,
                                    const std::vector<Entry>& entries, std::size_t n, std::size_t replicas,
                                    std::uint64_t seed, const McOptions& opt = {});

FluctuationReport entry_fluctuation_mc(const EnsembleProfile& profile, const TestFunction& f, Entry entry,
                                       std::size_t n, std::size_t replicas, std::uint64_t seed,
                                       const McOptions& opt = {});

// Max |pairwise correlation| of the normalized fluctuations across the listed entries.
double independence_check(const EnsembleProfile& profile, const TestFunction& f, const std::vector<Entry>& entries,
                          std::size_t n, std::size_t replicas, std::uint64_t seed, const McOptions& opt = {});

enum class ScalingQuantity { BiasDiag, VarEntry, MeanOffdiag, MasterDiag, MasterOffdiag };
const char* to_string(ScalingQuantity q);

struct ScalingReport {
  ScalingQuantity quantity = ScalingQuantity::BiasDiag;
  std::vector<std::size_t> ns;
  std::vector<double> values;
  std::vector<double> std_errors;
  double slope = 0.0;
  double slope_stderr = 0.0;
  bool fitted = false;
  // some value is within 3 standard errors of 0, so the fit describes noise
  bool degenerate = false;
  std::string note;
};

struct ScalingScan {
  cplx z;
  std::vector<ScalingReport> reports;
  [[nodiscard]] const ScalingReport& get(ScalingQuantity q) const;
};

// |E R11 - g|, Var R12, |E R12| and the Master-equation residuals over N. Exchangeable
// profiles pool every diagonal entry (through tr R) and every off-diagonal pair among the
// first four rows.
ScalingScan resolvent_scaling_scan(const EnsembleProfile& profile, cplx z, const std::vector<std::size_t>& ns,
                                   const std::vector<std::size_t>& replicas, std::uint64_t seed,
                                   const McOptions& opt = {});

struct MasterResidual {
  double diag = 0.0;  // |z E R11 - 1 - sigma^2 E[R11 tr R]|
  double diag_se = 0.0;
  double offdiag = 0.0;  // |z E R12 - sigma^2 E[R12 tr R]|
  double offdiag_se = 0.0;
};

MasterResidual master_equation_residual(const EnsembleProfile& profile, cplx z, std::size_t n, std::size_t replicas,
                                        std::uint64_t seed, const McOptions& opt = {});

struct FieldComparison {
  Entry entry;
  std::size_t zi = 0, wi = 0;  // indices into z_list
  std::string component;        // re_re, im_im, re_im, im_re
  double empirical = 0.0;
  double predicted = 0.0;
  double scale = 0.0;      // denominator of rel_error
  double rel_error = 0.0;  // |empirical - predicted| / scale
  bool absolute = false;   // predicted scale is zero; rel_error holds the absolute error
};

struct FieldCovarianceReport {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t replicas = 0;
  std::vector<cplx> z_list;
  std::vector<FieldComparison> table;
  double max_rel_error = 0.0;
  // Same comparison for the linearized field Psi_N / g^2.
  double linearized_max_rel_error = 0.0;
  std::vector<FieldComparison> linearized_table;
  std::vector<double> kappa4;  // per row 1..m
};

FieldCovarianceReport resolvent_field_mc(const EnsembleProfile& profile, std::size_t m, const std::vector<cplx>& z_list,
                                         std::size_t n, std::size_t replicas, std::uint64_t seed,
                                         const McOptions& opt = {});

struct VarianceBound {
  std::vector<std::size_t> ns;
  std::vector<double> variances;  // Var f(X)_ij
  std::vector<double> ratios;     // N Var / ||f||_s^2
  double norm = 0.0;
  double max_over_min = 0.0;
};

VarianceBound variance_bound_diagnostic(const EnsembleProfile& profile, const TestFunction& f, double s,
                                        const std::vector<std::size_t>& ns, std::size_t replicas,
                                        std::uint64_t seed, Entry entry = {1, 1}, const McOptions& opt = {});

struct NormConvergence {
  std::size_t n = 0;
  std::size_t replicas = 0;
  std::size_t within = 0;
  double tolerance = 0.0;
  std::vector<double> norms;
};

NormConvergence norm_convergence(const EnsembleProfile& profile, std::size_t n, std::size_t replicas,
                                 std::uint64_t seed, double tolerance, const McOptions& opt = {});

struct TruncationPoint {
  std::size_t n = 0;
  double eps = 0.0;
  double threshold = 0.0;
  std::size_t replicas = 0;
  std::size_t changed_replicas = 0;  // replicas with W~ != W
  double changed_fraction = 0.0;
  double exact_probability = 0.0;  // P(W~ != W) from the entry laws
  double mean_changed_entries = 0.0;
};

// eps_N = (a + b ln N) / sqrt(N): the threshold grows like ln N while eps_N -> 0.
double default_truncation_eps(std::size_t n);

std::vector<TruncationPoint> truncation_demo(const EnsembleProfile& profile, const std::vector<std::size_t>& ns,
                                             const std::vector<double>& eps, std::size_t replicas,
                                             std::uint64_t seed, const McOptions& opt = {});

struct RepairCheck {
  std::size_t draws = 0;
  double mean_re = 0.0, mean_im = 0.0;
  double mean_se = 0.0;
  double variance = 0.0;  // E|W~ - E W~|^2
  double variance_se = 0.0;
  double target_variance = 0.0;
  double changed_fraction = 0.0;
};

// Draws from the repaired law of one entry. Complex entries use the Hermitian parametrization.
RepairCheck repair_law_check(const EntryLaw& law, double scale, double c, bool diagonal, bool complex_entry,
                             std::size_t draws, std::uint64_t seed);

}  // namespace wlab
