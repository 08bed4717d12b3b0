#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <type_traits>
#include <vector>

#include "wlab/common.hpp"
#include "wlab/laws.hpp"

namespace wlab {

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
inline constexpr bool is_complex_v = !std::is_same_v<Scalar, double>;

enum class Exec { Serial, Parallel };

struct RowLaw {
  std::size_t row = 1;  // 1-based
  EntryLaw law;
};

struct EnsembleProfile {
  Symmetry symmetry = Symmetry::RealSymmetric;
  double sigma = 1.0;
  double diag_sigma1 = 1.4142135623730951;
  EntryLaw law = EntryLaw::gaussian();
  EntryLaw diag_law = EntryLaw::gaussian();
  std::vector<RowLaw> row_laws;
  std::size_t n = 0;

  static EnsembleProfile goe(std::size_t n, double sigma = 1.0);
  static EnsembleProfile gue(std::size_t n, double sigma = 1.0);

  // Off-diagonal law at 0-based (i, j); the override of the lower-numbered row wins.
  [[nodiscard]] const EntryLaw& law_at(std::size_t i, std::size_t j) const;
  [[nodiscard]] bool row_exchangeable() const { return row_laws.empty(); }
  [[nodiscard]] EnsembleProfile with_n(std::size_t n_new) const;
  void validate() const;
};

// One entry (i <= j, 0-based) of W; identical whichever sampler produces it.
template <class Scalar>
Scalar draw_entry(const EnsembleProfile& p, std::uint64_t seed, std::uint64_t index, std::size_t i, std::size_t j);

// Full W_N (not divided by sqrt(N)).
template <class Scalar>
Mat<Scalar> sample(const EnsembleProfile& p, std::uint64_t seed, std::uint64_t index = 0, Exec exec = Exec::Parallel);

// Selected rows of the same W_N, one output row per requested 0-based row.
template <class Scalar>
Mat<Scalar> sample_rows(const EnsembleProfile& p, std::uint64_t seed, std::uint64_t index,
                        const std::vector<std::size_t>& rows);

// Mixture repair of one truncated entry law (threshold c, scale s).
struct EntryRepair {
  double threshold = 0.0;
  double weight = 0.0;     // probability the entry is replaced
  double plus_prob = 0.5;  // off-diagonal: P(+c direction)
  double atom = 0.0;       // diagonal: replacement value
  cplx direction{1.0, 0.0};
  bool diagonal = false;

  static EntryRepair build(const EntryLaw& law, double scale, double c, bool diagonal, bool complex_entry);

  template <class Scalar>
  Scalar apply(Scalar w, EntryStream& s, bool* truncated = nullptr, bool* replaced = nullptr) const;
};

template <class Scalar>
struct TruncationResult {
  Mat<Scalar> w;
  std::size_t truncated = 0;  // entries with |W_ij| > c (i <= j)
  std::size_t replaced = 0;   // entries taken from the repair atoms (i <= j)
  std::size_t changed = 0;    // entries with W~_ij != W_ij (i <= j)
};

template <class Scalar>
TruncationResult<Scalar> truncate_regularize(const Mat<Scalar>& w, const EnsembleProfile& p, double eps_n,
                                             std::uint64_t seed, std::uint64_t index = 0);

enum class LindebergVariant { OffDiagL, DiagSmall, RowL };

struct LindebergReport {
  LindebergVariant variant = LindebergVariant::OffDiagL;
  double epsilon = 0.0;
  double value = 0.0;
  double std_error = 0.0;
};

LindebergReport lindeberg(const EnsembleProfile& p, std::size_t n, double epsilon, LindebergVariant variant,
                          std::optional<std::size_t> row = std::nullopt);

// E[|W|^power 1{|W| >= c}] for an entry of the given law and scale.
double tail_moment(const EntryLaw& law, double scale, double c, int power, bool complex_entry);

struct RowMoments {
  double m4_row = 0.0;      // (1/N) sum over j != i of E|W_ij|^4
  double kappa4_row = 0.0;  // from m4_row
  // Average over the N-1 off-diagonal entries instead of 1/N: the same limit, but never below
  // the moment floor E|W|^4 >= sigma^4, so it is the value fed to the predictions.
  double kappa4_limit = 0.0;
};

RowMoments row_moments(const EnsembleProfile& p, std::size_t n, std::size_t row);

}  // namespace wlab
