#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace wlab {

using cplx = std::complex<double>;

enum class Symmetry { RealSymmetric, Hermitian };

inline const char* to_string(Symmetry s) { return s == Symmetry::RealSymmetric ? "real" : "hermitian"; }

// Argument lies outside the mathematical domain of the operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iterative or adaptive procedure stopped before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved " + std::to_string(achieved) + ")"), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

// Matrix entry position, 1-based like the row/column labels of the ensemble.
struct Entry {
  std::size_t i = 1;
  std::size_t j = 1;
  bool diagonal() const { return i == j; }
  friend bool operator==(const Entry&, const Entry&) = default;
};

}  // namespace wlab
