#pragma once

#include <Eigen/Dense>

#include "wlab/ensemble.hpp"
#include "wlab/testfns.hpp"

namespace wlab {

template <class Scalar>
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;  // ascending
  Mat<Scalar> eigenvectors;     // columns
};

struct ResolventSample {
  cplx z;
  Eigen::MatrixXcd entries;
};

// Matrix-level routines index rows and columns from 0.
template <class Scalar>
SpectralDecomposition<Scalar> eigh(const Mat<Scalar>& x);

template <class Scalar>
Eigen::VectorXd eigenvalues(const Mat<Scalar>& x);

template <class Scalar>
Mat<Scalar> apply_function(const SpectralDecomposition<Scalar>& d, const TestFunction& f);

template <class Scalar>
ResolventSample resolvent(const SpectralDecomposition<Scalar>& d, cplx z);

double operator_norm(const Eigen::VectorXd& eigenvalues);
template <class Scalar>
double operator_norm(const SpectralDecomposition<Scalar>& d) {
  return operator_norm(d.eigenvalues);
}

// (zI - X)^{-1} by LU, independent of any eigendecomposition.
template <class Scalar>
Eigen::MatrixXcd resolvent_direct(const Mat<Scalar>& x, cplx z);

// Max over (k,l) of |finite difference - identity| / max |identity|.
template <class Scalar>
double resolvent_derivative_check(const Mat<Scalar>& x, cplx z, std::size_t p, std::size_t q, double h);

// Upper-left m x m block of R(z) through the Schur complement of the lower block.
template <class Scalar>
Eigen::MatrixXcd corner_resolvent_schur(const Mat<Scalar>& x, cplx z, std::size_t m);

// Upper-left m x m blocks of R(z) for several z from one block Lanczos run started at
// e_1..e_m. Converges geometrically at a rate set by the distance of z from the spectrum;
// falls back to the exact probe kernel when the Krylov space stalls or max_steps is reached.
// Real z must lie off the spectrum.
template <class Scalar>
std::vector<Eigen::MatrixXcd> corner_resolvent_krylov(const Mat<Scalar>& x, const std::vector<cplx>& zs,
                                                      std::size_t m, double tol = 1e-12,
                                                      std::size_t max_steps = 120);

// Eigenvalues of X together with the overlaps <b_r, v_l> of a few probe
// vectors with every eigenvector; costs one tridiagonalization plus O(m N^2).
template <class Scalar>
struct ProjectedSpectrum {
  Eigen::VectorXd eigenvalues;
  Mat<Scalar> overlaps;  // m x N

  // b_r^* R(z) b_s
  [[nodiscard]] Eigen::MatrixXcd resolvent(cplx z) const;
  // b_r^* f(X) b_s
  [[nodiscard]] Mat<Scalar> apply(const TestFunction& f) const;
  [[nodiscard]] Mat<Scalar> apply_values(const Eigen::VectorXd& values) const;
};

template <class Scalar>
ProjectedSpectrum<Scalar> project_spectrum(const Mat<Scalar>& x, const Mat<Scalar>& probes);

// Entries p(X)_ij of a polynomial in X by Horner matrix-vector products.
template <class Scalar>
Scalar polynomial_entry(const Mat<Scalar>& x, const std::vector<double>& coeffs, std::size_t i, std::size_t j);

struct HsGrid {
  double x_min = -4.0;
  double x_max = 4.0;
  double y_max = 1.0;
  std::size_t nx = 800;
  std::size_t ny = 400;
};

// Grid covering [-||X||-1, ||X||+1] and the effective support of f.
HsGrid hs_grid_for(double norm_x, const TestFunction& f, std::size_t nx, std::size_t ny);

template <class Scalar>
Mat<Scalar> hs_apply(const Mat<Scalar>& x, const TestFunction& f, int l, const HsGrid& grid,
                     Exec exec = Exec::Parallel);

// Cell-by-cell evaluation with a fresh resolvent per grid point (slow; small N only).
template <class Scalar>
Mat<Scalar> hs_apply_reference(const Mat<Scalar>& x, const TestFunction& f, int l, const HsGrid& grid);

}  // namespace wlab
