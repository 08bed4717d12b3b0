#pragma once

#include "wlab/common.hpp"
#include "wlab/quadrature.hpp"

namespace wlab {

class TestFunction;

struct SemicircleParams {
  double sigma = 1.0;
  explicit SemicircleParams(double s = 1.0);
  double edge() const { return 2.0 * sigma; }
};

struct EntryFunctionals {
  double alpha = 0.0;
  double beta = 0.0;
  double omega2 = 0.0;
  double mean = 0.0;  // semicircle integral of f, the centering target of diagonal entries
};

struct SemicirclePrediction {
  double coeff_w = 0.0;
  double limit_variance = 0.0;
  Symmetry symmetry = Symmetry::RealSymmetric;
  bool diagonal = false;
  double kappa4_row = 0.0;
  EntryFunctionals functionals;
};

struct PhiKernels {
  cplx phi;
  double phi_pp = 0.0;
  double phi_mm = 0.0;
  double phi_pm = 0.0;
};

// Covariances of (Re Y_ij, Im Y_ij) at the points z and w.
struct FieldCovariance {
  double re_re = 0.0;  // Cov(Re Y(z), Re Y(w))
  double im_im = 0.0;  // Cov(Im Y(z), Im Y(w))
  double re_im = 0.0;  // Cov(Re Y(z), Im Y(w))
  double im_re = 0.0;  // Cov(Im Y(z), Re Y(w))
};

double density(double x, const SemicircleParams& p);

cplx stieltjes(cplx z, const SemicircleParams& p);
cplx stieltjes_derivative(cplx z, const SemicircleParams& p);

EntryFunctionals entry_functionals(const TestFunction& f, const SemicircleParams& p,
                                   const QuadratureSettings& q = default_quadrature());

SemicirclePrediction predict_entry_fluctuation(const EntryFunctionals& fn, const SemicircleParams& p,
                                               double kappa4_row, Symmetry symmetry, bool diagonal);
SemicirclePrediction predict_entry_fluctuation(const TestFunction& f, const SemicircleParams& p, double kappa4_row,
                                               Symmetry symmetry, bool diagonal);

// -(g(w) - g(z))/(w - z), with the derivative form near the diagonal.
cplx phi(cplx z, cplx w, const SemicircleParams& p);
PhiKernels phi_kernels(cplx z, cplx w, const SemicircleParams& p);

// The same three real kernels by direct quadrature of their defining integrals.
PhiKernels phi_kernels_quadrature(cplx z, cplx w, const SemicircleParams& p,
                                  const QuadratureSettings& q = default_quadrature());

FieldCovariance predict_field_covariance(cplx z, cplx w, const SemicircleParams& p, double kappa4_row,
                                         Symmetry symmetry, const Entry& entry);

}  // namespace wlab
