#include "wlab/semicircle.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "wlab/testfns.hpp"

namespace wlab {

namespace {

void check_off_support(cplx z, const SemicircleParams& p, const char* what) {
  if (z.imag() == 0.0 && std::abs(z.real()) <= p.edge())
    throw DomainError(std::string(what) + ": point lies on the support [-2 sigma, 2 sigma]");
}

}  // namespace

SemicircleParams::SemicircleParams(double s) : sigma(s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("sigma must be positive and finite");
}

double density(double x, const SemicircleParams& p) {
  const double e = p.edge();
  if (std::abs(x) >= e) return 0.0;
  return std::sqrt(e * e - x * x) / (2.0 * std::numbers::pi * p.sigma * p.sigma);
}

cplx stieltjes(cplx z, const SemicircleParams& p) {
  check_off_support(z, p, "stieltjes");
  const double e = p.edge();
  // product of principal roots: cut exactly on [-2s, 2s] and ~ z at infinity
  const cplx s = std::sqrt(z - e) * std::sqrt(z + e);
  cplx den = z + s;
  // on the negative real axis the product picks the other sign; fix by decay
  if (std::abs(z - s) > std::abs(den)) den = z - s;
  return 2.0 / den;
}

cplx stieltjes_derivative(cplx z, const SemicircleParams& p) {
  const cplx g = stieltjes(z, p);
  return g / (2.0 * p.sigma * p.sigma * g - z);
}

EntryFunctionals entry_functionals(const TestFunction& f, const SemicircleParams& p, const QuadratureSettings& q) {
  const double s = p.sigma;
  std::size_t nodes = 0;
  const auto first = semicircle_expect(
      [&](double x) {
        const double v = f(x);
        return std::array<double, 3>{v, v * x / s, v * (x * x - s * s) / (s * s)};
      },
      3, s, q, &nodes);
  const double mean = first[0];
  // centred second pass keeps omega2 accurate when the mean is large
  const auto second = semicircle_expect(
      [&](double x) {
        const double d = f(x) - mean;
        return std::array<double, 1>{d * d};
      },
      1, s, q);
  EntryFunctionals out;
  out.mean = mean;
  out.alpha = first[1];
  out.beta = first[2];
  out.omega2 = second[0];
  return out;
}

SemicirclePrediction predict_entry_fluctuation(const EntryFunctionals& fn, const SemicircleParams& p,
                                               double kappa4_row, Symmetry symmetry, bool diagonal) {
  SemicirclePrediction out;
  out.functionals = fn;
  out.symmetry = symmetry;
  out.diagonal = diagonal;
  out.kappa4_row = kappa4_row;
  out.coeff_w = fn.alpha / p.sigma;
  const double s4 = std::pow(p.sigma, 4);
  const double base = fn.omega2 - fn.alpha * fn.alpha;
  double v = base;
  if (diagonal) {
    if (symmetry == Symmetry::RealSymmetric)
      v = 2.0 * (base + kappa4_row / (2.0 * s4) * fn.beta * fn.beta);
    else
      v = base + kappa4_row / s4 * fn.beta * fn.beta;
  }
  const double tol = 1e-10 * std::max(1.0, fn.omega2);
  if (v < -tol) throw DomainError("negative limit variance: kappa4 below the moment floor");
  out.limit_variance = std::max(v, 0.0);
  return out;
}

SemicirclePrediction predict_entry_fluctuation(const TestFunction& f, const SemicircleParams& p, double kappa4_row,
                                               Symmetry symmetry, bool diagonal) {
  return predict_entry_fluctuation(entry_functionals(f, p), p, kappa4_row, symmetry, diagonal);
}

cplx phi(cplx z, cplx w, const SemicircleParams& p) {
  check_off_support(z, p, "phi");
  check_off_support(w, p, "phi");
  if (std::abs(w - z) < 1e-6 * (1.0 + std::abs(z))) return -stieltjes_derivative(0.5 * (z + w), p);
  return -(stieltjes(w, p) - stieltjes(z, p)) / (w - z);
}

PhiKernels phi_kernels(cplx z, cplx w, const SemicircleParams& p) {
  const cplx zc = std::conj(z), wc = std::conj(w);
  const cplx a = phi(z, w, p);
  const cplx b = phi(zc, wc, p);
  const cplx c = phi(zc, w, p);
  const cplx d = phi(z, wc, p);
  PhiKernels k;
  k.phi = a;
  k.phi_pp = (0.25 * (a + b + c + d)).real();
  k.phi_mm = (-0.25 * (a + b - c - d)).real();
  k.phi_pm = (cplx(0.0, -0.25) * (a + c - b - d)).real();
  return k;
}

PhiKernels phi_kernels_quadrature(cplx z, cplx w, const SemicircleParams& p, const QuadratureSettings& q) {
  check_off_support(z, p, "phi");
  check_off_support(w, p, "phi");
  const auto v = semicircle_expect(
      [&](double x) {
        const cplx rz = 1.0 / (z - x);
        const cplx rw = 1.0 / (w - x);
        const cplx pr = rz * rw;
        return std::array<double, 5>{pr.real(), pr.imag(), rz.real() * rw.real(), rz.imag() * rw.imag(),
                                     rz.real() * rw.imag()};
      },
      5, p.sigma, q);
  PhiKernels k;
  // phi(z,w) = integral of 1/((z-x)(w-x))
  k.phi = cplx(v[0], v[1]);
  k.phi_pp = v[2];
  k.phi_mm = v[3];
  k.phi_pm = v[4];
  return k;
}

FieldCovariance predict_field_covariance(cplx z, cplx w, const SemicircleParams& p, double kappa4_row,
                                         Symmetry symmetry, const Entry& entry) {
  const PhiKernels k = phi_kernels(z, w, p);
  const PhiKernels kt = phi_kernels(w, z, p);
  const double s4 = std::pow(p.sigma, 4);
  FieldCovariance c;
  if (entry.diagonal()) {
    const cplx gz = stieltjes(z, p), gw = stieltjes(w, p);
    const double mult = symmetry == Symmetry::RealSymmetric ? 2.0 * s4 : s4;
    c.re_re = kappa4_row * gz.real() * gw.real() + mult * k.phi_pp;
    c.im_im = kappa4_row * gz.imag() * gw.imag() + mult * k.phi_mm;
    c.re_im = kappa4_row * gz.real() * gw.imag() + mult * k.phi_pm;
    c.im_re = kappa4_row * gz.imag() * gw.real() + mult * kt.phi_pm;
  } else if (symmetry == Symmetry::RealSymmetric) {
    c.re_re = s4 * k.phi_pp;
    c.im_im = s4 * k.phi_mm;
    c.re_im = s4 * k.phi_pm;
    c.im_re = s4 * kt.phi_pm;
  } else {
    c.re_re = 0.5 * s4 * (k.phi_pp + k.phi_mm);
    c.im_im = c.re_re;
    c.re_im = 0.5 * s4 * (k.phi_pm - kt.phi_pm);
    c.im_re = -c.re_im;
  }
  return c;
}

}  // namespace wlab
