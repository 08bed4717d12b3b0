#include "wlab/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace wlab {

namespace {

template <class Scalar>
void check_self_adjoint(const Mat<Scalar>& x) {
  if (x.rows() != x.cols()) throw DomainError("matrix must be square");
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  const double asym = (x - x.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) throw DomainError("matrix is not self-adjoint within 1e-12");
}

// Implicit QL on the symmetric tridiagonal (d, e), e[i] coupling i and i+1.
// Rotations are applied to the columns of z (rows x n).
template <class Scalar>
void tridiagonal_ql(Eigen::VectorXd& d, Eigen::VectorXd& e, Mat<Scalar>& z) {
  const Eigen::Index n = d.size();
  const Eigen::Index rows = z.rows();
  if (n == 0) return;
  e.conservativeResize(n);
  e(n - 1) = 0.0;
  double f = 0.0, tst1 = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (Eigen::Index l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d(l)) + std::abs(e(l)));
    Eigen::Index m = l;
    while (m < n) {
      if (std::abs(e(m)) <= eps * tst1) break;
      ++m;
    }
    if (m == n) m = n - 1;
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 60) throw ConvergenceError("tridiagonal QL did not converge", std::abs(e(l)));
        double g = d(l);
        double p = (d(l + 1) - g) / (2.0 * e(l));
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d(l) = e(l) / (p + r);
        d(l + 1) = e(l) * (p + r);
        const double dl1 = d(l + 1);
        double h = g - d(l);
        for (Eigen::Index i = l + 2; i < n; ++i) d(i) -= h;
        f += h;
        p = d(m);
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e(l + 1);
        double s = 0.0, s2 = 0.0;
        for (Eigen::Index i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e(i);
          h = c * p;
          r = std::hypot(p, e(i));
          e(i + 1) = s * r;
          s = e(i) / r;
          c = p / r;
          p = c * d(i) - s * g;
          d(i + 1) = h + s * (c * g + s * d(i));
          Scalar* zi = z.col(i).data();
          Scalar* zi1 = z.col(i + 1).data();
          for (Eigen::Index k = 0; k < rows; ++k) {
            const Scalar t = zi1[k];
            zi1[k] = s * zi[k] + c * t;
            zi[k] = c * zi[k] - s * t;
          }
        }
        p = -s * s2 * c3 * el1 * e(l) / dl1;
        e(l) = s * p;
        d(l) = c * p;
      } while (std::abs(e(l)) > eps * tst1);
    }
    d(l) += f;
    e(l) = 0.0;
  }
}

}  // namespace

template <class Scalar>
SpectralDecomposition<Scalar> eigh(const Mat<Scalar>& x) {
  check_self_adjoint(x);
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(x);
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("eigensolver did not converge", x.cwiseAbs().maxCoeff());
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

template <class Scalar>
Eigen::VectorXd eigenvalues(const Mat<Scalar>& x) {
  check_self_adjoint(x);
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(x, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("eigensolver did not converge", x.cwiseAbs().maxCoeff());
  return es.eigenvalues();
}

template <class Scalar>
Mat<Scalar> apply_function(const SpectralDecomposition<Scalar>& d, const TestFunction& f) {
  Eigen::VectorXd v(d.eigenvalues.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = f(d.eigenvalues(k));
  const Mat<Scalar>& q = d.eigenvectors;
  return q * v.asDiagonal() * q.adjoint();
}

template <class Scalar>
ResolventSample resolvent(const SpectralDecomposition<Scalar>& d, cplx z) {
  Eigen::VectorXcd v(d.eigenvalues.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const cplx gap = z - d.eigenvalues(k);
    if (std::abs(gap) <= 1e-12) throw DomainError("z is within 1e-12 of an eigenvalue");
    v(k) = 1.0 / gap;
  }
  const Eigen::MatrixXcd q = d.eigenvectors.template cast<cplx>();
  return {z, q * v.asDiagonal() * q.adjoint()};
}

double operator_norm(const Eigen::VectorXd& ev) {
  if (ev.size() == 0) return 0.0;
  return std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
}

template <class Scalar>
Eigen::MatrixXcd resolvent_direct(const Mat<Scalar>& x, cplx z) {
  Eigen::MatrixXcd a = -x.template cast<cplx>();
  a.diagonal().array() += z;
  return a.partialPivLu().inverse();
}

template <class Scalar>
double resolvent_derivative_check(const Mat<Scalar>& x, cplx z, std::size_t p, std::size_t q, double h) {
  if (z.imag() == 0.0) throw DomainError("derivative check needs Im z != 0");
  const Eigen::Index n = x.rows();
  const auto pp = static_cast<Eigen::Index>(p), qq = static_cast<Eigen::Index>(q);
  if (pp >= n || qq >= n) throw DomainError("index out of range");
  Mat<Scalar> e = Mat<Scalar>::Zero(n, n);
  e(pp, qq) = Scalar(1.0);
  e(qq, pp) = Scalar(1.0);
  const Eigen::MatrixXcd r = resolvent_direct<Scalar>(x, z);
  const Eigen::MatrixXcd fd =
      (resolvent_direct<Scalar>(x + h * e, z) - resolvent_direct<Scalar>(x - h * e, z)) / (2.0 * h);
  Eigen::MatrixXcd an(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = 0; l < n; ++l)
      an(k, l) = pp == qq ? r(k, pp) * r(pp, l) : r(k, pp) * r(qq, l) + r(k, qq) * r(pp, l);
  return (fd - an).cwiseAbs().maxCoeff() / an.cwiseAbs().maxCoeff();
}

template <class Scalar>
Eigen::MatrixXcd corner_resolvent_schur(const Mat<Scalar>& x, cplx z, std::size_t m) {
  const Eigen::Index n = x.rows();
  const auto mm = static_cast<Eigen::Index>(m);
  if (mm < 1 || mm >= n) throw DomainError("corner size must lie in 1..N-1");
  const Eigen::MatrixXcd xc = x.template cast<cplx>();
  const Eigen::MatrixXcd mblk = xc.bottomLeftCorner(n - mm, mm);
  Eigen::MatrixXcd lower = -xc.bottomRightCorner(n - mm, n - mm);
  lower.diagonal().array() += z;
  const Eigen::MatrixXcd rt_m = lower.partialPivLu().solve(mblk);
  Eigen::MatrixXcd a = -xc.topLeftCorner(mm, mm) - mblk.adjoint() * rt_m;
  a.diagonal().array() += z;
  return a.partialPivLu().inverse();
}

template <class Scalar>
Eigen::MatrixXcd ProjectedSpectrum<Scalar>::resolvent(cplx z) const {
  const Eigen::Index n = eigenvalues.size();
  Eigen::VectorXcd v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = 1.0 / (z - eigenvalues(k));
  const Eigen::MatrixXcd a = overlaps.template cast<cplx>();
  return a * v.asDiagonal() * a.adjoint();
}

template <class Scalar>
Mat<Scalar> ProjectedSpectrum<Scalar>::apply_values(const Eigen::VectorXd& values) const {
  return overlaps * values.asDiagonal() * overlaps.adjoint();
}

template <class Scalar>
Mat<Scalar> ProjectedSpectrum<Scalar>::apply(const TestFunction& f) const {
  Eigen::VectorXd v(eigenvalues.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = f(eigenvalues(k));
  return apply_values(v);
}

template <class Scalar>
ProjectedSpectrum<Scalar> project_spectrum(const Mat<Scalar>& x, const Mat<Scalar>& probes) {
  const Eigen::Index n = x.rows();
  if (probes.rows() != n) throw DomainError("probe vectors must have length N");
  ProjectedSpectrum<Scalar> out;
  if (n == 1) {
    out.eigenvalues = Eigen::VectorXd::Constant(1, std::real(x(0, 0)));
    out.overlaps = probes.adjoint();
    return out;
  }
  Eigen::Tridiagonalization<Mat<Scalar>> tri(x);
  Eigen::VectorXd d = tri.diagonal();
  Eigen::VectorXd e = tri.subDiagonal();
  // overlaps start as B^* Q and pick up the rotations of the tridiagonal solve
  Mat<Scalar> qb = tri.matrixQ().adjoint() * probes;
  Mat<Scalar> z = qb.adjoint();
  tridiagonal_ql(d, e, z);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return d(a) < d(b); });
  out.eigenvalues.resize(n);
  out.overlaps.resize(probes.cols(), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = d(order[static_cast<std::size_t>(k)]);
    out.overlaps.col(k) = z.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

template <class Scalar>
Scalar polynomial_entry(const Mat<Scalar>& x, const std::vector<double>& c, std::size_t i, std::size_t j) {
  const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
  if (c.empty()) return Scalar(0.0);
  const std::size_t deg = c.size() - 1;
  const Scalar delta = i == j ? Scalar(1.0) : Scalar(0.0);
  if (deg == 0) return c[0] * delta;
  // v = p_k(X) e_j built from the top coefficient down; the first product is a column copy
  Vec<Scalar> v = c[deg] * x.col(jj);
  v(jj) += c[deg - 1];
  for (std::size_t k = deg - 1; k >= 1; --k) {
    Vec<Scalar> next = x * v;
    next(jj) += c[k - 1];
    v = std::move(next);
    if (k == 1) break;
  }
  return v(ii);
}

template <class Scalar>
std::vector<Eigen::MatrixXcd> corner_resolvent_krylov(const Mat<Scalar>& x, const std::vector<cplx>& zs,
                                                      std::size_t m, double tol, std::size_t max_steps) {
  const Eigen::Index n = x.rows();
  const auto mm = static_cast<Eigen::Index>(m);
  if (mm < 1 || mm > n) throw DomainError("corner size must lie in 1..N");

  auto exact = [&]() {
    const Mat<Scalar> probes = Mat<Scalar>::Identity(n, mm);
    const auto ps = project_spectrum<Scalar>(x, probes);
    std::vector<Eigen::MatrixXcd> out;
    for (cplx z : zs) out.push_back(ps.resolvent(z));
    return out;
  };

  // block Lanczos with full reorthogonalization; T has diagonal blocks a[k] and subdiagonal blocks b[k]
  std::vector<Mat<Scalar>> basis, a, b;
  basis.push_back(Mat<Scalar>::Identity(n, mm));
  std::vector<Eigen::MatrixXcd> prev;
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(mm, mm);

  auto fraction = [&](cplx z) {
    const std::size_t k = a.size();
    Eigen::MatrixXcd s = (z * eye - a[k - 1].template cast<cplx>()).inverse();
    for (std::size_t t = k - 1; t-- > 0;) {
      const Eigen::MatrixXcd bt = b[t].template cast<cplx>();
      s = (z * eye - a[t].template cast<cplx>() - bt.adjoint() * s * bt).inverse();
    }
    return s;
  };

  const std::size_t limit = std::min<std::size_t>(max_steps, static_cast<std::size_t>(n / mm));
  for (std::size_t k = 0; k < limit; ++k) {
    Mat<Scalar> w = x * basis[k];
    if (k > 0) w -= basis[k - 1] * b[k - 1].adjoint();
    Mat<Scalar> ak = basis[k].adjoint() * w;
    ak = (0.5 * (ak + ak.adjoint())).eval();
    w -= basis[k] * ak;
    for (const auto& q : basis) w -= q * (q.adjoint() * w);
    a.push_back(ak);
    bool done = false;
    if (k % 4 == 3 || k + 1 == limit) {
      std::vector<Eigen::MatrixXcd> cur;
      for (cplx z : zs) cur.push_back(fraction(z));
      if (!prev.empty()) {
        double err = 0.0, mag = 0.0;
        for (std::size_t t = 0; t < cur.size(); ++t) {
          err = std::max(err, (cur[t] - prev[t]).cwiseAbs().maxCoeff());
          mag = std::max(mag, cur[t].cwiseAbs().maxCoeff());
        }
        if (err <= tol * mag) return cur;
      }
      prev = std::move(cur);
    }
    Eigen::HouseholderQR<Mat<Scalar>> qr(w);
    Mat<Scalar> q = qr.householderQ() * Mat<Scalar>::Identity(n, mm);
    Mat<Scalar> r = qr.matrixQR().topRows(mm).template triangularView<Eigen::Upper>();
    if (r.diagonal().cwiseAbs().minCoeff() <= 1e-10 * std::max(1.0, ak.cwiseAbs().maxCoeff())) done = true;
    if (done) break;
    basis.push_back(std::move(q));
    b.push_back(std::move(r));
  }
  return exact();
}

template SpectralDecomposition<double> eigh<double>(const Mat<double>&);
template SpectralDecomposition<cplx> eigh<cplx>(const Mat<cplx>&);
template Eigen::VectorXd eigenvalues<double>(const Mat<double>&);
template Eigen::VectorXd eigenvalues<cplx>(const Mat<cplx>&);
template Mat<double> apply_function<double>(const SpectralDecomposition<double>&, const TestFunction&);
template Mat<cplx> apply_function<cplx>(const SpectralDecomposition<cplx>&, const TestFunction&);
template ResolventSample resolvent<double>(const SpectralDecomposition<double>&, cplx);
template ResolventSample resolvent<cplx>(const SpectralDecomposition<cplx>&, cplx);
template Eigen::MatrixXcd resolvent_direct<double>(const Mat<double>&, cplx);
template Eigen::MatrixXcd resolvent_direct<cplx>(const Mat<cplx>&, cplx);
template double resolvent_derivative_check<double>(const Mat<double>&, cplx, std::size_t, std::size_t, double);
template double resolvent_derivative_check<cplx>(const Mat<cplx>&, cplx, std::size_t, std::size_t, double);
template Eigen::MatrixXcd corner_resolvent_schur<double>(const Mat<double>&, cplx, std::size_t);
template Eigen::MatrixXcd corner_resolvent_schur<cplx>(const Mat<cplx>&, cplx, std::size_t);
template std::vector<Eigen::MatrixXcd> corner_resolvent_krylov<double>(const Mat<double>&, const std::vector<cplx>&,
                                                                       std::size_t, double, std::size_t);
template std::vector<Eigen::MatrixXcd> corner_resolvent_krylov<cplx>(const Mat<cplx>&, const std::vector<cplx>&,
                                                                     std::size_t, double, std::size_t);
template struct ProjectedSpectrum<double>;
template struct ProjectedSpectrum<cplx>;
template ProjectedSpectrum<double> project_spectrum<double>(const Mat<double>&, const Mat<double>&);
template ProjectedSpectrum<cplx> project_spectrum<cplx>(const Mat<cplx>&, const Mat<cplx>&);
template double polynomial_entry<double>(const Mat<double>&, const std::vector<double>&, std::size_t, std::size_t);
template cplx polynomial_entry<cplx>(const Mat<cplx>&, const std::vector<double>&, std::size_t, std::size_t);

}  // namespace wlab
