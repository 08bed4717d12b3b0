#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "wlab/spectral.hpp"

namespace wlab {

namespace {

constexpr std::size_t kBlockColumns = 16;

void check_grid(double norm_x, const TestFunction& f, int l, const HsGrid& g) {
  if (l < 0) throw DomainError("extension order must be nonnegative");
  if (l + 1 > f.max_derivative_order())
    throw DomainError("f lacks " + std::to_string(l + 1) + " derivatives: " + f.id());
  if (g.nx == 0 || g.ny == 0 || !(g.x_max > g.x_min)) throw DomainError("empty HS grid");
  if (g.y_max < 1.0) throw DomainError("HS grid must cover 0 < y <= 1");
  if (g.x_min > -norm_x - 1.0 || g.x_max < norm_x + 1.0)
    throw DomainError("HS grid x-range does not cover [-||X||-1, ||X||+1]");
}

struct Neumaier {
  double sum = 0.0, comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// f(X) depends only on f near the spectrum. A function that does not vanish at the grid edge
// (a polynomial, say) is multiplied by a smooth cutoff that is 1 on [-||X||-1/4, ||X||+1/4] and
// 0 at the edge, so the almost-analytic extension has compact support inside the grid.
class Localized {
 public:
  Localized(const TestFunction& f, int l, double norm_x, const HsGrid& g) : f_(f), order_(l + 1) {
    double edge = 0.0;
    for (double x : {g.x_min, g.x_max})
      for (double v : f.derivatives(x, order_)) edge = std::max(edge, std::abs(v));
    if (edge > 1e-13) {
      const double inner = norm_x + 0.25;
      const double outer = std::min(-g.x_min, g.x_max);
      chi_.emplace(SmoothCutoff{inner, outer});
    }
  }

  std::vector<double> derivatives(double x) const {
    std::vector<double> d = f_.derivatives(x, order_);
    if (!chi_) return d;
    const std::vector<double> c = chi_->derivatives(x, order_);
    std::vector<double> out(d.size(), 0.0);
    for (std::size_t k = 0; k < d.size(); ++k) {
      double binom = 1.0;
      for (std::size_t j = 0; j <= k; ++j) {
        out[k] += binom * c[j] * d[k - j];
        binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
      }
    }
    return out;
  }

 private:
  const TestFunction& f_;
  int order_;
  std::optional<TestFunction> chi_;
};

// h(lambda_m) = -(2/pi) Re sum over cells with y > 0 of dbar f~(z) / (z - lambda_m) dx dy.
// Columns are grouped in fixed blocks whose partial sums are merged in block order, so the
// result does not depend on the number of threads.
Eigen::VectorXd hs_weights(const Eigen::VectorXd& lambda, const Localized& f, int l, const HsGrid& g, Exec exec) {
  const auto n = lambda.size();
  const double dx = (g.x_max - g.x_min) / static_cast<double>(g.nx);
  const double ymax = std::min(g.y_max, 1.0);
  const double dy = ymax / static_cast<double>(g.ny);
  const auto nblocks = static_cast<long>((g.nx + kBlockColumns - 1) / kBlockColumns);
  Eigen::MatrixXd partial = Eigen::MatrixXd::Zero(n, nblocks);

  auto run_block = [&](long b) {
    std::vector<double> d;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    const std::size_t c0 = static_cast<std::size_t>(b) * kBlockColumns;
    const std::size_t c1 = std::min(g.nx, c0 + kBlockColumns);
    for (std::size_t c = c0; c < c1; ++c) {
      const double x = g.x_min + (static_cast<double>(c) + 0.5) * dx;
      d = f.derivatives(x);
      bool any = false;
      for (double v : d) any = any || v != 0.0;
      if (!any) continue;
      for (std::size_t r = 0; r < g.ny; ++r) {
        const double y = (static_cast<double>(r) + 0.5) * dy;
        const cplx w = hs_extension(d.data(), l, y).dbar;
        if (w == cplx(0.0)) continue;
        const double wr = w.real(), wi = w.imag();
        for (Eigen::Index m = 0; m < n; ++m) {
          // Re[w / (x - lambda + i y)]
          const double a = x - lambda(m);
          acc(m) += (wr * a + wi * y) / (a * a + y * y);
        }
      }
    }
    partial.col(b) = acc;
  };

  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long b = 0; b < nblocks; ++b) run_block(b);
  } else {
    for (long b = 0; b < nblocks; ++b) run_block(b);
  }

  Eigen::VectorXd h(n);
  const double scale = -2.0 / std::numbers::pi * dx * dy;
  for (Eigen::Index m = 0; m < n; ++m) {
    Neumaier s;
    for (long b = 0; b < nblocks; ++b) s.add(partial(m, b));
    h(m) = scale * s.value();
  }
  return h;
}

}  // namespace

HsGrid hs_grid_for(double norm_x, const TestFunction& f, std::size_t nx, std::size_t ny) {
  double lo = -norm_x - 1.0, hi = norm_x + 1.0;
  if (const auto* g = std::get_if<GaussianBump>(&f.kind())) {
    const double r = g->width * (8.0 + static_cast<double>(g->poly.size()));
    lo = std::min(lo, g->center - r);
    hi = std::max(hi, g->center + r);
  } else if (auto s = f.support_hint()) {
    lo = std::min(lo, s->first);
    hi = std::max(hi, s->second);
  }
  HsGrid grid;
  grid.x_min = lo;
  grid.x_max = hi;
  grid.y_max = 1.0;
  grid.nx = nx;
  grid.ny = ny;
  return grid;
}

template <class Scalar>
Mat<Scalar> hs_apply(const Mat<Scalar>& x, const TestFunction& f, int l, const HsGrid& grid, Exec exec) {
  const auto d = eigh<Scalar>(x);
  check_grid(operator_norm(d.eigenvalues), f, l, grid);
  const Localized fl(f, l, operator_norm(d.eigenvalues), grid);
  const Eigen::VectorXd h = hs_weights(d.eigenvalues, fl, l, grid, exec);
  return d.eigenvectors * h.asDiagonal() * d.eigenvectors.adjoint();
}

template <class Scalar>
Mat<Scalar> hs_apply_reference(const Mat<Scalar>& x, const TestFunction& f, int l, const HsGrid& g) {
  const Eigen::VectorXd ev = eigenvalues<Scalar>(x);
  check_grid(operator_norm(ev), f, l, g);
  const Localized fl(f, l, operator_norm(ev), g);
  const Eigen::Index n = x.rows();
  const double dx = (g.x_max - g.x_min) / static_cast<double>(g.nx);
  const double dy = std::min(g.y_max, 1.0) / static_cast<double>(g.ny);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t c = 0; c < g.nx; ++c) {
    const double xr = g.x_min + (static_cast<double>(c) + 0.5) * dx;
    const std::vector<double> dv = fl.derivatives(xr);
    for (std::size_t r = 0; r < g.ny; ++r) {
      const cplx z(xr, (static_cast<double>(r) + 0.5) * dy);
      const cplx w = hs_extension(dv.data(), l, z.imag()).dbar;
      if (w == cplx(0.0)) continue;
      acc += w * resolvent_direct<Scalar>(x, z);
    }
  }
  // fold in the lower half-plane: R(conj z) = R(z)^*
  const Eigen::MatrixXcd full = -(dx * dy / std::numbers::pi) * (acc + acc.adjoint());
  if constexpr (is_complex_v<Scalar>) {
    return full;
  } else {
    return full.real();
  }
}

template Mat<double> hs_apply<double>(const Mat<double>&, const TestFunction&, int, const HsGrid&, Exec);
template Mat<cplx> hs_apply<cplx>(const Mat<cplx>&, const TestFunction&, int, const HsGrid&, Exec);
template Mat<double> hs_apply_reference<double>(const Mat<double>&, const TestFunction&, int, const HsGrid&);
template Mat<cplx> hs_apply_reference<cplx>(const Mat<cplx>&, const TestFunction&, int, const HsGrid&);

}  // namespace wlab
