#include "wlab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

namespace wlab {

SemicircleRule::SemicircleRule(std::size_t n, double sigma) : nodes(n), weights(n) {
  // x = 2 sigma cos(theta); the semicircle density becomes (2/pi) sin^2(theta) dtheta
  const double h = std::numbers::pi / static_cast<double>(n + 1);
  for (std::size_t k = 1; k <= n; ++k) {
    const double th = static_cast<double>(k) * h;
    const double s = std::sin(th);
    nodes[k - 1] = 2.0 * sigma * std::cos(th);
    weights[k - 1] = 2.0 / static_cast<double>(n + 1) * s * s;
  }
}

IntegralResult integrate(const std::function<double(double)>& f, double a, double b, double tol,
                         unsigned max_depth) {
  IntegralResult r;
  if (a == b) return r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, tol, &r.error);
  return r;
}

}  // namespace wlab
