#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "wlab/common.hpp"

namespace wlab {

struct QuadratureSettings {
  double tolerance = 1e-12;
  std::size_t min_nodes = 15;
  std::size_t max_nodes = (std::size_t{1} << 14) - 1;
};

inline const QuadratureSettings& default_quadrature() {
  static const QuadratureSettings q{};
  return q;
}

// Gauss-Chebyshev (second kind) rule for the semicircle law of scale sigma:
// E g(eta) ~ sum_k weight_k g(node_k). Exact for polynomials of degree < 2n.
struct SemicircleRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  SemicircleRule(std::size_t n, double sigma);
};

// Expectations of K functionals of eta ~ semicircle, doubling the node count
// until successive estimates agree. F maps x to a container of K doubles.
template <class F>
std::vector<double> semicircle_expect(F&& f, std::size_t k, double sigma,
                                      const QuadratureSettings& q = default_quadrature(),
                                      std::size_t* nodes_used = nullptr) {
  std::vector<double> prev;
  double err = 0.0;
  for (std::size_t n = q.min_nodes;; n = 2 * n + 1) {
    SemicircleRule rule(n, sigma);
    std::vector<double> acc(k, 0.0);
    for (std::size_t t = 0; t < rule.nodes.size(); ++t) {
      const auto v = f(rule.nodes[t]);
      for (std::size_t c = 0; c < k; ++c) acc[c] += rule.weights[t] * v[c];
    }
    if (!prev.empty()) {
      err = 0.0;
      bool ok = true;
      for (std::size_t c = 0; c < k; ++c) {
        const double d = std::abs(acc[c] - prev[c]);
        err = std::max(err, d);
        if (d > q.tolerance * std::max(1.0, std::abs(acc[c]))) ok = false;
      }
      if (ok) {
        if (nodes_used) *nodes_used = n;
        return acc;
      }
    }
    if (2 * n + 1 > q.max_nodes) throw ConvergenceError("semicircle quadrature did not stabilize", err);
    prev = std::move(acc);
  }
}

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive Gauss-Kronrod on [a, b]; infinite limits allowed.
IntegralResult integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                         unsigned max_depth = 20);

}  // namespace wlab
