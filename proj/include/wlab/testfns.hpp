#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "wlab/common.hpp"

namespace wlab {

struct Monomial {
  int degree = 1;
};
struct Polynomial {
  std::vector<double> coeffs;  // c0 + c1 x + c2 x^2 + ...
};
// poly(x) * exp(-(x - center)^2 / (2 width^2)); an empty poly means 1.
struct GaussianBump {
  double center = 0.0;
  double width = 1.0;
  std::vector<double> poly;
};
// 1 on [-inner, inner], 0 outside [-outer, outer], smooth in between.
struct SmoothCutoff {
  double inner = 0.5;
  double outer = 1.0;
};
struct ResolventReal {
  cplx z;
};
struct ResolventImag {
  cplx z;
};
// Piecewise-linear interpolant of the samples, zero outside the grid.
struct Sampled {
  std::vector<double> grid;
  std::vector<double> values;
};

using FunctionKind = std::variant<Monomial, Polynomial, GaussianBump, SmoothCutoff, ResolventReal, ResolventImag, Sampled>;

using Interval = std::pair<double, double>;

class TestFunction {
 public:
  static constexpr int kMaxOrder = 10;

  explicit TestFunction(FunctionKind kind, double scale = 1.0);

  static TestFunction parse(std::string_view id);
  static TestFunction zero() { return TestFunction(Polynomial{}); }

  [[nodiscard]] std::string id() const;
  [[nodiscard]] const FunctionKind& kind() const { return kind_; }
  [[nodiscard]] double scale() const { return scale_; }
  [[nodiscard]] TestFunction scaled(double c) const { return TestFunction(kind_, scale_ * c); }
  [[nodiscard]] int max_derivative_order() const;
  [[nodiscard]] std::optional<Interval> support_hint() const;
  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] bool integrable() const;

  // f^(order)(x)
  [[nodiscard]] double evaluate(double x, int order = 0) const;
  double operator()(double x) const { return evaluate(x, 0); }
  // f, f', ..., f^(n) at x in one pass
  [[nodiscard]] std::vector<double> derivatives(double x, int n) const;

  // Coefficients when f is a polynomial (scale folded in).
  [[nodiscard]] std::optional<std::vector<double>> polynomial() const;

  // Half-width beyond which f and its derivatives are negligible (or zero), if finite.
  [[nodiscard]] std::optional<double> effective_radius() const;

 private:
  FunctionKind kind_;
  double scale_;
};

// Smooth step: 0 for t <= 0, 1 for t >= 1; derivatives up to n in out[0..n].
void smooth_step(double t, int n, double* out);

cplx fourier_transform(const TestFunction& f, double k, double tol = 1e-10);

class NotInSpaceError : public std::runtime_error {
 public:
  NotInSpaceError(const std::string& what, double partial) : std::runtime_error(what), partial_(partial) {}
  double partial() const noexcept { return partial_; }

 private:
  double partial_;
};

struct NormEstimate {
  double value = 0.0;
  double error = 0.0;
};

NormEstimate sobolev_norm(const TestFunction& f, double s);

struct FunctionNorms {
  double sobolev_s = 0.0;
  double cn = 0.0;
  double l1n = 0.0;
  double l1n_plus = 0.0;
};

double cn_norm(const TestFunction& f, int n, double L);
double l1n_norm(const TestFunction& f, int n);
double l1n_plus_norm(const TestFunction& f, int n);
FunctionNorms function_norms(const TestFunction& f, double s, int n, double L);

struct Extension {
  cplx ftilde;
  cplx dbar;
};

// Quasi-analytic extension of order l with the cutoff SmoothCutoff(1/2, 1) in y.
Extension hs_extension(const TestFunction& f, int l, cplx z);
// Same, from precomputed derivatives f^(0..l+1)(x).
Extension hs_extension(const double* derivs, int l, double y);

}  // namespace wlab
