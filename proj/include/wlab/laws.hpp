#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wlab/random.hpp"

namespace wlab {

enum class LawKind { Gaussian, Rademacher, Uniform, TwoPointAsym, StudentLike };

// Standardized entry law: mean 0, variance 1, finite fourth moment.
// Complex entries use two independent copies scaled by 1/sqrt(2).
class EntryLaw {
 public:
  EntryLaw() = default;
  static EntryLaw gaussian() { return EntryLaw(LawKind::Gaussian, 0.0); }
  static EntryLaw rademacher() { return EntryLaw(LawKind::Rademacher, 0.0); }
  static EntryLaw uniform() { return EntryLaw(LawKind::Uniform, 0.0); }
  static EntryLaw two_point(double p);
  static EntryLaw student(double df);
  static EntryLaw parse(std::string_view id);

  [[nodiscard]] LawKind kind() const { return kind_; }
  [[nodiscard]] double param() const { return param_; }
  [[nodiscard]] std::string id() const;
  [[nodiscard]] bool bounded() const;
  [[nodiscard]] bool symmetric() const { return kind_ != LawKind::TwoPointAsym || param_ == 0.5; }
  [[nodiscard]] bool finite_fifth_moment() const { return kind_ != LawKind::StudentLike || param_ > 5.0; }

  double draw(EntryStream& s) const;

  [[nodiscard]] bool discrete() const { return kind_ == LawKind::Rademacher || kind_ == LawKind::TwoPointAsym; }
  // (value, probability) pairs of a discrete law.
  [[nodiscard]] std::vector<std::pair<double, double>> support() const;

  // Exact moments of the real standardized law.
  [[nodiscard]] double fourth_moment() const;
  // E|W|^4 for the complex entry (Re, Im iid copies of variance 1/2).
  [[nodiscard]] double complex_fourth_moment() const { return 0.5 * (fourth_moment() + 1.0); }

  // E g(X) for the real law. Breakpoints mark discontinuities of g.
  double expect(const std::function<double(double)>& g, std::span<const double> breakpoints = {},
                double tol = 1e-13) const;
  // E g(a, b) over two independent copies (a, b); discontinuities of g are
  // allowed on circles a^2 + b^2 = r^2 for r in radii.
  double expect2(const std::function<double(double, double)>& g, std::span<const double> radii = {}) const;

  friend bool operator==(const EntryLaw& a, const EntryLaw& b) { return a.kind_ == b.kind_ && a.param_ == b.param_; }

 private:
  EntryLaw(LawKind k, double p) : kind_(k), param_(p) {}
  double density(double x) const;
  LawKind kind_ = LawKind::Gaussian;
  double param_ = 0.0;
};

}  // namespace wlab
