#include "wlab/laws.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "wlab/common.hpp"
#include "wlab/quadrature.hpp"

namespace wlab {

namespace {

std::string fmt(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// atoms of the discrete laws: (value, probability)
std::vector<std::pair<double, double>> atoms(LawKind k, double p) {
  if (k == LawKind::Rademacher) return {{-1.0, 0.5}, {1.0, 0.5}};
  return {{std::sqrt((1.0 - p) / p), p}, {-std::sqrt(p / (1.0 - p)), 1.0 - p}};
}

double student_norm_const(double df) {
  return std::exp(std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df)) / std::sqrt(df * std::numbers::pi);
}

}  // namespace

EntryLaw EntryLaw::two_point(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("two-point law needs 0 < p < 1");
  return EntryLaw(LawKind::TwoPointAsym, p);
}

EntryLaw EntryLaw::student(double df) {
  if (!(df > 4.0)) throw DomainError("student-like law needs df > 4 for a finite fourth moment");
  return EntryLaw(LawKind::StudentLike, df);
}

EntryLaw EntryLaw::parse(std::string_view id) {
  const auto colon = id.find(':');
  const auto name = id.substr(0, colon);
  double arg = 0.0;
  const bool has_arg = colon != std::string_view::npos;
  if (has_arg) {
    const auto s = id.substr(colon + 1);
    auto r = std::from_chars(s.data(), s.data() + s.size(), arg);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
      throw std::invalid_argument("bad parameter in law id '" + std::string(id) + "'");
  }
  if (name == "gaussian" && !has_arg) return gaussian();
  if (name == "rademacher" && !has_arg) return rademacher();
  if (name == "uniform" && !has_arg) return uniform();
  if (name == "twopoint" && has_arg) return two_point(arg);
  if (name == "student" && has_arg) return student(arg);
  throw std::invalid_argument("unknown law id '" + std::string(id) + "'");
}

std::string EntryLaw::id() const {
  switch (kind_) {
    case LawKind::Gaussian: return "gaussian";
    case LawKind::Rademacher: return "rademacher";
    case LawKind::Uniform: return "uniform";
    case LawKind::TwoPointAsym: return "twopoint:" + fmt(param_);
    case LawKind::StudentLike: return "student:" + fmt(param_);
  }
  return "?";
}

std::vector<std::pair<double, double>> EntryLaw::support() const {
  if (!discrete()) throw DomainError("law " + id() + " is not discrete");
  return atoms(kind_, param_);
}

bool EntryLaw::bounded() const { return kind_ != LawKind::Gaussian && kind_ != LawKind::StudentLike; }

double EntryLaw::draw(EntryStream& s) const {
  switch (kind_) {
    case LawKind::Gaussian: return s.normal();
    case LawKind::Rademacher: return (s.next_u32() & 1u) ? 1.0 : -1.0;
    case LawKind::Uniform: return std::sqrt(3.0) * (2.0 * s.uniform() - 1.0);
    case LawKind::TwoPointAsym: {
      const double p = param_;
      return s.uniform() < p ? std::sqrt((1.0 - p) / p) : -std::sqrt(p / (1.0 - p));
    }
    case LawKind::StudentLike: {
      const double df = param_;
      const double z = s.normal();
      const double chi2 = 2.0 * s.gamma(0.5 * df);
      return z / std::sqrt(chi2 / df) * std::sqrt((df - 2.0) / df);
    }
  }
  return 0.0;
}

double EntryLaw::fourth_moment() const {
  switch (kind_) {
    case LawKind::Gaussian: return 3.0;
    case LawKind::Rademacher: return 1.0;
    case LawKind::Uniform: return 9.0 / 5.0;
    case LawKind::TwoPointAsym: {
      const double p = param_;
      return (1.0 - 3.0 * p + 3.0 * p * p) / (p * (1.0 - p));
    }
    case LawKind::StudentLike: return 3.0 * (param_ - 2.0) / (param_ - 4.0);
  }
  return 0.0;
}

double EntryLaw::density(double x) const {
  switch (kind_) {
    case LawKind::Gaussian: return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    case LawKind::Uniform: return std::abs(x) <= std::sqrt(3.0) ? 1.0 / (2.0 * std::sqrt(3.0)) : 0.0;
    case LawKind::StudentLike: {
      const double df = param_;
      const double c = std::sqrt((df - 2.0) / df);  // X = c T
      const double t = x / c;
      return student_norm_const(df) * std::pow(1.0 + t * t / df, -0.5 * (df + 1.0)) / c;
    }
    default: return 0.0;
  }
}

double EntryLaw::expect(const std::function<double(double)>& g, std::span<const double> breakpoints, double tol) const {
  if (kind_ == LawKind::Rademacher || kind_ == LawKind::TwoPointAsym) {
    double s = 0.0;
    for (auto [v, p] : atoms(kind_, param_)) s += p * g(v);
    return s;
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cuts;
  if (kind_ == LawKind::Uniform) {
    cuts = {-std::sqrt(3.0), std::sqrt(3.0)};
  } else {
    cuts = {-inf, 0.0, inf};
  }
  for (double b : breakpoints) {
    if (b > cuts.front() && b < cuts.back()) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto h = [&](double x) {
    const double d = density(x);
    return d == 0.0 ? 0.0 : g(x) * d;
  };
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < cuts.size(); ++t) total += integrate(h, cuts[t], cuts[t + 1], tol, 25).value;
  return total;
}

double EntryLaw::expect2(const std::function<double(double, double)>& g, std::span<const double> radii) const {
  if (kind_ == LawKind::Rademacher || kind_ == LawKind::TwoPointAsym) {
    double s = 0.0;
    for (auto [a, pa] : atoms(kind_, param_))
      for (auto [b, pb] : atoms(kind_, param_)) s += pa * pb * g(a, b);
    return s;
  }
  if (kind_ == LawKind::Uniform) {
    // outer integral over a; the inner integral over b breaks where the circles cross
    std::vector<double> outer_breaks;
    for (double r : radii) {
      outer_breaks.push_back(-r);
      outer_breaks.push_back(r);
    }
    return expect(
        [&](double a) {
          std::vector<double> inner;
          for (double r : radii) {
            if (std::abs(a) < r) {
              const double b = std::sqrt(r * r - a * a);
              inner.push_back(-b);
              inner.push_back(b);
            }
          }
          return expect([&](double b) { return g(a, b); }, inner);
        },
        // the inner values carry ~1e-13 noise, so the outer rule cannot converge much below that
        outer_breaks, 1e-10);
  }
  // Smooth densities on the whole line: polar coordinates put the circles on radial breakpoints.
  // Angular sectors of width pi/4 are integrated separately so that odd integrands cancel only in
  // the final sum; a relative tolerance on a cancelled ring total would never be met.
  std::vector<double> cuts{0.0};
  for (double r : radii)
    if (r > 0.0) cuts.push_back(r);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.push_back(std::numeric_limits<double>::infinity());
  auto ray = [&](double th) {
    const double c = std::cos(th), s = std::sin(th);
    auto h = [&](double rho) { return rho == 0.0 ? 0.0 : g(rho * c, rho * s) * density(rho * c) * density(rho * s) * rho; };
    double acc = 0.0;
    for (std::size_t t = 0; t + 1 < cuts.size(); ++t) acc += integrate(h, cuts[t], cuts[t + 1], 1e-13, 25).value;
    return acc;
  };
  double total = 0.0;
  for (int q = 0; q < 8; ++q)
    total += integrate(ray, q * std::numbers::pi / 4, (q + 1) * std::numbers::pi / 4, 1e-11, 25).value;
  return total;
}

}  // namespace wlab
