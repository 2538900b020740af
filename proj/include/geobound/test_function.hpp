#pragma once

// Test functions g(x) that dominate the kernels and set the decay of the
// final bound C*g(x).

#include <string>
#include <variant>
#include <vector>

#include "geobound/dist.hpp"
#include "geobound/kernels.hpp"
#include "geobound/tables.hpp"

namespace geobound {

/// g(x) = coef * x^-exponent.
struct PowerTestFunction {
  double coef = 1.0;
  double exponent = 0.0;

  double operator()(double x) const;
};

/// g(x) = K(x, h(x)).
struct KKernelTestFunction {
  Distribution dist;
  CutoffFunction h;

  double operator()(double x) const;
};

/// Δm(x) = sup_{x <= y <= b*} Δ(y) on the table grid, linearly interpolated.
class MonotoneEnvelope {
 public:
  /// Backward running maximum over the table points with x <= bstar.
  static MonotoneEnvelope from_table(const DeltaTable& table, double bstar);

  double operator()(double x) const;
  double lo() const { return grid_.front(); }
  double hi() const { return grid_.back(); }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
};

using AsymptoticTestFunction = std::variant<PowerTestFunction, KKernelTestFunction>;

/// g1(x) = Δm(x) for x < b*, kappa * tail(x) for x >= b*.
struct SplicedTestFunction {
  double bstar = 0.0;
  MonotoneEnvelope head;
  double kappa = 0.0;
  AsymptoticTestFunction tail;

  double operator()(double x) const;
};

class TestFunction {
 public:
  using Variant = std::variant<PowerTestFunction, KKernelTestFunction, SplicedTestFunction>;

  TestFunction(PowerTestFunction g) : g_(std::move(g)) {}
  TestFunction(KKernelTestFunction g) : g_(std::move(g)) {}
  TestFunction(SplicedTestFunction g) : g_(std::move(g)) {}
  TestFunction(AsymptoticTestFunction g);

  double operator()(double x) const;
  const Variant& variant() const { return g_; }
  bool is_spliced() const { return std::holds_alternative<SplicedTestFunction>(g_); }

  /// Factor multiplying the asymptotic shape: coef for power, 1 for the K form,
  /// kappa * (tail factor) when spliced.
  double tail_coefficient() const;
  /// The asymptotic shape with unit coefficient (x^-e or K(x,h(x))).
  AsymptoticTestFunction shape() const;

  std::string describe() const;

 private:
  Variant g_;
};

/// Splices the monotone envelope of the table onto `tail` at b* (snapped to
/// the nearest grid point) with the continuity coefficient Δm(b*)/tail(b*).
TestFunction build_spliced_g(const DeltaTable& table, double bstar,
                             const AsymptoticTestFunction& tail);

/// g(x) = x^-min(alpha*beta, 1-beta) for h(x) ∝ x^beta.
PowerTestFunction optimal_pareto_g(double alpha, double beta);

/// beta = 1/(1+alpha), where both exponents coincide.
inline double optimal_pareto_beta(double alpha) { return 1.0 / (1.0 + alpha); }

}  // namespace geobound
