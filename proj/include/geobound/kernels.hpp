#pragma once

// Kernels of the one-big-jump decomposition of a geometric-sum tail:
//
//   K(x,r) = F̄(x-r)/F̄(x) - 1
//   J(x,r) = ∫_r^{x-r} F̄(x-y)/F̄(x) F(dy)
//
// together with the cutoff functions r = h(x) used to split the first summand,
// and closed-form upper envelopes for both kernels.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geobound/dist.hpp"

namespace geobound {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// h(x) = scale * x^gamma (power) or h(x) = scale * (log x)^kappa (logpower).
class CutoffFunction {
 public:
  enum class Form { power, logpower };

  static CutoffFunction power(double gamma, double scale = 1.0);
  static CutoffFunction logpower(double kappa, double scale = 1.0);

  double operator()(double x) const;

  Form form() const { return form_; }
  double exponent() const { return exponent_; }
  double scale() const { return scale_; }
  CutoffFunction with_scale(double scale) const;

  /// Beyond this point h is increasing, concave and h(x) <= x/2.
  double x0() const { return x0_; }

  std::string describe() const;

 private:
  CutoffFunction(Form form, double exponent, double scale);

  Form form_;
  double exponent_;
  double scale_;
  double x0_;
};

double k_kernel(const Distribution& dist, double x, double r);

/// Adaptive Gauss-Kronrod evaluation, relative tolerance rel_tol.
/// Throws QuadratureError when the tolerance is not met.
double j_kernel(const Distribution& dist, double x, double r, double rel_tol = 1e-8);

// Pareto envelopes for h < x/2:
//   K(x,h) <= alpha h x^alpha / (x-h)^(alpha+1)
//   J(x,h) <= 2 (2/h)^alpha + (4/x)^alpha
double pareto_k_envelope(double alpha, double x, double h);
double pareto_j_envelope(double alpha, double x, double h);

/// Family-generic closed-form upper bounds on K and J (the Pareto envelopes
/// above for Pareto laws).
double k_envelope(const Distribution& dist, double x, double r);
double j_envelope(const Distribution& dist, double x, double r);

/// Closed-form R(x,r) >= J(x,r) - F̄(r), for 0 < r <= x/2. Much sharper than
/// j_envelope because it keeps the leading F̄(r) term exact; used to bound the
/// f-terms far beyond the numerically evaluated range.
double j_excess_envelope(const Distribution& dist, double x, double r);

struct ConditionCheck {
  std::string name;
  bool passed = true;
  std::size_t checked = 0;
  std::optional<double> first_violation;  // grid x of the first failure
};

struct CutoffReport {
  std::vector<ConditionCheck> checks;  // increasing, concave, half_x, j_condition, k_condition
  bool all_passed() const;
  const ConditionCheck& check(const std::string& name) const;
};

/// Numerical check of the conditions a cutoff function must meet on a grid:
/// h increasing and concave, h(x) <= x/2, J(x,h(x)) <= c F̄(h(x)) and
/// K(x,h(x)) <= F̄(h(x)). Kernel conditions are skipped where h(x) > x/2.
CutoffReport validate_h(const Distribution& dist, const CutoffFunction& h, double c,
                        const std::vector<double>& grid);

/// Geometric grid lo, lo*ratio, ... , hi (hi always included).
std::vector<double> geometric_grid(double lo, double hi, double ratio);

}  // namespace geobound
