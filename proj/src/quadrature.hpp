#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <vector>

#include "geobound/kernels.hpp"

namespace geobound::detail {

struct PanelSum {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

// Integrates f over consecutive panels [cuts[i], cuts[i+1]] with adaptive
// 15-point Gauss-Kronrod. Depth 20 allows ~10^6 subintervals per panel.
template <typename F>
PanelSum integrate_panels(F&& f, const std::vector<double>& cuts, double rel_tol) {
  using boost::math::quadrature::gauss_kronrod;
  PanelSum sum;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    double err = 0.0, l1 = 0.0;
    sum.value += gauss_kronrod<double, 15>::integrate(f, cuts[i], cuts[i + 1], 20, rel_tol, &err, &l1);
    sum.error += err;
    sum.l1 += l1;
  }
  if (!std::isfinite(sum.value) || sum.error > 10.0 * rel_tol * sum.l1 + 1e-300) {
    throw QuadratureError("adaptive quadrature did not reach the requested tolerance");
  }
  return sum;
}

}  // namespace geobound::detail
