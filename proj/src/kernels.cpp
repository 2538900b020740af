#include "geobound/kernels.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <variant>

#include "quadrature.hpp"

namespace geobound {

// ---------------------------------------------------------------- cutoff

namespace {

// Largest x with logpower h(x) >= x/2, found on t = log x.
double logpower_half_crossing(double kappa, double scale) {
  auto gap = [&](double t) { return 0.5 * std::exp(t) - scale * std::pow(t, kappa); };
  double last_bad = 0.0;
  for (double t = 0.0; t < 700.0; t += 0.01) {
    if (gap(t) < 0.0) last_bad = t;
  }
  if (last_bad == 0.0) return 1.0;
  double lo = last_bad, hi = last_bad + 0.01;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::exp(hi);
}

}  // namespace

CutoffFunction::CutoffFunction(Form form, double exponent, double scale)
    : form_(form), exponent_(exponent), scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("CutoffFunction: scale must be positive");
  }
  if (form == Form::power) {
    if (!(exponent > 0.0 && exponent < 1.0)) {
      throw std::invalid_argument("CutoffFunction: power exponent must lie in (0,1)");
    }
    x0_ = std::pow(2.0 * scale, 1.0 / (1.0 - exponent));
  } else {
    if (!(exponent > 0.0)) throw std::invalid_argument("CutoffFunction: kappa must be > 0");
    // increasing for x > 1, concave once log x >= kappa - 1
    x0_ = std::max({1.0, std::exp(exponent - 1.0), logpower_half_crossing(exponent, scale)});
  }
}

CutoffFunction CutoffFunction::power(double gamma, double scale) {
  return CutoffFunction(Form::power, gamma, scale);
}

CutoffFunction CutoffFunction::logpower(double kappa, double scale) {
  return CutoffFunction(Form::logpower, kappa, scale);
}

double CutoffFunction::operator()(double x) const {
  if (form_ == Form::power) return x <= 0.0 ? 0.0 : scale_ * std::pow(x, exponent_);
  return x <= 1.0 ? 0.0 : scale_ * std::pow(std::log(x), exponent_);
}

CutoffFunction CutoffFunction::with_scale(double scale) const {
  return CutoffFunction(form_, exponent_, scale);
}

std::string CutoffFunction::describe() const {
  std::ostringstream os;
  os.precision(12);
  if (form_ == Form::power) {
    os << scale_ << "*x^" << exponent_;
  } else {
    os << scale_ << "*log(x)^" << exponent_;
  }
  return os.str();
}

// ---------------------------------------------------------------- kernels

double k_kernel(const Distribution& dist, double x, double r) {
  if (!(r >= 0.0 && r < x)) throw std::domain_error("k_kernel: need 0 <= r < x");
  if (dist.has_density() ? !std::isfinite(dist.log_tail(x)) : dist.tail(x) <= 0.0) {
    throw std::domain_error("k_kernel: tail(x) = 0");
  }
  return dist.excess_ratio(x, r);
}

double j_kernel(const Distribution& dist, double x, double r, double rel_tol) {
  if (!dist.has_density()) throw std::domain_error("j_kernel: law has no density");
  if (!(r > 0.0)) throw std::domain_error("j_kernel: need r > 0");
  if (r > 0.5 * x) throw std::domain_error("j_kernel: need r <= x/2");
  const double half = 0.5 * x;
  if (r == half) return 0.0;

  // J = ∫_r^{x/2} ratio(x,y) f(y) dy + ∫_r^{x/2} F̄(z) hazard(x-z) ratio(x,z) dz,
  // the second piece being y in [x/2, x-r] written in z = x - y. Both
  // integrands concentrate near the lower limit, so panels double from r.
  std::vector<double> cuts{r};
  const double kink = dist.support_start();
  for (double c = 2.0 * r; c < half; c *= 2.0) {
    if (kink > cuts.back() && kink < c) cuts.push_back(kink);
    cuts.push_back(c);
  }
  if (kink > cuts.back() && kink < half) cuts.push_back(kink);
  cuts.push_back(half);

  auto near_part = [&](double y) {
    const double ld = dist.log_density(y);
    if (ld == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp(dist.log_ratio(x, y) + ld);
  };
  auto far_part = [&](double z) {
    const double hz = dist.hazard(x - z);
    if (hz <= 0.0) return 0.0;
    return std::exp(dist.log_tail(z) + std::log(hz) + dist.log_ratio(x, z));
  };
  const auto a = detail::integrate_panels(near_part, cuts, rel_tol);
  const auto b = detail::integrate_panels(far_part, cuts, rel_tol);
  return a.value + b.value;
}

// ---------------------------------------------------------------- envelopes

namespace {

void require_half(double x, double h, const char* what) {
  if (!(h > 0.0) || !(h < 0.5 * x)) throw std::domain_error(std::string(what) + ": need 0 < h < x/2");
}

// Shared by the Pareto and mixture families: tails sum_i c_i x^-a_i on (1,inf).
struct PowerTail {
  std::vector<PowerTerm> terms;
  double a_max = 0.0;
};

PowerTail as_power_tail(const Distribution& dist) {
  if (const auto* p = std::get_if<ParetoDist>(&dist.law())) return {{{1.0, p->alpha}}, p->alpha};
  if (const auto* m = std::get_if<PowerMixtureDist>(&dist.law())) return {m->terms, m->max_exponent()};
  throw std::logic_error("not a power-tail law");
}

bool is_power_tail(const Distribution& dist) {
  return dist.family() == Family::pareto || dist.family() == Family::mixture;
}

double power_tail_j_excess(const PowerTail& pt, double x, double r) {
  // (1-t)^-a - 1 <= 2 (2^a - 1) t on [0, 1/2] by convexity.
  const double chord = 2.0 * (std::pow(2.0, pt.a_max) - 1.0);
  const double re = std::max(r, 1.0);
  double mean_excess = 0.0;   // ∫_re^inf y F(dy)
  double tail_integral = 0.0; // ∫_re^inf F̄(z) dz
  double hazard_cap = 0.0;    // bound on x f(x/2)/F̄(x)
  for (const auto& t : pt.terms) {
    const double w = t.coefficient * std::pow(re, 1.0 - t.exponent) / (t.exponent - 1.0);
    mean_excess += t.exponent * w;
    tail_integral += w;
    hazard_cap = std::max(hazard_cap, t.exponent * std::pow(2.0, t.exponent + 1.0));
  }
  tail_integral += std::max(0.0, 1.0 - r);
  return (chord * mean_excess + hazard_cap * tail_integral) / x;
}

double weibull_j_excess(double beta, double x, double r) {
  using boost::math::tgamma;
  const double eps = std::clamp(r / x, 1e-3, 0.5);
  const double eta = beta * std::pow(eps, 1.0 - beta) * std::pow(1.0 - eps, beta - 1.0);
  const double slope = beta * std::pow((1.0 - eps) * x, beta - 1.0);
  const double rb = std::pow(r, beta);
  const double inv = 1.0 / beta;
  // y in [r, eps x]: (e^{slope y} - 1) f(y) <= slope * beta y^beta e^{-(1-eta) y^beta}
  const double near = slope * tgamma(inv + 1.0, (1.0 - eta) * rb) / std::pow(1.0 - eta, inv + 1.0);
  double mid = 0.0, far = 0.0;
  const double hazard_cap = beta * std::pow(0.5 * x, beta - 1.0);
  far = hazard_cap * tgamma(inv, (1.0 - eta) * rb) / (beta * std::pow(1.0 - eta, inv));
  if (eps < 0.5) {
    // y in [eps x, x/2]: ratio * f <= beta y^(beta-1) e^{-(1-beta) y^beta}
    const double eb = std::pow(eps * x, beta);
    mid = std::exp(-(1.0 - beta) * eb) / (1.0 - beta);
    far += hazard_cap * tgamma(inv, (1.0 - beta) * eb) / (beta * std::pow(1.0 - beta, inv));
  }
  return near + mid + far;
}

}  // namespace

double pareto_k_envelope(double alpha, double x, double h) {
  require_half(x, h, "pareto_k_envelope");
  return alpha * h / (x - h) * std::exp(-alpha * std::log1p(-h / x));
}

double pareto_j_envelope(double alpha, double x, double h) {
  require_half(x, h, "pareto_j_envelope");
  return 2.0 * std::pow(2.0 / h, alpha) + std::pow(4.0 / x, alpha);
}

double k_envelope(const Distribution& dist, double x, double r) {
  require_half(x, r, "k_envelope");
  switch (dist.family()) {
    case Family::pareto:
      return pareto_k_envelope(std::get<ParetoDist>(dist.law()).alpha, x, r);
    case Family::mixture:
      // the tail ratio of a mixture is at most that of its heaviest-decaying term
      return pareto_k_envelope(std::get<PowerMixtureDist>(dist.law()).max_exponent(), x, r);
    case Family::weibull: {
      const double b = std::get<WeibullDist>(dist.law()).beta;
      return std::expm1(b * r * std::pow(x - r, b - 1.0));
    }
    default:
      throw std::domain_error("k_envelope: unsupported family");
  }
}

double j_envelope(const Distribution& dist, double x, double r) {
  require_half(x, r, "j_envelope");
  switch (dist.family()) {
    case Family::pareto:
      return pareto_j_envelope(std::get<ParetoDist>(dist.law()).alpha, x, r);
    case Family::mixture: {
      const double a = std::get<PowerMixtureDist>(dist.law()).max_exponent();
      return std::pow(2.0, 1.0 + a) * dist.tail(r) +
             std::exp(2.0 * dist.log_tail(0.5 * x) - dist.log_tail(x));
    }
    case Family::weibull:
      return dist.tail(r) + j_excess_envelope(dist, x, r);
    default:
      throw std::domain_error("j_envelope: unsupported family");
  }
}

double j_excess_envelope(const Distribution& dist, double x, double r) {
  if (!(r > 0.0 && r <= 0.5 * x)) throw std::domain_error("j_excess_envelope: need 0 < r <= x/2");
  if (is_power_tail(dist)) {
    if (!(x > 2.0)) throw std::domain_error("j_excess_envelope: need x > 2");
    return power_tail_j_excess(as_power_tail(dist), x, r);
  }
  if (dist.family() == Family::weibull) {
    return weibull_j_excess(std::get<WeibullDist>(dist.law()).beta, x, r);
  }
  throw std::domain_error("j_excess_envelope: unsupported family");
}

// ---------------------------------------------------------------- validation

bool CutoffReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const ConditionCheck& CutoffReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("CutoffReport: no check named " + name);
}

CutoffReport validate_h(const Distribution& dist, const CutoffFunction& h, double c,
                        const std::vector<double>& grid) {
  if (!(c > 1.0)) throw std::invalid_argument("validate_h: c must exceed 1");
  CutoffReport report;
  for (const char* name : {"increasing", "concave", "half_x", "j_condition", "k_condition"}) {
    report.checks.push_back(ConditionCheck{name, true, 0, std::nullopt});
  }
  auto& inc = report.checks[0];
  auto& con = report.checks[1];
  auto& half = report.checks[2];
  auto& jc = report.checks[3];
  auto& kc = report.checks[4];
  auto fail = [](ConditionCheck& ck, double x) {
    if (ck.passed) ck.first_violation = x;
    ck.passed = false;
  };

  std::vector<double> hv(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) hv[i] = h(grid[i]);

  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    ++inc.checked;
    if (hv[i + 1] < hv[i]) fail(inc, grid[i + 1]);
  }
  for (std::size_t i = 0; i + 2 < grid.size(); ++i) {
    ++con.checked;
    const double s0 = (hv[i + 1] - hv[i]) / (grid[i + 1] - grid[i]);
    const double s1 = (hv[i + 2] - hv[i + 1]) / (grid[i + 2] - grid[i + 1]);
    if (s1 > s0 + 1e-12 * std::abs(s0)) fail(con, grid[i + 1]);
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    ++half.checked;
    if (hv[i] > 0.5 * x) {
      fail(half, x);
      continue;
    }
    if (!(hv[i] > 0.0)) continue;
    const double bound = dist.tail(hv[i]);
    ++jc.checked;
    if (j_kernel(dist, x, hv[i]) > c * bound) fail(jc, x);
    ++kc.checked;
    if (k_kernel(dist, x, hv[i]) > bound) fail(kc, x);
  }
  return report;
}

std::vector<double> geometric_grid(double lo, double hi, double ratio) {
  if (!(lo > 0.0) || !(hi >= lo) || !(ratio > 1.0)) {
    throw std::invalid_argument("geometric_grid: need 0 < lo <= hi and ratio > 1");
  }
  std::vector<double> g;
  for (double x = lo; x < hi * (1.0 - 1e-12); x *= ratio) g.push_back(x);
  g.push_back(hi);
  return g;
}

}  // namespace geobound
