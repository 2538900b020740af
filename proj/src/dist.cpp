#include "geobound/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace geobound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_uniform(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("sample: uniform variate must lie strictly inside (0,1)");
  }
}

// (1 - r/x)^-a - 1 for 0 <= r < x.
double power_excess(double a, double x, double r) {
  return std::expm1(-a * std::log1p(-r / x));
}

void require_shift(double x, double r) {
  if (!(r >= 0.0 && r < x)) throw std::domain_error("tail ratio: need 0 <= r < x");
}

}  // namespace

// ---------------------------------------------------------------- Pareto

ParetoDist::ParetoDist(double a) : alpha(a) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("ParetoDist: alpha must be finite and > 1");
  }
}

double ParetoDist::tail(double x) const { return x <= 1.0 ? 1.0 : std::pow(x, -alpha); }

double ParetoDist::log_tail(double x) const { return x <= 1.0 ? 0.0 : -alpha * std::log(x); }

double ParetoDist::density(double x) const {
  return x <= 1.0 ? 0.0 : alpha * std::pow(x, -alpha - 1.0);
}

double ParetoDist::log_density(double x) const {
  return x <= 1.0 ? -kInf : std::log(alpha) - (alpha + 1.0) * std::log(x);
}

double ParetoDist::hazard(double x) const { return x <= 1.0 ? 0.0 : alpha / x; }

double ParetoDist::log_ratio(double x, double r) const {
  if (x <= 1.0) return 0.0;
  if (x - r <= 1.0) return alpha * std::log(x);
  return -alpha * std::log1p(-r / x);
}

double ParetoDist::quantile_from_tail(double t) const { return std::pow(t, -1.0 / alpha); }

// ---------------------------------------------------------------- Weibull

WeibullDist::WeibullDist(double b) : beta(b) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("WeibullDist: beta must lie in (0,1)");
  }
}

double WeibullDist::tail(double x) const { return x <= 0.0 ? 1.0 : std::exp(-std::pow(x, beta)); }

double WeibullDist::log_tail(double x) const { return x <= 0.0 ? 0.0 : -std::pow(x, beta); }

double WeibullDist::density(double x) const {
  return x <= 0.0 ? 0.0 : std::exp(log_density(x));
}

double WeibullDist::log_density(double x) const {
  if (x <= 0.0) return -kInf;
  return std::log(beta) + (beta - 1.0) * std::log(x) - std::pow(x, beta);
}

double WeibullDist::hazard(double x) const {
  return x <= 0.0 ? 0.0 : beta * std::pow(x, beta - 1.0);
}

double WeibullDist::log_ratio(double x, double r) const {
  if (x <= 0.0) return 0.0;
  if (x - r <= 0.0) return std::pow(x, beta);
  // x^b - (x-r)^b = -x^b * expm1(b * log1p(-r/x)), stable for r << x.
  return -std::pow(x, beta) * std::expm1(beta * std::log1p(-r / x));
}

double WeibullDist::quantile_from_tail(double t) const {
  return std::pow(-std::log(t), 1.0 / beta);
}

// ---------------------------------------------------------------- mixture

PowerMixtureDist::PowerMixtureDist(std::vector<PowerTerm> t) : terms(std::move(t)) {
  if (terms.empty()) throw std::invalid_argument("PowerMixtureDist: no terms");
  double total = 0.0;
  for (const auto& term : terms) {
    if (!(term.coefficient > 0.0)) {
      throw std::invalid_argument("PowerMixtureDist: coefficients must be positive");
    }
    if (!(term.exponent > 1.0) || !std::isfinite(term.exponent)) {
      throw std::invalid_argument("PowerMixtureDist: exponents must be finite and > 1");
    }
    total += term.coefficient;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("PowerMixtureDist: coefficients must sum to 1");
  }
  for (auto& term : terms) term.coefficient /= total;
}

double PowerMixtureDist::tail(double x) const {
  if (x <= 1.0) return 1.0;
  double s = 0.0;
  for (const auto& t : terms) s += t.coefficient * std::pow(x, -t.exponent);
  return s;
}

double PowerMixtureDist::log_tail(double x) const {
  if (x <= 1.0) return 0.0;
  // log-sum-exp keeps this finite where the tail itself underflows
  const double lx = std::log(x);
  double top = -kInf;
  for (const auto& t : terms) top = std::max(top, std::log(t.coefficient) - t.exponent * lx);
  double s = 0.0;
  for (const auto& t : terms) s += std::exp(std::log(t.coefficient) - t.exponent * lx - top);
  return top + std::log(s);
}

double PowerMixtureDist::density(double x) const {
  if (x <= 1.0) return 0.0;
  double s = 0.0;
  for (const auto& t : terms) s += t.coefficient * t.exponent * std::pow(x, -t.exponent - 1.0);
  return s;
}

double PowerMixtureDist::log_density(double x) const {
  if (x <= 1.0) return -kInf;
  return std::log(hazard(x)) + log_tail(x);
}

double PowerMixtureDist::hazard(double x) const {
  if (x <= 1.0) return 0.0;
  // weights w_i = c_i x^-a_i / F̄(x), formed relative to the dominant term
  const double lx = std::log(x);
  const double lt = log_tail(x);
  double h = 0.0;
  for (const auto& t : terms) {
    h += std::exp(std::log(t.coefficient) - t.exponent * lx - lt) * t.exponent;
  }
  return h / x;
}

double PowerMixtureDist::log_ratio(double x, double r) const {
  if (x <= 1.0) return 0.0;
  if (x - r <= 1.0) return -log_tail(x);
  const double lx = std::log(x);
  const double lt = log_tail(x);
  double s = 0.0;
  for (const auto& t : terms) {
    const double w = std::exp(std::log(t.coefficient) - t.exponent * lx - lt);
    s += w * power_excess(t.exponent, x, r);
  }
  return std::log1p(s);
}

double PowerMixtureDist::quantile_from_tail(double t) const {
  if (t >= 1.0) return 1.0;
  // The tail is convex and decreasing on (1, inf); bracket between the
  // quantiles of the lightest and heaviest pure terms.
  double lo = std::pow(t, -1.0 / max_exponent());
  double hi = std::pow(t, -1.0 / min_exponent());
  if (!(hi > lo)) return lo;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = tail(x) - t;  // decreasing in x
    if (f > 0.0) lo = x; else hi = x;
    const double step = f / density(x);  // Newton on F̄(x) = t
    double next = x + step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-12 * next || hi - lo <= 1e-12 * lo) return next;
    x = next;
  }
  return x;
}

double PowerMixtureDist::min_exponent() const {
  return std::min_element(terms.begin(), terms.end(), [](auto& a, auto& b) {
           return a.exponent < b.exponent;
         })->exponent;
}

double PowerMixtureDist::max_exponent() const {
  return std::max_element(terms.begin(), terms.end(), [](auto& a, auto& b) {
           return a.exponent < b.exponent;
         })->exponent;
}

// ---------------------------------------------------------------- discrete

DiscreteDist::DiscreteDist(std::vector<Atom> a) {
  if (a.empty()) throw std::invalid_argument("DiscreteDist: no atoms");
  std::sort(a.begin(), a.end(), [](const Atom& l, const Atom& r) { return l.value < r.value; });
  double total = 0.0;
  for (const auto& atom : a) {
    if (!(atom.value >= 0.0) || !std::isfinite(atom.value)) {
      throw std::invalid_argument("DiscreteDist: atoms must be finite and non-negative");
    }
    if (!(atom.probability > 0.0)) {
      throw std::invalid_argument("DiscreteDist: atom probabilities must be positive");
    }
    total += atom.probability;
    if (!atoms.empty() && atoms.back().value == atom.value) {
      atoms.back().probability += atom.probability;
    } else {
      atoms.push_back(atom);
    }
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("DiscreteDist: probabilities must sum to 1");
  }
  for (auto& atom : atoms) atom.probability /= total;
}

double DiscreteDist::tail(double x) const {
  double s = 0.0;
  for (const auto& a : atoms) if (a.value > x) s += a.probability;
  return s;
}

double DiscreteDist::cdf_left(double x) const {
  double s = 0.0;
  for (const auto& a : atoms) if (a.value < x) s += a.probability;
  return s;
}

double DiscreteDist::quantile_from_tail(double t) const {
  // smallest atom v with P(X > v) <= t
  double above = 1.0;
  for (const auto& a : atoms) {
    above -= a.probability;
    if (above <= t + 1e-15) return a.value;
  }
  return atoms.back().value;
}

// ---------------------------------------------------------------- handle

Family Distribution::family() const {
  return static_cast<Family>(law_.index());
}

double Distribution::tail(double x) const {
  return std::visit([x](const auto& d) { return d.tail(x); }, law_);
}

double Distribution::cdf_left(double x) const {
  if (const auto* d = std::get_if<DiscreteDist>(&law_)) return d->cdf_left(x);
  return cdf(x);
}

double Distribution::log_tail(double x) const {
  if (const auto* d = std::get_if<DiscreteDist>(&law_)) return std::log(d->tail(x));
  return std::visit(
      [x](const auto& d) -> double {
        if constexpr (requires { d.log_tail(x); }) return d.log_tail(x);
        else return 0.0;
      },
      law_);
}

namespace {

template <typename F>
double continuous_only(const Distribution::Law& law, const char* what, F&& f) {
  return std::visit(
      [&](const auto& d) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(d)>, DiscreteDist>) {
          throw std::domain_error(std::string(what) + ": discrete law has no density");
        } else {
          return f(d);
        }
      },
      law);
}

}  // namespace

double Distribution::density(double x) const {
  return continuous_only(law_, "density", [x](const auto& d) { return d.density(x); });
}

double Distribution::log_density(double x) const {
  return continuous_only(law_, "log_density", [x](const auto& d) { return d.log_density(x); });
}

double Distribution::hazard(double x) const {
  return continuous_only(law_, "hazard", [x](const auto& d) { return d.hazard(x); });
}

double Distribution::log_ratio(double x, double r) const {
  require_shift(x, r);
  if (const auto* d = std::get_if<DiscreteDist>(&law_)) {
    const double tx = d->tail(x);
    if (tx <= 0.0) throw std::domain_error("log_ratio: tail(x) = 0");
    return std::log(d->tail(x - r) / tx);
  }
  return continuous_only(law_, "log_ratio", [=](const auto& d) { return d.log_ratio(x, r); });
}

double Distribution::excess_ratio(double x, double r) const {
  if (const auto* d = std::get_if<DiscreteDist>(&law_)) {
    require_shift(x, r);
    const double tx = d->tail(x);
    if (tx <= 0.0) throw std::domain_error("excess_ratio: tail(x) = 0");
    return d->tail(x - r) / tx - 1.0;
  }
  return std::expm1(log_ratio(x, r));
}

double Distribution::support_start() const {
  switch (family()) {
    case Family::pareto:
    case Family::mixture:
      return 1.0;
    default:
      return 0.0;
  }
}

double Distribution::sample(double uniform) const {
  require_uniform(uniform);
  // inversion on the tail: X = F̄^-1(1 - u)
  const double t = 1.0 - uniform;
  return std::visit([t](const auto& d) { return d.quantile_from_tail(t); }, law_);
}

std::string Distribution::describe() const {
  std::ostringstream os;
  os.precision(12);
  std::visit(
      [&os](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ParetoDist>) {
          os << "pareto(alpha=" << d.alpha << ")";
        } else if constexpr (std::is_same_v<T, WeibullDist>) {
          os << "weibull(beta=" << d.beta << ")";
        } else if constexpr (std::is_same_v<T, PowerMixtureDist>) {
          os << "mixture[";
          for (std::size_t i = 0; i < d.terms.size(); ++i) {
            os << (i ? "," : "") << "(" << d.terms[i].coefficient << "," << d.terms[i].exponent
               << ")";
          }
          os << "]";
        } else {
          os << "discrete[";
          for (std::size_t i = 0; i < d.atoms.size(); ++i) {
            os << (i ? "," : "") << "(" << d.atoms[i].value << "," << d.atoms[i].probability
               << ")";
          }
          os << "]";
        }
      },
      law_);
  return os.str();
}

// ---------------------------------------------------------------- geometric

GeometricParams::GeometricParams(double prob) : p(prob) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("GeometricParams: p must lie in (0,1)");
}

double GeometricParams::pmf(long k) const {
  if (k < 1) return 0.0;
  return p * std::pow(q(), static_cast<double>(k - 1));
}

// ---------------------------------------------------------------- overshoot

PowerMixtureDist build_overshoot_upper(double c1, double c2, double base_exponent) {
  if (!(base_exponent > 1.0)) {
    throw std::invalid_argument("build_overshoot_upper: base exponent must exceed 1");
  }
  if (!(c1 >= 0.0 && c2 >= 0.0) || !(c1 + c2 > 0.0)) {
    throw std::invalid_argument("build_overshoot_upper: c1, c2 must be >= 0 and not both 0");
  }
  // Ḡ^I(x) ∝ x^(1-a) on (1, inf); both pieces are taken with unit value at
  // the threshold and the sum is rescaled to a proper tail there.
  const double total = c1 + c2;
  std::vector<PowerTerm> terms;
  if (c1 > 0.0) {
    if (!(base_exponent - 1.0 > 1.0)) {
      throw std::invalid_argument(
          "build_overshoot_upper: integrated tail exponent a-1 must exceed 1 for a summand law "
          "with finite mean");
    }
    terms.push_back({c1 / total, base_exponent - 1.0});
  }
  if (c2 > 0.0) terms.push_back({c2 / total, base_exponent});
  return PowerMixtureDist(std::move(terms));
}

}  // namespace geobound
