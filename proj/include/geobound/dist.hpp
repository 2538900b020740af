#pragma once

// Heavy-tailed summand laws used as the increments of a geometric sum.
//
// Every family exposes its tail F̄(x) in closed form together with the
// numerically stable pieces the kernels need at very large x: the log tail
// ratio log F̄(x-r)/F̄(x), the log-density and the hazard rate. Laws are
// immutable values and safe to share between threads.

#include <string>
#include <variant>
#include <vector>

namespace geobound {

/// Pareto law with threshold 1: F̄(x) = x^-alpha for x > 1.
struct ParetoDist {
  double alpha;

  explicit ParetoDist(double alpha);

  double tail(double x) const;
  double log_tail(double x) const;
  double density(double x) const;
  double log_density(double x) const;
  double hazard(double x) const;
  double log_ratio(double x, double r) const;
  double quantile_from_tail(double t) const;
};

/// Weibull law with shape in (0,1): F̄(x) = exp(-x^beta) for x > 0.
struct WeibullDist {
  double beta;

  explicit WeibullDist(double beta);

  double tail(double x) const;
  double log_tail(double x) const;
  double density(double x) const;
  double log_density(double x) const;
  double hazard(double x) const;
  double log_ratio(double x, double r) const;
  double quantile_from_tail(double t) const;
};

struct PowerTerm {
  double coefficient;
  double exponent;
};

/// Finite mixture of Pareto tails on (1, inf): F̄(x) = sum c_i x^-a_i.
struct PowerMixtureDist {
  std::vector<PowerTerm> terms;

  explicit PowerMixtureDist(std::vector<PowerTerm> terms);

  double tail(double x) const;
  double log_tail(double x) const;
  double density(double x) const;
  double log_density(double x) const;
  double hazard(double x) const;
  double log_ratio(double x, double r) const;
  double quantile_from_tail(double t) const;

  double min_exponent() const;
  double max_exponent() const;
};

struct Atom {
  double value;
  double probability;
};

/// Finite set of non-negative atoms. Used for degenerate and lattice test laws;
/// it has no density, so kernel integrals reject it.
struct DiscreteDist {
  std::vector<Atom> atoms;  // sorted by value, merged

  explicit DiscreteDist(std::vector<Atom> atoms);

  double tail(double x) const;
  double cdf_left(double x) const;  // P(X < x)
  double quantile_from_tail(double t) const;
};

enum class Family { pareto, weibull, mixture, discrete };

/// Value-semantic handle over the supported summand families.
class Distribution {
 public:
  using Law = std::variant<ParetoDist, WeibullDist, PowerMixtureDist, DiscreteDist>;

  Distribution(ParetoDist d) : law_(std::move(d)) {}
  Distribution(WeibullDist d) : law_(std::move(d)) {}
  Distribution(PowerMixtureDist d) : law_(std::move(d)) {}
  Distribution(DiscreteDist d) : law_(std::move(d)) {}

  Family family() const;
  const Law& law() const { return law_; }

  double tail(double x) const;
  double cdf(double x) const { return 1.0 - tail(x); }
  double cdf_left(double x) const;
  double log_tail(double x) const;

  bool has_density() const { return family() != Family::discrete; }
  double density(double x) const;
  double log_density(double x) const;
  double hazard(double x) const;

  /// log(F̄(x-r)/F̄(x)), computed without forming either tail.
  double log_ratio(double x, double r) const;
  /// F̄(x-r)/F̄(x) - 1.
  double excess_ratio(double x, double r) const;

  /// Left end of the support where the law has a kink (1 for the Pareto
  /// families, 0 otherwise).
  double support_start() const;

  /// Inverse-transform sample; requires u strictly inside (0,1).
  double sample(double uniform) const;

  std::string describe() const;

 private:
  Law law_;
};

/// Geometric counting law P(nu = k) = p (1-p)^(k-1), k >= 1.
struct GeometricParams {
  double p;

  explicit GeometricParams(double p);

  double q() const { return 1.0 - p; }
  double mean() const { return 1.0 / p; }
  double pmf(long k) const;
};

/// Upper bound c1·Ḡ^I(x) + c2·Ḡ(x) on the overshoot tail for a power-law
/// base Ḡ(x) = x^-a, renormalized to equal 1 at the support threshold.
PowerMixtureDist build_overshoot_upper(double c1, double c2, double base_exponent);

}  // namespace geobound
