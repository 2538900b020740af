#include "geobound/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace geobound {

double LatticeDistribution::total_mass() const {
  // Neumaier summation; masses span many orders of magnitude
  double s = 0.0, c = 0.0;
  for (double m : masses) {
    const double t = s + m;
    c += std::abs(s) >= std::abs(m) ? (s - t) + m : (m - t) + s;
    s = t;
  }
  return s + c;
}

LatticeDistribution discretize(const Distribution& dist, double bandwidth, double truncation,
                               DiscretizationMode mode, std::optional<double> max_truncated_mass) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw std::invalid_argument("discretize: bandwidth must be positive");
  }
  if (!(truncation >= 0.0)) throw std::invalid_argument("discretize: truncation must be >= 0");
  const double steps = truncation / bandwidth;
  const auto n = static_cast<std::size_t>(std::llround(steps));
  if (std::abs(steps - static_cast<double>(n)) > 1e-9 * std::max(1.0, steps)) {
    throw std::invalid_argument("discretize: truncation must be a multiple of the bandwidth");
  }

  LatticeDistribution lat;
  lat.bandwidth = bandwidth;
  lat.truncation_point = static_cast<double>(n) * bandwidth;
  lat.masses.resize(n + 1);

  // Cumulative probability up to the right edge of cell j; differences of a
  // monotone sequence keep every mass non-negative.
  auto edge = [&](std::size_t j) -> double {
    const double x = static_cast<double>(j) * bandwidth;
    switch (mode) {
      case DiscretizationMode::rounded: return dist.cdf(x + 0.5 * bandwidth);
      case DiscretizationMode::lower: return dist.cdf_left(x + bandwidth);
      case DiscretizationMode::upper: return dist.cdf(x);
    }
    return 0.0;
  };
  // Tails are used for the last edge so tiny truncated masses are not lost to
  // cancellation in 1 - F.
  double prev = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const double cur = edge(j);
    lat.masses[j] = std::max(0.0, cur - prev);
    prev = cur;
  }
  const double x_last = static_cast<double>(n) * bandwidth;
  double beyond = 0.0;
  switch (mode) {
    case DiscretizationMode::rounded: beyond = dist.tail(x_last + 0.5 * bandwidth); break;
    case DiscretizationMode::lower: beyond = 1.0 - dist.cdf_left(x_last + bandwidth); break;
    case DiscretizationMode::upper: beyond = dist.tail(x_last); break;
  }
  lat.truncated_mass = beyond;
  // absorb rounding so that the identity holds to machine precision
  const double defect = 1.0 - lat.total_mass() - beyond;
  if (std::abs(defect) > 1e-12) {
    throw std::logic_error("discretize: mass conservation violated");
  }
  lat.masses[n] = std::max(0.0, lat.masses[n] + defect);

  if (max_truncated_mass && lat.truncated_mass > *max_truncated_mass) {
    throw std::invalid_argument("discretize: truncation leaves tail mass above tolerance");
  }
  return lat;
}

LatticeDistribution lattice_from_masses(double bandwidth, std::vector<double> masses) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("lattice: bandwidth must be positive");
  if (masses.empty()) throw std::invalid_argument("lattice: no masses");
  for (double m : masses) {
    if (!(m >= 0.0)) throw std::invalid_argument("lattice: masses must be non-negative");
  }
  LatticeDistribution lat;
  lat.bandwidth = bandwidth;
  lat.masses = std::move(masses);
  lat.truncation_point = lat.point(lat.masses.size() - 1);
  const double total = lat.total_mass();
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("lattice: masses must sum to 1");
  }
  lat.truncated_mass = 0.0;
  return lat;
}

}  // namespace geobound
