#pragma once

#include <optional>
#include <vector>

#include "geobound/dist.hpp"

namespace geobound {

/// Arithmetic law on the points j * bandwidth, j = 0..masses.size()-1.
/// Mass beyond the truncation point is kept in truncated_mass.
struct LatticeDistribution {
  double bandwidth = 0.0;
  std::vector<double> masses;
  double truncation_point = 0.0;
  double truncated_mass = 0.0;

  double point(std::size_t j) const { return static_cast<double>(j) * bandwidth; }
  double total_mass() const;
};

enum class DiscretizationMode { lower, upper, rounded };

/// Builds a lattice law on [0, truncation]:
///  - rounded: point j gets P((j-1/2)δ < X <= (j+1/2)δ)
///  - lower:   point j gets P(jδ <= X < (j+1)δ)   (stochastically smaller)
///  - upper:   point j gets P((j-1)δ < X <= jδ)   (stochastically larger)
/// If max_truncated_mass is set, a truncation leaving more mass than that is
/// rejected.
LatticeDistribution discretize(const Distribution& dist, double bandwidth, double truncation,
                               DiscretizationMode mode = DiscretizationMode::rounded,
                               std::optional<double> max_truncated_mass = std::nullopt);

/// Lattice law from explicit masses (no truncation).
LatticeDistribution lattice_from_masses(double bandwidth, std::vector<double> masses);

}  // namespace geobound
