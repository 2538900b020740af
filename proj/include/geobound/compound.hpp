#pragma once

// Engines for the geometric-sum tail P(S_nu > x) and its relative error
// against the one-big-jump asymptote E(nu) F̄(x).

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "geobound/dist.hpp"
#include "geobound/lattice.hpp"
#include "geobound/tables.hpp"

namespace geobound {

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Compound masses of W = X_1 + ... + X_N with P(N = k) = p q^k, k >= 0, at
/// lattice points 0..count-1.
std::vector<double> panjer_masses(const LatticeDistribution& lattice, const GeometricParams& geo,
                                  std::size_t count);

/// P(S_nu > x) at every lattice point x in [0, xmax], via P(S_nu > x) = P(W > x)/q.
std::vector<TailEstimate> panjer_tail(const LatticeDistribution& lattice,
                                      const GeometricParams& geo, double xmax);

struct McOptions {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;           // 0: hardware concurrency
  std::uint64_t block = 1u << 16;  // samples per independently seeded stream
};

/// Naive simulation of n geometric sums; exceedance frequencies at each grid
/// point with binomial standard errors. Results depend only on (seed, block,
/// samples), never on the thread count.
std::vector<TailEstimate> mc_tail(const Distribution& dist, const GeometricParams& geo,
                                  const std::vector<double>& xgrid, const McOptions& options);

struct BruteForceResult {
  std::vector<TailEstimate> tails;  // stderr_ carries the residual bound
  double residual = 0.0;            // q^term_cap
  bool residual_exceeds_tolerance = false;
};

/// Sum over k <= term_cap of p q^(k-1) P(X_1+...+X_k > x) by repeated lattice
/// convolution. The omitted terms contribute at most q^term_cap.
BruteForceResult brute_force_tail(const LatticeDistribution& lattice, const GeometricParams& geo,
                                  int term_cap, double xmax, double tolerance = 1e-10);

/// Δ(x) = p P(S_nu > x) / F̄(x) - 1 with the standard error carried along.
DeltaTable delta_from_tails(const std::vector<TailEstimate>& tails, const Distribution& dist,
                            const GeometricParams& geo);

/// Convenience: discretize, run Panjer to xmax and convert to Δ.
/// The lattice is truncated at 2*xmax.
DeltaTable panjer_delta_table(const Distribution& dist, const GeometricParams& geo,
                              double bandwidth, double xmax);

}  // namespace geobound
