#include "geobound/compound.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace geobound {

namespace {

// Neumaier-compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

std::size_t lattice_index(double x, double bandwidth) {
  return static_cast<std::size_t>(std::floor(x / bandwidth + 1e-9));
}

}  // namespace

// ---------------------------------------------------------------- Panjer

std::vector<double> panjer_masses(const LatticeDistribution& lattice, const GeometricParams& geo,
                                  std::size_t count) {
  const auto& f = lattice.masses;
  if (f.empty()) throw std::invalid_argument("panjer: empty lattice");
  const double q = geo.q();
  const double denom = 1.0 - q * f[0];
  if (!(denom > 0.0)) throw std::domain_error("panjer: q*f0 = 1, recursion undefined");
  const double scale = q / denom;

  std::vector<double> w(count, 0.0);
  if (count == 0) return w;
  w[0] = geo.p / denom;
  // w_n = scale * sum_{j=1..n} f_j w_{n-j}. The convolution runs in blocks
  // of 64 plain products, with compensation across blocks.
  constexpr std::size_t kBlock = 64;
  for (std::size_t n = 1; n < count; ++n) {
    const std::size_t jmax = std::min(n, f.size() - 1);
    CompensatedSum acc;
    std::size_t j = 1;
    while (j <= jmax) {
      const std::size_t end = std::min(jmax + 1, j + kBlock);
      double partial = 0.0;
      for (; j < end; ++j) partial += f[j] * w[n - j];
      acc.add(partial);
    }
    w[n] = scale * acc.value();
  }
  return w;
}

std::vector<TailEstimate> panjer_tail(const LatticeDistribution& lattice,
                                      const GeometricParams& geo, double xmax) {
  if (!(xmax >= 0.0)) throw std::invalid_argument("panjer_tail: xmax must be >= 0");
  if (lattice.truncation_point + 1e-9 * lattice.bandwidth < xmax) {
    throw std::invalid_argument("panjer_tail: lattice truncated below xmax");
  }
  const std::size_t n = lattice_index(xmax, lattice.bandwidth) + 1;
  const auto w = panjer_masses(lattice, geo, n);

  std::vector<TailEstimate> out(n);
  CompensatedSum cdf;
  double running = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!(w[j] >= 0.0)) throw EngineError("panjer: negative compound mass");
    cdf.add(w[j]);
    const double c = cdf.value();
    if (c > 1.0 + 1e-9) throw EngineError("panjer: mass conservation violated");
    const double tail_w = std::max(0.0, 1.0 - c);
    running = std::min(running, tail_w / geo.q());
    out[j] = TailEstimate{lattice.point(j), std::min(1.0, running), 0.0, Engine::panjer};
  }
  return out;
}

// ---------------------------------------------------------------- Monte Carlo

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// 53 random bits centred in their cell: strictly inside (0,1).
double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

void simulate_block(const Distribution& dist, double log_q, std::uint64_t seed,
                    std::uint64_t block_index, std::uint64_t count,
                    const std::vector<double>& xgrid, std::vector<std::uint64_t>& hist) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(block_index)));
  for (std::uint64_t i = 0; i < count; ++i) {
    const double u = open_uniform(rng);
    const auto nu = std::max<long>(1, static_cast<long>(std::ceil(std::log(u) / log_q)));
    double s = 0.0;
    for (long k = 0; k < nu; ++k) s += dist.sample(open_uniform(rng));
    // bin k counts sums exceeding exactly the first k grid points
    const auto k = std::lower_bound(xgrid.begin(), xgrid.end(), s) - xgrid.begin();
    ++hist[static_cast<std::size_t>(k)];
  }
}

}  // namespace

std::vector<TailEstimate> mc_tail(const Distribution& dist, const GeometricParams& geo,
                                  const std::vector<double>& xgrid, const McOptions& options) {
  if (options.samples < 1) throw std::invalid_argument("mc_tail: need at least one sample");
  if (options.block < 1) throw std::invalid_argument("mc_tail: block size must be >= 1");
  if (!std::is_sorted(xgrid.begin(), xgrid.end())) {
    throw std::invalid_argument("mc_tail: grid must be sorted");
  }
  const double log_q = std::log(geo.q());
  const std::uint64_t blocks = (options.samples + options.block - 1) / options.block;
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = static_cast<unsigned>(std::clamp<std::uint64_t>(threads ? threads : 1, 1, blocks));

  std::vector<std::vector<std::uint64_t>> hists(threads,
                                                std::vector<std::uint64_t>(xgrid.size() + 1, 0));
  auto worker = [&](unsigned t) {
    for (std::uint64_t b = t; b < blocks; b += threads) {
      const std::uint64_t first = b * options.block;
      const std::uint64_t count = std::min(options.block, options.samples - first);
      simulate_block(dist, log_q, options.seed, b, count, xgrid, hists[t]);
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  }

  std::vector<std::uint64_t> hist(xgrid.size() + 1, 0);
  for (const auto& h : hists) {
    for (std::size_t i = 0; i < hist.size(); ++i) hist[i] += h[i];
  }
  const double n = static_cast<double>(options.samples);
  std::vector<TailEstimate> out(xgrid.size());
  std::uint64_t above = options.samples - hist[0];  // sums > xgrid[0]
  for (std::size_t i = 0; i < xgrid.size(); ++i) {
    if (i > 0) above -= hist[i];
    const double phat = static_cast<double>(above) / n;
    out[i] = TailEstimate{xgrid[i], phat, std::sqrt(phat * (1.0 - phat) / n), Engine::mc};
  }
  return out;
}

// ---------------------------------------------------------------- brute force

BruteForceResult brute_force_tail(const LatticeDistribution& lattice, const GeometricParams& geo,
                                  int term_cap, double xmax, double tolerance) {
  if (term_cap < 1) throw std::invalid_argument("brute_force_tail: term cap must be >= 1");
  if (lattice.truncation_point + 1e-9 * lattice.bandwidth < xmax) {
    throw std::invalid_argument("brute_force_tail: lattice truncated below xmax");
  }
  const std::size_t n = lattice_index(xmax, lattice.bandwidth) + 1;
  std::vector<double> f(n, 0.0);
  std::copy_n(lattice.masses.begin(), std::min(n, lattice.masses.size()), f.begin());

  std::vector<CompensatedSum> tail(n);
  std::vector<double> conv = f;  // k-fold convolution restricted to [0, xmax]
  double weight = geo.p;
  for (int k = 1; k <= term_cap; ++k) {
    CompensatedSum cdf;
    for (std::size_t j = 0; j < n; ++j) {
      cdf.add(conv[j]);
      tail[j].add(weight * std::max(0.0, 1.0 - cdf.value()));
    }
    if (k == term_cap) break;
    std::vector<double> next(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      CompensatedSum s;
      for (std::size_t i = 0; i <= j; ++i) s.add(conv[i] * f[j - i]);
      next[j] = s.value();
    }
    conv = std::move(next);
    weight *= geo.q();
  }

  BruteForceResult r;
  r.residual = std::pow(geo.q(), term_cap);
  r.residual_exceeds_tolerance = r.residual > tolerance;
  r.tails.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    r.tails[j] = TailEstimate{lattice.point(j), tail[j].value(), r.residual, Engine::brute};
  }
  return r;
}

// ---------------------------------------------------------------- Δ

DeltaTable delta_from_tails(const std::vector<TailEstimate>& tails, const Distribution& dist,
                            const GeometricParams& geo) {
  DeltaTable t;
  t.engine = tails.empty() ? Engine::panjer : tails.front().engine;
  t.grid.reserve(tails.size());
  t.delta.reserve(tails.size());
  t.delta_stderr.reserve(tails.size());
  for (const auto& e : tails) {
    const double fbar = dist.tail(e.x);
    if (!(fbar > 0.0)) throw std::domain_error("delta_from_tails: F̄(x) = 0");
    t.grid.push_back(e.x);
    t.delta.push_back(geo.p * e.tail / fbar - 1.0);
    t.delta_stderr.push_back(geo.p * e.stderr_ / fbar);
  }
  return t;
}

DeltaTable panjer_delta_table(const Distribution& dist, const GeometricParams& geo,
                              double bandwidth, double xmax) {
  const double steps = std::ceil(2.0 * xmax / bandwidth - 1e-9);
  const auto lattice = discretize(dist, bandwidth, steps * bandwidth);
  auto table = delta_from_tails(panjer_tail(lattice, geo, xmax), dist, geo);
  table.bandwidth = bandwidth;
  return table;
}

}  // namespace geobound
