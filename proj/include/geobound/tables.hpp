#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace geobound {

enum class Engine { panjer, mc, brute };

std::string_view engine_name(Engine e);
Engine parse_engine(std::string_view name);

/// One estimate of P(S_nu > x).
struct TailEstimate {
  double x = 0.0;
  double tail = 0.0;
  double stderr_ = 0.0;  // 0 for deterministic engines; brute stores its residual bound
  Engine engine = Engine::panjer;
};

/// Relative error Δ(x) = p P(S_nu > x) / F̄(x) - 1 on an increasing grid.
struct DeltaTable {
  std::vector<double> grid;
  std::vector<double> delta;
  std::vector<double> delta_stderr;
  Engine engine = Engine::panjer;
  double bandwidth = 0.0;  // lattice spacing for panjer, 0 otherwise

  std::size_t size() const { return grid.size(); }
  bool empty() const { return grid.empty(); }
  double front() const { return grid.front(); }
  double back() const { return grid.back(); }

  /// Throws unless the grid is strictly increasing, sizes agree and Δ > -1.
  void validate() const;
};

}  // namespace geobound
