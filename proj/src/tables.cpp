#include "geobound/tables.hpp"

#include <cmath>
#include <stdexcept>

namespace geobound {

std::string_view engine_name(Engine e) {
  switch (e) {
    case Engine::panjer: return "panjer";
    case Engine::mc: return "mc";
    case Engine::brute: return "brute";
  }
  return "unknown";
}

Engine parse_engine(std::string_view name) {
  if (name == "panjer") return Engine::panjer;
  if (name == "mc") return Engine::mc;
  if (name == "brute") return Engine::brute;
  throw std::invalid_argument("unknown engine '" + std::string(name) + "'");
}

void DeltaTable::validate() const {
  if (delta.size() != grid.size() || delta_stderr.size() != grid.size()) {
    throw std::invalid_argument("DeltaTable: column sizes differ");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || !std::isfinite(delta[i])) {
      throw std::invalid_argument("DeltaTable: non-finite entry");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("DeltaTable: grid not strictly increasing");
    }
    if (!(delta[i] >= -1.0)) throw std::invalid_argument("DeltaTable: Δ below -1");
  }
}

}  // namespace geobound
