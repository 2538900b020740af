#pragma once

// Flat `key = value` run configuration (one pair per line, `#` comments) and
// the CSV writers shared by the command-line tool.

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geobound/bounder.hpp"

namespace geobound {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GridSpec {
  std::optional<double> lo;
  std::optional<double> hi;
  std::optional<double> step;   // linear spacing
  std::optional<double> ratio;  // geometric spacing (takes precedence)
};

struct RunConfig {
  BoundConfig bound;
  std::vector<double> tune_s;
  std::vector<double> tune_bstar;
  GridSpec grid;
  std::map<std::string, std::string> raw;  // keys as read, for echoing
};

/// Parses a number, accepting simple fractions such as 1/3.
double parse_number(const std::string& text);

RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

/// Grid lo..hi from the grid.* keys, with defaults supplied by the caller.
std::vector<double> make_grid(const GridSpec& spec, double lo, double hi, double step);

// CSV writers; numbers printed with 12 significant digits.
std::string csv_number(double v);
void write_tail_csv(std::ostream& os, const std::vector<TailEstimate>& tails, double bandwidth);
void write_delta_csv(std::ostream& os, const DeltaTable& table);

}  // namespace geobound
