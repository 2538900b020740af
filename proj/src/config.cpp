#include "geobound/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace geobound {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_plain(const std::string& t, const std::string& whole) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + whole + "'");
  }
  if (used != t.size()) throw ConfigError("not a number: '" + whole + "'");
  return v;
}

// Consumes keys from the raw map, so leftovers can be reported as unknown.
class Reader {
 public:
  explicit Reader(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  std::optional<std::string> text(const std::string& key) {
    used_.insert(key);
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    return it->second;
  }
  std::string required(const std::string& key) {
    auto v = text(key);
    if (!v) throw ConfigError("missing required key '" + key + "'");
    return *v;
  }
  std::optional<double> number(const std::string& key) {
    auto v = text(key);
    if (!v) return std::nullopt;
    try {
      return parse_number(*v);
    } catch (const ConfigError& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
  double number(const std::string& key, double fallback) { return number(key).value_or(fallback); }
  double required_number(const std::string& key) {
    auto v = number(key);
    if (!v) throw ConfigError("missing required key '" + key + "'");
    return *v;
  }
  std::vector<double> list(const std::string& key) {
    std::vector<double> out;
    auto v = text(key);
    if (!v || trim(*v).empty()) return out;
    for (const auto& item : split(*v, ',')) out.push_back(parse_number(item));
    return out;
  }
  // "a:b, c:d"
  std::vector<std::pair<double, double>> pairs(const std::string& key) {
    std::vector<std::pair<double, double>> out;
    for (const auto& item : split(required(key), ',')) {
      const auto parts = split(item, ':');
      if (parts.size() != 2) throw ConfigError(key + ": expected value:value pairs");
      out.emplace_back(parse_number(parts[0]), parse_number(parts[1]));
    }
    return out;
  }
  void reject_unknown() const {
    for (const auto& [k, v] : kv_) {
      if (!used_.count(k)) throw ConfigError("unknown key '" + k + "'");
    }
  }

 private:
  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

Distribution read_distribution(Reader& r) {
  const std::string family = r.required("family");
  if (family == "pareto") return ParetoDist(r.required_number("alpha"));
  if (family == "weibull") return WeibullDist(r.required_number("beta"));
  if (family == "mixture") {
    std::vector<PowerTerm> terms;
    for (auto [c, a] : r.pairs("terms")) terms.push_back(PowerTerm{c, a});
    return PowerMixtureDist(std::move(terms));
  }
  if (family == "overshoot") {
    return build_overshoot_upper(r.required_number("overshoot.c1"),
                                 r.required_number("overshoot.c2"),
                                 r.required_number("overshoot.base"));
  }
  if (family == "discrete") {
    std::vector<Atom> atoms;
    for (auto [v, p] : r.pairs("atoms")) atoms.push_back(Atom{v, p});
    return DiscreteDist(std::move(atoms));
  }
  throw ConfigError("unknown family '" + family + "'");
}

CutoffFunction read_cutoff(Reader& r) {
  const std::string form = r.text("h.family").value_or("power");
  const double scale = r.number("h.scale", 1.0);
  if (form == "power") return CutoffFunction::power(r.required_number("h.gamma"), scale);
  if (form == "logpower") return CutoffFunction::logpower(r.required_number("h.kappa"), scale);
  throw ConfigError("unknown h.family '" + form + "'");
}

GSpec::Shape read_shape(const std::string& s, const std::string& key) {
  if (s == "power") return GSpec::Shape::power;
  if (s == "kkernel") return GSpec::Shape::kkernel;
  throw ConfigError(key + ": expected power or kkernel, got '" + s + "'");
}

GSpec read_g(Reader& r) {
  GSpec g;
  const std::string variant = r.text("g.variant").value_or("power");
  if (variant == "spliced") {
    g.shape = read_shape(r.text("g.tail").value_or("power"), "g.tail");
    g.bstar = r.required_number("g.bstar");
  } else {
    g.shape = read_shape(variant, "g.variant");
  }
  if (g.shape == GSpec::Shape::power) {
    g.exponent = r.required_number("g.exponent");
    g.coef = r.number("g.coef", 1.0);
  }
  return g;
}

}  // namespace

double parse_number(const std::string& text) {
  const std::string t = trim(text);
  const auto slash = t.find('/');
  if (slash == std::string::npos) return parse_plain(t, t);
  const double num = parse_plain(trim(t.substr(0, slash)), t);
  const double den = parse_plain(trim(t.substr(slash + 1)), t);
  if (den == 0.0) throw ConfigError("zero denominator: '" + t + "'");
  return num / den;
}

RunConfig parse_config(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string t = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (kv.count(key)) throw ConfigError("duplicate key '" + key + "'");
    kv[key] = trim(t.substr(eq + 1));
  }

  RunConfig rc;
  rc.raw = kv;
  Reader r(std::move(kv));
  auto& b = rc.bound;
  try {
    b.dist = read_distribution(r);
    const double p = r.required_number("p");
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("p must lie in (0,1)");
    b.geo = GeometricParams(p);
    b.engine = parse_engine(r.text("engine").value_or("panjer"));
    b.bandwidth = r.number("bandwidth", 0.005);
    b.mc.samples = static_cast<std::uint64_t>(r.number("mc.samples", 1e6));
    b.mc.seed = static_cast<std::uint64_t>(r.number("seed", 1.0));
    b.mc.threads = static_cast<unsigned>(r.number("mc.threads", 0.0));
    b.mc_step = r.number("mc.step", 0.05);
    b.B = r.number("B", 100.0);
    b.h = read_cutoff(r);
    b.g = read_g(r);
    b.sup.policy = parse_tail_policy(r.text("sup.tail").value_or("envelope"));
    b.sup.x_far = r.number("sup.x_far", b.sup.x_far);
    b.sup.ratio = r.number("sup.ratio", b.sup.ratio);
    b.min_b_cap = r.number("min_b_cap", b.min_b_cap);
    rc.tune_s = r.list("tune.s");
    rc.tune_bstar = r.list("tune.bstar");
    rc.grid.lo = r.number("grid.lo");
    rc.grid.hi = r.number("grid.hi");
    rc.grid.step = r.number("grid.step");
    rc.grid.ratio = r.number("grid.ratio");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  r.reject_unknown();

  if (b.engine != Engine::mc && !(b.bandwidth > 0.0)) throw ConfigError("bandwidth must be > 0");
  if (b.engine == Engine::mc && b.mc.samples < 1) throw ConfigError("mc.samples must be >= 1");
  if (!(b.B > 0.0)) throw ConfigError("B must be positive");
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::vector<double> make_grid(const GridSpec& spec, double lo, double hi, double step) {
  lo = spec.lo.value_or(lo);
  hi = spec.hi.value_or(hi);
  std::vector<double> g;
  if (!(hi >= lo)) return g;
  if (spec.ratio) {
    if (!(lo > 0.0 && *spec.ratio > 1.0)) throw ConfigError("geometric grid needs lo > 0, ratio > 1");
    return geometric_grid(lo, hi, *spec.ratio);
  }
  step = spec.step.value_or(step);
  if (!(step > 0.0)) throw ConfigError("grid.step must be positive");
  for (long i = 0;; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    if (x > hi * (1.0 + 1e-12) + 1e-12) break;
    g.push_back(x);
  }
  return g;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_tail_csv(std::ostream& os, const std::vector<TailEstimate>& tails, double bandwidth) {
  os << "x,tail,stderr,engine,bandwidth\n";
  for (const auto& t : tails) {
    os << csv_number(t.x) << ',' << csv_number(t.tail) << ',' << csv_number(t.stderr_) << ','
       << engine_name(t.engine) << ',' << csv_number(bandwidth) << '\n';
  }
}

void write_delta_csv(std::ostream& os, const DeltaTable& table) {
  os << "x,delta,delta_stderr\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    os << csv_number(table.grid[i]) << ',' << csv_number(table.delta[i]) << ','
       << csv_number(table.delta_stderr[i]) << '\n';
  }
}

}  // namespace geobound
