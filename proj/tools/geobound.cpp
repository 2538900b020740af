// Command-line driver: tails, Δ tables, kernels, bounds, tuning, plot data.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "geobound/bounder.hpp"
#include "geobound/config.hpp"

using namespace geobound;

namespace {

enum ExitCode { kOk = 0, kProcedureFailed = 2, kBadConfig = 3, kEngineError = 4 };

struct Options {
  std::string config;
  std::string out;
  std::string certificate;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> engine;
};

RunConfig load(const Options& o) {
  RunConfig rc = load_config(o.config);
  if (o.seed) {
    rc.bound.mc.seed = *o.seed;
    rc.raw["seed"] = std::to_string(*o.seed);
  }
  if (o.engine) {
    rc.bound.engine = parse_engine(*o.engine);
    rc.raw["engine"] = *o.engine;
  }
  return rc;
}

// Writes to --out when given, otherwise to stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

bool has_grid(const GridSpec& g) { return g.lo || g.hi || g.step || g.ratio; }

std::size_t find_point(const std::vector<double>& xs, double x) {
  const auto it = std::lower_bound(xs.begin(), xs.end(), x - 1e-9 * std::max(1.0, x));
  if (it == xs.end() || std::abs(*it - x) > 1e-9 * std::max(1.0, x)) {
    throw ConfigError("grid point " + csv_number(x) + " is not on the lattice");
  }
  return static_cast<std::size_t>(it - xs.begin());
}

template <class T>
std::vector<T> pick(const std::vector<T>& rows, const std::vector<double>& xs,
                    const std::vector<double>& grid) {
  std::vector<T> out;
  out.reserve(grid.size());
  for (double x : grid) out.push_back(rows[find_point(xs, x)]);
  return out;
}

DeltaTable pick_table(const DeltaTable& t, const std::vector<double>& grid) {
  DeltaTable out = t;
  out.grid.clear();
  out.delta.clear();
  out.delta_stderr.clear();
  for (double x : grid) {
    const auto i = find_point(t.grid, x);
    out.grid.push_back(t.grid[i]);
    out.delta.push_back(t.delta[i]);
    out.delta_stderr.push_back(t.delta_stderr[i]);
  }
  return out;
}

int cmd_tail(const Options& o) {
  const RunConfig rc = load(o);
  const auto& b = rc.bound;
  const double hi = rc.grid.hi.value_or(b.B);
  std::vector<TailEstimate> tails;
  double bw = 0.0;
  if (b.engine == Engine::mc) {
    tails = mc_tail(b.dist, b.geo, make_grid(rc.grid, b.mc_step, hi, b.mc_step), b.mc);
  } else {
    bw = b.bandwidth;
    const double steps = std::ceil(2.0 * hi / bw - 1e-9);
    const auto lattice = discretize(b.dist, bw, steps * bw);
    if (b.engine == Engine::panjer) {
      tails = panjer_tail(lattice, b.geo, hi);
    } else {
      const int cap = static_cast<int>(std::ceil(std::log(1e-12) / std::log(b.geo.q())));
      tails = brute_force_tail(lattice, b.geo, cap, hi).tails;
    }
    if (has_grid(rc.grid)) {
      std::vector<double> xs;
      for (const auto& t : tails) xs.push_back(t.x);
      tails = pick(tails, xs, make_grid(rc.grid, 0.0, hi, bw));
    }
  }
  Sink sink(o.out);
  write_tail_csv(sink.stream(), tails, bw);
  return kOk;
}

int cmd_delta(const Options& o) {
  const RunConfig rc = load(o);
  const double hi = rc.grid.hi.value_or(rc.bound.B);
  DeltaTable t = compute_delta_table(rc.bound, hi);
  if (has_grid(rc.grid) && rc.bound.engine != Engine::mc) {
    t = pick_table(t, make_grid(rc.grid, 0.0, hi, rc.bound.bandwidth));
  }
  Sink sink(o.out);
  write_delta_csv(sink.stream(), t);
  return kOk;
}

int cmd_kernels(const Options& o) {
  RunConfig rc = load(o);
  auto& b = rc.bound;
  GridSpec spec = rc.grid;
  if (!spec.step && !spec.ratio) spec.ratio = 1.1;
  const auto grid = make_grid(spec, std::max(2.0, b.h.x0()), 1e4, 1.0);
  DeltaTable table;
  if (b.g.bstar) table = compute_delta_table(b, b.B);
  const BoundProblem pr{b.dist, b.geo, b.h, build_g(b, table)};

  Sink sink(o.out);
  auto& os = sink.stream();
  os << "x,h,K,J,K_envelope,J_envelope,g,f1,f2,f3\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double x : grid) {
    const double h = b.h(x);
    double K = nan, J = nan, Ke = nan, Je = nan, g = nan;
    FTerms f{x, nan, nan, nan, nan, nan};
    if (h > 0.0 && h <= 0.5 * x) {
      K = k_kernel(b.dist, x, h);
      J = j_kernel(b.dist, x, h);
      try {
        Ke = k_envelope(b.dist, x, h);
        Je = j_envelope(b.dist, x, h);
      } catch (const std::domain_error&) {
      }
      try {
        g = pr.g(x);
        f = f_terms(pr, x);
      } catch (const std::domain_error&) {
      }
    }
    os << csv_number(x) << ',' << csv_number(h) << ',' << csv_number(K) << ',' << csv_number(J)
       << ',' << csv_number(Ke) << ',' << csv_number(Je) << ',' << csv_number(g) << ','
       << csv_number(f.f1) << ',' << csv_number(f.f2) << ',' << csv_number(f.f3) << '\n';
  }
  return kOk;
}

void print_report(std::ostream& os, const BoundCertificate& c) {
  os << bound_text(c) << '\n';
  os << "delta(b) = " << csv_number(c.delta_b) << ", phi = " << csv_number(c.phi)
     << ", C[h(b),b] = " << csv_number(c.c_hb_b) << ", C = " << csv_number(c.C) << '\n';
  os << "tail certified: " << (c.tail_certified ? "yes" : "no") << '\n';
  for (const auto& n : c.notes) os << "note: " << n << '\n';
}

int cmd_bound(const Options& o) {
  const RunConfig rc = load(o);
  const auto cert = build_bound(rc.bound);
  print_report(std::cout, cert);
  if (!o.out.empty()) {
    Sink sink(o.out);
    write_certificate(sink.stream(), cert, rc.raw);
  }
  return kOk;
}

int cmd_tune(const Options& o) {
  const RunConfig rc = load(o);
  std::vector<double> s = rc.tune_s;
  if (s.empty()) s.push_back(rc.bound.h.scale());
  const auto result = tune(rc.bound, s, rc.tune_bstar);
  Sink sink(o.out);
  auto& os = sink.stream();
  os << "s,bstar,feasible,C,kappa,coefficient,reason\n";
  for (const auto& r : result.rows) {
    os << csv_number(r.s) << ',' << (r.bstar ? csv_number(*r.bstar) : "") << ','
       << (r.feasible ? "true" : "false") << ',' << (r.feasible ? csv_number(r.C) : "") << ','
       << (r.feasible ? csv_number(r.kappa) : "") << ','
       << (r.feasible ? csv_number(r.coefficient) : "") << ",\"" << r.reason << "\"\n";
  }
  std::cout << "best: s = " << csv_number(result.best.s)
            << (result.best.bstar ? ", b* = " + csv_number(*result.best.bstar) : std::string())
            << ", coefficient = " << csv_number(result.best.coefficient) << '\n';
  return kOk;
}

int cmd_plot_data(const Options& o) {
  const RunConfig rc = load(o);
  const auto& b = rc.bound;
  const DeltaTable table = compute_delta_table(b, b.B);
  double C = 0.0;
  TestFunction g = build_g(b, table);
  if (!o.certificate.empty()) {
    std::ifstream in(o.certificate);
    if (!in) throw ConfigError("cannot open certificate '" + o.certificate + "'");
    const auto kv = read_certificate(in);
    const auto it = kv.find("C");
    if (it == kv.end()) throw ConfigError("certificate has no C entry");
    C = parse_number(it->second);
  } else {
    const auto cert = build_bound(b, table);
    C = cert.C;
    g = cert.g_fn;
  }
  const double lo = rc.grid.lo.value_or(b.h(b.B));
  const double hi = rc.grid.hi.value_or(10.0 * b.B);

  Sink sink(o.out);
  auto& os = sink.stream();
  os << "x,log10_delta_exact,log10_delta_upper\n";
  if (!(hi >= lo)) return kOk;
  auto log10_or_nan = [](double v) {
    return v > 0.0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN();
  };
  auto upper = [&](double x) {
    try {
      return log10_or_nan(C * g(x));
    } catch (const std::domain_error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double x = table.grid[i];
    if (x < lo - 1e-12 || x > hi + 1e-12) continue;
    os << csv_number(x) << ',' << csv_number(log10_or_nan(table.delta[i])) << ','
       << csv_number(upper(x)) << '\n';
  }
  if (hi > b.B) {
    const auto tail = geometric_grid(std::max(lo, b.B), hi, rc.grid.ratio.value_or(1.02));
    for (std::size_t i = 1; i < tail.size(); ++i) {
      os << csv_number(tail[i]) << ",," << csv_number(upper(tail[i])) << '\n';
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounds on the relative error of the geometric-sum tail asymptote"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;
  std::string engine;

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Sub subs[] = {
      {"tail", "P(S > x) on a grid as CSV", cmd_tail},
      {"delta", "relative error table as CSV", cmd_delta},
      {"kernels", "K, J, envelopes and f-terms on a grid as CSV", cmd_kernels},
      {"bound", "build the bound and write its certificate", cmd_bound},
      {"tune", "grid search over h scale and splice point", cmd_tune},
      {"plot-data", "exact and bounded log10 relative error as CSV", cmd_plot_data},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> apps;
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.help);
    sc->add_option("--config", opt.config, "configuration file")->required()->check(
        CLI::ExistingFile);
    sc->add_option("--out", opt.out, "output path (default stdout)");
    sc->add_option("--seed", seed, "override the Monte Carlo seed");
    sc->add_option("--engine", engine, "override the engine")
        ->check(CLI::IsMember({"panjer", "mc", "brute"}));
    if (std::string(s.name) == "plot-data") {
      sc->add_option("--certificate", opt.certificate, "certificate file from `bound`");
    }
    apps.emplace_back(sc, &s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadConfig;
  }

  for (const auto& [sc, s] : apps) {
    if (!sc->parsed()) continue;
    if (sc->count("--seed")) opt.seed = seed;
    if (sc->count("--engine")) opt.engine = engine;
    try {
      return s->run(opt);
    } catch (const ProcedureFailed& e) {
      std::cerr << "procedure failed: " << e.what() << '\n';
      return kProcedureFailed;
    } catch (const std::invalid_argument& e) {
      std::cerr << "invalid configuration: " << e.what() << '\n';
      return kBadConfig;
    } catch (const std::exception& e) {
      std::cerr << "engine error: " << e.what() << '\n';
      return kEngineError;
    }
  }
  return kBadConfig;
}
