#include "geobound/bounder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace geobound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

struct Profile {
  std::vector<double> x;
  std::vector<double> s12;
  std::vector<double> f3;
};

// lo, then every ratio^k strictly inside (lo, hi), then hi.
std::vector<double> anchored_grid(double lo, double hi, double ratio) {
  std::vector<double> g{lo};
  if (!(hi > lo)) return g;
  const double lr = std::log(ratio);
  for (auto k = static_cast<long>(std::floor(std::log(lo) / lr)) + 1;; ++k) {
    const double x = std::exp(static_cast<double>(k) * lr);
    if (x >= hi * (1.0 - 1e-12)) break;
    if (x > lo * (1.0 + 1e-12)) g.push_back(x);
  }
  g.push_back(hi);
  return g;
}

template <class Eval>
Profile profile(const std::vector<double>& grid, Eval eval) {
  Profile p;
  p.x = grid;
  p.s12.reserve(grid.size());
  p.f3.reserve(grid.size());
  for (double x : grid) {
    const FTerms t = eval(x);
    p.s12.push_back(t.f1 + t.f2);
    p.f3.push_back(t.f3);
  }
  return p;
}

void take_grid_max(const std::vector<double>& x, const std::vector<double>& v, SupResult& r) {
  r.grid_max = -kInf;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > r.grid_max) {
      r.grid_max = v[i];
      r.argmax = x[i];
    }
  }
}

// Envelope values on [x_far, x_max]. A curve still growing over the last
// decade is treated as unbounded unless it stays non-positive.
void take_tail_bound(const std::vector<double>& x, const std::vector<double>& v, SupResult& r) {
  double vmax = -kInf;
  double at = x.front();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] <= vmax)) {
      vmax = v[i];
      at = x[i];
    }
  }
  const double last = v.back();
  const auto dec = std::lower_bound(x.begin(), x.end(), x.back() / 10.0) - x.begin();
  const double before = v[static_cast<std::size_t>(dec)];
  const bool growing = std::isnan(last) || last - before > 1e-6 * std::abs(before);
  if (growing && !(last <= 0.0)) {
    r.divergent = true;
    r.tail_bound = kInf;
    r.argmax = x.back();
    return;
  }
  r.tail_bound = growing ? std::max(vmax, 0.0) : vmax + 1e-6 * std::abs(last);
  if (r.tail_bound > r.grid_max) r.argmax = at;
}

}  // namespace

// ---------------------------------------------------------------- f-terms

namespace {

struct Pieces {
  double hx, gx, ghx, gxh, k, fbar_h;
};

Pieces common_pieces(const BoundProblem& pr, double x) {
  Pieces c{};
  c.hx = pr.h(x);
  if (!(c.hx > 0.0 && c.hx <= 0.5 * x)) {
    throw std::domain_error("f_terms: need 0 < h(x) <= x/2 at x = " + fmt(x));
  }
  c.gx = pr.g(x);
  if (!(c.gx > 0.0)) throw std::domain_error("f_terms: g(x) <= 0 at x = " + fmt(x));
  c.ghx = pr.g(c.hx);
  c.gxh = pr.g(x - c.hx);
  c.k = k_kernel(pr.dist, x, c.hx);
  c.fbar_h = pr.dist.tail(c.hx);
  return c;
}

}  // namespace

FTerms f_terms(const BoundProblem& pr, double x, double rel_tol) {
  const Pieces c = common_pieces(pr, x);
  const double q = pr.geo.q();
  const double p = pr.geo.p;
  FTerms t;
  t.x = x;
  t.k = c.k;
  t.j = j_kernel(pr.dist, x, c.hx, rel_tol);
  t.f1 = q * c.gxh * (c.k + 1.0) * (1.0 - c.fbar_h) / c.gx;
  t.f2 = q * c.ghx * t.j / c.gx;
  t.f3 = (q * (t.j - c.fbar_h) + (1.0 - p * p) * c.k - q * c.k * c.fbar_h) / c.gx;
  return t;
}

FTerms f_terms_envelope(const BoundProblem& pr, double x) {
  const Pieces c = common_pieces(pr, x);
  const double q = pr.geo.q();
  const double p = pr.geo.p;
  const double excess = j_excess_envelope(pr.dist, x, c.hx);
  FTerms t;
  t.x = x;
  t.k = c.k;
  t.j = c.fbar_h + excess;
  t.f1 = q * c.gxh * (c.k + 1.0) * (1.0 - c.fbar_h) / c.gx;
  t.f2 = q * c.ghx * t.j / c.gx;
  t.f3 = (q * excess + (1.0 - p * p) * c.k - q * c.k * c.fbar_h) / c.gx;
  return t;
}

std::string_view tail_policy_name(TailPolicy policy) {
  return policy == TailPolicy::envelope ? "envelope" : "horizon";
}

TailPolicy parse_tail_policy(std::string_view name) {
  if (name == "envelope") return TailPolicy::envelope;
  if (name == "horizon") return TailPolicy::horizon;
  throw std::invalid_argument("unknown tail policy '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- suprema

SupPair f_sups(const BoundProblem& pr, double from_x, const SupOptions& opt) {
  if (!(from_x > 0.0)) throw std::invalid_argument("f_sups: from_x must be positive");
  if (!(opt.ratio > 1.0)) throw std::invalid_argument("f_sups: grid ratio must exceed 1");
  if (!(opt.x_far > 0.0 && opt.x_max > opt.x_far)) {
    throw std::invalid_argument("f_sups: need 0 < x_far < x_max");
  }
  SupPair out;
  if (from_x < opt.x_far) {
    const auto near = profile(anchored_grid(from_x, opt.x_far, opt.ratio),
                              [&](double x) { return f_terms(pr, x, opt.rel_tol); });
    take_grid_max(near.x, near.s12, out.delta);
    take_grid_max(near.x, near.f3, out.phi);
  } else {
    out.delta.grid_max = out.phi.grid_max = -kInf;
  }

  if (opt.policy == TailPolicy::envelope) {
    const auto far = profile(anchored_grid(std::max(from_x, opt.x_far), opt.x_max, opt.ratio),
                             [&](double x) { return f_terms_envelope(pr, x); });
    take_tail_bound(far.x, far.s12, out.delta);
    take_tail_bound(far.x, far.f3, out.phi);
  }
  for (SupResult* r : {&out.delta, &out.phi}) {
    r->value = std::max(r->grid_max, r->tail_bound);
    r->certified = opt.policy == TailPolicy::envelope && !r->divergent;
  }
  return out;
}

SupResult delta_sup(const BoundProblem& pr, double from_x, const SupOptions& opt) {
  return f_sups(pr, from_x, opt).delta;
}

SupResult phi_sup(const BoundProblem& pr, double from_x, const SupOptions& opt) {
  return f_sups(pr, from_x, opt).phi;
}

std::optional<double> min_workable_b(const BoundProblem& pr, double from, double cap,
                                     const SupOptions& opt) {
  const double lo = std::ceil(from);
  const double hi = std::floor(cap);
  if (lo > hi) return std::nullopt;
  double running = delta_sup(pr, hi, opt).value;
  if (!(running < 1.0)) return std::nullopt;
  std::optional<double> best = hi;
  for (double n = hi - 1.0; n >= lo; n -= 1.0) {
    const FTerms t = f_terms(pr, n, opt.rel_tol);
    running = std::max(running, t.f1 + t.f2);
    if (!(running < 1.0)) break;
    best = n;
  }
  return best;
}

double c_interval(const DeltaTable& table, const TestFunction& g, double a, double b,
                  double stderr_mult) {
  if (!(a <= b)) throw std::invalid_argument("c_interval: need a <= b");
  const double tol = 1e-9 * std::max(1.0, std::abs(b));
  if (table.empty() || table.front() > a + tol || table.back() < b - tol) {
    throw std::invalid_argument("c_interval: table does not cover [" + fmt(a) + ", " + fmt(b) +
                                "]");
  }
  double c = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double x = table.grid[i];
    if (x < a - tol || x > b + tol) continue;
    ++n;
    const double se = table.delta_stderr.empty() ? 0.0 : table.delta_stderr[i];
    c = std::max(c, (table.delta[i] + stderr_mult * se) / g(x));
  }
  if (n == 0) throw std::invalid_argument("c_interval: no table points in [a,b]");
  return c;
}

double theorem1_constant(double delta_b, double phi, double c_hb_b) {
  if (!(delta_b < 1.0)) {
    throw ProcedureFailed("delta(b) = " + fmt(delta_b) + " >= 1", delta_b, std::nullopt);
  }
  if (!(delta_b >= 0.0)) throw std::invalid_argument("theorem1_constant: delta must be >= 0");
  if (!(phi >= 0.0)) throw std::invalid_argument("theorem1_constant: phi must be >= 0");
  if (!(c_hb_b >= 0.0)) throw std::invalid_argument("theorem1_constant: C[h(b),b] must be >= 0");
  return std::max(phi / (1.0 - delta_b), phi + delta_b * c_hb_b);
}

// ---------------------------------------------------------------- driver

DeltaTable compute_delta_table(const BoundConfig& cfg, double xmax) {
  switch (cfg.engine) {
    case Engine::panjer:
      return panjer_delta_table(cfg.dist, cfg.geo, cfg.bandwidth, xmax);
    case Engine::mc: {
      if (!(cfg.mc_step > 0.0)) throw std::invalid_argument("mc grid step must be positive");
      const double lo = std::max(cfg.mc_step, std::floor(cfg.h(cfg.B) / cfg.mc_step) * cfg.mc_step);
      std::vector<double> grid;
      for (long i = 0;; ++i) {
        const double x = lo + static_cast<double>(i) * cfg.mc_step;
        if (x > xmax * (1.0 + 1e-12)) break;
        grid.push_back(x);
      }
      return delta_from_tails(mc_tail(cfg.dist, cfg.geo, grid, cfg.mc), cfg.dist, cfg.geo);
    }
    case Engine::brute: {
      const double steps = std::ceil(2.0 * xmax / cfg.bandwidth - 1e-9);
      const auto lattice = discretize(cfg.dist, cfg.bandwidth, steps * cfg.bandwidth);
      const int cap = static_cast<int>(std::ceil(std::log(1e-12) / std::log(cfg.geo.q())));
      auto t = delta_from_tails(brute_force_tail(lattice, cfg.geo, cap, xmax).tails, cfg.dist,
                                cfg.geo);
      t.bandwidth = cfg.bandwidth;
      return t;
    }
  }
  throw std::invalid_argument("unknown engine");
}

TestFunction build_g(const BoundConfig& cfg, const DeltaTable& table) {
  AsymptoticTestFunction shape;
  if (cfg.g.shape == GSpec::Shape::power) {
    if (!(cfg.g.coef > 0.0)) throw std::invalid_argument("g: coefficient must be positive");
    shape = PowerTestFunction{cfg.g.coef, cfg.g.exponent};
  } else {
    shape = KKernelTestFunction{cfg.dist, cfg.h};
  }
  if (cfg.g.bstar) return build_spliced_g(table, *cfg.g.bstar, shape);
  return TestFunction(shape);
}

BoundCertificate build_bound(const BoundConfig& cfg, const DeltaTable& table) {
  const double b = cfg.B;
  if (!(cfg.h(b) <= 0.5 * b)) throw std::invalid_argument("h(B) exceeds B/2");
  BoundProblem pr{cfg.dist, cfg.geo, cfg.h, build_g(cfg, table)};

  const SupPair sups = f_sups(pr, b, cfg.sup);
  const double delta = sups.delta.value;
  if (!(delta < 1.0)) {
    const auto mb = min_workable_b(pr, b, cfg.min_b_cap, cfg.sup);
    std::string msg = sups.delta.divergent
                          ? "sup of f1+f2 beyond b = " + fmt(b) + " is unbounded"
                          : "delta(" + fmt(b) + ") = " + fmt(delta, 6) + " >= 1";
    msg += mb ? "; smallest workable b = " + fmt(*mb) : "; no workable b up to " + fmt(cfg.min_b_cap);
    throw ProcedureFailed(msg, delta, mb);
  }
  if (sups.phi.divergent) {
    throw ProcedureFailed("sup of f3 beyond b = " + fmt(b) + " is unbounded", delta, std::nullopt);
  }

  BoundCertificate cert;
  cert.p = cfg.geo.p;
  cert.dist = cfg.dist.describe();
  cert.h = cfg.h.describe();
  cert.g = pr.g.describe();
  cert.g_fn = pr.g;
  cert.B = cfg.B;
  cert.b = b;
  cert.valid_from = b;
  cert.delta_b = delta;
  cert.phi_raw = sups.phi.value;
  cert.phi = std::max(0.0, sups.phi.value);
  if (cert.phi_raw <= 0.0) cert.notes.push_back("sup of f3 is non-positive; phi set to 0");
  const double mult = cfg.engine == Engine::mc ? 2.0 : 0.0;
  cert.c_hb_b = c_interval(table, pr.g, cfg.h(b), b, mult);
  cert.C = theorem1_constant(cert.delta_b, cert.phi, cert.c_hb_b);
  cert.coefficient = cert.C * pr.g.tail_coefficient();
  cert.tail_certified = sups.delta.certified && sups.phi.certified;
  if (!cert.tail_certified) {
    cert.notes.push_back("suprema taken over [b, " + fmt(cfg.sup.x_far) + "] only");
  }
  if (mult > 0.0) cert.notes.push_back("C[h(b),b] uses Monte Carlo estimate + 2 stderr");
  return cert;
}

BoundCertificate build_bound(const BoundConfig& cfg) {
  return build_bound(cfg, compute_delta_table(cfg, cfg.B));
}

std::string bound_text(const BoundCertificate& cert) {
  std::string shape;
  const auto g = cert.g_fn.shape();
  if (const auto* pw = std::get_if<PowerTestFunction>(&g)) {
    shape = "x^-" + fmt(pw->exponent, 6);
  } else {
    shape = "K(x,h(x))";
  }
  return "Delta(x) <= " + fmt(cert.coefficient, 4) + " * " + shape + " for x > " +
         fmt(cert.valid_from, 6);
}

void write_certificate(std::ostream& os, const BoundCertificate& cert,
                       const std::map<std::string, std::string>& config_echo) {
  os << "# bound certificate\n";
  os << "bound = " << bound_text(cert) << '\n';
  os << "p = " << fmt(cert.p) << '\n';
  os << "dist = " << cert.dist << '\n';
  os << "h = " << cert.h << '\n';
  os << "g = " << cert.g << '\n';
  os << "B = " << fmt(cert.B) << '\n';
  os << "b = " << fmt(cert.b) << '\n';
  os << "delta_b = " << fmt(cert.delta_b) << '\n';
  os << "phi = " << fmt(cert.phi) << '\n';
  os << "phi_raw = " << fmt(cert.phi_raw) << '\n';
  os << "c_hb_b = " << fmt(cert.c_hb_b) << '\n';
  os << "C = " << fmt(cert.C) << '\n';
  os << "coefficient = " << fmt(cert.coefficient) << '\n';
  os << "valid_from = " << fmt(cert.valid_from) << '\n';
  os << "tail_certified = " << (cert.tail_certified ? "true" : "false") << '\n';
  for (std::size_t i = 0; i < cert.notes.size(); ++i) {
    os << "note." << i << " = " << cert.notes[i] << '\n';
  }
  for (const auto& [k, v] : config_echo) os << "config." << k << " = " << v << '\n';
}

std::map<std::string, std::string> read_certificate(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(is, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("certificate: malformed line: " + t);
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

VerifyReport verify_bound(const BoundCertificate& cert, const DeltaTable& table,
                          double stderr_mult) {
  VerifyReport r;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double x = table.grid[i];
    if (x < cert.b * (1.0 - 1e-12)) continue;
    ++r.checked;
    const double bound = cert.C * cert.g_fn(x);
    const double se = table.delta_stderr.empty() ? 0.0 : table.delta_stderr[i];
    r.max_ratio = std::max(r.max_ratio, table.delta[i] / bound);
    if (table.delta[i] > bound + stderr_mult * se) {
      r.violations.push_back(Violation{x, table.delta[i], bound});
    }
  }
  return r;
}

// ---------------------------------------------------------------- tuner

TuneResult tune(const BoundConfig& cfg, const DeltaTable& table, const std::vector<double>& s_grid,
                const std::vector<double>& bstar_grid) {
  if (s_grid.empty()) throw std::invalid_argument("tune: empty scale grid");
  std::vector<double> ss = s_grid;
  std::sort(ss.begin(), ss.end());
  std::vector<std::optional<double>> bs;
  if (bstar_grid.empty()) {
    bs.push_back(cfg.g.bstar);
  } else {
    std::vector<double> sorted = bstar_grid;
    std::sort(sorted.begin(), sorted.end());
    bs.assign(sorted.begin(), sorted.end());
  }

  TuneResult out;
  const TuneRow* best = nullptr;
  out.rows.reserve(ss.size() * bs.size());
  for (double s : ss) {
    for (const auto& bstar : bs) {
      BoundConfig c = cfg;
      c.h = cfg.h.with_scale(s);
      c.g.bstar = bstar;
      TuneRow row;
      row.s = s;
      row.bstar = bstar;
      try {
        const auto cert = build_bound(c, table);
        row.feasible = true;
        row.C = cert.C;
        row.kappa = cert.g_fn.tail_coefficient();
        row.coefficient = cert.coefficient;
      } catch (const ProcedureFailed& e) {
        row.reason = e.what();
      } catch (const std::invalid_argument& e) {
        row.reason = e.what();
      } catch (const std::domain_error& e) {
        row.reason = e.what();
      } catch (const QuadratureError& e) {
        row.reason = e.what();
      }
      out.rows.push_back(row);
    }
  }
  for (const auto& row : out.rows) {
    if (row.feasible && (!best || row.coefficient < best->coefficient)) best = &row;
  }
  if (!best) {
    throw ProcedureFailed("tune: no feasible candidate on the grid",
                          std::numeric_limits<double>::quiet_NaN(), std::nullopt);
  }
  out.best = *best;
  return out;
}

TuneResult tune(const BoundConfig& cfg, const std::vector<double>& s_grid,
                const std::vector<double>& bstar_grid) {
  if (s_grid.empty()) throw std::invalid_argument("tune: empty scale grid");
  BoundConfig lo = cfg;
  lo.h = cfg.h.with_scale(*std::min_element(s_grid.begin(), s_grid.end()));
  return tune(cfg, compute_delta_table(lo, cfg.B), s_grid, bstar_grid);
}

}  // namespace geobound
