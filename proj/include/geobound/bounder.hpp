#pragma once

// Bound construction: f-terms, their suprema beyond a threshold, the
// interval maxima C[a,b], and the resulting constant C with Δ(x) <= C g(x).

#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geobound/compound.hpp"
#include "geobound/dist.hpp"
#include "geobound/kernels.hpp"
#include "geobound/tables.hpp"
#include "geobound/test_function.hpp"

namespace geobound {

/// Raised when no threshold b with δ(b) < 1 is available at the requested
/// horizon. min_b is the smallest integer b (below the search cap) that would
/// work, when one exists.
class ProcedureFailed : public std::runtime_error {
 public:
  ProcedureFailed(const std::string& what, double delta, std::optional<double> min_b)
      : std::runtime_error(what), delta_(delta), min_b_(min_b) {}
  double delta() const { return delta_; }
  const std::optional<double>& min_b() const { return min_b_; }

 private:
  double delta_;
  std::optional<double> min_b_;
};

struct BoundProblem {
  Distribution dist;
  GeometricParams geo;
  CutoffFunction h;
  TestFunction g;
};

struct FTerms {
  double x = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;
  double j = 0.0;
  double k = 0.0;
};

/// f1, f2, f3 at x with J by quadrature.
FTerms f_terms(const BoundProblem& problem, double x, double rel_tol = 1e-10);

/// Upper bounds on f1, f2, f3 with J replaced by F̄(h) + j_excess_envelope.
/// Closed form, usable at any x.
FTerms f_terms_envelope(const BoundProblem& problem, double x);

enum class TailPolicy {
  envelope,  // bound the range beyond x_far by closed-form envelopes (certified)
  horizon,   // sup over [from_x, x_far] only (not certified)
};

std::string_view tail_policy_name(TailPolicy policy);
TailPolicy parse_tail_policy(std::string_view name);

struct SupOptions {
  double x_far = 1e8;
  double ratio = 1.02;
  double x_max = 1e300;
  TailPolicy policy = TailPolicy::envelope;
  double rel_tol = 1e-10;
};

struct SupResult {
  double value = 0.0;       // reported supremum (infinite when divergent)
  double grid_max = 0.0;    // max over the quadrature grid [from_x, x_far]
  double tail_bound = -std::numeric_limits<double>::infinity();  // envelope part
  double argmax = 0.0;
  bool certified = false;
  bool divergent = false;   // envelope still growing at x_max
};

struct SupPair {
  SupResult delta;  // sup of f1 + f2
  SupResult phi;    // sup of f3 (not clamped)
};

/// Both suprema from one evaluation profile. The grid is anchored at powers of
/// `ratio`, so thresholds share grid points.
SupPair f_sups(const BoundProblem& problem, double from_x, const SupOptions& options = {});
SupResult delta_sup(const BoundProblem& problem, double from_x, const SupOptions& options = {});
SupResult phi_sup(const BoundProblem& problem, double from_x, const SupOptions& options = {});

/// Smallest integer n in [from, cap] with sup_{y >= n}(f1 + f2) < 1.
std::optional<double> min_workable_b(const BoundProblem& problem, double from, double cap = 1e4,
                                     const SupOptions& options = {});

/// max over table points x in [a,b] of max(0, (Δ(x) + stderr_mult*se(x)) / g(x)).
double c_interval(const DeltaTable& table, const TestFunction& g, double a, double b,
                  double stderr_mult = 0.0);

/// max(phi/(1-delta), phi + delta*c_hb_b).
double theorem1_constant(double delta_b, double phi, double c_hb_b);

// ---------------------------------------------------------------- driver

struct GSpec {
  enum class Shape { power, kkernel };
  Shape shape = Shape::power;
  double exponent = 0.0;
  double coef = 1.0;
  std::optional<double> bstar;  // splice the table envelope below b*
};

struct BoundConfig {
  Distribution dist = ParetoDist{2.0};
  GeometricParams geo{0.5};
  double B = 100.0;
  Engine engine = Engine::panjer;
  double bandwidth = 0.005;
  McOptions mc;
  double mc_step = 0.05;  // MC grid spacing on [h(B), B]
  CutoffFunction h = CutoffFunction::power(0.5);
  GSpec g;
  SupOptions sup;
  double min_b_cap = 1e4;
};

/// Δ on [0, xmax] (Panjer: every lattice point) or [h(B), xmax] (MC grid).
DeltaTable compute_delta_table(const BoundConfig& config, double xmax);

TestFunction build_g(const BoundConfig& config, const DeltaTable& table);

struct BoundCertificate {
  double p = 0.0;
  std::string dist;
  std::string h;
  std::string g;
  TestFunction g_fn = PowerTestFunction{};
  double B = 0.0;
  double b = 0.0;
  double delta_b = 0.0;
  double phi = 0.0;
  double phi_raw = 0.0;
  double c_hb_b = 0.0;
  double C = 0.0;
  double coefficient = 0.0;  // C times the tail coefficient of g
  double valid_from = 0.0;
  bool tail_certified = false;
  std::vector<std::string> notes;
};

/// The full procedure on a precomputed table covering [0 or h(B), B].
BoundCertificate build_bound(const BoundConfig& config, const DeltaTable& table);
BoundCertificate build_bound(const BoundConfig& config);

/// "Delta(x) <= 8.534 * x^-0.6875 for x > 100"
std::string bound_text(const BoundCertificate& cert);

void write_certificate(std::ostream& os, const BoundCertificate& cert,
                       const std::map<std::string, std::string>& config_echo = {});
std::map<std::string, std::string> read_certificate(std::istream& is);

struct Violation {
  double x;
  double delta;
  double bound;
};

struct VerifyReport {
  std::size_t checked = 0;
  std::vector<Violation> violations;
  double max_ratio = 0.0;  // max of Δ/(C g) over checked points
  bool passed() const { return violations.empty(); }
};

/// Checks Δ(x) <= C g(x) + stderr_mult*se(x) for table points x >= b.
VerifyReport verify_bound(const BoundCertificate& cert, const DeltaTable& table,
                          double stderr_mult = 2.0);

// ---------------------------------------------------------------- tuner

struct TuneRow {
  double s = 0.0;
  std::optional<double> bstar;
  bool feasible = false;
  double C = 0.0;
  double kappa = 1.0;
  double coefficient = std::numeric_limits<double>::infinity();
  std::string reason;
};

struct TuneResult {
  TuneRow best;
  std::vector<TuneRow> rows;
};

/// Exhaustive search over h scales and splice points (an empty bstar grid
/// means the configured g without splicing). Minimizes C times the tail
/// coefficient of g; ties go to smaller s, then smaller b*.
TuneResult tune(const BoundConfig& config, const DeltaTable& table,
                const std::vector<double>& s_grid, const std::vector<double>& bstar_grid);
TuneResult tune(const BoundConfig& config, const std::vector<double>& s_grid,
                const std::vector<double>& bstar_grid);

}  // namespace geobound
