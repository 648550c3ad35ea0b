#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vnlab {

/// One evaluated relation. Equalities use |lhs - rhs|, inequalities lhs <= rhs use
/// max(0, lhs - rhs). A check passes iff residual < tol, so tol = 0 always fails.
struct CheckRecord {
  std::string id;
  std::string clause;
  int trial = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct WorstCase {
  std::string suite;  // the registered suite that produced the instance
  std::string check_id;
  int trial = 0;
  double residual = 0.0;
  std::string instance;  // JSON text, accepted by replay()
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  int trials = 0;
  std::vector<CheckRecord> checks;
  std::optional<WorstCase> worst;

  int failures() const;
  bool all_pass() const { return failures() == 0; }
};

std::vector<std::string> suite_names();
int default_trials(const std::string& suite);

/// Runs a registered suite; trials <= 0 selects the suite default. `tol` overrides every
/// per-check tolerance. "all" runs every suite with check ids prefixed by the suite name.
SuiteReport run_suite(const std::string& suite, std::optional<double> tol, std::uint64_t seed, int trials = 0);

/// Re-evaluates a stored instance (for example WorstCase::instance).
std::vector<CheckRecord> replay(const std::string& suite, const std::string& instance_json,
                                std::optional<double> tol = std::nullopt);

/// Deterministic JSON with schema_version 1.
std::string to_json(const SuiteReport& r);
/// check_id, paper_ref (clause), lhs, rhs, residual, pass.
std::string to_tsv(const SuiteReport& r);

/// Scenario JSON for kind state | bipartite | split_pair | inclusion.
///   state:      dims {d}            two full-rank states on M_d
///   bipartite:  dims {a, b}         full-rank state on M_a (x) M_b
///   split_pair: dims {a, b}         unit vector on C^{ab} (x) C^{ab}
///   inclusion:  dims {n1, m1, ...}  N = V ((+) M_nk (x) 1_mk) V^* inside M_d with an invariant state;
///                                   V = 1 when every block is 1 x 1 (the diagonal subalgebra)
/// Densities are G G^* / tr(G G^*) with square complex Gaussian G.
std::string generate_instance(const std::string& kind, const std::vector<int>& dims, std::uint64_t seed);

struct ScanRow {
  double s;
  double mu1;          // matrix-unit bound of the 1-norm of Xi_A
  double er_upper;
  double ei;
  double zp;           // p-norm bound of Xi_A
  double ei_bound;     // c_p z + eta(z - 1) - eta(z)
  double otani_bound;  // z ln z + c_p z^p
};

/// Split pairs Omega(s) on 2 (x) 2 with Schmidt coefficients ~ (1, e^{-s}), s = 0, 1, ..., steps.
std::vector<ScanRow> scan_distance(double p, int steps);
std::string scan_to_json(const std::vector<ScanRow>& rows, double p);
std::string scan_to_tsv(const std::vector<ScanRow>& rows);

/// Pipeline and canonical-factor checks for a split_pair scenario at the given exponents.
SuiteReport certify(const std::string& scenario_json, const std::vector<double>& ps,
                    std::optional<double> tol = std::nullopt);

/// Single quantity on a scenario, returned as JSON {quantity, value, ...}.
///   relative-entropy, entropy (state); mutual-information, relative-entanglement (bipartite);
///   canonical-entropy, partition-function (split_pair, uses p); takesaki (inclusion)
std::string compute_quantity(const std::string& quantity, const std::string& scenario_json, double p = 0.5);

}  // namespace vnlab
