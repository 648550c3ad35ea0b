#include "vnlab/harness.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "suites.hpp"
#include "vnlab/errors.hpp"
#include "vnlab/nuclearity.hpp"

namespace vnlab {

namespace {

using detail::json;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Each trial has its own stream, so results do not depend on how trials are scheduled.
std::uint64_t trial_seed(std::uint64_t seed, const std::string& suite, int trial) {
  return splitmix(splitmix(seed ^ fnv1a(suite)) + static_cast<std::uint64_t>(trial));
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Usage, std::string("malformed JSON: ") + e.what());
  }
}

const detail::SuiteDef& find_suite(const std::string& name) {
  for (const auto& d : detail::registry())
    if (d.name == name) return d;
  throw Error(ErrorKind::Usage, "unknown suite '" + name + "'");
}

void finish(std::vector<CheckRecord>& recs, std::optional<double> tol, int trial) {
  for (auto& r : recs) {
    if (tol) r.tol = *tol;
    r.trial = trial;
    r.pass = r.residual < r.tol;
  }
}

std::vector<CheckRecord> evaluate(const detail::SuiteDef& def, const json& inst, std::optional<double> tol, int trial) {
  detail::Checks c;
  try {
    def.eval(inst, c);
  } catch (const std::exception& e) {
    const double inf = std::numeric_limits<double>::infinity();
    c.records.push_back({"exception", e.what(), 0, inf, 0.0, inf, 0.0, false});
  }
  finish(c.records, tol, trial);
  return c.records;
}

// Failing checks first, then the largest residual relative to its tolerance.
bool worse(const CheckRecord& a, const CheckRecord& b) {
  if (a.pass != b.pass) return !a.pass;
  const double ra = a.tol > 0 ? a.residual / a.tol : a.residual;
  const double rb = b.tol > 0 ? b.residual / b.tol : b.residual;
  return ra > rb;
}

void run_def(const detail::SuiteDef& def, std::optional<double> tol, std::uint64_t seed, int trials,
             const std::string& prefix, SuiteReport& out, std::optional<CheckRecord>& worst_rec) {
  const int n = def.fixed ? def.trials : (trials > 0 ? trials : def.trials);
  for (int t = 0; t < n; ++t) {
    Rng rng(trial_seed(seed, def.name, t));
    const json inst = def.make(rng, t);
    for (auto r : evaluate(def, inst, tol, t)) {
      r.id = prefix + r.id;
      if (!worst_rec || worse(r, *worst_rec)) {
        worst_rec = r;
        out.worst = WorstCase{def.name, r.id, t, r.residual, inst.dump()};
      }
      out.checks.push_back(std::move(r));
    }
  }
  out.trials += n;
}

json record_json(const CheckRecord& r) {
  return {{"id", r.id},
          {"clause", r.clause},
          {"trial", r.trial},
          {"lhs", io::num(r.lhs)},
          {"rhs", io::num(r.rhs)},
          {"residual", io::num(r.residual)},
          {"tol", io::num(r.tol)},
          {"pass", r.pass}};
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

Vec scan_vector(double s) {
  Vec psi = Vec::Zero(4);
  psi(0) = 1.0;
  psi(3) = std::exp(-s);
  psi.normalize();
  Vec chi = Vec::Zero(4);
  chi(0) = 1.0;
  return kron(psi, chi);
}

void require_dims(const std::vector<int>& dims, std::size_t count, const std::string& kind) {
  if (dims.size() != count)
    throw Error(ErrorKind::Usage, kind + " needs " + std::to_string(count) + " dimension(s)");
  for (int d : dims)
    if (d < 1) throw Error(ErrorKind::InvalidDimension, "dimensions must be positive");
}

void require_ambient(long long d) {
  if (d > 64) throw Error(ErrorKind::Limit, "ambient dimension " + std::to_string(d) + " exceeds the limit 64");
}

}  // namespace

int SuiteReport::failures() const {
  int f = 0;
  for (const auto& c : checks) f += c.pass ? 0 : 1;
  return f;
}

std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const auto& d : detail::registry()) out.push_back(d.name);
  out.push_back("all");
  return out;
}

int default_trials(const std::string& suite) {
  if (suite == "all") return 0;
  return find_suite(suite).trials;
}

SuiteReport run_suite(const std::string& suite, std::optional<double> tol, std::uint64_t seed, int trials) {
  if (tol && !(*tol >= 0.0)) throw Error(ErrorKind::Usage, "tolerance must be nonnegative");
  SuiteReport out;
  out.suite = suite;
  out.seed = seed;
  out.tol = tol;
  std::optional<CheckRecord> worst;
  if (suite == "all") {
    for (const auto& def : detail::registry()) run_def(def, tol, seed, trials, def.name + "/", out, worst);
    return out;
  }
  run_def(find_suite(suite), tol, seed, trials, "", out, worst);
  return out;
}

std::vector<CheckRecord> replay(const std::string& suite, const std::string& instance_json, std::optional<double> tol) {
  const auto& def = find_suite(suite);
  return evaluate(def, parse(instance_json), tol, 0);
}

std::string to_json(const SuiteReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(record_json(c));
  json j{{"schema_version", 1},
         {"suite", r.suite},
         {"seed", r.seed},
         {"trials", r.trials},
         {"tol", r.tol ? io::num(*r.tol) : json(nullptr)},
         {"summary", {{"checks", r.checks.size()}, {"failures", r.failures()}, {"pass", r.all_pass()}}},
         {"checks", checks}};
  if (r.worst) {
    j["worst"] = {{"suite", r.worst->suite},
                  {"check_id", r.worst->check_id},
                  {"trial", r.worst->trial},
                  {"residual", io::num(r.worst->residual)},
                  {"instance", parse(r.worst->instance)}};
  } else {
    j["worst"] = nullptr;
  }
  return j.dump(1) + "\n";
}

std::string to_tsv(const SuiteReport& r) {
  std::ostringstream os;
  os << "check_id\tpaper_ref\tlhs\trhs\tresidual\tpass\n";
  for (const auto& c : r.checks)
    os << c.id << "#" << c.trial << "\t" << c.clause << "\t" << fmt(c.lhs) << "\t" << fmt(c.rhs) << "\t"
       << fmt(c.residual) << "\t" << (c.pass ? "pass" : "fail") << "\n";
  return os.str();
}

std::string generate_instance(const std::string& kind, const std::vector<int>& dims, std::uint64_t seed) {
  Rng rng(seed);
  json j;
  if (kind == "state") {
    require_dims(dims, 1, kind);
    require_ambient(dims[0]);
    j = detail::make_state_pair(rng, dims[0]);
  } else if (kind == "bipartite") {
    require_dims(dims, 2, kind);
    require_ambient(static_cast<long long>(dims[0]) * dims[1]);
    j = detail::make_bipartite(rng, dims[0], dims[1]);
  } else if (kind == "split_pair") {
    require_dims(dims, 2, kind);
    const long long ab = static_cast<long long>(dims[0]) * dims[1];
    require_ambient(ab * ab);
    j = detail::make_split_pair(rng, dims[0], dims[1]);
  } else if (kind == "inclusion") {
    if (dims.empty() || dims.size() % 2 != 0)
      throw Error(ErrorKind::Usage, "inclusion needs block pairs n1,m1,n2,m2,...");
    for (int d : dims)
      if (d < 1) throw Error(ErrorKind::InvalidDimension, "dimensions must be positive");
    std::vector<Block> blocks;
    long long total = 0;
    for (std::size_t i = 0; i < dims.size(); i += 2) {
      blocks.push_back(Block{dims[i], dims[i + 1]});
      total += static_cast<long long>(dims[i]) * dims[i + 1];
    }
    require_ambient(total);
    j = detail::make_inclusion(rng, blocks);
  } else {
    throw Error(ErrorKind::Usage, "unknown instance kind '" + kind + "'");
  }
  j["seed"] = seed;
  return j.dump(1) + "\n";
}

std::vector<ScanRow> scan_distance(double p, int steps) {
  if (steps < 0) throw Error(ErrorKind::Parameter, "steps must be nonnegative");
  std::vector<ScanRow> rows;
  ProductEnsemble prev;
  bool have_prev = false;
  const auto sys = BipartiteSystem::matrices(2, 2);
  for (int k = 0; k <= steps; ++k) {
    const double s = k;
    const SplitPair sp(2, 2, scan_vector(s));
    const auto xa = xi_map(sp, Side::A);
    const double mu1 = pnorm_upper(xa, 1.0).bound;
    const double zp = pnorm_upper(xa, p).bound;
    const Functional omega = sys.state(hermitian_part(sp.state().density()));
    EROptions o;
    o.restarts = 4;
    o.seed = 1;
    if (have_prev) o.warm_starts = {prev};
    const auto er = relative_entanglement_upper(sys, omega, o);
    prev = er.witness;
    have_prev = true;
    const double ei = mutual_information_formula(sys, omega);
    rows.push_back({s, mu1, er.upper_bound, ei, zp, mutual_information_bound(zp, p), otani_bound(zp, p)});
  }
  return rows;
}

std::string scan_to_json(const std::vector<ScanRow>& rows, double p) {
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"s", r.s},
                   {"mu1", io::num(r.mu1)},
                   {"er_upper", io::num(r.er_upper)},
                   {"ei", io::num(r.ei)},
                   {"zp", io::num(r.zp)},
                   {"ei_bound", io::num(r.ei_bound)},
                   {"otani_bound", io::num(r.otani_bound)}});
  json j{{"schema_version", 1}, {"p", p}, {"rows", arr}};
  return j.dump(1) + "\n";
}

std::string scan_to_tsv(const std::vector<ScanRow>& rows) {
  std::ostringstream os;
  os << "s\tmu1\ter_upper\tei\tzp\tei_bound\totani_bound\n";
  for (const auto& r : rows)
    os << fmt(r.s) << "\t" << fmt(r.mu1) << "\t" << fmt(r.er_upper) << "\t" << fmt(r.ei) << "\t" << fmt(r.zp)
       << "\t" << fmt(r.ei_bound) << "\t" << fmt(r.otani_bound) << "\n";
  return os.str();
}

SuiteReport certify(const std::string& scenario_json, const std::vector<double>& ps, std::optional<double> tol) {
  json inst = parse(scenario_json);
  if (inst.value("kind", "") != "split_pair") throw Error(ErrorKind::Usage, "certify expects a split_pair scenario");
  for (double p : ps)
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::Parameter, "exponents must lie in (0, 1)");
  inst["ps"] = ps;
  SuiteReport out;
  out.suite = "certify";
  out.tol = tol;
  out.seed = inst.value("seed", std::uint64_t{0});
  out.trials = 1;
  detail::Checks c;
  try {
    detail::eval_pipeline(inst, c);
    detail::eval_canonical(inst, c);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Usage, std::string("unexpected scenario layout: ") + e.what());
  }
  finish(c.records, tol, 0);
  out.checks = std::move(c.records);
  return out;
}

std::string compute_quantity(const std::string& quantity, const std::string& scenario_json, double p) {
  const json inst = parse(scenario_json);
  const std::string kind = inst.value("kind", "");
  auto need = [&](const char* k) {
    if (kind != k) throw Error(ErrorKind::Usage, quantity + " expects a " + k + " scenario");
  };
  json out{{"quantity", quantity}};
  try {
    if (quantity == "relative-entropy" || quantity == "entropy") {
      need("state");
      const int d = inst.at("d").get<int>();
      const Functional phi = state_on_full(d, io::mat_from_json(inst.at("phi")));
      const Functional psi(phi.algebra(), io::mat_from_json(inst.at("psi")));
      if (quantity == "entropy") {
        out["value"] = io::num(von_neumann_entropy(phi));
      } else {
        out["value"] = io::num(relative_entropy(phi, psi).as_double());
        out["modular"] = io::num(relative_entropy(phi, psi, RelEntMethod::Modular).as_double());
      }
    } else if (quantity == "mutual-information" || quantity == "relative-entanglement") {
      need("bipartite");
      const auto sys = BipartiteSystem::matrices(inst.at("da").get<int>(), inst.at("db").get<int>());
      const Functional omega = sys.state(io::mat_from_json(inst.at("omega")));
      if (quantity == "mutual-information") {
        out["value"] = io::num(mutual_information(sys, omega).as_double());
      } else {
        const auto r = relative_entanglement_upper(sys, omega);
        out["value"] = io::num(r.upper_bound);
        out["witness"] = io::ensemble_to_json(r.witness);
      }
    } else if (quantity == "canonical-entropy" || quantity == "partition-function") {
      need("split_pair");
      const SplitPair sp(inst.at("da").get<int>(), inst.at("db").get<int>(), io::vec_from_json(inst.at("omega")));
      if (quantity == "canonical-entropy") {
        out["value"] = io::num(canonical_entanglement_entropy(sp.system(), sp.state()));
        out["mutual_information"] = io::num(mutual_information_formula(sp.system(), sp.state()));
      } else {
        const auto r = partition_function_upper(sp, p);
        out["value"] = io::num(r.z);
        out["p"] = p;
        out["side"] = r.side == Side::A ? "A" : "B";
      }
    } else if (quantity == "takesaki") {
      need("inclusion");
      const Eigen::Index d = inst.at("ambient").get<Eigen::Index>();
      std::vector<Block> blocks;
      for (const auto& b : inst.at("blocks")) blocks.push_back(Block{b.at(0).get<int>(), b.at(1).get<int>()});
      const FdAlgebra n(d, blocks, io::mat_from_json(inst.at("basis")));
      const auto m = make_algebra(full_matrix_algebra(static_cast<int>(d)));
      const auto r = takesaki_check(*m, n, Functional(m, io::mat_from_json(inst.at("rho"))));
      out["value"] = r.holds;
      out["commutator_residual"] = io::num(r.commutator_residual);
      out["flow_residual"] = io::num(r.flow_residual);
    } else {
      throw Error(ErrorKind::Usage, "unknown quantity '" + quantity + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Usage, std::string("unexpected scenario layout: ") + e.what());
  }
  return out.dump(1) + "\n";
}

}  // namespace vnlab
