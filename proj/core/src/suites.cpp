#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vnlab/errors.hpp"
#include "vnlab/nuclearity.hpp"

namespace vnlab::detail {

namespace {

constexpr double kIneqTol = 1e-10;

std::string tagged(const std::string& id, double p) {
  std::ostringstream os;
  os << id << "[p=" << p << "]";
  return os.str();
}

double re(const Functional& a, const Functional& b) { return relative_entropy(a, b).value(); }

AlgebraRef algebra_of_kind(Rng& rng, int kind) {
  switch (kind % 3) {
    case 0:
      return make_algebra(full_matrix_algebra(2));
    case 1:
      return make_algebra(full_matrix_algebra(3));
    default:
      return make_algebra(canonicalize(5, {Block{1, 1}, Block{2, 2}}, rng.unitary(5)));
  }
}

Mat state_density(Rng& rng, const FdAlgebra& alg) { return alg.conditional_expectation(rng.density(alg.ambient_dim())); }

Mat channel(const std::vector<Mat>& kraus, const Mat& rho) {
  Mat out = Mat::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

std::vector<Mat> random_kraus(Rng& rng, Eigen::Index d, int count) {
  std::vector<Mat> g;
  Mat s = Mat::Zero(d, d);
  for (int i = 0; i < count; ++i) {
    g.push_back(rng.ginibre(d, d));
    s += g.back().adjoint() * g.back();
  }
  const Mat inv = psd_power(s, -0.5);
  for (auto& k : g) k = k * inv;
  return g;
}

json mats_to_json(const std::vector<Mat>& ms) {
  json a = json::array();
  for (const auto& m : ms) a.push_back(io::mat_to_json(m));
  return a;
}

std::vector<Mat> mats_from_json(const json& j) {
  std::vector<Mat> out;
  for (const auto& m : j) out.push_back(io::mat_from_json(m));
  return out;
}

// Splits a positive rho (inside alg) into positive parts rho^{1/2} S^{-1/2} X_i S^{-1/2} rho^{1/2}.
std::vector<Mat> split_positive(const Mat& rho, const std::vector<Mat>& xs) {
  Mat s = Mat::Zero(rho.rows(), rho.cols());
  for (const auto& x : xs) s += x;
  const Mat r = psd_power(hermitian_part(rho), 0.5);
  const Mat si = psd_power(hermitian_part(s), -0.5);
  std::vector<Mat> out;
  for (const auto& x : xs) out.push_back(hermitian_part(r * si * x * si * r));
  return out;
}

double shannon(const std::vector<double>& w) {
  double s = 0.0;
  for (double x : w) s += eta(x);
  return s;
}

Mat tripartite_marginal_12(const Mat& rho) { return ptrace_second(rho, 4, 2); }
Mat tripartite_marginal_23(const Mat& rho) { return ptrace_first(rho, 2, 4); }

// ---- relative-entropy-routes -------------------------------------------------

json make_routes(Rng& rng, int trial) {
  const auto alg = algebra_of_kind(rng, trial);
  return {{"algebra", io::algebra_to_json(*alg)},
          {"phi", io::mat_to_json(state_density(rng, *alg))},
          {"psi", io::mat_to_json(state_density(rng, *alg))},
          {"h", 1e-4}};
}

void eval_routes(const json& inst, Checks& c) {
  const auto alg = make_algebra(io::algebra_from_json(inst.at("algebra")));
  const Functional phi(alg, io::mat_from_json(inst.at("phi")));
  const Functional psi(alg, io::mat_from_json(inst.at("psi")));
  const double u = relative_entropy(phi, psi, RelEntMethod::Umegaki).value();
  const double m = relative_entropy(phi, psi, RelEntMethod::Modular).value();
  c.equal("umegaki-vs-modular", "relative entropy: trace formula vs relative modular spectrum", u, m, 1e-8);
  const auto cc = relative_entropy_cocycle_check(phi, psi, inst.at("h").get<double>());
  c.equal("cocycle-derivative", "relative entropy: derivative of the Connes cocycle at t = 0", cc.estimate,
          cc.reference, 1e-4);
}

// ---- support -----------------------------------------------------------------

json make_support(Rng& rng, int trial) {
  const int kind = trial % 5;
  AlgebraRef alg;
  Mat phi, psi;
  if (kind < 3) {
    const int d = kind == 0 ? 2 : 3;
    alg = make_algebra(full_matrix_algebra(d));
    if (kind == 2) {
      const Vec a = rng.unit_vector(d), b = rng.unit_vector(d);
      phi = a * a.adjoint();
      psi = b * b.adjoint();
    } else {
      phi = rng.density(d);
      psi = rng.density_of_rank(d, d - 1);
    }
  } else {
    alg = make_algebra(canonicalize(5, {Block{1, 1}, Block{2, 2}}, rng.unitary(5)));
    phi = state_density(rng, *alg);
    std::vector<Mat> parts;
    for (const auto& b : alg->blocks()) parts.push_back(rng.density(b.n));
    // kind 3 kills a whole block of psi, kind 4 leaves the larger block rank deficient
    const std::size_t big = alg->blocks()[0].n == 2 ? 0 : 1;
    if (kind == 3) {
      parts[1 - big] = Mat::Zero(1, 1);
    } else {
      parts[big] = rng.density_of_rank(2, 1);
    }
    psi = Functional::from_block_densities(alg, parts).normalized().density();
  }
  return {{"algebra", io::algebra_to_json(*alg)}, {"phi", io::mat_to_json(phi)}, {"psi", io::mat_to_json(psi)}};
}

void eval_support(const json& inst, Checks& c) {
  const auto alg = make_algebra(io::algebra_from_json(inst.at("algebra")));
  const Functional phi(alg, io::mat_from_json(inst.at("phi")));
  const Functional psi(alg, io::mat_from_json(inst.at("psi")));
  const auto u = relative_entropy(phi, psi, RelEntMethod::Umegaki);
  const auto m = relative_entropy(phi, psi, RelEntMethod::Modular);
  c.flag("umegaki-infinite", "relative entropy is +inf when supp phi is not under supp psi", u.is_infinite());
  c.flag("modular-infinite", "relative entropy is +inf when supp phi is not under supp psi", m.is_infinite());
}

// ---- relative-entropy-properties ---------------------------------------------

json make_re_properties(Rng& rng, int trial) {
  const auto alg = algebra_of_kind(rng, trial);
  const Eigen::Index d = alg->ambient_dim();
  json j;
  j["algebra"] = io::algebra_to_json(*alg);
  j["phi"] = io::mat_to_json(state_density(rng, *alg));
  j["psi"] = io::mat_to_json(state_density(rng, *alg));
  j["phi2"] = io::mat_to_json(state_density(rng, *alg));
  j["psi2"] = io::mat_to_json(state_density(rng, *alg));
  j["lambda"] = 0.2 + 2.8 * rng.uniform();
  j["mu"] = 0.2 + 2.8 * rng.uniform();
  j["t"] = 0.1 + 0.8 * rng.uniform();
  j["psi_small"] = io::mat_to_json(Mat(0.7 * state_density(rng, *alg)));
  j["psi_extra"] = io::mat_to_json(Mat(0.3 * state_density(rng, *alg)));
  j["kraus"] = mats_to_json(random_kraus(rng, d, 3));
  // chain rule on N = V (M_2 (x) 1_2) V^* inside M_4 with an invariant reference state
  const Mat v = rng.unitary(4);
  j["chain"] = {{"v", io::mat_to_json(v)},
                {"reference", io::mat_to_json(Mat(v * kron(rng.density(2), rng.density(2)) * v.adjoint()))},
                {"phi", io::mat_to_json(rng.density(4))},
                {"psi", io::mat_to_json(rng.density(2))}};
  const int db = 2 + trial % 2;
  j["split"] = {{"db", db},
                {"phi", io::mat_to_json(rng.density(2 * db))},
                {"psi1", io::mat_to_json(rng.density(2))},
                {"psi2", io::mat_to_json(rng.density(db))}};
  return j;
}

void eval_re_properties(const json& inst, Checks& c) {
  const auto alg = make_algebra(io::algebra_from_json(inst.at("algebra")));
  auto fn = [&](const char* key) { return Functional(alg, io::mat_from_json(inst.at(key))); };
  const Functional phi = fn("phi"), psi = fn("psi"), phi2 = fn("phi2"), psi2 = fn("psi2");
  const double lam = inst.at("lambda").get<double>();
  const double mu = inst.at("mu").get<double>();
  const double t = inst.at("t").get<double>();
  const double s = re(phi, psi);

  c.equal("scaling", "S(l phi || m psi) = l S(phi || psi) - l phi(1) ln(m / l)", re(phi * lam, psi * mu),
          lam * s - lam * phi.unit_value().real() * std::log(mu / lam), 1e-9);
  const double dn = (phi - psi).norm();
  c.at_least("pinsker", "S(phi || psi) >= ||phi - psi||^2 / 2", s, dn * dn / 2, kIneqTol);
  c.at_most("joint-convexity", "joint convexity of S", re(phi * t + phi2 * (1 - t), psi * t + psi2 * (1 - t)),
            t * s + (1 - t) * re(phi2, psi2), kIneqTol);
  c.at_least("superadditivity", "superadditivity in the first argument", re(phi * t + phi2 * (1 - t), psi),
             re(phi * t, psi) + re(phi2 * (1 - t), psi), kIneqTol);
  const Functional small = fn("psi_small");
  const Functional big = small + fn("psi_extra");
  c.at_most("majorization", "S(phi || psi) <= S(phi || psi') for psi >= psi'", re(phi, big), re(phi, small),
            kIneqTol);

  const auto kraus = mats_from_json(inst.at("kraus"));
  const Functional pa = Functional::from_ambient(alg, channel(kraus, phi.density()));
  const Functional qa = Functional::from_ambient(alg, channel(kraus, psi.density()));
  c.at_most("cp-monotonicity", "monotonicity under unital completely positive maps", re(pa, qa), s, kIneqTol);

  const auto& ch = inst.at("chain");
  const Mat v = io::mat_from_json(ch.at("v"));
  const auto m4 = make_algebra(full_matrix_algebra(4));
  const auto n = make_algebra(4, std::vector<Block>{Block{2, 2}}, v);
  const ConditionalExpectation eps(m4, n, Functional(m4, io::mat_from_json(ch.at("reference"))));
  const Functional cphi(m4, io::mat_from_json(ch.at("phi")));
  const Functional cpsi = Functional::from_ambient(
      n, v * kron(io::mat_from_json(ch.at("psi")), Mat::Identity(2, 2) / 2.0) * v.adjoint());
  const Functional psi_eps = functional_from_values(m4, [&](const Mat& x) { return cpsi(eps(x)); });
  const Functional phi_eps = functional_from_values(m4, [&](const Mat& x) { return cphi(eps(x)); });
  c.equal("chain-rule", "S_M(phi || psi o eps) = S_N(phi || psi) + S_M(phi || phi o eps)", re(cphi, psi_eps),
          re(cphi.restrict_to(n), cpsi) + re(cphi, phi_eps), 1e-9);

  const auto& sp = inst.at("split");
  const auto sys = BipartiteSystem::matrices(2, sp.at("db").get<int>());
  const Functional w = sys.state(io::mat_from_json(sp.at("phi")));
  const Functional p1(sys.a_local(), io::mat_from_json(sp.at("psi1")));
  const Functional p2(sys.b_local(), io::mat_from_json(sp.at("psi2")));
  const Functional w1 = sys.marginal_a(w), w2 = sys.marginal_b(w);
  c.equal("tensor-split", "S(phi || psi1 (x) psi2) = S(phi1 || psi1) + S(phi2 || psi2) + S(phi || phi1 (x) phi2)",
          re(w, sys.product(p1, p2)), re(w1, p1) + re(w2, p2) + re(w, sys.product(w1, w2)), 1e-9);
}

// ---- entropy -----------------------------------------------------------------

json make_entropy(Rng& rng, int trial) {
  const auto alg = algebra_of_kind(rng, trial);
  const int d = 2 + trial % 2;
  json j;
  j["algebra"] = io::algebra_to_json(*alg);
  j["phi"] = io::mat_to_json(state_density(rng, *alg));
  j["omega"] = io::mat_to_json(state_density(rng, *alg));
  j["lambda"] = 0.05 + 0.9 * rng.uniform();
  j["tripartite"] = io::mat_to_json(rng.density(8));
  j["factor1"] = io::mat_to_json(rng.density(2));
  j["factor2"] = io::mat_to_json(rng.density(3));
  j["d"] = d;
  j["rho"] = io::mat_to_json(rng.density(d));
  std::vector<Mat> parts;
  for (int i = 0; i < 3; ++i) parts.push_back(rng.density(d));
  j["parts"] = mats_to_json(parts);
  j["pure"] = io::mat_to_json(rng.ginibre(d, d + 2));
  return j;
}

void eval_entropy(const json& inst, Checks& c) {
  const auto alg = make_algebra(io::algebra_from_json(inst.at("algebra")));
  const Functional phi(alg, io::mat_from_json(inst.at("phi")));
  const Functional omega(alg, io::mat_from_json(inst.at("omega")));
  const double l = inst.at("lambda").get<double>();
  const double mixed = von_neumann_entropy(phi * l + omega * (1 - l));
  const double avg = l * von_neumann_entropy(phi) + (1 - l) * von_neumann_entropy(omega);
  c.at_least("concavity-lower", "concavity of S", mixed, avg, kIneqTol);
  c.at_most("concavity-upper", "S(mixture) <= average + eta(l) + eta(1 - l)", mixed, avg + eta(l) + eta(1 - l),
            kIneqTol);

  auto s_full = [](const Mat& r) {
    return von_neumann_entropy(state_on_full(static_cast<int>(r.rows()), hermitian_part(r)));
  };
  const Mat r = io::mat_from_json(inst.at("tripartite"));
  const Mat r12 = tripartite_marginal_12(r);
  const Mat r23 = tripartite_marginal_23(r);
  c.at_most("strong-subadditivity", "S(123) + S(2) <= S(12) + S(23) on 2 x 2 x 2",
            s_full(r) + s_full(ptrace_second(r23, 2, 2)), s_full(r12) + s_full(r23), kIneqTol);

  const Mat f1 = io::mat_from_json(inst.at("factor1"));
  const Mat f2 = io::mat_from_json(inst.at("factor2"));
  c.equal("tensor-additivity", "S(phi1 (x) phi2) = S(phi1) + S(phi2)", s_full(kron(f1, f2)), s_full(f1) + s_full(f2),
          1e-10);

  const int d = inst.at("d").get<int>();
  const Mat rho = io::mat_from_json(inst.at("rho"));
  const Functional st = state_on_full(d, rho);
  std::vector<EnsembleTerm> ens;
  double mixed_sum = 0.0;
  for (const auto& x : split_positive(rho, mats_from_json(inst.at("parts")))) {
    const double w = x.trace().real();
    ens.push_back({w, Functional(st.algebra(), x / w)});
    mixed_sum += w * von_neumann_entropy(ens.back().state);
  }
  c.equal("decomposition-identity", "sum l_i S(phi_i || phi) = S(phi) - sum l_i S(phi_i)",
          entropy_decomposition_value(st, ens), von_neumann_entropy(st) - mixed_sum, 1e-9);

  const Mat g = io::mat_from_json(inst.at("pure"));
  const double tr = (g.adjoint() * g).trace().real();
  std::vector<double> w;
  for (Eigen::Index k = 0; k < g.cols(); ++k) w.push_back(g.col(k).squaredNorm() / tr);
  c.at_least("pure-decomposition", "S(phi) <= sum eta(l_i) for pure decompositions", shannon(w),
             s_full(g * g.adjoint() / tr), kIneqTol);
}

// ---- conditional -------------------------------------------------------------

json make_conditional(Rng& rng, int trial) {
  const Mat v = rng.unitary(4);
  std::vector<Mat> parts;
  for (int i = 0; i < 3; ++i) parts.push_back(rng.density(4));
  return {{"case", trial % 3},
          {"v", io::mat_to_json(v)},
          {"phi", io::mat_to_json(Mat(v * kron(rng.density(2), rng.density(2)) * v.adjoint()))},
          {"parts", mats_to_json(parts)}};
}

void eval_conditional(const json& inst, Checks& c) {
  const Mat v = io::mat_from_json(inst.at("v"));
  const auto m = make_algebra(full_matrix_algebra(4));
  const auto n = make_algebra(4, std::vector<Block>{Block{2, 2}}, v);
  const Functional phi(m, io::mat_from_json(inst.at("phi")));
  const ConditionalExpectation eps(m, n, phi);
  const Functional phin = phi.restrict_to(n);

  std::vector<Mat> xs;
  for (const auto& y : mats_from_json(inst.at("parts"))) xs.push_back(n->conditional_expectation(y));
  std::vector<EnsembleTerm> lower, upper;
  for (const auto& x : split_positive(phin.density(), xs)) {
    const double w = x.trace().real();
    const Functional st(n, n->conditional_expectation(x) / w);
    lower.push_back({w, st});
    upper.push_back({w, functional_from_values(m, [&](const Mat& y) { return st(eps(y)); })});
  }
  AlgebraRef a1, a2;
  switch (inst.at("case").get<int>()) {
    case 0:
      a1 = n;
      a2 = m;
      break;
    case 1:
      a1 = make_algebra(4, std::vector<Block>{Block{1, 2}, Block{1, 2}}, v);
      a2 = make_algebra(4, std::vector<Block>{Block{2, 1}, Block{2, 1}}, v);
      break;
    default:
      a1 = make_algebra(4, std::vector<Block>{Block{1, 4}}, Mat(Mat::Identity(4, 4)));
      a2 = n;
  }
  c.at_most("decomposition-inequality", "sum l_i S_A1(phi_i || phi) <= sum l_i S_A2(phi_i o eps || phi)",
            entropy_decomposition_value(phin, lower, a1), entropy_decomposition_value(phi, upper, a2), kIneqTol);
}

// ---- entanglement ------------------------------------------------------------

json make_entanglement(Rng& rng, int trial) {
  const int db = 2 + trial % 2;
  const int d = 2 * db;
  std::vector<Mat> comps;
  json weights = json::array();
  double total = 0.0;
  std::vector<double> w;
  for (int i = 0; i < 3; ++i) {
    comps.push_back(rng.density(d));
    w.push_back(rng.uniform() + 0.1);
    total += w.back();
  }
  for (double x : w) weights.push_back(x / total);
  json terms = json::array();
  std::vector<double> tw;
  double ttot = 0.0;
  for (int i = 0; i < 4; ++i) {
    tw.push_back(rng.uniform() + 0.1);
    ttot += tw.back();
  }
  for (int i = 0; i < 4; ++i)
    terms.push_back({{"weight", tw[i] / ttot}, {"a", io::mat_to_json(rng.density(2))},
                     {"b", io::mat_to_json(rng.density(db))}});
  return {{"db", db},
          {"omega", io::mat_to_json(rng.density(d))},
          {"components", mats_to_json(comps)},
          {"weights", weights},
          {"product_terms", terms},
          {"er", {{"restarts", 2}, {"iterations", 100}, {"seed", rng.next_u64() % 1000000}}}};
}

void eval_entanglement(const json& inst, Checks& c) {
  const auto sys = BipartiteSystem::matrices(2, inst.at("db").get<int>());
  const Functional omega = sys.state(io::mat_from_json(inst.at("omega")));
  const double ei = mutual_information_formula(sys, omega);
  c.equal("mutual-information-routes", "E_I as S(omega || omega_A (x) omega_B) vs entropy formula",
          mutual_information(sys, omega).value(), ei, 1e-8);
  EROptions o;
  o.restarts = inst.at("er").at("restarts").get<int>();
  o.iterations = inst.at("er").at("iterations").get<int>();
  o.seed = inst.at("er").at("seed").get<std::uint64_t>();
  const double er = relative_entanglement_upper(sys, omega, o).upper_bound;
  c.at_least("relative-entanglement-lower", "E_R upper bound >= 0", er, 0.0, kIneqTol);
  c.at_most("relative-entanglement-upper", "E_R <= E_I", er, ei, 1e-8);

  const auto comps = mats_from_json(inst.at("components"));
  const auto ws = inst.at("weights").get<std::vector<double>>();
  Mat mix = Mat::Zero(comps[0].rows(), comps[0].cols());
  double avg = 0.0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    mix += ws[i] * comps[i];
    avg += ws[i] * mutual_information_formula(sys, sys.state(comps[i]));
  }
  const double emix = mutual_information_formula(sys, sys.state(mix));
  c.at_least("concave-mutual-info-lower", "E_I(omega) >= sum l_j E_I(omega_j) - sum eta(l_j)", emix,
             avg - shannon(ws), kIneqTol);
  c.at_most("concave-mutual-info-upper", "E_I(omega) <= sum l_j E_I(omega_j) + 2 sum eta(l_j)", emix,
            avg + 2 * shannon(ws), kIneqTol);

  ProductEnsemble ens;
  for (const auto& t : inst.at("product_terms"))
    ens.terms.push_back({Functional(sys.a_local(), io::mat_from_json(t.at("a")) * t.at("weight").get<double>()),
                         Functional(sys.b_local(), io::mat_from_json(t.at("b")))});
  const auto e1 = separable_bound_e1(sys, ens);
  c.at_most("separable-e1", "E_I <= sum eta(l_j) for separable states", e1.mutual_information, e1.bound, 1e-8);
}

// ---- bell --------------------------------------------------------------------

json make_bell(Rng&, int) { return {{"restarts", 64}, {"iterations", 200}, {"seed", 1}}; }

void eval_bell(const json& inst, Checks& c) {
  const auto sys = BipartiteSystem::matrices(2, 2);
  Vec v = Vec::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  const Functional bell = sys.state(v * v.adjoint());
  const double ln2 = std::log(2.0);
  c.equal("bell-mutual-information", "E_I of a maximally entangled pure state = 2 ln 2",
          mutual_information(sys, bell).value(), 2 * ln2, 1e-9);
  c.equal("bell-mutual-information-formula", "E_I of a maximally entangled pure state = 2 ln 2",
          mutual_information_formula(sys, bell), 2 * ln2, 1e-9);
  EROptions o;
  o.restarts = inst.at("restarts").get<int>();
  o.iterations = inst.at("iterations").get<int>();
  o.seed = inst.at("seed").get<std::uint64_t>();
  c.equal("bell-relative-entanglement", "E_R of a pure state = S(omega_A)",
          relative_entanglement_upper(sys, bell, o).upper_bound, ln2, 1e-3);

  // Omega = (|0000> + |1111>)/sqrt 2 on the doubled space, restricted to A (x) B
  Mat rho = Mat::Zero(4, 4);
  rho(0, 0) = rho(3, 3) = 0.5;
  const Functional doubled = sys.state(rho);
  const double ec = canonical_entanglement_entropy(sys, doubled);
  c.equal("bell-canonical-entropy", "E_C on the doubled maximally correlated vector = ln 2", ec, ln2, 1e-8);
  c.at_most("bell-ei-vs-ec", "E_I <= 2 E_C", mutual_information_formula(sys, doubled), 2 * ec, 1e-8);
  c.at_most("bell-pure-ei-vs-ec", "E_I <= 2 E_C", mutual_information_formula(sys, bell),
            2 * canonical_entanglement_entropy(sys, bell), 1e-8);
}

// ---- pipeline ----------------------------------------------------------------

json make_pipeline(Rng& rng, int trial) {
  json j = make_split_pair(rng, 2, trial % 4 == 3 ? 3 : 2);
  j["ps"] = {0.25, 0.5, 0.75};
  return j;
}

SplitPair split_pair_from(const json& inst) {
  return SplitPair(inst.at("da").get<int>(), inst.at("db").get<int>(), io::vec_from_json(inst.at("omega")));
}

// ---- jones -------------------------------------------------------------------

json make_jones(Rng& rng, int trial) {
  static const std::vector<std::vector<Block>> shapes{
      {Block{2, 2}}, {Block{1, 2}, Block{2, 1}}, {Block{1, 1}, Block{1, 1}}, {Block{1, 1}, Block{2, 2}}};
  json j = make_inclusion(rng, shapes[static_cast<std::size_t>(trial) % shapes.size()]);
  j["cone_samples"] = 50;
  j["cone_seed"] = rng.next_u64() % 1000000;
  return j;
}

void eval_jones(const json& inst, Checks& c) {
  const Mat v = io::mat_from_json(inst.at("basis"));
  const Eigen::Index d = inst.at("ambient").get<Eigen::Index>();
  std::vector<Block> blocks;
  for (const auto& b : inst.at("blocks")) blocks.push_back(Block{b.at(0).get<int>(), b.at(1).get<int>()});
  const auto m = make_algebra(full_matrix_algebra(static_cast<int>(d)));
  const auto n = make_algebra(d, blocks, v);
  const Functional phi(m, io::mat_from_json(inst.at("rho")));
  const auto tk = takesaki_check(*m, *n, phi);
  c.flag("takesaki", "modular flow of phi leaves N invariant", tk.holds);
  if (!tk.holds) return;
  const ConditionalExpectation eps(m, n, phi);
  const auto ax = check_expectation(eps);
  const std::string ce = "phi-preserving conditional expectation: ";
  c.equal("expectation-unital", ce + "unital", ax.unital, 0, 1e-9);
  c.equal("expectation-idempotent", ce + "idempotent", ax.idempotent, 0, 1e-9);
  c.equal("expectation-bimodular", ce + "N-bimodular", ax.bimodular, 0, 1e-9);
  c.equal("expectation-preserving", ce + "phi o eps = phi", ax.preserving, 0, 1e-9);
  c.equal("expectation-onto", ce + "range in N", ax.onto, 0, 1e-9);
  c.at_least("expectation-positive", ce + "positive", ax.min_positivity, 0.0, kIneqTol);

  const auto jr = verify_jones_structure(eps);
  const std::string jn = "Jones projection: ";
  c.equal("jones-item1", jn + "e in N', e x Omega = eps(x) Omega, e x e = eps(x) e", jr.item1, 0, 1e-9);
  c.equal("jones-item2", jn + "N e = e (M v e) e", jr.item2, 0, 1e-9);
  c.equal("jones-item3", jn + "N' = M' v e", jr.item3, 0, 1e-9);
  c.at_least("jones-item4-injective", jn + "y -> y e is injective on N", jr.item4_min_singular, 1e-9, 1e-12);
  c.equal("jones-item4-formula", jn + "eps(x) = phi(e x e)", jr.item4_formula, 0, 1e-9);
  c.equal("jones-uniqueness", jn + "unique projection implementing eps", jr.uniqueness, 0, 1e-9);

  const auto cr = verify_natural_cone(eps, inst.at("cone_samples").get<int>(), inst.at("cone_seed").get<std::uint64_t>());
  const std::string nc = "natural cone: ";
  c.equal("cone-forward", nc + "e P(M) lies in P(N)", cr.forward, 0, 1e-8);
  c.equal("cone-backward", nc + "P(N) lies in e P(M)", cr.backward, 0, 1e-8);
  c.equal("cone-invariant", nc + "cone vectors of eps-invariant states are fixed by e", cr.invariant, 0, 1e-8);
}

// ---- canonical-factor --------------------------------------------------------

json make_canonical(Rng& rng, int trial) { return make_split_pair(rng, 2, trial % 5 == 4 ? 3 : 2); }

// ---- scan --------------------------------------------------------------------

json make_scan(Rng&, int) { return {{"p", 0.5}, {"steps", 10}}; }

void eval_scan(const json& inst, Checks& c) {
  const double p = inst.at("p").get<double>();
  const auto rows = scan_distance(p, inst.at("steps").get<int>());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::ostringstream tag;
    tag << "[s=" << r.s << "]";
    if (i > 0) {
      c.at_most("mu1-nonincreasing" + tag.str(), "mu_1(s) is nonincreasing", r.mu1, rows[i - 1].mu1, 1e-8);
      c.at_most("er-nonincreasing" + tag.str(), "E_R upper bound decreases along the scan", r.er_upper,
                rows[i - 1].er_upper, 1e-6);
    }
    c.at_most("er-vs-log-mu1" + tag.str(), "E_R <= ln ||Xi||_1", r.er_upper, std::log(r.mu1), 1e-6);
    c.at_most("ei-bound" + tag.str(), "E_I <= c_p z + eta(z - 1) - eta(z)", r.ei, r.ei_bound, kIneqTol);
  }
  c.at_most("er-far", "E_R upper bound at the far end of the scan", rows.back().er_upper, 1e-3, 1e-12);
  c.equal("ei-endpoint", "E_I at s = 0 is 2 ln 2", rows.front().ei, 2 * std::log(2.0), 1e-8);
}

}  // namespace

void Checks::equal(const std::string& id, const std::string& clause, double lhs, double rhs, double tol) {
  records.push_back({id, clause, 0, lhs, rhs, std::abs(lhs - rhs), tol, false});
}

void Checks::at_most(const std::string& id, const std::string& clause, double lhs, double rhs, double tol) {
  records.push_back({id, clause, 0, lhs, rhs, std::max(0.0, lhs - rhs), tol, false});
}

void Checks::at_least(const std::string& id, const std::string& clause, double lhs, double rhs, double tol) {
  records.push_back({id, clause, 0, lhs, rhs, std::max(0.0, rhs - lhs), tol, false});
}

void Checks::flag(const std::string& id, const std::string& clause, bool ok) {
  records.push_back({id, clause, 0, ok ? 1.0 : 0.0, 1.0, ok ? 0.0 : 1.0, 0.5, false});
}

json make_state_pair(Rng& rng, int d) {
  return {{"kind", "state"}, {"d", d}, {"phi", io::mat_to_json(rng.density(d))}, {"psi", io::mat_to_json(rng.density(d))}};
}

json make_bipartite(Rng& rng, int da, int db) {
  return {{"kind", "bipartite"}, {"da", da}, {"db", db}, {"omega", io::mat_to_json(rng.density(da * db))}};
}

json make_split_pair(Rng& rng, int da, int db) {
  return {{"kind", "split_pair"}, {"da", da}, {"db", db}, {"omega", io::vec_to_json(rng.unit_vector(da * db * da * db))}};
}

json make_inclusion(Rng& rng, const std::vector<Block>& blocks) {
  Eigen::Index d = 0;
  bool abelian = true;
  for (const auto& b : blocks) {
    d += static_cast<Eigen::Index>(b.n) * b.m;
    abelian = abelian && b.n == 1 && b.m == 1;
  }
  const Mat v = abelian ? Mat(Mat::Identity(d, d)) : rng.unitary(d);
  std::vector<double> w;
  double total = 0.0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    w.push_back(rng.uniform() + 0.1);
    total += w.back();
  }
  Mat inner = Mat::Zero(d, d);
  Eigen::Index off = 0;
  json jb = json::array();
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    const Eigen::Index sz = static_cast<Eigen::Index>(b.n) * b.m;
    inner.block(off, off, sz, sz) = (w[k] / total) * kron(rng.density(b.n), rng.density(b.m));
    off += sz;
    jb.push_back({b.n, b.m});
  }
  return {{"kind", "inclusion"},
          {"ambient", d},
          {"blocks", jb},
          {"basis", io::mat_to_json(v)},
          {"rho", io::mat_to_json(Mat(v * inner * v.adjoint()))}};
}

void eval_pipeline(const json& inst, Checks& c) {
  const SplitPair sp = split_pair_from(inst);
  c.flag("standard", "Omega is cyclic and separating for A v B", sp.joint_standard());
  if (!sp.joint_standard()) return;
  const auto& sys = sp.system();
  const double ei = mutual_information_formula(sys, sp.state());
  const auto impl = standard_implementation(sp);
  const int db = static_cast<int>(sys.db());
  const FdAlgebra f(sp.dim(), {Block{static_cast<int>(sys.da() * sys.da()), db * db}}, impl.u.adjoint(), 1e-8);
  const auto xa = xi_map(sp, Side::A);
  const auto xb = xi_map(sp, Side::B);
  for (const auto& jp : inst.at("ps")) {
    const double p = jp.get<double>();
    // z_p is the smaller of the two sides; the product decomposition always uses Xi_A
    const auto r = pnorm_upper(xa, p);
    const double z = std::min(r.bound, pnorm_upper(xb, p).bound);
    const double mu = r.dec.mu();
    const auto pd = hs3_product_decomposition(sp, r.dec);
    c.equal(tagged("reconstruction", p), "omega(ab) = sum phi_j(a) psi_j(b) from a nuclear decomposition",
            pd.residual(sp), 0.0, 1e-8);
    const auto fs = four_split(sp, pd);
    c.at_most(tagged("four-split", p), "(1 + lambda)^p <= 4 mu_p", std::pow(1 + fs.lambda, p), 4 * pd.cost(p), 1e-12);
    const auto dom = dominating_separable(sp, pd);
    c.at_least(tagged("dominating-gap", p), "sigma - omega >= 0 on A (x) B", dom.min_eig_gap, 0.0, 1e-10);
    c.at_most(tagged("dominating-norm", p), "||sigma||^p <= mu_p", std::pow(dom.norm, p), mu, kIneqTol);
    c.at_least(tagged("mu-at-least-one", p), "mu_p >= 1", mu, 1.0, 1e-12);
    c.at_most(tagged("mutual-information-bound", p), "E_I <= c_p z + eta(z - 1) - eta(z)", ei,
              mutual_information_bound(z, p), kIneqTol);
    const auto wit = dominating_witness(sp, impl, dom);
    const auto ev = intermediate_entropy_eval(sp, f, {wit});
    c.flag(tagged("witness-dominates", p), "phi >= lambda omega on A v B for the witness", ev.accepted[0]);
    c.at_most(tagged("intermediate-entropy-bound", p), "intermediate entropy <= z ln z + c_p z^p", ev.value,
              otani_bound(r.bound, p), kIneqTol);
  }
}

void eval_canonical(const json& inst, Checks& c) {
  const SplitPair sp = split_pair_from(inst);
  c.flag("standard", "Omega is cyclic and separating for A v B", sp.joint_standard());
  if (!sp.joint_standard()) return;
  const auto impl = standard_implementation(sp);
  const std::string si = "standard implementation: ";
  c.equal("implementation-unitary", si + "U is unitary", impl.unitarity, 0, 1e-9);
  c.equal("implementation-intertwines", si + "U a b U^* = a (x) b", impl.intertwining, 0, 1e-9);
  c.equal("implementation-conjugation", si + "U J U^* = J_A (x) J_B", impl.j_relation, 0, 1e-9);
  c.equal("implementation-cone", si + "U maps the natural cone onto the product cone", impl.cone_residual, 0, 1e-8);
  const auto cf = canonical_factor(sp, impl);
  const std::string cn = "canonical factor: ";
  c.equal("a-in-f", cn + "A is contained in F", cf.a_in_f, 0, 1e-9);
  c.equal("f-in-b-prime", cn + "F is contained in B'", cf.f_in_b_prime, 0, 1e-9);
  c.equal("j-invariance", cn + "J F J = F", cf.j_invariance, 0, 1e-9);
  c.equal("join-identity", cn + "A v JAJ = B' cap JB'J", cf.join_identity, 0, 1e-9);
  c.equal("f-equals-join", cn + "F = A v JAJ", cf.f_equals_join, 0, 1e-9);
  c.equal("f-prime-identity", cn + "F' = B v JBJ", cf.f_prime_identity, 0, 1e-9);
  c.flag("type-i-factor", cn + "trivial center and a minimal projection", cf.factor);
  const auto ec = canonical_entanglement_entropy(sp, impl);
  c.equal("entropy-symmetry", "S_F(omega) = S_F'(omega)", ec.s_f, ec.s_f_prime, 1e-8);
  c.equal("entropy-formula", "E_C through U vs E_C through the square root of rho_AB", ec.s_f,
          canonical_entanglement_entropy(sp.system(), sp.state()), 1e-8);
  c.at_most("ei-vs-ec", "E_I <= 2 E_C", ec.mutual_information, 2 * ec.s_f, 1e-8);
}

const std::vector<SuiteDef>& registry() {
  static const std::vector<SuiteDef> defs{
      {"relative-entropy-routes", 200, false, make_routes, eval_routes},
      {"support", 50, false, make_support, eval_support},
      {"relative-entropy-properties", 100, false, make_re_properties, eval_re_properties},
      {"entropy", 100, false, make_entropy, eval_entropy},
      {"conditional", 100, false, make_conditional, eval_conditional},
      {"entanglement", 20, false, make_entanglement, eval_entanglement},
      {"bell", 1, true, make_bell, eval_bell},
      {"pipeline", 100, false, make_pipeline, eval_pipeline},
      {"jones", 50, false, make_jones, eval_jones},
      {"canonical-factor", 50, false, make_canonical, eval_canonical},
      {"scan", 1, true, make_scan, eval_scan},
  };
  return defs;
}

}  // namespace vnlab::detail
