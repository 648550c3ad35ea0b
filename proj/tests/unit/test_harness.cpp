#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "vnlab/errors.hpp"
#include "vnlab/harness.hpp"
#include "vnlab/random.hpp"
#include "vnlab/serialize.hpp"

using namespace vnlab;
using nlohmann::json;

namespace {

std::string data_file(const std::string& name) {
  std::ifstream in(std::string(VNLAB_TEST_DATA) + "/" + name);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool same_bits(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(cplx) * static_cast<std::size_t>(a.size())) == 0;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Usage;
}

double value_of(const std::string& text) { return json::parse(text).at("value").get<double>(); }

}  // namespace

TEST_CASE("matrices survive a JSON round trip bit for bit") {
  Rng rng(4);
  Mat m = rng.ginibre(3, 4);
  m(0, 0) = cplx(1.0 / 3.0, -0.0);
  m(1, 1) = cplx(std::numeric_limits<double>::denorm_min(), 1e-300);
  m(2, 3) = cplx(std::numeric_limits<double>::max(), -std::numeric_limits<double>::epsilon());
  const Mat back = matrix_from_json(matrix_to_json(m));
  CHECK(same_bits(m, back));
  CHECK(matrix_to_json(back) == matrix_to_json(m));
}

TEST_CASE("algebras and functionals round trip") {
  Rng rng(9);
  const auto a = make_algebra(canonicalize(5, {Block{1, 1}, Block{2, 2}}, rng.unitary(5)));
  const FdAlgebra b = algebra_from_json(algebra_to_json(*a));
  CHECK(b.blocks().size() == 2);
  CHECK(same_bits(a->basis_unitary(), b.basis_unitary()));
  const auto phi = Functional::from_ambient(a, rng.density(5));
  const Functional psi = functional_from_json(functional_to_json(phi));
  CHECK(same_bits(phi.density(), psi.density()));
  CHECK(kind_of([] { matrix_from_json("{\"rows\": 2}"); }) == ErrorKind::Usage);
  CHECK(kind_of([] { matrix_from_json("not json"); }) == ErrorKind::Usage);
}

TEST_CASE("suite runs are deterministic in the seed") {
  const auto a = run_suite("entropy", std::nullopt, 11, 3);
  const auto b = run_suite("entropy", std::nullopt, 11, 3);
  CHECK(to_json(a) == to_json(b));
  CHECK(to_tsv(a) == to_tsv(b));
  CHECK(to_json(run_suite("entropy", std::nullopt, 12, 3)) != to_json(a));
  CHECK(a.trials == 3);
  CHECK(a.all_pass());
}

TEST_CASE("tolerance override") {
  const auto zero = run_suite("relative-entropy-routes", 0.0, 3, 4);
  REQUIRE(!zero.checks.empty());
  CHECK(zero.failures() == static_cast<int>(zero.checks.size()));
  for (const auto& c : zero.checks) CHECK(c.tol == 0.0);
  const auto loose = run_suite("relative-entropy-routes", 1e300, 3, 4);
  CHECK(loose.all_pass());
  const auto dflt = run_suite("relative-entropy-routes", std::nullopt, 3, 4);
  for (std::size_t i = 0; i < dflt.checks.size(); ++i) {
    CHECK(dflt.checks[i].residual == zero.checks[i].residual);
    CHECK(dflt.checks[i].pass == (dflt.checks[i].residual < dflt.checks[i].tol));
  }
}

TEST_CASE("worst instance replays to the identical residual") {
  const auto r = run_suite("relative-entropy-properties", std::nullopt, 5, 6);
  REQUIRE(r.worst.has_value());
  const auto& w = *r.worst;
  CHECK(w.suite == "relative-entropy-properties");
  bool found = false;
  for (const auto& c : replay(w.suite, w.instance)) {
    if (c.id != w.check_id) continue;
    found = true;
    CHECK(c.residual == w.residual);
  }
  CHECK(found);

  // through the written report
  const json report = json::parse(to_json(r));
  CHECK(report.at("schema_version") == 1);
  const std::string inst = report.at("worst").at("instance").dump();
  for (const auto& c : replay(w.suite, inst))
    if (c.id == w.check_id) CHECK(c.residual == report.at("worst").at("residual").get<double>());
}

TEST_CASE("report layout") {
  const auto r = run_suite("support", std::nullopt, 2, 2);
  const json j = json::parse(to_json(r));
  CHECK(j.at("suite") == "support");
  CHECK(j.at("seed") == 2);
  CHECK(j.at("checks").size() == r.checks.size());
  std::istringstream tsv(to_tsv(r));
  std::string header;
  std::getline(tsv, header);
  CHECK(header == "check_id\tpaper_ref\tlhs\trhs\tresidual\tpass");
  int lines = 0;
  for (std::string line; std::getline(tsv, line);) ++lines;
  CHECK(lines == static_cast<int>(r.checks.size()));
}

TEST_CASE("suite registry") {
  const auto names = suite_names();
  CHECK(names.size() == 12);
  CHECK(std::find(names.begin(), names.end(), "all") != names.end());
  for (const auto& n : names)
    if (n != "all") CHECK(default_trials(n) >= 1);
  CHECK(default_trials("pipeline") == 100);
  CHECK(default_trials("jones") == 50);
  CHECK(kind_of([] { run_suite("no-such-suite", std::nullopt, 1); }) == ErrorKind::Usage);
  const auto broken = replay("entropy", "{}");
  REQUIRE(broken.size() == 1);
  CHECK(broken[0].id == "exception");
  CHECK_FALSE(broken[0].pass);
}

TEST_CASE("instance generation") {
  const std::string a = generate_instance("bipartite", {2, 3}, 5);
  CHECK(a == generate_instance("bipartite", {2, 3}, 5));
  CHECK(a != generate_instance("bipartite", {2, 3}, 6));
  const json j = json::parse(a);
  CHECK(j.at("kind") == "bipartite");
  CHECK(j.at("omega").at("rows") == 6);
  CHECK(json::parse(generate_instance("inclusion", {1, 2, 2, 1}, 1)).at("ambient") == 4);
  CHECK(kind_of([] { generate_instance("split_pair", {3, 3}, 1); }) == ErrorKind::Limit);
  CHECK(kind_of([] { generate_instance("state", {0}, 1); }) == ErrorKind::InvalidDimension);
  CHECK(kind_of([] { generate_instance("tripartite", {2}, 1); }) == ErrorKind::Usage);
}

TEST_CASE("certify a generated split pair") {
  const std::string sp = generate_instance("split_pair", {2, 2}, 4);
  const auto r = certify(sp, {0.5});
  CHECK(r.all_pass());
  CHECK(r.checks.size() > 20);
  CHECK(kind_of([&] { certify(sp, {1.5}); }) == ErrorKind::Parameter);
  CHECK(kind_of([] { certify(generate_instance("state", {2}, 1), {0.5}); }) == ErrorKind::Usage);
}

TEST_CASE("stored scenarios against closed forms") {
  const std::string states = data_file("diagonal_states.json");
  const double h = -0.75 * std::log(0.75) - 0.25 * std::log(0.25);
  CHECK(value_of(compute_quantity("entropy", states)) == doctest::Approx(h).epsilon(1e-13));
  const json re = json::parse(compute_quantity("relative-entropy", states));
  CHECK(re.at("value").get<double>() == doctest::Approx(std::log(2.0) - h).epsilon(1e-12));
  CHECK(re.at("modular").get<double>() == doctest::Approx(std::log(2.0) - h).epsilon(1e-10));

  // Werner state: spectrum {w + (1 - w)/4, (1 - w)/4 x3}, maximally mixed marginals
  const std::string werner = data_file("werner.json");
  const double w = json::parse(werner).at("werner_weight").get<double>();
  const double l0 = w + (1 - w) / 4, l1 = (1 - w) / 4;
  const double s = -l0 * std::log(l0) - 3 * l1 * std::log(l1);
  CHECK(value_of(compute_quantity("mutual-information", werner)) == doctest::Approx(2 * std::log(2.0) - s).epsilon(1e-12));
  CHECK(kind_of([&] { compute_quantity("entropy", werner); }) == ErrorKind::Usage);

  const std::string incl = data_file("diagonal_inclusion.json");
  CHECK(json::parse(compute_quantity("takesaki", incl)).at("value") == true);
  json skew = json::parse(incl);
  skew["rho"]["re"][1] = 0.1;
  skew["rho"]["re"][3] = 0.1;
  CHECK(json::parse(compute_quantity("takesaki", skew.dump())).at("value") == false);
  CHECK(kind_of([&] { compute_quantity("volume", incl); }) == ErrorKind::Usage);
}
