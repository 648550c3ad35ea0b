#include <doctest.h>

#include <cmath>

#include "vnlab/entanglement.hpp"
#include "vnlab/errors.hpp"
#include "vnlab/random.hpp"

using namespace vnlab;

namespace {

Mat bell() {
  Vec v = Vec::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v * v.adjoint();
}

Mat proj(Eigen::Index n, Eigen::Index i) {
  Mat p = Mat::Zero(n, n);
  p(i, i) = 1.0;
  return p;
}

ProductEnsemble random_ensemble(const BipartiteSystem& sys, Rng& rng, int terms) {
  ProductEnsemble e;
  std::vector<double> w;
  double s = 0;
  for (int j = 0; j < terms; ++j) {
    w.push_back(rng.uniform() + 0.1);
    s += w.back();
  }
  for (int j = 0; j < terms; ++j)
    e.terms.push_back({Functional(sys.a_local(), rng.density(sys.da()) * (w[j] / s)),
                       Functional(sys.b_local(), rng.density(sys.db()))});
  return e;
}

}  // namespace

TEST_CASE("system structure") {
  auto sys = BipartiteSystem::matrices(2, 3, 2);
  CHECK(sys.ambient_dim() == 12);
  CHECK(check_commuting(*sys.a(), *sys.b(), 1e-10));
  CHECK(sys.iso_residual() < 1e-12);
}

TEST_CASE("mutual information closed forms") {
  auto sys = BipartiteSystem::matrices(2, 2);
  const auto b = sys.state(bell());
  CHECK(mutual_information(sys, b).value() == doctest::Approx(2 * std::log(2.0)).epsilon(1e-12));
  const auto cl = sys.state(0.5 * (proj(4, 0) + proj(4, 3)));
  CHECK(mutual_information(sys, cl).value() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  Rng rng(1);
  const auto prod = sys.product(Functional(sys.a_local(), rng.density(2)), Functional(sys.b_local(), rng.density(2)));
  CHECK(std::abs(mutual_information(sys, prod).value()) < 1e-12);
  auto sys23 = BipartiteSystem::matrices(2, 3);
  for (int t = 0; t < 10; ++t) {
    const auto w = sys23.state(rng.density(6));
    CHECK(mutual_information(sys23, w).value() == doctest::Approx(mutual_information_formula(sys23, w)).epsilon(1e-10));
  }
}

TEST_CASE("relative entanglement bounds") {
  auto sys = BipartiteSystem::matrices(2, 2);
  const auto r = relative_entanglement_upper(sys, sys.state(bell()));
  CHECK(std::abs(r.upper_bound - std::log(2.0)) < 1e-3);
  CHECK(r.witness.all_positive());
  CHECK(relative_entropy_to(sys, sys.state(bell()), r.witness).value() == doctest::Approx(r.upper_bound));

  Rng rng(2);
  const auto sep = random_ensemble(sys, rng, 3);
  EROptions o;
  o.restarts = 2;
  o.warm_starts = {sep};
  CHECK(relative_entanglement_upper(sys, sep.induced(sys), o).upper_bound < 1e-9);

  for (int t = 0; t < 5; ++t) {
    const auto w = sys.state(rng.density(4));
    EROptions q;
    q.restarts = 4;
    const double ub = relative_entanglement_upper(sys, w, q).upper_bound;
    CHECK(ub >= -1e-12);
    CHECK(ub <= mutual_information(sys, w).value() + 1e-8);
  }
}

TEST_CASE("separable bound e1") {
  auto sys = BipartiteSystem::matrices(2, 2);
  ProductEnsemble two;
  two.terms.push_back({Functional(sys.a_local(), 0.5 * proj(2, 0)), Functional(sys.b_local(), proj(2, 0))});
  two.terms.push_back({Functional(sys.a_local(), 0.5 * proj(2, 1)), Functional(sys.b_local(), proj(2, 1))});
  const auto e = separable_bound_e1(sys, two);
  CHECK(e.bound == doctest::Approx(std::log(2.0)));
  CHECK(e.mutual_information == doctest::Approx(std::log(2.0)));
  CHECK(e.holds);
  Rng rng(5);
  const auto r5 = separable_bound_e1(sys, random_ensemble(sys, rng, 5));
  CHECK(r5.holds);
  two.terms.pop_back();
  CHECK_THROWS_AS(separable_bound_e1(sys, two), Error);
}

TEST_CASE("separable operations") {
  auto sys = BipartiteSystem::matrices(2, 2);
  const auto b = sys.state(bell());
  const auto id = apply_separable_operation(sys, {{CpMap::identity(2), CpMap::identity(2)}}, b);
  REQUIRE(id.size() == 1);
  CHECK(id[0].probability == doctest::Approx(1.0));
  // two-outcome projective measurement on A
  std::vector<LocalOperation> meas{{CpMap{{proj(2, 0)}}, CpMap::identity(2)}, {CpMap{{proj(2, 1)}}, CpMap::identity(2)}};
  const auto outs = apply_separable_operation(sys, meas, b);
  REQUIRE(outs.size() == 2);
  EROptions o;
  o.restarts = 8;
  double avg = 0;
  for (const auto& oc : outs) avg += oc.probability * relative_entanglement_upper(sys, oc.state, o).upper_bound;
  CHECK(avg <= relative_entanglement_upper(sys, b, o).upper_bound + 1e-3);
  // non-cp Choi (transpose map) is rejected
  Mat choi = Mat::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) choi(i * 2 + j, j * 2 + i) = 1.0;
  CHECK_THROWS_AS(CpMap::from_choi(choi, 2, 2), Error);
  // identity channel Choi round trip
  Mat ch = Mat::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) ch(i * 2 + i, j * 2 + j) = 1.0;
  const auto idm = CpMap::from_choi(ch, 2, 2);
  Rng rng(3);
  const Mat r = rng.density(2);
  CHECK((idm.apply(r) - r).norm() < 1e-12);
}
