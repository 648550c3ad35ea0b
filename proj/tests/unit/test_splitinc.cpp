#include <doctest.h>

#include <cmath>

#include "vnlab/errors.hpp"
#include "vnlab/random.hpp"
#include "vnlab/splitinc.hpp"

using namespace vnlab;

namespace {

AlgebraRef diagonal2() { return make_algebra(FdAlgebra(2, {Block{1, 1}, Block{1, 1}}, Mat::Identity(2, 2))); }

AlgebraRef m_full(int n) { return make_algebra(full_matrix_algebra(n)); }

// N = V (M_2 (x) 1_2) V^* inside M_4 with a density of the form V (a (x) b) V^*.
struct Instance {
  AlgebraRef m, n;
  Functional phi;
};

Instance tensor_inclusion(Rng& rng) {
  const Mat v = rng.unitary(4);
  auto n = make_algebra(FdAlgebra(4, {Block{2, 2}}, v));
  auto m = m_full(4);
  const Mat rho = v * kron(rng.density(2), rng.density(2)) * v.adjoint();
  return {m, n, Functional(m, rho)};
}

}  // namespace

TEST_CASE("Takesaki criterion examples") {
  const auto m = m_full(2);
  const auto n = diagonal2();
  const Functional tr(m, Mat::Identity(2, 2) / 2.0);
  CHECK(takesaki_check(*m, *n, tr).holds);
  Mat diag = Mat::Zero(2, 2);
  diag(0, 0) = 0.7;
  diag(1, 1) = 0.3;
  CHECK(takesaki_check(*m, *n, Functional(m, diag)).holds);
  Mat off = diag;
  off(0, 1) = off(1, 0) = 0.2;
  const auto r = takesaki_check(*m, *n, Functional(m, off));
  CHECK_FALSE(r.holds);
  CHECK(r.commutator_residual > 1e-6);
  try {
    conditional_expectation(m, n, Functional(m, off));
    FAIL("expected a no-expectation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoExpectation);
  }
  Mat pure = Mat::Zero(2, 2);
  pure(0, 0) = 1.0;
  CHECK_THROWS_AS(takesaki_check(*m, *n, Functional(m, pure)), Error);
}

TEST_CASE("conditional expectation special cases") {
  Rng rng(2);
  const auto m = m_full(3);
  const Functional phi(m, rng.density(3));
  const auto id = conditional_expectation(m, m, phi);
  const Mat x = rng.ginibre(3, 3);
  CHECK(op_norm(id(x) - x) < 1e-10);
  const auto scalars = make_algebra(commutant(full_matrix_algebra(3)));
  const auto sc = conditional_expectation(m, scalars, phi);
  CHECK(op_norm(sc(x) - phi(x) * Mat::Identity(3, 3)) < 1e-10);

  const auto m2 = m_full(2);
  Mat diag = Mat::Zero(2, 2);
  diag(0, 0) = 0.6;
  diag(1, 1) = 0.4;
  const auto pinch = conditional_expectation(m2, diagonal2(), Functional(m2, diag));
  const Mat y = rng.ginibre(2, 2);
  Mat expected = Mat::Zero(2, 2);
  expected(0, 0) = y(0, 0);
  expected(1, 1) = y(1, 1);
  CHECK(op_norm(pinch(y) - expected) < 1e-12);
}

TEST_CASE("expectation axioms and Jones structure on random inclusions") {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto inst = tensor_inclusion(rng);
    REQUIRE(takesaki_check(*inst.m, *inst.n, inst.phi).holds);
    const auto eps = conditional_expectation(inst.m, inst.n, inst.phi);
    const auto ax = check_expectation(eps);
    CHECK(ax.unital < 1e-9);
    CHECK(ax.idempotent < 1e-9);
    CHECK(ax.bimodular < 1e-9);
    CHECK(ax.preserving < 1e-9);
    CHECK(ax.onto < 1e-9);
    CHECK(ax.min_positivity > -1e-9);
    const auto jr = verify_jones_structure(eps);
    CHECK(jr.item1 < 1e-9);
    CHECK(jr.item2 < 1e-9);
    CHECK(jr.item3 < 1e-9);
    CHECK(jr.item4_min_singular > 1e-9);
    CHECK(jr.item4_formula < 1e-9);
    CHECK(jr.uniqueness < 1e-9);
    const auto cone = verify_natural_cone(eps, 10, 100 + trial);
    CHECK(cone.forward < 1e-9);
    CHECK(cone.backward < 1e-9);
    CHECK(cone.invariant < 1e-9);
  }
}

TEST_CASE("Jones structure for the diagonal inclusion") {
  const auto m = m_full(2);
  const auto eps = conditional_expectation(m, diagonal2(), Functional(m, Mat::Identity(2, 2) / 2.0));
  CHECK(verify_jones_structure(eps).pass());
  // e projects the HS space onto the diagonal matrices
  const Mat& e = eps.jones_projection();
  CHECK(std::abs(e.trace().real() - 2.0) < 1e-12);
  const auto full = conditional_expectation(m, m, Functional(m, Mat::Identity(2, 2) / 2.0));
  CHECK(op_norm(full.jones_projection() - Mat::Identity(4, 4)) < 1e-12);
  CHECK(verify_jones_structure(full).pass());
}

TEST_CASE("span residual") {
  std::vector<Mat> a{Mat::Identity(2, 2)}, b{2.0 * Mat::Identity(2, 2)};
  CHECK(span_residual(a, b) < 1e-14);
  b.push_back(Mat::Zero(2, 2));
  b.back()(0, 1) = 1.0;
  CHECK(span_residual(a, b) == 1.0);
}
