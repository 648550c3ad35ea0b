#include <doctest.h>

#include "vnlab/errors.hpp"
#include "vnlab/functional.hpp"
#include "vnlab/random.hpp"

using namespace vnlab;

namespace {

AlgebraRef two_block(Rng& rng) {
  return make_algebra(7, std::vector<Block>{Block{1, 3}, Block{2, 2}}, rng.unitary(7));
}

Mat random_element(const FdAlgebra& m, Rng& rng) {
  std::vector<Mat> parts;
  for (const auto& b : m.blocks()) parts.push_back(rng.ginibre(b.n, b.n));
  return m.embed(parts);
}

}  // namespace

TEST_CASE("kinds and norms") {
  Rng rng(2);
  auto m = two_block(rng);
  auto rho = Functional::from_ambient(m, rng.density(7));
  CHECK(rho.kind() == FunctionalKind::State);
  CHECK(rho.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((rho * 2.0).kind() == FunctionalKind::Positive);
  CHECK((rho - rho * 3.0).kind() == FunctionalKind::SelfAdjoint);
  CHECK((rho * cplx(0, 1)).kind() == FunctionalKind::General);
  CHECK_THROWS_AS(Functional(m, rng.ginibre(7, 7)), Error);
}

TEST_CASE("trace norm dominates sampled dual norm") {
  Rng rng(4);
  auto m = two_block(rng);
  const Functional phi(m, random_element(*m, rng));
  double best = 0.0;
  for (int s = 0; s < 1000; ++s) {
    Mat x = random_element(*m, rng);
    x /= op_norm(x);
    best = std::max(best, std::abs(phi(x)));
  }
  CHECK(best <= phi.norm() + 1e-6);
  // the polar isometry attains the norm
  const auto pp = polar(phi);
  CHECK(std::abs(phi(pp.u.adjoint())) == doctest::Approx(phi.norm()).epsilon(1e-10));
}

TEST_CASE("Jordan decomposition") {
  auto m2 = make_algebra(full_matrix_algebra(2));
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = -1;
  const auto j = jordan(Functional(m2, d));
  CHECK(std::abs(j.plus.density()(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(j.minus.density()(1, 1) - 1.0) < 1e-14);
  CHECK(j.plus.density().norm() == doctest::Approx(1.0));

  Rng rng(9);
  auto m = two_block(rng);
  const Functional phi(m, hermitian_part(random_element(*m, rng)));
  const auto jp = jordan(phi);
  CHECK((jp.plus - jp.minus - phi).density().norm() < 1e-10);
  CHECK(phi.norm() == doctest::Approx(jp.plus.norm() + jp.minus.norm()).epsilon(1e-10));
  const auto pos = Functional::from_ambient(m, rng.density(7));
  CHECK(jordan(pos).minus.density().norm() < 1e-12);
}

TEST_CASE("polar decomposition and polarization") {
  Rng rng(10);
  auto m = two_block(rng);
  const Functional phi(m, random_element(*m, rng));
  const auto pp = polar(phi);
  CHECK(pp.abs.is_positive());
  for (const auto& x : m->basis()) CHECK(std::abs(pp.abs(pp.u * x) - phi(x)) < 1e-10);
  CHECK(pp.abs.norm() == doctest::Approx(phi.norm()).epsilon(1e-10));

  auto m3 = make_algebra(full_matrix_algebra(3));
  const Functional f(m3, rng.hermitian(3));
  const auto w = polarization(f);
  for (const auto& x : m3->basis()) {
    cplx s = 0;
    cplx ia = 1;
    for (const auto& o : w) {
      s += ia * o(x);
      ia *= cplx(0, 1);
    }
    CHECK(std::abs(s - f(x)) < 1e-10);
  }
  const Functional g(m, random_element(*m, rng));
  for (const auto& o : polarization(g)) {
    CHECK(o.is_positive());
    CHECK(o.norm() <= g.norm() + 1e-12);
  }
}

TEST_CASE("restriction and adjoint") {
  Rng rng(12);
  auto m4 = make_algebra(full_matrix_algebra(4));
  auto sub = make_algebra(tensor(full_matrix_algebra(2), commutant(full_matrix_algebra(2))));
  const auto phi = Functional(m4, rng.density(4));
  const auto r = phi.restrict_to(sub);
  const Mat x = kron(rng.ginibre(2, 2), Mat::Identity(2, 2));
  CHECK(std::abs(r(x) - phi(x)) < 1e-12);
  const Functional g(m4, rng.ginibre(4, 4));
  CHECK(std::abs(g.adjoint()(x) - std::conj(g(x.adjoint()))) < 1e-12);
}
