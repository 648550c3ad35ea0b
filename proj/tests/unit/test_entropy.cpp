#include <doctest.h>

#include <cmath>

#include "vnlab/entropy.hpp"
#include "vnlab/errors.hpp"
#include "vnlab/random.hpp"

using namespace vnlab;

namespace {

Mat diag(std::initializer_list<double> v) {
  Mat d = Mat::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i, i) = x, ++i;
  return d;
}

// Independent Umegaki value through a dense matrix logarithm of the ambient densities.
double dense_umegaki(const Mat& a, const Mat& b) {
  return (a * (psd_log(a) - psd_log(b))).trace().real();
}

}  // namespace

TEST_CASE("closed form values") {
  auto m2 = make_algebra(full_matrix_algebra(2));
  const Functional p(m2, diag({1, 0})), u(m2, diag({0.5, 0.5}));
  for (auto meth : {RelEntMethod::Umegaki, RelEntMethod::Modular}) {
    CHECK(relative_entropy(p, u, meth).value() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(relative_entropy(u, p, meth).is_infinite());
    CHECK(relative_entropy(u, u, meth).value() == doctest::Approx(0.0));
  }
  CHECK(von_neumann_entropy(Functional(m2, diag({0.75, 0.25}))) ==
        doctest::Approx(-0.75 * std::log(0.75) - 0.25 * std::log(0.25)));
  auto m3 = make_algebra(full_matrix_algebra(3));
  CHECK(von_neumann_entropy(Functional(m3, Mat::Identity(3, 3) / 3.0)) == doctest::Approx(std::log(3.0)));
  CHECK(von_neumann_entropy(p) == doctest::Approx(0.0));
  CHECK(ExtendedReal::infinity() == ExtendedReal::infinity());
  CHECK_FALSE(ExtendedReal(1e308 * 10) == ExtendedReal::infinity());
}

TEST_CASE("routes agree on random pairs") {
  Rng rng(77);
  for (int t = 0; t < 20; ++t) {
    auto m = make_algebra(7, std::vector<Block>{Block{1, 3}, Block{2, 2}}, rng.unitary(7));
    const auto a = Functional::from_ambient(m, rng.density(7));
    const auto b = Functional::from_ambient(m, rng.density(7));
    const double u = relative_entropy(a, b).value();
    CHECK(std::abs(u - relative_entropy(a, b, RelEntMethod::Modular).value()) < 1e-8);
    CHECK(u >= 0.0);
  }
  auto m3 = make_algebra(full_matrix_algebra(3));
  const Mat ra = rng.density(3), rb = rng.density(3);
  CHECK(relative_entropy(Functional(m3, ra), Functional(m3, rb)).value() ==
        doctest::Approx(dense_umegaki(ra, rb)).epsilon(1e-10));
}

TEST_CASE("cocycle derivative") {
  auto m2 = make_algebra(full_matrix_algebra(2));
  const Functional p(m2, diag({1, 0})), u(m2, diag({0.5, 0.5}));
  const auto c = relative_entropy_cocycle_check(p, u, 1e-4);
  CHECK(std::abs(c.estimate - std::log(2.0)) < 1e-6);
  CHECK_THROWS_AS(relative_entropy_cocycle_check(u, p, 1e-4), Error);
  CHECK_THROWS_AS(relative_entropy_cocycle_check(p, u, 1.0), Error);
  Rng rng(3);
  auto m3 = make_algebra(full_matrix_algebra(3));
  const Functional a(m3, rng.density(3)), b(m3, rng.density(3));
  const auto r = relative_entropy_cocycle_check(a, b, 1e-4);
  CHECK(std::abs(r.estimate - r.reference) < 1e-4);
  const auto z = relative_entropy_cocycle_check(a, a, 1e-3);
  CHECK(std::abs(z.estimate) < 1e-6);
}

TEST_CASE("decomposition values") {
  auto m2 = make_algebra(full_matrix_algebra(2));
  const Functional phi(m2, diag({0.75, 0.25}));
  CHECK(entropy_decomposition_value(phi, {{1.0, phi}}) == doctest::Approx(0.0));
  CHECK(entropy_decomposition_value(phi, spectral_ensemble(phi)) ==
        doctest::Approx(von_neumann_entropy(phi)).epsilon(1e-12));
  CHECK_THROWS_AS(entropy_decomposition_value(phi, {{0.5, phi}}), Error);
  Rng rng(13);
  for (int t = 0; t < 100; ++t) {
    const Vec v1 = rng.unit_vector(2), v2 = rng.unit_vector(2);
    const Functional s1(m2, v1 * v1.adjoint()), s2(m2, v2 * v2.adjoint());
    const Functional mix = s1 * 0.5 + s2 * 0.5;
    CHECK(entropy_decomposition_value(mix, {{0.5, s1}, {0.5, s2}}) <= von_neumann_entropy(mix) + 1e-8);
  }
}

TEST_CASE("conditional entropy estimates") {
  Rng rng(14);
  auto m2 = make_algebra(full_matrix_algebra(2));
  const Functional phi(m2, rng.density(2));
  auto scalars = make_algebra(commutant(full_matrix_algebra(2)));
  ConditionalEntropyOptions small;
  small.max_terms = 3;
  small.restarts = 2;
  CHECK(conditional_entropy(phi, scalars, small).lower_estimate == doctest::Approx(0.0));
  const auto full = conditional_entropy(phi, m2, small);
  CHECK(full.lower_estimate == doctest::Approx(von_neumann_entropy(phi)).epsilon(1e-10));

  // monotone in the budget
  auto m4 = make_algebra(full_matrix_algebra(4));
  auto a = make_algebra(tensor(full_matrix_algebra(2), commutant(full_matrix_algebra(2))));
  const Functional w(m4, rng.density(4));
  ConditionalEntropyOptions o1;
  o1.max_terms = 2;
  o1.restarts = 2;
  o1.iterations = 10;
  ConditionalEntropyOptions o2 = o1;
  o2.max_terms = 3;
  o2.restarts = 3;
  const double v1 = conditional_entropy(w, a, o1).lower_estimate;
  const double v2 = conditional_entropy(w, a, o2).lower_estimate;
  CHECK(v1 <= v2);
  CHECK(v2 <= von_neumann_entropy(w.restrict_to(a)) + 1e-8);
  CHECK_THROWS_AS(conditional_entropy(Functional(a, a->conditional_expectation(w.density())), m4), Error);
}
