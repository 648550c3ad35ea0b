#include <doctest.h>

#include <cmath>

#include "vnlab/errors.hpp"
#include "vnlab/nuclearity.hpp"
#include "vnlab/random.hpp"

using namespace vnlab;

namespace {

Vec scan_vector(double s) {
  Vec psi = Vec::Zero(4);
  psi(0) = 1.0;
  psi(3) = std::exp(-s);
  psi.normalize();
  Vec chi = Vec::Zero(4);
  chi(0) = 1.0;
  return kron(psi, chi);
}

double trace_norm_2x2(const Vec& r) {
  Mat m(2, 2);
  m << r(0), r(1), r(2), r(3);
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues().sum();
}

double factored_cost(const Mat& e, const Mat& f) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < e.rows(); ++i) s += trace_norm_2x2(e.row(i).transpose()) * f.col(i).norm();
  return s;
}

// Random search over exact decompositions X = F E with 3 or 4 terms, refined by accept-if-better perturbations.
double brute_force_nuclear_norm(const Mat& x, Rng& rng, int starts) {
  Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeThinV);
  const Mat rows = svd.matrixV().leftCols(3).adjoint();
  double best = 1e300;
  for (int it = 0; it < starts; ++it) {
    const int k = it % 2 == 0 ? 3 : 4;
    Mat e = k == 3 ? Mat(rng.ginibre(3, 3) * rows) : rng.ginibre(4, 4);
    auto exact = [&](const Mat& c) { return (x * pinv(c, 1e-12) * c - x).norm() < 1e-9; };
    if (!exact(e)) continue;
    double cur = factored_cost(e, x * pinv(e, 1e-12));
    for (int step = 0; step < 200; ++step) {
      const Mat e2 = e + 0.05 * rng.ginibre(k, k) * e;
      if (!exact(e2)) continue;
      const double v = factored_cost(e2, x * pinv(e2, 1e-12));
      if (v < cur) {
        cur = v;
        e = e2;
      }
    }
    best = std::min(best, cur);
  }
  return best;
}

}  // namespace

TEST_CASE("split pair classification") {
  Rng rng(3);
  SplitPair generic(2, 2, rng.unit_vector(16));
  CHECK(generic.joint_standard());
  SplitPair scan(2, 2, scan_vector(1.0));
  CHECK_FALSE(scan.joint_standard());
  CHECK_NOTHROW(xi_map(scan, Side::A));
  CHECK_THROWS_AS(standard_implementation(scan), Error);

  Vec prod = Vec::Zero(16);
  prod(0) = 1.0;
  SplitPair degenerate(2, 2, prod);
  try {
    xi_map(degenerate, Side::A);
    FAIL("expected a standardness error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Standardness);
  }
  CHECK_THROWS_AS(SplitPair(2, 2, Vec::Ones(16)), Error);
}

TEST_CASE("Xi_A through matrix units on the scan family") {
  for (double s : {0.0, 0.7, 3.0}) {
    SplitPair sp(2, 2, scan_vector(s));
    const auto xa = xi_map(sp, Side::A);
    const double p0 = 1.0 / (1.0 + std::exp(-2 * s));
    const double p1 = 1.0 - p0;
    const double expected = std::pow(std::pow(p0, 0.25) + std::pow(p1, 0.25), 2);
    CHECK(matrix_unit_decomposition(xa, 1.0).mu() == doctest::Approx(expected).epsilon(1e-10));
    // columns are orthogonal with norms (p_k p_l)^{1/4}
    const Mat g = xa.matrix.adjoint() * xa.matrix;
    CHECK(std::abs(g(0, 1)) < 1e-12);
    CHECK(std::sqrt(g(1, 1).real()) == doctest::Approx(std::pow(p0 * p1, 0.25)).epsilon(1e-10));
    CHECK(pnorm_upper(xa, 1.0).bound <= expected + 1e-9);
  }
  double prev = 1e9;
  for (int s = 0; s <= 10; ++s) {
    SplitPair sp(2, 2, scan_vector(s));
    const double mu = pnorm_upper(xi_map(sp, Side::A), 1.0).bound;
    CHECK(mu <= prev + 1e-8);
    prev = mu;
  }
}

TEST_CASE("p-norm strategies and parameter checks") {
  Rng rng(11);
  const Mat x = rng.ginibre(4, 3) * rng.ginibre(3, 4);
  const LinearMap map{make_algebra(full_matrix_algebra(2)), x};
  const auto svd = pnorm_upper(map, 1.0, PnormStrategy::Svd);
  const auto greedy = pnorm_upper(map, 1.0);
  CHECK(greedy.bound <= svd.bound + 1e-12);
  CHECK(greedy.dec.reconstruction_residual(map) < 1e-9);
  CHECK(svd.dec.reconstruction_residual(map) < 1e-9);
  const double oracle = brute_force_nuclear_norm(x, rng, 150);
  CHECK(greedy.bound <= 1.05 * oracle);
  // the nuclear norm dominates the norm of the map from (M_2, operator norm)
  CHECK(greedy.bound >= op_norm(x) - 1e-9);

  for (double p : {0.0, -0.5, 1.5}) {
    try {
      pnorm_upper(map, p);
      FAIL("expected a parameter error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Parameter);
    }
  }
}

TEST_CASE("product decomposition pipeline on random standard pairs") {
  Rng rng(21);
  for (int trial = 0; trial < 4; ++trial) {
    const int db = trial == 3 ? 3 : 2;
    SplitPair sp(2, db, rng.unit_vector(4 * db * db));
    REQUIRE(sp.joint_standard());
    const auto xa = xi_map(sp, Side::A);
    const double ei = mutual_information_formula(sp.system(), sp.state());
    const auto impl = standard_implementation(sp);
    CHECK(impl.unitarity < 1e-9);
    CHECK(impl.intertwining < 1e-9);
    CHECK(impl.j_relation < 1e-9);
    CHECK(impl.cone_residual < 1e-6);
    const FdAlgebra f(sp.dim(), {Block{4, db * db}}, impl.u.adjoint(), 1e-8);
    for (double p : {0.25, 0.5, 0.75}) {
      const auto r = pnorm_upper(xa, p);
      const double mu = r.dec.mu();
      const double z = r.bound;
      const auto pd = hs3_product_decomposition(sp, r.dec);
      CHECK(pd.residual(sp) < 1e-8);
      const auto fs = four_split(sp, pd);
      CHECK(std::pow(1 + fs.lambda, p) <= 4 * pd.cost(p) + 1e-12);
      CHECK(fs.plus.all_positive());
      const auto dom = dominating_separable(sp, pd);
      CHECK(dom.min_eig_gap >= -1e-10);
      CHECK(std::pow(dom.norm, p) <= mu + 1e-10);
      CHECK(mu >= 1.0 - 1e-12);
      CHECK(ei <= mutual_information_bound(z, p) + 1e-10);
      const auto wit = dominating_witness(sp, impl, dom);
      const auto ev = intermediate_entropy_eval(sp, f, {wit});
      CHECK(ev.accepted[0]);
      CHECK(ev.value <= otani_bound(z, p) + 1e-10);
    }
  }
}

TEST_CASE("product functionals are bounded by the Xi vectors") {
  Rng rng(5);
  SplitPair sp(2, 2, rng.unit_vector(16));
  const auto r = pnorm_upper(xi_map(sp, Side::A), 0.5);
  const auto pd = hs3_product_decomposition(sp, r.dec);
  REQUIRE(pd.terms.size() == r.dec.terms.size());
  for (std::size_t j = 0; j < pd.terms.size(); ++j) CHECK(pd.terms[j].b.norm() <= r.dec.terms[j].f.norm() + 1e-10);
}

TEST_CASE("stale decomposition is rejected") {
  Rng rng(8);
  SplitPair sp(2, 2, rng.unit_vector(16));
  SplitPair other(2, 2, rng.unit_vector(16));
  const auto dec = pnorm_upper(xi_map(other, Side::A), 0.5).dec;
  try {
    hs3_product_decomposition(sp, dec);
    FAIL("expected a stale decomposition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::StaleDecomposition);
  }
}

TEST_CASE("canonical factor and canonical entanglement entropy") {
  Rng rng(13);
  SplitPair sp(2, 2, rng.unit_vector(16));
  const auto impl = standard_implementation(sp);
  const auto cf = canonical_factor(sp, impl);
  CHECK(cf.a_in_f < 1e-9);
  CHECK(cf.f_in_b_prime < 1e-9);
  CHECK(cf.j_invariance < 1e-9);
  CHECK(cf.join_identity < 1e-9);
  CHECK(cf.f_equals_join < 1e-9);
  CHECK(cf.f_prime_identity < 1e-9);
  CHECK(cf.factor);
  const auto ec = canonical_entanglement_entropy(sp, impl);
  CHECK(std::abs(ec.s_f - ec.s_f_prime) < 1e-8);
  CHECK(ec.s_f == doctest::Approx(canonical_entanglement_entropy(sp.system(), sp.state())).epsilon(1e-9));
  CHECK(ec.mutual_information <= 2 * ec.s_f + 1e-8);

  // (|0000> + |1111>)/sqrt 2: classical correlation across A|B, copied into the doubling
  const auto sys = BipartiteSystem::matrices(2, 2);
  Mat rho = Mat::Zero(4, 4);
  rho(0, 0) = rho(3, 3) = 0.5;
  const Functional ghz = sys.state(rho);
  CHECK(canonical_entanglement_entropy(sys, ghz) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  Mat prod = Mat::Zero(4, 4);
  prod(0, 0) = 1.0;
  CHECK(std::abs(canonical_entanglement_entropy(sys, sys.state(prod))) < 1e-12);
}

TEST_CASE("bounds as functions of z") {
  CHECK(c_p(0.5) == doctest::Approx(2.0 / std::exp(1.0)));
  CHECK(mutual_information_bound(1.0, 0.5) == doctest::Approx(c_p(0.5)));
  CHECK(otani_bound(1.0, 0.25) == doctest::Approx(c_p(0.25)));
  CHECK_THROWS_AS(otani_bound(0.5, 0.5), Error);
}
