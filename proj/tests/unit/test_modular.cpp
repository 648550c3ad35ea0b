#include <doctest.h>

#include <algorithm>

#include "vnlab/errors.hpp"
#include "vnlab/modular.hpp"
#include "vnlab/random.hpp"

using namespace vnlab;

namespace {

Mat diag2(double a, double b) {
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = a;
  d(1, 1) = b;
  return d;
}

// Operator Z -> A Z B on row-major n x n coordinates.
Mat lr(const Mat& a, const Mat& b) { return kron(a, b.transpose()); }

}  // namespace

TEST_CASE("GNS of M_2 with a diagonal state") {
  auto m = make_algebra(full_matrix_algebra(2));
  const auto sf = gns(m, Functional(m, diag2(0.75, 0.25)));
  auto ev = herm_eig(sf.delta).values;
  std::vector<double> got(ev.data(), ev.data() + ev.size());
  std::vector<double> want{1.0 / 3.0, 1.0, 1.0, 3.0};
  for (std::size_t i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  const auto tr = gns(m, Functional(m, diag2(0.5, 0.5)));
  CHECK((tr.delta - Mat::Identity(4, 4)).norm() < 1e-12);
  CHECK_THROWS_AS(gns(m, Functional(m, diag2(1.0, 0.0))), Error);
}

TEST_CASE("standard form invariants on random algebras") {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    auto m = make_algebra(7, std::vector<Block>{Block{1, 3}, Block{2, 2}}, rng.unitary(7));
    const auto phi = Functional::from_ambient(m, rng.density(7));
    const auto sf = gns(m, phi);
    const auto r = check_standard_form(sf);
    CHECK(r.jmj < 1e-9);
    CHECK(r.modular_flow < 1e-9);
    CHECK(r.tomita < 1e-9);
    CHECK(r.omega_fixed < 1e-9);
    // vector state of Omega is phi
    CHECK((vector_state(sf, sf.omega).density() - phi.density()).norm() < 1e-10);
  }
  auto m1 = make_algebra(full_matrix_algebra(1));
  const auto sf1 = gns(m1, Functional(m1, Mat::Identity(1, 1)));
  CHECK(sf1.space_dim() == 1);
  CHECK(std::abs(sf1.delta(0, 0) - 1.0) < 1e-14);
}

TEST_CASE("relative modular operator in the HS picture") {
  Rng rng(5);
  auto m = make_algebra(full_matrix_algebra(3));
  const Mat rp = rng.density(3);
  const Mat rs = rng.density(3);
  const Functional phi(m, rp), psi(m, rs);
  const auto sf = gns(m, phi);
  const Vec xi = hs_vector(phi), eta = hs_vector(psi);
  const auto r = relative_modular(sf, xi, eta);
  // Delta_{xi,eta} = L_{rho_phi} R_{rho_psi^{-1}}
  CHECK((r.delta - lr(rp, rs.inverse())).norm() < 1e-9);
  const auto r2 = relative_modular(sf, eta, xi);
  CHECK((r2.delta - lr(rs, rp.inverse())).norm() < 1e-9);
  // J Delta^{1/2} J = Delta_{eta,xi}^{-1/2}
  const Mat lhs = r.j.conjugate_op(psd_power(r.delta, 0.5));
  CHECK((lhs - psd_power(r2.delta, -0.5)).norm() < 1e-9);
  // both vectors in the natural cone: the polar isometry equals J
  CHECK((r.j.linear - sf.j.linear).norm() < 1e-9);
  // xi = eta = Omega reproduces Delta
  CHECK((relative_modular(sf, sf.omega, sf.omega).delta - sf.delta).norm() < 1e-12);
  CHECK_THROWS_AS(relative_modular(sf, Vec::Zero(9), eta), Error);
}

TEST_CASE("relative modular supports") {
  Rng rng(6);
  auto m = make_algebra(full_matrix_algebra(3));
  const Functional phi(m, rng.density(3));
  const Vec v = rng.unit_vector(3);
  const Functional psi(m, v * v.adjoint());
  const auto sf = gns(m, phi);
  const auto r = relative_modular(sf, hs_vector(phi), hs_vector(psi));
  const Mat supp = support_projection(r.delta, 1e-10);
  CHECK((supp - r.s_phi * r.s_psi_prime).norm() < 1e-9);
  CHECK(std::abs(supp.trace().real() - 3.0) < 1e-9);
}

TEST_CASE("commutant relative operator") {
  Rng rng(7);
  auto m = make_algebra(full_matrix_algebra(2));
  const Functional phi(m, rng.density(2)), psi(m, rng.density(2));
  const auto sf = gns(m, phi);
  const Vec xi = hs_vector(phi), eta = hs_vector(psi);
  const FdAlgebra comm = commutant(*sf.rep);
  const Mat dprime = relative_modular(comm, eta, xi).delta;
  const Mat d = relative_modular(*sf.rep, xi, eta).delta;
  CHECK((psd_power(dprime, 0.5) - psd_power(d, -0.5)).norm() < 1e-9);
}

TEST_CASE("natural cone") {
  Rng rng(8);
  auto m = make_algebra(7, std::vector<Block>{Block{1, 3}, Block{2, 2}}, rng.unitary(7));
  const auto phi = Functional::from_ambient(m, rng.density(7));
  const auto sf = gns(m, phi);
  CHECK((natural_cone_vector(sf, phi) - sf.omega).norm() < 1e-10);
  const auto psi = Functional::from_ambient(m, rng.density(7));
  const Vec v = natural_cone_vector(sf, psi);
  CHECK(natural_cone_contains(sf, v));
  CHECK((vector_state(sf, v).density() - psi.density()).norm() < 1e-9);
  CHECK((v - hs_vector(psi)).norm() < 1e-9);
  std::vector<Mat> parts{rng.ginibre(1, 1), rng.ginibre(2, 2)};
  const Mat x = m->embed(parts);
  CHECK(natural_cone_contains(sf, cone_image(sf, x.adjoint() * x)));
  CHECK_FALSE(natural_cone_contains(sf, cone_image(sf, x + x.adjoint() - 10.0 * Mat::Identity(7, 7))));
}

TEST_CASE("cone vectors at a non-positive reference vector") {
  Rng rng(18);
  auto m = make_algebra(full_matrix_algebra(3));
  auto rep = hs_space(*m);
  // Omega = D^{1/2} u for a unitary u is cyclic and separating but not in the HS cone.
  const Mat d = rng.density(3);
  const Vec omega = flatten_rows(Mat(psd_power(d, 0.5) * rng.unitary(3)));
  const auto sf = standard_form(m, rep, omega);
  for (int i = 0; i < 3; ++i) {
    const auto psi = Functional(m, rng.density(3));
    const Vec xi = hs_vector(psi);
    const Vec spectral = psd_power(relative_modular(sf, xi, omega).delta, 0.5) * omega;
    const Vec v = natural_cone_vector(sf, psi);
    CHECK((v - spectral).norm() < 1e-9);
    CHECK(natural_cone_contains(sf, v));
    CHECK((vector_state(sf, v).density() - psi.density()).norm() < 1e-9);
  }
}

TEST_CASE("Connes cocycle") {
  auto m = make_algebra(full_matrix_algebra(2));
  const Functional phi(m, diag2(0.7, 0.3)), psi(m, diag2(0.4, 0.6));
  const double t = 0.8;
  const Mat u = connes_cocycle(phi, psi, t);
  CHECK(std::abs(u(0, 0) - std::pow(cplx(0.7 / 0.4), cplx(0, t))) < 1e-10);
  CHECK(std::abs(u(1, 1) - std::pow(cplx(0.3 / 0.6), cplx(0, t))) < 1e-10);
  CHECK((connes_cocycle(phi, phi, 1.3) - Mat::Identity(2, 2)).norm() < 1e-10);

  Rng rng(30);
  auto m3 = make_algebra(full_matrix_algebra(3));
  const Functional a(m3, rng.density(3)), b(m3, rng.density(3));
  const double s = -0.45;
  const Mat lhs = connes_cocycle(a, b, t + s);
  const Mat rhs = connes_cocycle(a, b, t) * modular_flow(b, connes_cocycle(a, b, s), t);
  CHECK((lhs - rhs).norm() < 1e-8);
  const Mat w = connes_cocycle(a, b, t);
  CHECK((w * w.adjoint() - Mat::Identity(3, 3)).norm() < 1e-10);
  CHECK((w.adjoint() - connes_cocycle(b, a, t)).norm() < 1e-10);
  CHECK_THROWS_AS(connes_cocycle(a, Functional(m3, Mat::Identity(3, 3) - Mat::Identity(3, 3)), 0.1), Error);
}
