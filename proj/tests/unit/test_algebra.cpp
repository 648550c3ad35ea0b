#include <doctest.h>

#include "vnlab/algebra.hpp"
#include "vnlab/errors.hpp"
#include "vnlab/random.hpp"

using namespace vnlab;

namespace {

// Independent check: brute-force dimension of the span of products of generators.
Eigen::Index span_dimension(std::vector<Mat> gens) {
  const Eigen::Index d = gens.front().rows();
  std::vector<Mat> words{Mat::Identity(d, d)};
  for (auto& g : std::vector<Mat>(gens)) gens.push_back(g.adjoint());
  Eigen::Index last = -1;
  for (int round = 0; round < 6; ++round) {
    std::vector<Mat> next = words;
    for (const auto& w : words)
      for (const auto& g : gens) next.push_back(w * g);
    Mat stacked(d * d, static_cast<Eigen::Index>(next.size()));
    for (std::size_t i = 0; i < next.size(); ++i) stacked.col(i) = vectorize(next[i]);
    Mat basis = range_basis(stacked, 1e-9);
    words.clear();
    for (Eigen::Index i = 0; i < basis.cols(); ++i) words.push_back(unvectorize(basis.col(i), d, d));
    if (basis.cols() == last) break;
    last = basis.cols();
  }
  return static_cast<Eigen::Index>(words.size());
}

}  // namespace

TEST_CASE("full matrix algebra and its commutant") {
  auto m = full_matrix_algebra(3);
  CHECK(m.dimension() == 9);
  CHECK(m.is_factor());
  auto c = commutant(m);
  CHECK(c.dimension() == 1);
  CHECK(c.blocks()[0] == Block{1, 3});
  CHECK_THROWS_AS(full_matrix_algebra(0), Error);
}

TEST_CASE("embed and block_parts round trip") {
  Rng rng(3);
  FdAlgebra m(7, {Block{1, 1}, Block{2, 3}}, rng.unitary(7));
  std::vector<Mat> parts{rng.ginibre(1, 1), rng.ginibre(2, 2)};
  const Mat x = m.embed(parts);
  const auto back = m.block_parts(x);
  CHECK((back[1] - parts[1]).norm() < 1e-12);
  CHECK(m.contains(x));
  CHECK(m.distance(rng.ginibre(7, 7)) > 1e-3);
  const Mat y = rng.ginibre(7, 7);
  CHECK((m.from_coordinates(m.coordinates(y)) - m.conditional_expectation(y)).norm() < 1e-12);
  CHECK(std::abs((m.conditional_expectation(y)).trace() - y.trace()) < 1e-12);
}

TEST_CASE("generated algebra matches brute-force span") {
  Rng rng(11);
  const Mat u = rng.unitary(6);
  // M_2 (x) 1_2 (+) M_1 (x) 1_2 conjugated by a random unitary.
  std::vector<Mat> gens;
  for (int r = 0; r < 2; ++r) {
    Mat y = Mat::Zero(6, 6);
    y.topLeftCorner(4, 4) = kron(rng.ginibre(2, 2), Mat::Identity(2, 2));
    y.bottomRightCorner(2, 2) = rng.complex_normal() * Mat::Identity(2, 2);
    gens.push_back(u * y * u.adjoint());
  }
  auto m = algebra_from_generators(gens);
  CHECK(m.dimension() == span_dimension(gens));
  CHECK(m.dimension() == 5);
  CHECK(m.blocks().size() == 2);
  CHECK(m.blocks()[0] == Block{1, 2});
  CHECK(m.blocks()[1] == Block{2, 2});
  for (const auto& g : gens) CHECK(m.distance(g) < 1e-8);

  auto c = commutant(m);
  CHECK(check_commuting(m, c, 1e-8));
  CHECK(equality_residual(commutant(c), m) < 1e-8);
  for (const auto& x : commutant_basis(gens)) CHECK(c.distance(x) < 1e-8);
}

TEST_CASE("generated algebra is deterministic") {
  Rng rng(5);
  std::vector<Mat> gens{rng.ginibre(4, 4)};
  auto a = algebra_from_generators(gens);
  auto b = algebra_from_generators(gens);
  CHECK((a.basis_unitary() - b.basis_unitary()).norm() == 0.0);
  CHECK(a.dimension() == 16);
}

TEST_CASE("tensor product and join") {
  auto a = full_matrix_algebra(2);
  auto one = commutant(full_matrix_algebra(3));
  auto t = tensor(a, one);
  CHECK(t.ambient_dim() == 6);
  CHECK(t.blocks()[0] == Block{2, 3});
  auto s = tensor(commutant(full_matrix_algebra(2)), full_matrix_algebra(3));
  CHECK(check_commuting(t, s, 1e-10));
  auto j = join(t, t);
  CHECK(j.dimension() == 4);
  CHECK(j.blocks()[0] == Block{2, 3});
  CHECK(equality_residual(j, t) < 1e-10);
  Rng rng(1);
  const Mat x = rng.ginibre(2, 2);
  CHECK(t.distance(kron(x, Mat::Identity(3, 3))) < 1e-10);
  auto full = join(t, s);
  CHECK(full.dimension() == 36);
}

TEST_CASE("invalid construction is rejected") {
  CHECK_THROWS_AS(FdAlgebra(4, {Block{1, 3}}, Mat::Identity(4, 4)), Error);
  CHECK_THROWS_AS(FdAlgebra(2, {Block{2, 1}}, Mat::Ones(2, 2)), Error);
  CHECK_THROWS_AS(algebra_from_generators({}), Error);
  CHECK_THROWS_AS(algebra_from_generators({Mat::Identity(2, 2)}, 0.0), Error);
}

TEST_CASE("commutant basis agrees with the dense null space") {
  Rng rng(44);
  const std::vector<std::vector<Block>> shapes{{Block{2, 3}}, {Block{1, 2}, Block{2, 2}}, {Block{1, 1}, Block{1, 1}, Block{3, 1}}};
  for (const auto& shape : shapes) {
    Eigen::Index d = 0;
    for (const auto& b : shape) d += static_cast<Eigen::Index>(b.n) * b.m;
    const FdAlgebra m(d, shape, rng.unitary(d));
    std::vector<Mat> gens;
    for (int i = 0; i < 2; ++i) {
      std::vector<Mat> parts;
      for (const auto& b : shape) parts.push_back(rng.ginibre(b.n, b.n));
      gens.push_back(m.embed(parts));
    }
    // x -> ([g, x], [g^*, x]) as one dense matrix on column-major vec(x)
    const Mat id = Mat::Identity(d, d);
    Mat op(4 * d * d, d * d);
    for (std::size_t i = 0; i < gens.size(); ++i) {
      op.middleRows(static_cast<Eigen::Index>(2 * i) * d * d, d * d) = kron(id, gens[i]) - kron(gens[i].transpose(), id);
      const Mat ga = gens[i].adjoint();
      op.middleRows(static_cast<Eigen::Index>(2 * i + 1) * d * d, d * d) = kron(id, ga) - kron(ga.transpose(), id);
    }
    Eigen::JacobiSVD<Mat> svd(op, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > 1e-9 * sv(0)) ++rank;
    const Mat ns = svd.matrixV().rightCols(d * d - rank);
    const auto cb = commutant_basis(gens);
    REQUIRE(static_cast<Eigen::Index>(cb.size()) == ns.cols());
    for (const auto& x : cb) {
      const Vec v = vectorize(x);
      CHECK((v - ns * (ns.adjoint() * v)).norm() < 1e-9);
      for (const auto& g : gens) CHECK((g * x - x * g).norm() < 1e-9);
    }
  }
}
