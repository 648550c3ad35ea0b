#pragma once

#include <memory>
#include <vector>

#include "vnlab/linalg.hpp"

namespace vnlab {

/// One Artin-Wedderburn summand: the algebra acts as M_n (x) 1_m.
struct Block {
  int n = 1;
  int m = 1;
  friend bool operator==(const Block&, const Block&) = default;
};

/// A unital *-subalgebra of the d x d complex matrices.
///
/// The columns of the basis unitary W form an orthonormal basis of C^d adapted
/// to the block structure: x belongs to the algebra iff
///   W^* x W = (+)_k a_k (x) 1_{m_k}
/// with row-major tensor ordering inside each block (coordinate i*m_k + j).
/// Blocks are kept in canonical order: (n, m) lexicographic, ties broken by the
/// diagonal of the block projection in the ambient basis (descending lexicographic).
class FdAlgebra {
 public:
  FdAlgebra(Eigen::Index ambient_dim, std::vector<Block> blocks, Mat basis_unitary,
            double tol = kStructTol);

  static FdAlgebra full_matrix(int n);

  Eigen::Index ambient_dim() const { return ambient_dim_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const Mat& basis_unitary() const { return w_; }

  /// Linear dimension sum n_k^2.
  Eigen::Index dimension() const;
  Eigen::Index center_dimension() const { return static_cast<Eigen::Index>(blocks_.size()); }
  bool is_factor() const { return blocks_.size() == 1; }
  Eigen::Index block_offset(std::size_t k) const { return offsets_[k]; }

  /// Ambient element from per-block n_k x n_k matrices.
  Mat embed(const std::vector<Mat>& parts) const;
  /// Per-block parts of E(x), where E is the trace-preserving conditional expectation.
  std::vector<Mat> block_parts(const Mat& x) const;
  /// Trace-preserving conditional expectation of an ambient matrix onto the algebra.
  Mat conditional_expectation(const Mat& x) const;
  /// Frobenius distance from x to the algebra.
  double distance(const Mat& x) const;
  bool contains(const Mat& x, double tol = kStructTol) const;

  Mat matrix_unit(std::size_t k, int i, int j) const;
  /// Matrix units, ordered by block, then row-major (i, j). Orthonormal for the
  /// block trace sum_k tr(a_k^* b_k).
  std::vector<Mat> basis() const;
  /// Coordinates of E(x) in the matrix-unit basis.
  Vec coordinates(const Mat& x) const;
  Mat from_coordinates(const Vec& c) const;

  /// Ambient vector -> per-block n_k x m_k matrices (row-major reshape of W^* v).
  std::vector<Mat> vector_blocks(const Vec& v) const;
  Vec vector_from_blocks(const std::vector<Mat>& parts) const;

  /// Projection of C^d onto the range of block k.
  Mat block_projection(std::size_t k) const;

 private:
  Eigen::Index ambient_dim_;
  std::vector<Block> blocks_;
  Mat w_;
  std::vector<Eigen::Index> offsets_;
};

using AlgebraRef = std::shared_ptr<const FdAlgebra>;

template <class... Args>
AlgebraRef make_algebra(Args&&... args) {
  return std::make_shared<const FdAlgebra>(std::forward<Args>(args)...);
}

/// Reorders blocks (and the matching column groups of W) into canonical order.
FdAlgebra canonicalize(Eigen::Index ambient_dim, std::vector<Block> blocks, const Mat& w);

FdAlgebra full_matrix_algebra(int n);

/// Smallest unital *-algebra containing `gens` (numerical Artin-Wedderburn).
FdAlgebra algebra_from_generators(const std::vector<Mat>& gens, double tol = kStructTol);

/// Basis of the commutant of a set of matrices (columns unvectorised to d x d).
std::vector<Mat> commutant_basis(const std::vector<Mat>& gens, double tol = kStructTol);

FdAlgebra commutant(const FdAlgebra& m);
FdAlgebra tensor(const FdAlgebra& m, const FdAlgebra& n);
FdAlgebra join(const FdAlgebra& m, const FdAlgebra& n, double tol = kStructTol);
bool check_commuting(const FdAlgebra& m, const FdAlgebra& n, double tol = kStructTol);

/// Largest residual ||E_other(x) - x|| over a basis of `sub`; zero iff sub is contained.
double inclusion_residual(const FdAlgebra& sub, const FdAlgebra& super);
/// Symmetric subspace distance between two algebras on the same ambient space.
double equality_residual(const FdAlgebra& a, const FdAlgebra& b);

/// Conjugates every block basis vector: returns the algebra U M U^*.
FdAlgebra conjugate_by(const FdAlgebra& m, const Mat& u);

}  // namespace vnlab
