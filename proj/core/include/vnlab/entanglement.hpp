#pragma once

#include <cstdint>
#include <vector>

#include "vnlab/entropy.hpp"

namespace vnlab {

/// Commuting algebras A = a (x) 1 (x) 1_r and B = 1 (x) b (x) 1_r on C^{da} (x) C^{db} (x) C^r.
/// The identification A v B = A (x) B is the tensor factorisation itself.
class BipartiteSystem {
 public:
  BipartiteSystem(FdAlgebra a_local, FdAlgebra b_local, int multiplicity = 1);
  static BipartiteSystem matrices(int da, int db, int multiplicity = 1);

  const AlgebraRef& a_local() const { return a_local_; }
  const AlgebraRef& b_local() const { return b_local_; }
  /// a (x) b on C^{da} (x) C^{db}.
  const AlgebraRef& joint_local() const { return joint_local_; }
  const AlgebraRef& a() const { return a_; }
  const AlgebraRef& b() const { return b_; }
  const AlgebraRef& joint() const { return joint_; }

  Eigen::Index da() const { return a_local_->ambient_dim(); }
  Eigen::Index db() const { return b_local_->ambient_dim(); }
  int multiplicity() const { return r_; }
  Eigen::Index ambient_dim() const { return da() * db() * r_; }

  Mat a_op(const Mat& x) const;
  Mat b_op(const Mat& y) const;
  /// x on C^{da db} -> x (x) 1_r
  Mat lift(const Mat& x) const;

  /// State on joint_local from a density on C^{da} (x) C^{db} (projected onto a (x) b).
  Functional state(const Mat& rho) const;
  Functional product(const Functional& phi_a, const Functional& psi_b) const;
  Functional marginal_a(const Functional& omega) const;
  Functional marginal_b(const Functional& omega) const;
  /// Carries a functional on joint_local to A v B on the ambient space.
  Functional to_ambient(const Functional& omega) const;

  /// max || a_op(x) b_op(y) - lift(x (x) y) || over basis pairs.
  double iso_residual() const;

 private:
  AlgebraRef a_local_, b_local_, joint_local_, a_, b_, joint_;
  int r_;
};

struct ProductTerm {
  Functional a;  // on a_local
  Functional b;  // on b_local
};

/// Finite list of product functionals sum_j a_j (x) b_j.
struct ProductEnsemble {
  std::vector<ProductTerm> terms;

  /// Induced functional on joint_local.
  Functional induced(const BipartiteSystem& sys) const;
  bool all_positive() const;
};

ExtendedReal mutual_information(const BipartiteSystem& sys, const Functional& omega);
/// S(omega_A) + S(omega_B) - S(omega).
double mutual_information_formula(const BipartiteSystem& sys, const Functional& omega);

struct EROptions {
  int terms = 4;
  int restarts = 64;
  int iterations = 200;
  std::uint64_t seed = 1;
  std::vector<ProductEnsemble> warm_starts;
};

struct ERResult {
  double upper_bound;
  ProductEnsemble witness;  // normalized separable state
};

/// Certified upper bound of E_R(omega) with its separable witness.
ERResult relative_entanglement_upper(const BipartiteSystem& sys, const Functional& omega,
                                     const EROptions& opts = {});

/// S(omega || sigma) for the separable state induced by an ensemble.
ExtendedReal relative_entropy_to(const BipartiteSystem& sys, const Functional& omega,
                                 const ProductEnsemble& sigma);

struct E1Result {
  double bound;              // sum_j eta(lambda_j)
  double mutual_information; // E_I of the induced state
  bool holds;
};
E1Result separable_bound_e1(const BipartiteSystem& sys, const ProductEnsemble& ensemble);

/// Completely positive map given by Kraus operators, x -> sum K_i^* x K_i in the Heisenberg picture.
struct CpMap {
  std::vector<Mat> kraus;  // each dout x din in the Schroedinger picture rho -> K rho K^*

  static CpMap identity(Eigen::Index n);
  /// Choi matrix sum_ij E_ij (x) F(E_ij) with F acting on din x din densities; rejects non-cp input.
  static CpMap from_choi(const Mat& choi, Eigen::Index din, Eigen::Index dout);
  Mat apply(const Mat& rho) const;
  Mat dual_apply(const Mat& x) const;
};

struct LocalOperation {
  CpMap a;
  CpMap b;
};

struct Outcome {
  double probability;
  Functional state;
};

std::vector<Outcome> apply_separable_operation(const BipartiteSystem& sys, const std::vector<LocalOperation>& ops,
                                               const Functional& omega);
/// Term-by-term image of a separable ensemble under one local operation (unnormalised).
ProductEnsemble apply_local_operation(const BipartiteSystem& sys, const LocalOperation& op,
                                      const ProductEnsemble& ensemble);

}  // namespace vnlab
