#pragma once

#include <cstdint>
#include <vector>

#include "vnlab/entanglement.hpp"
#include "vnlab/modular.hpp"

namespace vnlab {

struct TakesakiResult {
  bool holds;
  double commutator_residual;  // max distance of [log rho, n] from N over a basis of N
  double flow_residual;        // max distance of sigma_t(n) from N for t in {0.1, 1}
};

/// Invariance of N under the modular flow of a faithful state phi on M.
TakesakiResult takesaki_check(const FdAlgebra& m, const FdAlgebra& n, const Functional& phi);

/// phi-preserving conditional expectation M -> N built from the Jones projection in the GNS space of phi.
class ConditionalExpectation {
 public:
  ConditionalExpectation(AlgebraRef m, AlgebraRef n, const Functional& phi);

  Mat operator()(const Mat& x) const;

  const AlgebraRef& m() const { return m_; }
  const AlgebraRef& n() const { return n_; }
  const Functional& phi() const { return phi_; }
  const StandardForm& standard() const { return sf_; }
  /// Projection onto the closure of N Omega in the GNS space.
  const Mat& jones_projection() const { return e_; }
  /// Orthonormal basis of e K.
  const Mat& range() const { return q_; }

 private:
  AlgebraRef m_, n_;
  Functional phi_;
  StandardForm sf_;
  std::vector<Mat> n_basis_;
  Mat e_, q_, solve_;
};

ConditionalExpectation conditional_expectation(AlgebraRef m, AlgebraRef n, const Functional& phi);

struct ExpectationResiduals {
  double unital;
  double idempotent;
  double bimodular;
  double preserving;
  double min_positivity;  // smallest eigenvalue of eps(p) over sampled positive p with ||p|| = 1
  double onto;            // distance of eps(x) from N
};
ExpectationResiduals check_expectation(const ConditionalExpectation& eps);

struct JonesReport {
  double item1;             // e in N', e x Omega = eps(x) Omega, e x e = eps(x) e
  double item2;             // N e vs e (M v e) e as operator subspaces
  double item3;             // N' vs M' v e
  double item4_min_singular;// smallest singular value of y -> y e on N
  double item4_formula;     // eps(x) vs the preimage of e x e
  double uniqueness;        // e vs the projection rebuilt from the Gram-system expectation
  bool pass(double tol = 1e-9) const;
};
JonesReport verify_jones_structure(const ConditionalExpectation& eps);

struct ConeReport {
  double forward;    // e P(M) inside P(N)
  double backward;   // P(N) inside e P(M)
  double invariant;  // cone vectors of eps-invariant functionals are fixed by e
  int samples;
  bool pass(double tol = 1e-9) const;
};
ConeReport verify_natural_cone(const ConditionalExpectation& eps, int samples, std::uint64_t seed);

/// Symmetric distance between the spans of two lists of matrices (1 when the dimensions differ).
double span_residual(const std::vector<Mat>& a, const std::vector<Mat>& b, double tol = 1e-9);

/// Split pair A = M_a (x) 1, B = 1 (x) M_b realised on H = C^{ab} (x) C^{ab} with a vector Omega.
class SplitPair {
 public:
  SplitPair(int da, int db, const Vec& omega);

  const BipartiteSystem& system() const { return sys_; }
  const Vec& omega() const { return omega_; }
  const AlgebraRef& a() const { return sys_.a(); }
  const AlgebraRef& b() const { return sys_.b(); }
  const AlgebraRef& joint() const { return sys_.joint(); }
  const AlgebraRef& a_prime() const { return a_prime_; }
  const AlgebraRef& b_prime() const { return b_prime_; }
  Eigen::Index dim() const { return omega_.size(); }

  /// Omega cyclic and separating for A v B (hence separating for A and B).
  bool joint_standard() const { return joint_standard_; }
  /// Throws a standardness error unless the modular maps are defined (Omega separating for A and B).
  void require_separating() const;
  void require_joint_standard() const;

  /// omega as a state on A (x) B (density on C^{ab}).
  const Functional& state() const { return state_; }
  /// The vector state of Omega on B(H).
  Functional ambient_state() const;

  /// Modular data at Omega; Delta_{B'} and J_{B'} are support based when B' is not separated by Omega.
  const Mat& delta_b_prime() const { return delta_b_prime_; }
  const Mat& delta_a_prime() const { return delta_a_prime_; }
  const ConjLinear& j_b() const { return j_b_; }
  const ConjLinear& j_a() const { return j_a_; }

  /// omega(x) = <Omega, x Omega> for x on H.
  cplx expect(const Mat& x) const { return omega_.dot(x * omega_); }

 private:
  BipartiteSystem sys_;
  Vec omega_;
  AlgebraRef a_prime_, b_prime_;
  bool separating_ = false;
  bool joint_standard_ = false;
  Functional state_;
  Mat delta_b_prime_, delta_a_prime_;
  ConjLinear j_b_, j_a_;
};

/// Standard implementation U: H -> K_A (x) K_B with K_A = C^a (x) C^a, K_B = C^b (x) C^b.
struct StandardImplementation {
  Mat u;
  double unitarity;       // ||U^*U - 1||
  double intertwining;    // max ||U a b U^* - rep(a) (x) rep(b)||
  double j_relation;      // ||(J_A (x) J_B) - U J U^*||
  double cone_residual;   // worst ||U v_H(chi) - v_K(chi)|| over held-out states chi
};

StandardImplementation standard_implementation(const SplitPair& sp, int cone_samples = 20);

/// Local standard data of M_a (x) M_b on K_A (x) K_B at the product of the marginal cone vectors.
StandardForm product_standard_form(const SplitPair& sp);

struct CanonicalFactor {
  FdAlgebra f;
  FdAlgebra f_prime;
  double a_in_f;            // inclusion residuals
  double f_in_b_prime;
  double j_invariance;      // JFJ vs F
  double join_identity;     // join(A, JAJ) vs B' cap JB'J
  double f_equals_join;     // F vs join(A, JAJ)
  double f_prime_identity;  // F' vs join(B, JBJ)
  bool factor;              // trivial center and a minimal projection
};

CanonicalFactor canonical_factor(const SplitPair& sp, const StandardImplementation& impl);

struct CanonicalEntropy {
  double s_f;
  double s_f_prime;
  double mutual_information;
};

/// E_C = S_F(omega) through the factorisation H = K_A (x) K_B given by U.
CanonicalEntropy canonical_entanglement_entropy(const SplitPair& sp, const StandardImplementation& impl);
/// E_C from the cone vector (rho_AB)^{1/2} of omega on A (x) B, also valid for degenerate Omega.
double canonical_entanglement_entropy(const BipartiteSystem& sys, const Functional& omega);

}  // namespace vnlab
