#pragma once

#include "vnlab/functional.hpp"

namespace vnlab {

/// Conjugate-linear operator v -> linear * conj(v).
struct ConjLinear {
  Mat linear;

  Vec apply(const Vec& v) const { return linear * v.conjugate(); }
  /// J x J for a linear operator x.
  Mat conjugate_op(const Mat& x) const { return linear * x.conjugate() * linear.conjugate(); }
};

/// A representation of an algebra on K with a cyclic separating vector.
struct StandardForm {
  AlgebraRef algebra;  // M on its ambient space
  AlgebraRef rep;      // image of M on K, blocks listed in the same order as `algebra`
  Vec omega;
  ConjLinear j;
  Mat delta;

  Eigen::Index space_dim() const { return rep->ambient_dim(); }
  Mat represent(const Mat& x) const { return rep->embed(algebra->block_parts(x)); }
  /// Ambient element of M whose representative is the given operator on K.
  Mat pull_back(const Mat& op) const { return algebra->embed(rep->block_parts(op)); }
};

struct RelativeModular {
  ConjLinear s;    // S_{xi,eta}
  Mat delta;       // Delta_{xi,eta} = S^* S
  ConjLinear j;    // polar isometry J_{xi,eta}
  Mat s_phi;       // s(phi) for phi = omega_xi on M, acting on K
  Mat s_psi;       // s(psi) for psi = omega_eta on M
  Mat s_phi_prime; // s'(phi) in M'
  Mat s_psi_prime; // s'(psi) in M'
};

/// Hilbert-Schmidt space of M: K = (+)_k C^{n_k} (x) C^{n_k}, M acting on the left.
AlgebraRef hs_space(const FdAlgebra& m);

/// HS vector (+)_k D_k^{1/2} representing a positive functional.
Vec hs_vector(const Functional& phi);

/// Tomita relative operator for M (given on K) and vectors xi, eta in K.
RelativeModular relative_modular(const FdAlgebra& rep, const Vec& xi, const Vec& eta);
RelativeModular relative_modular(const StandardForm& sf, const Vec& xi, const Vec& eta);

/// Standard form of M at an arbitrary cyclic separating vector of `rep`.
StandardForm standard_form(AlgebraRef algebra, AlgebraRef rep, const Vec& omega);

/// GNS representation in Hilbert-Schmidt coordinates: x -> x D^{1/2}, Omega = D^{1/2}.
StandardForm gns(AlgebraRef m, const Functional& phi);

/// Vector state of v restricted to the algebra of `sf`, as a functional on sf.algebra.
Functional vector_state(const StandardForm& sf, const Vec& v);

/// Per-block densities of the vector state omega_v on `rep`.
std::vector<Mat> vector_block_densities(const FdAlgebra& rep, const Vec& v);

Vec natural_cone_vector(const StandardForm& sf, const Functional& phi);
bool natural_cone_contains(const StandardForm& sf, const Vec& v, double tol = 1e-9);
/// Delta^{1/4} x Omega.
Vec cone_image(const StandardForm& sf, const Mat& x);

struct StandardFormResiduals {
  double jmj;              // JMJ vs M' (subspace residual)
  double modular_flow;     // Delta^{it} M Delta^{-it} vs M
  double tomita;           // J Delta^{1/2} x Omega vs x^* Omega
  double omega_fixed;      // ||Delta Omega - Omega|| + ||J Omega - Omega||
};
StandardFormResiduals check_standard_form(const StandardForm& sf);

/// (D phi : D psi)_t as an element of the algebra.
Mat connes_cocycle(const Functional& phi, const Functional& psi, double t);
/// sigma_t^psi(x) for a faithful psi.
Mat modular_flow(const Functional& psi, const Mat& x, double t);

}  // namespace vnlab
