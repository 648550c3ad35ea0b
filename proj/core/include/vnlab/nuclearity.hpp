#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vnlab/splitinc.hpp"

namespace vnlab {

enum class Side { A, B };

/// Finite-rank map Theta from an algebra into a Hilbert space, stored in matrix-unit coordinates.
struct LinearMap {
  AlgebraRef source;
  Mat matrix;  // codomain_dim x dim(source); column c is Theta(basis()[c])

  Vec apply(const Mat& x) const { return matrix * source->coordinates(x); }
};

struct NuclearTerm {
  Functional e;
  Vec f;
};

struct NuclearDecomposition {
  AlgebraRef source;
  std::vector<NuclearTerm> terms;
  double p = 1.0;

  double cost(double q) const;  // sum ||e_i||^q ||f_i||^q
  double mu() const { return cost(p); }
  /// Max column error against the map on the matrix-unit basis.
  double reconstruction_residual(const LinearMap& map) const;
};

/// Xi_A(a) = Delta_{B'}^{1/4} a Omega or Xi_B(b) = Delta_{A'}^{1/4} b Omega.
LinearMap xi_map(const SplitPair& sp, Side side);

enum class PnormStrategy { Svd, Greedy };

struct PnormResult {
  double bound;  // mu_p^{1/p}
  NuclearDecomposition dec;
};

PnormResult pnorm_upper(const LinearMap& map, double p, PnormStrategy strategy = PnormStrategy::Greedy);

/// Decomposition x -> sum_ij x_ij Theta(E_ij) through the matrix units.
NuclearDecomposition matrix_unit_decomposition(const LinearMap& map, double p);

struct PartitionResult {
  double z;
  Side side;
  PnormResult best;
};

PartitionResult partition_function_upper(const SplitPair& sp, double p,
                                         PnormStrategy strategy = PnormStrategy::Greedy);

/// Signed product decomposition omega(ab) = sum_j phi_j(a) psi_j(b), functionals on M_a and M_b.
struct ProductDecomposition {
  std::vector<ProductTerm> terms;
  double cost(double q) const;  // sum ||phi_j||^q ||psi_j||^q
  /// max |omega(ab) - sum_j phi_j(a) psi_j(b)| over matrix-unit pairs.
  double residual(const SplitPair& sp) const;
};

/// Product decomposition built from a nuclear decomposition of Xi_A.
ProductDecomposition hs3_product_decomposition(const SplitPair& sp, const NuclearDecomposition& dec);

struct FourSplit {
  double lambda;
  ProductEnsemble plus;   // omega_+ (normalised)
  ProductEnsemble minus;  // omega_- (normalised), empty when lambda = 0
};

FourSplit four_split(const SplitPair& sp, const ProductDecomposition& dec);

struct DominatingResult {
  ProductEnsemble sigma;
  double norm;         // sigma(1)
  double min_eig_gap;  // min eigenvalue of sigma - omega on A (x) B
};

DominatingResult dominating_separable(const SplitPair& sp, const ProductDecomposition& dec);

double c_p(double p);
/// c_p z + eta(z - 1) - eta(z).
double mutual_information_bound(double z, double p);
/// z ln z + c_p z^p.
double otani_bound(double z, double p);

struct IntermediateCandidate {
  Functional phi;  // state on B(H)
  double lambda;
};

struct IntermediateEval {
  double value;                 // min over accepted candidates of S_R(phi)/lambda
  std::vector<double> margins;  // min eigenvalue of (phi - lambda omega) on A v B per candidate
  std::vector<bool> accepted;
};

IntermediateEval intermediate_entropy_eval(const SplitPair& sp, const FdAlgebra& r_u,
                                           const std::vector<IntermediateCandidate>& candidates);

/// phi = sigma-hat extended through cone vectors and pulled back by U, with lambda = 1/||sigma||.
IntermediateCandidate dominating_witness(const SplitPair& sp, const StandardImplementation& impl,
                                         const DominatingResult& sigma);

}  // namespace vnlab
