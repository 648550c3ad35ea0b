#pragma once

#include <array>
#include <functional>
#include <string>

#include "vnlab/algebra.hpp"

namespace vnlab {

enum class FunctionalKind { General, SelfAdjoint, Positive, State };

const char* to_string(FunctionalKind k);

/// Linear functional phi(x) = Tr(rho x) on an FdAlgebra, with rho inside the algebra.
class Functional {
 public:
  /// `density` must already lie in the algebra (checked against `tol`).
  Functional(AlgebraRef algebra, Mat density, double tol = kStructTol);

  /// Projects an arbitrary ambient density onto the algebra first.
  static Functional from_ambient(AlgebraRef algebra, const Mat& ambient_density);
  /// Builds the functional from per-block densities D_k, phi(x) = sum_k tr(D_k x_k).
  static Functional from_block_densities(AlgebraRef algebra, const std::vector<Mat>& blocks);

  const AlgebraRef& algebra() const { return algebra_; }
  const Mat& density() const { return density_; }
  FunctionalKind kind() const { return kind_; }

  cplx operator()(const Mat& x) const;
  cplx unit_value() const { return density_.trace(); }
  double norm() const;

  /// D_k = m_k * a_k where a_k is the k-th block part of the density.
  std::vector<Mat> block_densities() const;

  bool is_selfadjoint(double tol = kStructTol) const;
  bool is_positive(double tol = kZeroEig) const;
  bool is_faithful(double tol = kZeroEig) const;

  /// Support projection s(phi) in the algebra (for selfadjoint phi).
  Mat support() const;

  Functional restrict_to(AlgebraRef sub) const;
  Functional adjoint() const;
  Functional normalized() const;

  Functional operator+(const Functional& o) const;
  Functional operator-(const Functional& o) const;
  Functional operator*(cplx s) const;

 private:
  AlgebraRef algebra_;
  Mat density_;
  FunctionalKind kind_;
};

inline Functional operator*(cplx s, const Functional& f) { return f * s; }

bool same_algebra(const FdAlgebra& a, const FdAlgebra& b);

struct JordanParts {
  Functional plus;
  Functional minus;
};

struct PolarParts {
  Mat u;  // partial isometry in the algebra
  Functional abs;
};

JordanParts jordan(const Functional& phi);
PolarParts polar(const Functional& phi);
/// phi = sum_a i^a omega_a with positive omega_a and ||omega_a|| <= ||phi||.
std::array<Functional, 4> polarization(const Functional& phi);

/// Functional with prescribed values on the matrix units of `alg`.
Functional functional_from_values(const AlgebraRef& alg, const std::function<cplx(const Mat&)>& f);

/// State with density rho on M_n (full matrix algebra).
Functional state_on_full(int n, const Mat& rho);

}  // namespace vnlab
