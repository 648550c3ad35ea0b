#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "vnlab/functional.hpp"

namespace vnlab {

/// A real number or an exact +infinity marker. Infinity here means the support
/// condition failed, never a floating point overflow.
class ExtendedReal {
 public:
  ExtendedReal(double v = 0.0) : value_(v), infinite_(false) {}
  static ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    r.value_ = std::numeric_limits<double>::infinity();
    return r;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  /// Throws not-applicable when infinite.
  double value() const;
  /// Value with +inf for the infinite token.
  double as_double() const { return value_; }
  std::string to_string() const;

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  double value_;
  bool infinite_;
};

enum class RelEntMethod { Umegaki, Modular };
const char* to_string(RelEntMethod m);

/// S(phi || psi) in nats for positive functionals on the same algebra.
ExtendedReal relative_entropy(const Functional& phi, const Functional& psi,
                              RelEntMethod method = RelEntMethod::Umegaki);

struct CocycleCheck {
  double estimate;   // i d/dt phi((D psi : D phi)_t) by central difference
  double reference;  // Umegaki value
  double constant;   // |estimate - reference| / h^2
};

CocycleCheck relative_entropy_cocycle_check(const Functional& phi, const Functional& psi, double h);

double von_neumann_entropy(const Functional& phi);

struct EnsembleTerm {
  double weight;
  Functional state;
};

/// sum_i lambda_i S(phi_i || phi); validates that the ensemble reconstructs phi.
double entropy_decomposition_value(const Functional& phi, const std::vector<EnsembleTerm>& ensemble,
                                   double tol = 1e-10);

/// Same sum with relative entropies taken on a subalgebra.
double entropy_decomposition_value(const Functional& phi, const std::vector<EnsembleTerm>& ensemble,
                                   const AlgebraRef& sub, double tol = 1e-10);

struct ConditionalEntropyOptions {
  int max_terms = 8;
  int restarts = 32;
  int iterations = 40;
  std::uint64_t seed = 1;
  std::vector<std::vector<EnsembleTerm>> witnesses;
};

struct ConditionalEntropyResult {
  double lower_estimate;
  std::vector<EnsembleTerm> ensemble;
};

/// Certified lower bound for H_phi^B(A) with B the algebra of phi and A = sub.
ConditionalEntropyResult conditional_entropy(const Functional& phi, const AlgebraRef& sub,
                                             const ConditionalEntropyOptions& opts = {});

/// Decomposition of phi into its spectral pure states (per block eigenvectors).
std::vector<EnsembleTerm> spectral_ensemble(const Functional& phi);

}  // namespace vnlab
