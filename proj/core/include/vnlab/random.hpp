#pragma once

#include <cstdint>
#include <random>

#include "vnlab/linalg.hpp"

namespace vnlab {

// Deterministic sampler. Normals come from a hand-written Box-Muller transform
// over mt19937_64 so the stream does not depend on the standard library's
// distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // [0, 1)
  double normal();
  cplx complex_normal();  // E|z|^2 = 1

  Mat ginibre(Eigen::Index rows, Eigen::Index cols);
  Vec gaussian_vector(Eigen::Index n);

  /// G G^* / tr(G G^*) with G square Ginibre: full rank with probability one.
  Mat density(Eigen::Index n);
  /// Rank-r density from an n x r Ginibre factor.
  Mat density_of_rank(Eigen::Index n, Eigen::Index r);
  Mat unitary(Eigen::Index n);
  Vec unit_vector(Eigen::Index n);
  Mat hermitian(Eigen::Index n);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace vnlab
