#include "vnlab/random.hpp"

#include <cmath>
#include <numbers>

namespace vnlab {

double Rng::uniform() {
  // 53 random mantissa bits.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(th);
  has_spare_ = true;
  return r * std::cos(th);
}

cplx Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return cplx(re, im) / std::sqrt(2.0);
}

Mat Rng::ginibre(Eigen::Index rows, Eigen::Index cols) {
  Mat g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = complex_normal();
  return g;
}

Vec Rng::gaussian_vector(Eigen::Index n) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_normal();
  return v;
}

Mat Rng::density(Eigen::Index n) { return density_of_rank(n, n); }

Mat Rng::density_of_rank(Eigen::Index n, Eigen::Index r) {
  const Mat g = ginibre(n, r);
  Mat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

Mat Rng::unitary(Eigen::Index n) {
  const Mat g = ginibre(n, n);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    if (a > 0) q.col(j) *= d / a;
  }
  return q;
}

Vec Rng::unit_vector(Eigen::Index n) {
  Vec v = gaussian_vector(n);
  return v / v.norm();
}

Mat Rng::hermitian(Eigen::Index n) { return hermitian_part(ginibre(n, n)); }

}  // namespace vnlab
