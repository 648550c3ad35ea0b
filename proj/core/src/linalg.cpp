#include "vnlab/linalg.hpp"

#include <cmath>

#include "vnlab/errors.hpp"

namespace vnlab {

Mat hermitian_part(const Mat& m) { return 0.5 * (m + m.adjoint()); }

HermEig herm_eig(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::Validity, "Hermitian eigensolver failed to converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

Mat herm_apply(const Mat& h, const std::function<double(double)>& f) {
  const HermEig e = herm_eig(h);
  RVec fv(e.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv[i] = f(e.values[i]);
  return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

Mat psd_power(const Mat& h, double s, double clamp) {
  return herm_apply(h, [&](double x) { return x > clamp ? std::pow(x, s) : 0.0; });
}

Mat psd_imag_power(const Mat& h, double t, double clamp) {
  const HermEig e = herm_eig(h);
  Vec fv(e.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) {
    const double x = e.values[i];
    fv[i] = x > clamp ? std::exp(cplx(0.0, t * std::log(x))) : cplx(0.0);
  }
  return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

Mat psd_log(const Mat& h, double clamp) {
  return herm_apply(h, [&](double x) { return x > clamp ? std::log(x) : 0.0; });
}

Mat support_projection(const Mat& h, double tol) {
  return herm_apply(h, [&](double x) { return x > tol ? 1.0 : 0.0; });
}

double trace_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  if (m.rows() == 2 && m.cols() == 2) {
    // (s1 + s2)^2 = s1^2 + s2^2 + 2 |det|
    const double det = std::abs(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
    return std::sqrt(m.squaredNorm() + 2.0 * det);
  }
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues().sum();
}

double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (std::min(m.rows(), m.cols()) <= 16) {
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
  }
  // largest eigenvalue of the smaller Gram matrix
  const Mat g = m.rows() < m.cols() ? Mat(m * m.adjoint()) : Mat(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()(g.rows() - 1)));
}

double min_eigenvalue(const Mat& h) { return herm_eig(h).values(0); }

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat null_space(const Mat& m, double tol) {
  const Eigen::Index n = m.cols();
  if (m.rows() == 0) return Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double scale = std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > tol * scale) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

Mat range_basis(const Mat& m, double tol) {
  if (m.cols() == 0) return Mat(m.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU);
  const RVec& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > tol) ++r;
  return svd.matrixU().leftCols(r);
}

Mat pinv(const Mat& m, double tol) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& s = svd.singularValues();
  RVec inv(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) inv(i) = s(i) > tol ? 1.0 / s(i) : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

Vec vectorize(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

Mat unvectorize(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

Mat reshape_rows(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
  Mat out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = v(i * cols + j);
  return out;
}

Vec flatten_rows(const Mat& m) {
  Vec out(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i * m.cols() + j) = m(i, j);
  return out;
}

Mat ptrace_second(const Mat& m, Eigen::Index da, Eigen::Index db) {
  Mat out = Mat::Zero(da, da);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      for (Eigen::Index k = 0; k < db; ++k) out(i, j) += m(i * db + k, j * db + k);
  return out;
}

Mat ptrace_first(const Mat& m, Eigen::Index da, Eigen::Index db) {
  Mat out = Mat::Zero(db, db);
  for (Eigen::Index i = 0; i < db; ++i)
    for (Eigen::Index j = 0; j < db; ++j)
      for (Eigen::Index k = 0; k < da; ++k) out(i, j) += m(k * db + i, k * db + j);
  return out;
}

Mat tensor_permutation(const std::vector<Eigen::Index>& dims, const std::vector<int>& perm) {
  const std::size_t n = dims.size();
  Eigen::Index total = 1;
  for (auto d : dims) total *= d;
  std::vector<Eigen::Index> out_dims(n);
  for (std::size_t k = 0; k < n; ++k) out_dims[k] = dims[perm[k]];
  Mat p = Mat::Zero(total, total);
  std::vector<Eigen::Index> idx(n, 0);
  for (Eigen::Index lin = 0; lin < total; ++lin) {
    // decode lin into idx (row-major over dims)
    Eigen::Index rem = lin;
    for (std::size_t k = n; k-- > 0;) {
      idx[k] = rem % dims[k];
      rem /= dims[k];
    }
    Eigen::Index out = 0;
    for (std::size_t k = 0; k < n; ++k) out = out * out_dims[k] + idx[perm[k]];
    p(out, lin) = 1.0;
  }
  return p;
}

double eta(double t) { return t > 0.0 ? -t * std::log(t) : 0.0; }

double spectral_entropy(const Mat& rho) {
  const HermEig e = herm_eig(rho);
  double s = 0.0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    if (e.values(i) > kZeroEig) s += eta(e.values(i));
  return s;
}

}  // namespace vnlab
