#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace vnlab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kStructTol = 1e-10;
inline constexpr double kZeroEig = 1e-12;
inline constexpr double kPowerClamp = 1e-14;

struct HermEig {
  RVec values;  // ascending
  Mat vectors;
};

/// Eigendecomposition of the Hermitian part of `h`.
HermEig herm_eig(const Mat& h);

/// f(h) for Hermitian h by spectral calculus. Eigenvalues are passed through as is.
Mat herm_apply(const Mat& h, const std::function<double(double)>& f);

/// h^s for positive semidefinite h. Eigenvalues below `clamp` map to zero, so
/// negative powers act as inverses on the support only.
Mat psd_power(const Mat& h, double s, double clamp = kPowerClamp);

/// h^{it} on the support of h (zero on the kernel).
Mat psd_imag_power(const Mat& h, double t, double clamp = kPowerClamp);

/// log h on the support of h (zero on the kernel).
Mat psd_log(const Mat& h, double clamp = kPowerClamp);

/// Orthogonal projection onto the span of eigenvectors with eigenvalue > tol.
Mat support_projection(const Mat& h, double tol = kZeroEig);

double trace_norm(const Mat& m);
double op_norm(const Mat& m);
double min_eigenvalue(const Mat& h);

Mat kron(const Mat& a, const Mat& b);

/// Orthonormal basis (columns) of the null space of `m`, relative threshold tol.
Mat null_space(const Mat& m, double tol);

/// Orthonormal basis (columns) of the column span of `m`.
Mat range_basis(const Mat& m, double tol);

/// Moore-Penrose pseudo inverse with absolute singular value cut.
Mat pinv(const Mat& m, double tol = kZeroEig);

/// Column-major vectorisation helpers: vec(A X B) = (B^T kron A) vec(X).
Vec vectorize(const Mat& m);
Mat unvectorize(const Vec& v, Eigen::Index rows, Eigen::Index cols);

/// Row-major reshape of a vector of length rows*cols: X(i,j) = v[i*cols + j].
Mat reshape_rows(const Vec& v, Eigen::Index rows, Eigen::Index cols);
Vec flatten_rows(const Mat& m);

/// Partial trace over the second factor of C^{da} (x) C^{db}.
Mat ptrace_second(const Mat& m, Eigen::Index da, Eigen::Index db);
/// Partial trace over the first factor.
Mat ptrace_first(const Mat& m, Eigen::Index da, Eigen::Index db);

/// Permutation matrix P with P (x_1 (x) ... (x) x_n) = x_{perm[0]} (x) ... .
/// `dims` are the input factor dimensions; output factor k is input factor perm[k].
Mat tensor_permutation(const std::vector<Eigen::Index>& dims, const std::vector<int>& perm);

/// Information function t -> -t ln t with eta(0) = 0.
double eta(double t);

/// Shannon/von Neumann entropy -sum eta of the spectrum of a PSD matrix.
double spectral_entropy(const Mat& rho);

Mat hermitian_part(const Mat& m);

}  // namespace vnlab
