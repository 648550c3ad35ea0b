#include "vnlab/modular.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vnlab/errors.hpp"

namespace vnlab {

namespace {

Mat block_diag(const std::vector<Mat>& blocks, Eigen::Index d) {
  Mat out = Mat::Zero(d, d);
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    out.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return out;
}

// Operator Z -> A Z B on n x m matrices in row-major coordinates.
Mat left_right(const Mat& a, const Mat& b) { return kron(a, b.transpose()); }

Mat to_ambient(const FdAlgebra& rep, const std::vector<Mat>& blocks) {
  const Mat& w = rep.basis_unitary();
  return w * block_diag(blocks, rep.ambient_dim()) * w.adjoint();
}

}  // namespace

AlgebraRef hs_space(const FdAlgebra& m) {
  std::vector<Block> blocks;
  Eigen::Index d = 0;
  for (const auto& b : m.blocks()) {
    blocks.push_back(Block{b.n, b.n});
    d += static_cast<Eigen::Index>(b.n) * b.n;
  }
  return make_algebra(d, blocks, Mat::Identity(d, d));
}

Vec hs_vector(const Functional& phi) {
  if (!phi.is_positive()) throw Error(ErrorKind::Domain, "HS vector needs a positive functional");
  const auto rep = hs_space(*phi.algebra());
  std::vector<Mat> parts;
  for (const auto& d : phi.block_densities()) parts.push_back(psd_power(d, 0.5, kZeroEig));
  return rep->vector_from_blocks(parts);
}

std::vector<Mat> vector_block_densities(const FdAlgebra& rep, const Vec& v) {
  std::vector<Mat> out;
  for (const auto& x : rep.vector_blocks(v)) out.push_back(x * x.adjoint());
  return out;
}

RelativeModular relative_modular(const FdAlgebra& rep, const Vec& xi, const Vec& eta) {
  if (xi.size() != rep.ambient_dim() || eta.size() != rep.ambient_dim())
    throw Error(ErrorKind::Shape, "vectors do not match the representation space");
  if (xi.norm() <= kZeroEig || eta.norm() <= kZeroEig)
    throw Error(ErrorKind::Degenerate, "relative modular operator needs nonzero vectors");
  const auto xs = rep.vector_blocks(xi);
  const auto ys = rep.vector_blocks(eta);
  // Blockwise S(Z) = (Y^+)^* Z^* X, stored as Z -> Lb conj(Z).
  std::vector<Mat> lb, sp, ss, spp, ssp;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const Mat& x = xs[k];
    const Mat& y = ys[k];
    const Eigen::Index n = x.rows();
    const Eigen::Index m = x.cols();
    const Mat ypa = pinv(y).adjoint();  // n x m
    Mat l(n * m, n * m);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < m; ++j) {
        // Z = E_ij: (Y^+)^* E_ji X = col_j((Y^+)^*) row_i(X)
        const Mat out = ypa.col(j) * x.row(i);
        l.col(i * m + j) = flatten_rows(out);
      }
    lb.push_back(l);
    sp.push_back(kron(support_projection(x * x.adjoint()), Mat::Identity(m, m)));
    ss.push_back(kron(support_projection(y * y.adjoint()), Mat::Identity(m, m)));
    spp.push_back(left_right(Mat::Identity(n, n), support_projection(x.adjoint() * x)));
    ssp.push_back(left_right(Mat::Identity(n, n), support_projection(y.adjoint() * y)));
  }
  const Mat& w = rep.basis_unitary();
  RelativeModular r;
  r.s.linear = w * block_diag(lb, rep.ambient_dim()) * w.transpose();
  r.delta = hermitian_part(r.s.linear.transpose() * r.s.linear.conjugate());
  r.j.linear = r.s.linear * psd_power(r.delta, -0.5).conjugate();
  r.s_phi = to_ambient(rep, sp);
  r.s_psi = to_ambient(rep, ss);
  r.s_phi_prime = to_ambient(rep, spp);
  r.s_psi_prime = to_ambient(rep, ssp);
  return r;
}

RelativeModular relative_modular(const StandardForm& sf, const Vec& xi, const Vec& eta) {
  return relative_modular(*sf.rep, xi, eta);
}

StandardForm standard_form(AlgebraRef algebra, AlgebraRef rep, const Vec& omega) {
  if (algebra->blocks().size() != rep->blocks().size())
    throw Error(ErrorKind::Shape, "representation has a different block count");
  for (std::size_t k = 0; k < algebra->blocks().size(); ++k)
    if (algebra->blocks()[k].n != rep->blocks()[k].n)
      throw Error(ErrorKind::Shape, "representation block sizes do not match");
  for (const auto& y : rep->vector_blocks(omega)) {
    if (y.rows() != y.cols()) throw Error(ErrorKind::Standardness, "no cyclic separating vector: block is not square");
    Eigen::JacobiSVD<Mat> svd(y);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) <= 1e-10) {
      std::ostringstream os;
      os << "vector is not cyclic and separating (smallest singular value " << s(s.size() - 1) << ")";
      throw Error(ErrorKind::Standardness, os.str());
    }
  }
  StandardForm sf;
  sf.algebra = std::move(algebra);
  sf.rep = std::move(rep);
  sf.omega = omega;
  const auto rm = relative_modular(*sf.rep, omega, omega);
  sf.delta = rm.delta;
  sf.j = rm.j;
  return sf;
}

StandardForm gns(AlgebraRef m, const Functional& phi) {
  if (!same_algebra(*m, *phi.algebra())) throw Error(ErrorKind::Domain, "state lives on a different algebra");
  if (!phi.is_faithful()) {
    throw Error(ErrorKind::Support,
                "GNS needs a faithful state; reduce the algebra to the support of the state first");
  }
  auto rep = hs_space(*m);
  const Vec omega = hs_vector(phi);
  return standard_form(std::move(m), std::move(rep), omega);
}

Functional vector_state(const StandardForm& sf, const Vec& v) {
  return Functional::from_block_densities(sf.algebra, vector_block_densities(*sf.rep, v));
}

Vec natural_cone_vector(const StandardForm& sf, const Functional& phi) {
  if (!same_algebra(*sf.algebra, *phi.algebra())) throw Error(ErrorKind::Domain, "functional lives on a different algebra");
  if (!phi.is_positive()) throw Error(ErrorKind::Domain, "natural cone vectors represent positive functionals");
  // Delta_{xi,Omega}^{1/2} Omega evaluated blockwise as (X X^*)^{1/2} Y (Y^* Y)^{-1/2} with X X^* = D.
  const auto dens = phi.block_densities();
  const auto ys = sf.rep->vector_blocks(sf.omega);
  std::vector<Mat> parts;
  for (std::size_t k = 0; k < dens.size(); ++k) {
    const Mat& y = ys[k];
    parts.push_back(psd_power(hermitian_part(dens[k]), 0.5) * y * psd_power(y.adjoint() * y, -0.5));
  }
  return sf.rep->vector_from_blocks(parts);
}

bool natural_cone_contains(const StandardForm& sf, const Vec& v, double tol) {
  const Vec u = psd_power(sf.delta, -0.25) * v;
  const auto us = sf.rep->vector_blocks(u);
  const auto ys = sf.rep->vector_blocks(sf.omega);
  for (std::size_t k = 0; k < us.size(); ++k) {
    const Mat a = us[k] * ys[k].inverse();
    const double scale = std::max(1.0, a.norm());
    if ((a - a.adjoint()).norm() > tol * scale) return false;
    if (min_eigenvalue(a) < -tol * scale) return false;
  }
  return true;
}

Vec cone_image(const StandardForm& sf, const Mat& x) {
  return psd_power(sf.delta, 0.25) * (sf.represent(x) * sf.omega);
}

StandardFormResiduals check_standard_form(const StandardForm& sf) {
  StandardFormResiduals r{0, 0, 0, 0};
  const FdAlgebra comm = commutant(*sf.rep);
  const auto basis = sf.rep->basis();
  for (const auto& x : basis) r.jmj = std::max(r.jmj, comm.distance(sf.j.conjugate_op(x)));
  if (comm.dimension() != sf.rep->dimension()) r.jmj = std::max(r.jmj, 1.0);
  for (double t : {0.1, 1.0}) {
    const Mat u = psd_imag_power(sf.delta, t);
    for (const auto& x : basis) r.modular_flow = std::max(r.modular_flow, sf.rep->distance(u * x * u.adjoint()));
  }
  const Mat half = psd_power(sf.delta, 0.5);
  for (const auto& x : basis) {
    const Vec lhs = sf.j.apply(half * (x * sf.omega));
    const Vec rhs = x.adjoint() * sf.omega;
    r.tomita = std::max(r.tomita, (lhs - rhs).norm());
  }
  r.omega_fixed = (sf.delta * sf.omega - sf.omega).norm() + (sf.j.apply(sf.omega) - sf.omega).norm();
  return r;
}

Mat connes_cocycle(const Functional& phi, const Functional& psi, double t) {
  if (!same_algebra(*phi.algebra(), *psi.algebra())) throw Error(ErrorKind::Domain, "states live on different algebras");
  if (!phi.is_faithful() || !psi.is_faithful())
    throw Error(ErrorKind::Support, "Connes cocycle needs faithful states; reduce to the common support first");
  const auto rep = hs_space(*phi.algebra());
  const Vec xp = hs_vector(phi);
  const Vec xs = hs_vector(psi);
  const Mat rel = relative_modular(*rep, xp, xs).delta;
  const Mat mod = relative_modular(*rep, xs, xs).delta;
  const Mat op = psd_imag_power(rel, t) * psd_imag_power(mod, -t);
  const auto parts = rep->block_parts(op);
  const double resid = (op - rep->embed(parts)).norm();
  if (resid > 1e-8) {
    std::ostringstream os;
    os << "cocycle is not in the algebra (residual " << resid << ")";
    throw Error(ErrorKind::Validity, os.str());
  }
  return phi.algebra()->embed(parts);
}

Mat modular_flow(const Functional& psi, const Mat& x, double t) {
  std::vector<Mat> parts;
  for (const auto& d : psi.block_densities()) parts.push_back(psd_imag_power(d, t));
  const Mat u = psi.algebra()->embed(parts);
  return u * x * u.adjoint();
}

}  // namespace vnlab
