#include "vnlab/functional.hpp"

#include <cmath>
#include <sstream>

#include "vnlab/errors.hpp"

namespace vnlab {

const char* to_string(FunctionalKind k) {
  switch (k) {
    case FunctionalKind::General: return "general";
    case FunctionalKind::SelfAdjoint: return "selfadjoint";
    case FunctionalKind::Positive: return "positive";
    case FunctionalKind::State: return "state";
  }
  return "general";
}

bool same_algebra(const FdAlgebra& a, const FdAlgebra& b) {
  if (&a == &b) return true;
  if (a.ambient_dim() != b.ambient_dim() || a.blocks() != b.blocks()) return false;
  return (a.basis_unitary() - b.basis_unitary()).norm() <= 1e-12;
}

Functional::Functional(AlgebraRef algebra, Mat density, double tol)
    : algebra_(std::move(algebra)), density_(std::move(density)) {
  if (!algebra_) throw Error(ErrorKind::Shape, "functional needs an algebra");
  if (density_.rows() != algebra_->ambient_dim() || density_.cols() != algebra_->ambient_dim())
    throw Error(ErrorKind::Shape, "density does not match the ambient dimension");
  const double dist = algebra_->distance(density_);
  if (dist > tol * std::max(1.0, density_.norm())) {
    std::ostringstream os;
    os << "density is not in the algebra (distance " << dist << ")";
    throw Error(ErrorKind::Domain, os.str());
  }
  if (!is_selfadjoint()) {
    kind_ = FunctionalKind::General;
  } else if (!is_positive()) {
    kind_ = FunctionalKind::SelfAdjoint;
  } else if (std::abs(unit_value() - 1.0) <= 1e-12) {
    kind_ = FunctionalKind::State;
  } else {
    kind_ = FunctionalKind::Positive;
  }
}

Functional Functional::from_ambient(AlgebraRef algebra, const Mat& ambient_density) {
  Mat rho = algebra->conditional_expectation(ambient_density);
  return Functional(std::move(algebra), std::move(rho));
}

Functional Functional::from_block_densities(AlgebraRef algebra, const std::vector<Mat>& blocks) {
  std::vector<Mat> parts;
  for (std::size_t k = 0; k < blocks.size(); ++k)
    parts.push_back(blocks[k] / static_cast<double>(algebra->blocks()[k].m));
  Mat rho = algebra->embed(parts);
  return Functional(std::move(algebra), std::move(rho));
}

cplx Functional::operator()(const Mat& x) const { return (density_ * x).trace(); }

double Functional::norm() const { return trace_norm(density_); }

std::vector<Mat> Functional::block_densities() const {
  auto parts = algebra_->block_parts(density_);
  for (std::size_t k = 0; k < parts.size(); ++k) parts[k] *= static_cast<double>(algebra_->blocks()[k].m);
  return parts;
}

bool Functional::is_selfadjoint(double tol) const {
  return (density_ - density_.adjoint()).norm() <= tol * std::max(1.0, density_.norm());
}

bool Functional::is_positive(double tol) const {
  if (!is_selfadjoint()) return false;
  for (const auto& d : block_densities())
    if (min_eigenvalue(d) < -tol) return false;
  return true;
}

bool Functional::is_faithful(double tol) const {
  if (!is_positive()) return false;
  for (const auto& d : block_densities())
    if (min_eigenvalue(d) <= tol) return false;
  return true;
}

Mat Functional::support() const {
  std::vector<Mat> parts;
  for (const auto& d : block_densities()) parts.push_back(support_projection(d));
  return algebra_->embed(parts);
}

Functional Functional::restrict_to(AlgebraRef sub) const {
  if (sub->ambient_dim() != algebra_->ambient_dim())
    throw Error(ErrorKind::Domain, "subalgebra acts on a different space");
  if (inclusion_residual(*sub, *algebra_) > 1e-9)
    throw Error(ErrorKind::Domain, "restriction target is not a subalgebra");
  Mat rho = sub->conditional_expectation(density_);
  return Functional(std::move(sub), std::move(rho));
}

Functional Functional::adjoint() const { return Functional(algebra_, density_.adjoint()); }

Functional Functional::normalized() const {
  const cplx v = unit_value();
  if (std::abs(v) <= kZeroEig) throw Error(ErrorKind::Degenerate, "cannot normalize a functional with phi(1) = 0");
  return Functional(algebra_, density_ / v);
}

Functional Functional::operator+(const Functional& o) const {
  if (!same_algebra(*algebra_, *o.algebra_)) throw Error(ErrorKind::Domain, "functionals live on different algebras");
  return Functional(algebra_, density_ + o.density_);
}

Functional Functional::operator-(const Functional& o) const {
  if (!same_algebra(*algebra_, *o.algebra_)) throw Error(ErrorKind::Domain, "functionals live on different algebras");
  return Functional(algebra_, density_ - o.density_);
}

Functional Functional::operator*(cplx s) const { return Functional(algebra_, density_ * s); }

JordanParts jordan(const Functional& phi) {
  if (!phi.is_selfadjoint()) throw Error(ErrorKind::Domain, "Jordan decomposition needs a selfadjoint functional");
  std::vector<Mat> plus, minus;
  for (const auto& d : phi.block_densities()) {
    plus.push_back(herm_apply(d, [](double x) { return x > 0 ? x : 0.0; }));
    minus.push_back(herm_apply(d, [](double x) { return x < 0 ? -x : 0.0; }));
  }
  return {Functional::from_block_densities(phi.algebra(), plus),
          Functional::from_block_densities(phi.algebra(), minus)};
}

PolarParts polar(const Functional& phi) {
  // D = W S Z^*; |phi| has density W S W^* and phi(x) = |phi|(u x) with u = W Z^*.
  std::vector<Mat> us, abs;
  for (const auto& d : phi.block_densities()) {
    Eigen::JacobiSVD<Mat> svd(d, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat& w = svd.matrixU();
    const Mat& z = svd.matrixV();
    RVec s = svd.singularValues();
    RVec mask = s;
    for (Eigen::Index i = 0; i < s.size(); ++i) mask(i) = s(i) > kZeroEig * std::max(1.0, s(0)) ? 1.0 : 0.0;
    abs.push_back(w * s.asDiagonal() * w.adjoint());
    us.push_back(w * mask.asDiagonal() * z.adjoint());
  }
  std::vector<Mat> parts;
  for (std::size_t k = 0; k < us.size(); ++k) parts.push_back(us[k]);
  return {phi.algebra()->embed(parts), Functional::from_block_densities(phi.algebra(), abs)};
}

std::array<Functional, 4> polarization(const Functional& phi) {
  const Mat& d = phi.density();
  const Functional re(phi.algebra(), hermitian_part(d));
  const Functional im(phi.algebra(), hermitian_part((d - d.adjoint()) / cplx(0.0, 2.0)));
  const auto jr = jordan(re);
  const auto ji = jordan(im);
  return {jr.plus, ji.plus, jr.minus, ji.minus};
}

Functional state_on_full(int n, const Mat& rho) {
  return Functional(make_algebra(full_matrix_algebra(n)), rho);
}

Functional functional_from_values(const AlgebraRef& alg, const std::function<cplx(const Mat&)>& f) {
  std::vector<Mat> dens;
  for (std::size_t k = 0; k < alg->blocks().size(); ++k) {
    const int n = alg->blocks()[k].n;
    Mat d(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(j, i) = f(alg->matrix_unit(k, i, j));
    dens.push_back(d);
  }
  return Functional::from_block_densities(alg, dens);
}

}  // namespace vnlab
