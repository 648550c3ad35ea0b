#include "vnlab/splitinc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vnlab/errors.hpp"
#include "vnlab/random.hpp"

namespace vnlab {

namespace {

double smallest_singular(const Mat& y) {
  Eigen::JacobiSVD<Mat> svd(y);
  const auto& s = svd.singularValues();
  return s.size() ? s(s.size() - 1) : 0.0;
}

// Rank test of Omega inside each block of an algebra: separating iff the block matrices have full row rank.
bool separates(const FdAlgebra& alg, const Vec& v) {
  for (const auto& y : alg.vector_blocks(v)) {
    if (y.rows() > y.cols() || smallest_singular(y) <= 1e-10) return false;
  }
  return true;
}

FdAlgebra conjugate_antilinear(const FdAlgebra& m, const ConjLinear& j) {
  // nearest unitary: J is only unitary to the accuracy of the polar decomposition it came from
  Eigen::JacobiSVD<Mat> svd(j.linear * m.basis_unitary().conjugate(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  return canonicalize(m.ambient_dim(), m.blocks(), svd.matrixU() * svd.matrixV().adjoint());
}

Mat stack_vectorized(const std::vector<Mat>& ms) {
  if (ms.empty()) return Mat();
  Mat out(ms.front().size(), static_cast<Eigen::Index>(ms.size()));
  for (std::size_t i = 0; i < ms.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = vectorize(ms[i]);
  return out;
}

// Hermiticity and positivity defect of the cone coordinates a = block(Delta^{-1/4} v) Y^{-1}.
double cone_defect(const StandardForm& sf, const Vec& v) {
  const Vec u = psd_power(sf.delta, -0.25) * v;
  const auto us = sf.rep->vector_blocks(u);
  const auto ys = sf.rep->vector_blocks(sf.omega);
  double r = 0.0;
  for (std::size_t k = 0; k < us.size(); ++k) {
    const Mat a = us[k] * ys[k].inverse();
    r = std::max(r, (a - a.adjoint()).norm());
    r = std::max(r, -min_eigenvalue(hermitian_part(a)));
  }
  return r;
}

Mat orthonormal_span(const Mat& m, double tol) {
  if (m.cols() == 0) return Mat(m.rows(), 0);
  Eigen::ColPivHouseholderQR<Mat> qr(m);
  qr.setThreshold(tol);
  const Eigen::Index r = qr.rank();
  Mat q = Mat::Identity(m.rows(), r);
  return qr.householderQ() * q;
}

// Distance of span(b) from {a}' when dim {a}' = dim_comm: b must commute with a and have full dimension.
double commutant_residual(const std::vector<Mat>& a, std::size_t dim_comm, const std::vector<Mat>& b) {
  if (b.size() != dim_comm) return 1.0;
  double r = 0.0;
  for (const auto& y : b) {
    const double ny = std::max(y.norm(), 1e-300);
    for (const auto& x : a) r = std::max(r, (x * y - y * x).norm() / (ny * std::max(x.norm(), 1e-300)));
  }
  return r;
}

std::vector<Mat> represent_all(const StandardForm& sf, const std::vector<Mat>& xs) {
  std::vector<Mat> out;
  for (const auto& x : xs) out.push_back(sf.represent(x));
  return out;
}

}  // namespace

double span_residual(const std::vector<Mat>& a, const std::vector<Mat>& b, double tol) {
  const Mat qa = orthonormal_span(stack_vectorized(a), tol);
  const Mat qb = orthonormal_span(stack_vectorized(b), tol);
  if (qa.cols() != qb.cols()) return 1.0;
  if (qa.cols() == 0) return 0.0;
  return std::max(op_norm(qa - qb * (qb.adjoint() * qa)), op_norm(qb - qa * (qa.adjoint() * qb)));
}

TakesakiResult takesaki_check(const FdAlgebra& m, const FdAlgebra& n, const Functional& phi) {
  if (!same_algebra(m, *phi.algebra())) throw Error(ErrorKind::Domain, "state lives on a different algebra");
  if (!phi.is_faithful()) throw Error(ErrorKind::Support, "modular criterion needs a faithful state");
  if (inclusion_residual(n, m) > 1e-9) throw Error(ErrorKind::Domain, "N is not a subalgebra of M");
  const Mat rho = hermitian_part(phi.density());
  const Mat lg = psd_log(rho);
  TakesakiResult r{true, 0.0, 0.0};
  const auto basis = n.basis();
  for (const auto& x : basis) r.commutator_residual = std::max(r.commutator_residual, n.distance(lg * x - x * lg));
  for (double t : {0.1, 1.0}) {
    const Mat u = psd_imag_power(rho, t);
    for (const auto& x : basis) r.flow_residual = std::max(r.flow_residual, n.distance(u * x * u.adjoint()));
  }
  r.holds = r.commutator_residual <= 1e-9 && r.flow_residual <= 1e-9;
  return r;
}

ConditionalExpectation::ConditionalExpectation(AlgebraRef m, AlgebraRef n, const Functional& phi)
    : m_(std::move(m)), n_(std::move(n)), phi_(phi) {
  const auto tk = takesaki_check(*m_, *n_, phi_);
  if (!tk.holds) {
    std::ostringstream os;
    os << "modular flow does not leave N invariant: commutator residual " << tk.commutator_residual
       << ", flow residual " << tk.flow_residual;
    throw Error(ErrorKind::NoExpectation, os.str());
  }
  sf_ = gns(m_, phi_);
  n_basis_ = n_->basis();
  Mat a(sf_.space_dim(), static_cast<Eigen::Index>(n_basis_.size()));
  for (std::size_t i = 0; i < n_basis_.size(); ++i)
    a.col(static_cast<Eigen::Index>(i)) = sf_.represent(n_basis_[i]) * sf_.omega;
  q_ = range_basis(a, 1e-12);
  e_ = q_ * q_.adjoint();
  solve_ = pinv(a, 1e-12);
}

Mat ConditionalExpectation::operator()(const Mat& x) const {
  const Vec c = solve_ * (e_ * (sf_.represent(x) * sf_.omega));
  Mat y = Mat::Zero(m_->ambient_dim(), m_->ambient_dim());
  for (std::size_t i = 0; i < n_basis_.size(); ++i) y += c(static_cast<Eigen::Index>(i)) * n_basis_[i];
  return y;
}

ConditionalExpectation conditional_expectation(AlgebraRef m, AlgebraRef n, const Functional& phi) {
  return ConditionalExpectation(std::move(m), std::move(n), phi);
}

ExpectationResiduals check_expectation(const ConditionalExpectation& eps) {
  const auto& m = *eps.m();
  const auto& n = *eps.n();
  const Eigen::Index d = m.ambient_dim();
  ExpectationResiduals r{0, 0, 0, 0, std::numeric_limits<double>::infinity(), 0};
  r.unital = op_norm(eps(Mat::Identity(d, d)) - Mat::Identity(d, d));
  const auto mb = m.basis();
  const auto nb = n.basis();
  for (const auto& x : mb) {
    const Mat ex = eps(x);
    r.onto = std::max(r.onto, n.distance(ex));
    r.idempotent = std::max(r.idempotent, op_norm(eps(ex) - ex));
    r.preserving = std::max(r.preserving, std::abs(eps.phi()(ex) - eps.phi()(x)));
    for (const auto& a : nb) {
      r.bimodular = std::max(r.bimodular, op_norm(eps(a * x) - a * ex));
      r.bimodular = std::max(r.bimodular, op_norm(eps(x * a) - ex * a));
    }
  }
  Rng rng(0xe95ULL);
  for (int s = 0; s < 8; ++s) {
    Mat p = m.conditional_expectation(rng.density(d));
    p /= op_norm(p);
    r.min_positivity = std::min(r.min_positivity, min_eigenvalue(hermitian_part(eps(p))));
  }
  return r;
}

bool JonesReport::pass(double tol) const {
  return item1 <= tol && item2 <= tol && item3 <= tol && item4_min_singular > tol && item4_formula <= tol &&
         uniqueness <= tol;
}

JonesReport verify_jones_structure(const ConditionalExpectation& eps) {
  const StandardForm& sf = eps.standard();
  const Mat& e = eps.jones_projection();
  const Eigen::Index k = sf.space_dim();
  const auto mb = eps.m()->basis();
  const auto nb = eps.n()->basis();
  const auto pm = represent_all(sf, mb);
  const auto pn = represent_all(sf, nb);
  JonesReport r{0, 0, 0, 0, 0, 0};

  for (const auto& y : pn) r.item1 = std::max(r.item1, op_norm(e * y - y * e));
  for (std::size_t c = 0; c < mb.size(); ++c) {
    const Mat pe = sf.represent(eps(mb[c]));
    r.item1 = std::max(r.item1, (e * pm[c] * sf.omega - pe * sf.omega).norm());
    r.item1 = std::max(r.item1, op_norm(e * pm[c] * e - pe * e));
  }

  std::vector<Mat> ne;
  for (const auto& y : pn) ne.push_back(y * e);
  auto gens = pm;
  gens.push_back(e);
  const auto meb = algebra_from_generators(gens, 1e-10).basis();
  std::vector<Mat> corner;
  for (const auto& y : meb) corner.push_back(e * y * e);
  r.item2 = span_residual(ne, corner);

  const auto n_comm = commutant_basis(pn, 1e-10);
  auto cgens = commutant(*sf.rep).basis();
  cgens.push_back(e);
  r.item3 = commutant_residual(pn, n_comm.size(), algebra_from_generators(cgens, 1e-10).basis());

  const Mat stacked = stack_vectorized(ne);
  Eigen::JacobiSVD<Mat> svd(stacked);
  r.item4_min_singular = svd.singularValues()(svd.singularValues().size() - 1);
  const Mat solve = pinv(stacked, 1e-12);
  for (std::size_t c = 0; c < mb.size(); ++c) {
    const Vec coef = solve * vectorize(e * pm[c] * e);
    Mat y = Mat::Zero(eps.m()->ambient_dim(), eps.m()->ambient_dim());
    for (std::size_t i = 0; i < nb.size(); ++i) y += coef(static_cast<Eigen::Index>(i)) * nb[i];
    r.item4_formula = std::max(r.item4_formula, op_norm(y - eps(mb[c])));
  }

  // Second construction: eps from the Gram system phi(n_i^* eps(x)) = phi(n_i^* x), e from x Omega -> eps(x) Omega.
  const auto& phi = eps.phi();
  const Eigen::Index dn = static_cast<Eigen::Index>(nb.size());
  Mat gram(dn, dn);
  for (Eigen::Index i = 0; i < dn; ++i)
    for (Eigen::Index j = 0; j < dn; ++j) gram(i, j) = phi(Mat(nb[i].adjoint()) * nb[j]);
  const Mat ginv = gram.inverse();
  Mat src(k, static_cast<Eigen::Index>(mb.size())), dst(k, static_cast<Eigen::Index>(mb.size()));
  for (std::size_t c = 0; c < mb.size(); ++c) {
    Vec rhs(dn);
    for (Eigen::Index i = 0; i < dn; ++i) rhs(i) = phi(Mat(nb[i].adjoint()) * mb[c]);
    const Vec coef = ginv * rhs;
    Mat y = Mat::Zero(eps.m()->ambient_dim(), eps.m()->ambient_dim());
    for (Eigen::Index i = 0; i < dn; ++i) y += coef(i) * nb[i];
    src.col(static_cast<Eigen::Index>(c)) = pm[c] * sf.omega;
    dst.col(static_cast<Eigen::Index>(c)) = sf.represent(y) * sf.omega;
  }
  r.uniqueness = op_norm(dst * pinv(src, 1e-12) - e);
  return r;
}

bool ConeReport::pass(double tol) const { return forward <= tol && backward <= tol && invariant <= tol; }

ConeReport verify_natural_cone(const ConditionalExpectation& eps, int samples, std::uint64_t seed) {
  const StandardForm& sm = eps.standard();
  const Mat& e = eps.jones_projection();
  const Mat& q = eps.range();
  std::vector<Mat> gens;
  for (const auto& y : eps.n()->basis()) gens.push_back(q.adjoint() * sm.represent(y) * q);
  const auto rep = make_algebra(algebra_from_generators(gens, 1e-10));
  const StandardForm sn = standard_form(rep, rep, q.adjoint() * sm.omega);
  Rng rng(seed);
  const Eigen::Index d = eps.m()->ambient_dim();
  ConeReport r{0, 0, 0, samples};
  for (int s = 0; s < samples; ++s) {
    const int rank = 1 + s % static_cast<int>(d);
    const Functional chi = Functional::from_ambient(eps.m(), rng.density_of_rank(d, rank));
    const Vec v = natural_cone_vector(sm, chi);
    const Vec ev = e * v;
    r.forward = std::max(r.forward, cone_defect(sn, q.adjoint() * ev) + (ev - q * (q.adjoint() * ev)).norm());

    const Eigen::Index dn = rep->ambient_dim();
    const Functional chin = Functional::from_ambient(rep, rng.density_of_rank(dn, 1 + s % static_cast<int>(dn)));
    const Vec w = q * natural_cone_vector(sn, chin);
    r.backward = std::max(r.backward, cone_defect(sm, w) + (e * w - w).norm());

    const Functional inv = functional_from_values(eps.m(), [&](const Mat& x) { return chi(eps(x)); });
    const Vec vi = natural_cone_vector(sm, inv);
    r.invariant = std::max(r.invariant, (e * vi - vi).norm());
  }
  return r;
}

SplitPair::SplitPair(int da, int db, const Vec& omega)
    : sys_(BipartiteSystem::matrices(da, db, da * db)),
      omega_(omega),
      state_(state_on_full(1, Mat::Identity(1, 1))) {
  if (omega_.size() != sys_.ambient_dim())
    throw Error(ErrorKind::Shape, "vector does not match the doubled space C^{ab} (x) C^{ab}");
  if (std::abs(omega_.norm() - 1.0) > 1e-10) throw Error(ErrorKind::Validity, "Omega must be a unit vector");
  a_prime_ = make_algebra(commutant(*sys_.a()));
  b_prime_ = make_algebra(commutant(*sys_.b()));
  separating_ = separates(*sys_.a(), omega_) && separates(*sys_.b(), omega_);
  joint_standard_ = separates(*sys_.joint(), omega_);
  const Eigen::Index dab = sys_.da() * sys_.db();
  state_ = sys_.state(ptrace_second(omega_ * omega_.adjoint(), dab, sys_.multiplicity()));
  const auto rb = relative_modular(*b_prime_, omega_, omega_);
  delta_b_prime_ = rb.delta;
  j_b_ = rb.j;
  const auto ra = relative_modular(*a_prime_, omega_, omega_);
  delta_a_prime_ = ra.delta;
  j_a_ = ra.j;
}

void SplitPair::require_separating() const {
  if (!separating_) throw Error(ErrorKind::Standardness, "Omega does not separate A and B");
}

void SplitPair::require_joint_standard() const {
  if (!joint_standard_) throw Error(ErrorKind::Standardness, "Omega is not cyclic and separating for A v B");
}

Functional SplitPair::ambient_state() const {
  return Functional(make_algebra(full_matrix_algebra(static_cast<int>(dim()))), omega_ * omega_.adjoint());
}

StandardForm product_standard_form(const SplitPair& sp) {
  const auto& sys = sp.system();
  const Functional wa = sys.marginal_a(sp.state());
  const Functional wb = sys.marginal_b(sp.state());
  if (!wa.is_faithful() || !wb.is_faithful())
    throw Error(ErrorKind::Standardness, "marginal states are not faithful");
  auto rep = make_algebra(tensor(*hs_space(*sys.a_local()), *hs_space(*sys.b_local())));
  return standard_form(sys.joint_local(), rep, kron(hs_vector(wa), hs_vector(wb)));
}

StandardImplementation standard_implementation(const SplitPair& sp, int cone_samples) {
  sp.require_joint_standard();
  const auto& sys = sp.system();
  const auto joint = sys.joint();
  const StandardForm sh = standard_form(joint, joint, sp.omega());
  const StandardForm sk = product_standard_form(sp);
  const Eigen::Index d = sp.dim();
  const int n = static_cast<int>(sys.da() * sys.db());
  Rng rng(0xc0feULL);
  const Eigen::Index samples = 2 * d;
  Mat v(d, samples), w(d, samples);
  for (Eigen::Index c = 0; c < samples; ++c) {
    const Functional chi = sys.state(rng.density(n));
    v.col(c) = natural_cone_vector(sh, sys.to_ambient(chi));
    w.col(c) = natural_cone_vector(sk, chi);
  }
  StandardImplementation out;
  out.u = w * pinv(v, 1e-12);
  out.unitarity = op_norm(out.u.adjoint() * out.u - Mat::Identity(d, d));
  out.intertwining = 0.0;
  const auto ha = hs_space(*sys.a_local());
  const auto hb = hs_space(*sys.b_local());
  for (const auto& x : sys.a_local()->basis())
    for (const auto& y : sys.b_local()->basis()) {
      const Mat lhs = out.u * sys.a_op(x) * sys.b_op(y) * out.u.adjoint();
      const Mat rhs = kron(ha->embed({x}), hb->embed({y}));
      out.intertwining = std::max(out.intertwining, op_norm(lhs - rhs));
    }
  const Mat jk = sk.j.linear;
  out.j_relation = op_norm(jk - out.u * sh.j.linear * out.u.transpose());
  out.cone_residual = 0.0;
  for (int c = 0; c < cone_samples; ++c) {
    const Functional chi = sys.state(rng.density_of_rank(n, 1 + c % n));
    const Vec img = out.u * natural_cone_vector(sh, sys.to_ambient(chi));
    out.cone_residual = std::max(out.cone_residual, (img - natural_cone_vector(sk, chi)).norm());
  }
  return out;
}

CanonicalFactor canonical_factor(const SplitPair& sp, const StandardImplementation& impl) {
  sp.require_joint_standard();
  const auto& sys = sp.system();
  const Eigen::Index d = sp.dim();
  const int a2 = static_cast<int>(sys.da() * sys.da());
  const int b2 = static_cast<int>(sys.db() * sys.db());
  const Mat ustar = impl.u.adjoint();
  CanonicalFactor out{FdAlgebra(d, {Block{a2, b2}}, ustar, 1e-8), commutant(FdAlgebra(d, {Block{a2, b2}}, ustar, 1e-8)),
                      0, 0, 0, 0, 0, 0, false};
  const StandardForm sh = standard_form(sys.joint(), sys.joint(), sp.omega());
  out.a_in_f = inclusion_residual(*sys.a(), out.f);
  out.f_in_b_prime = inclusion_residual(out.f, *sp.b_prime());
  out.j_invariance = equality_residual(conjugate_antilinear(out.f, sh.j), out.f);
  const FdAlgebra jaj = conjugate_antilinear(*sys.a(), sh.j);
  const FdAlgebra jbj = conjugate_antilinear(*sys.b(), sh.j);
  const FdAlgebra a_join = join(*sys.a(), jaj);
  const FdAlgebra b_join = join(*sys.b(), jbj);
  out.join_identity = equality_residual(a_join, commutant(b_join));
  out.f_equals_join = equality_residual(out.f, a_join);
  out.f_prime_identity = equality_residual(out.f_prime, b_join);
  bool minimal = out.f.is_factor();
  if (minimal) {
    const Mat e = out.f.matrix_unit(0, 0, 0);
    for (const auto& x : out.f.basis()) {
      const Mat y = e * x * e;
      const cplx c = (y.trace()) / e.trace();
      if ((y - c * e).norm() > 1e-8) minimal = false;
    }
  }
  out.factor = minimal;
  return out;
}

CanonicalEntropy canonical_entanglement_entropy(const SplitPair& sp, const StandardImplementation& impl) {
  const auto& sys = sp.system();
  const Eigen::Index a2 = sys.da() * sys.da();
  const Eigen::Index b2 = sys.db() * sys.db();
  const Mat m = reshape_rows(impl.u * sp.omega(), a2, b2);
  return {spectral_entropy(m * m.adjoint()), spectral_entropy(m.adjoint() * m),
          mutual_information_formula(sys, sp.state())};
}

double canonical_entanglement_entropy(const BipartiteSystem& sys, const Functional& omega) {
  if (!same_algebra(*sys.joint_local(), *omega.algebra()) || !omega.is_positive())
    throw Error(ErrorKind::Domain, "expected a positive functional on A (x) B");
  const Eigen::Index a = sys.da(), b = sys.db();
  const Mat root = psd_power(hermitian_part(omega.density()) / omega.unit_value().real(), 0.5);
  // root indexed ((i, k), (j, l)); regroup as ((i, j), (k, l)) for K_A (x) K_B.
  Mat m(a * a, b * b);
  for (Eigen::Index i = 0; i < a; ++i)
    for (Eigen::Index k = 0; k < b; ++k)
      for (Eigen::Index j = 0; j < a; ++j)
        for (Eigen::Index l = 0; l < b; ++l) m(i * a + j, k * b + l) = root(i * b + k, j * b + l);
  return spectral_entropy(m * m.adjoint());
}

}  // namespace vnlab
