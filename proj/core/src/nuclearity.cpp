#include "vnlab/nuclearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "vnlab/errors.hpp"
#include "vnlab/random.hpp"

namespace vnlab {

namespace {

// Trace norm of the functional with matrix-unit values r on a block algebra.
double coeff_norm(const FdAlgebra& alg, const Eigen::Ref<const Vec>& r) {
  double s = 0.0;
  Eigen::Index idx = 0;
  for (const auto& b : alg.blocks()) {
    const Eigen::Index sz = static_cast<Eigen::Index>(b.n) * b.n;
    if (b.n == 1) {
      s += std::abs(r(idx));
    } else if (b.n == 2) {
      const double det = std::abs(r(idx) * r(idx + 3) - r(idx + 1) * r(idx + 2));
      s += std::sqrt(r.segment(idx, 4).squaredNorm() + 2.0 * det);
    } else if (b.n == 3) {
      const Eigen::Matrix<cplx, 3, 3, Eigen::RowMajor> m = Eigen::Map<const Eigen::Matrix<cplx, 3, 3, Eigen::RowMajor>>(r.data() + idx);
      s += Eigen::JacobiSVD<Eigen::Matrix<cplx, 3, 3, Eigen::RowMajor>>(m).singularValues().sum();
    } else {
      s += trace_norm(reshape_rows(r.segment(idx, sz), b.n, b.n));
    }
    idx += sz;
  }
  return s;
}

Functional functional_from_row(const AlgebraRef& alg, const Vec& r) {
  std::vector<Mat> dens;
  Eigen::Index idx = 0;
  for (const auto& b : alg->blocks()) {
    const Eigen::Index sz = static_cast<Eigen::Index>(b.n) * b.n;
    dens.push_back(reshape_rows(r.segment(idx, sz), b.n, b.n).transpose());
    idx += sz;
  }
  return Functional::from_block_densities(alg, dens);
}

Vec row_of(const Functional& f) {
  const auto& alg = *f.algebra();
  Vec r(alg.dimension());
  Eigen::Index idx = 0;
  for (const auto& d : f.block_densities()) {
    r.segment(idx, d.size()) = flatten_rows(Mat(d.transpose()));
    idx += d.size();
  }
  return r;
}

// Working form of a decomposition: rows of E are functionals, columns of F are vectors, X = F E.
struct Factored {
  Mat e;
  Mat f;
};

double term_cost(const FdAlgebra& alg, const Factored& d, Eigen::Index i, double p) {
  const double c = coeff_norm(alg, d.e.row(i).transpose()) * d.f.col(i).norm();
  return c > 0 ? std::pow(c, p) : 0.0;
}

double total_cost(const FdAlgebra& alg, const Factored& d, double p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < d.e.rows(); ++i) s += term_cost(alg, d, i, p);
  return s;
}

void drop_null_terms(const FdAlgebra& alg, Factored& d, double scale) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < d.e.rows(); ++i)
    if (coeff_norm(alg, d.e.row(i).transpose()) * d.f.col(i).norm() > 1e-14 * scale) keep.push_back(i);
  Factored out{Mat(keep.size(), d.e.cols()), Mat(d.f.rows(), keep.size())};
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.e.row(k) = d.e.row(keep[k]);
    out.f.col(k) = d.f.col(keep[k]);
  }
  d = std::move(out);
}

Factored svd_factor(const Mat& x) {
  Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  Eigen::Index k = 0;
  while (k < s.size() && s(k) > 1e-13 * std::max(1e-300, s(0))) ++k;
  Factored d{svd.matrixV().leftCols(k).adjoint(), svd.matrixU().leftCols(k) * s.head(k).asDiagonal()};
  return d;
}

Factored unit_factor(const Mat& x) {
  return Factored{Mat::Identity(x.cols(), x.cols()), x};
}

// 2x2 moves on rows (i, j) of E with the inverse applied to columns of F.
struct Move {
  Mat m;  // 2x2
  Mat inv;
};

std::vector<Move> move_set() {
  std::vector<Move> out;
  const cplx I(0.0, 1.0);
  for (double th : {0.7853981633974483, 0.39269908169872414, 0.19634954084936207, 0.05, 0.01}) {
    for (int ph = 0; ph < 4; ++ph) {
      const cplx w = std::pow(I, ph);
      for (double sg : {1.0, -1.0}) {
        Mat m(2, 2);
        const double c = std::cos(th), s = sg * std::sin(th);
        m << c, -s * w, s * std::conj(w), c;
        out.push_back({m, m.inverse()});
      }
    }
  }
  for (double t : {1.0, 0.5, 0.2, 0.05}) {
    for (int ph = 0; ph < 4; ++ph) {
      const cplx w = t * std::pow(I, ph);
      for (double sg : {1.0, -1.0}) {
        Mat m = Mat::Identity(2, 2);
        m(0, 1) = sg * w;
        out.push_back({m, m.inverse()});
        Mat n = Mat::Identity(2, 2);
        n(1, 0) = sg * w;
        out.push_back({n, n.inverse()});
      }
    }
  }
  return out;
}

bool try_merge(const FdAlgebra& alg, Factored& d, double p) {
  const Eigen::Index k = d.e.rows();
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const Vec fi = d.f.col(i), fj = d.f.col(j);
      const double ni = fi.norm(), nj = fj.norm();
      if (ni == 0 || nj == 0) continue;
      const cplx c = fi.dot(fj) / (ni * ni);
      if ((fj - c * fi).norm() > 1e-10 * nj) continue;
      Factored trial = d;
      trial.e.row(i) += c * d.e.row(j);
      trial.f.col(j).setZero();
      trial.e.row(j).setZero();
      if (total_cost(alg, trial, p) < total_cost(alg, d, p) * (1 - 1e-12)) {
        drop_null_terms(alg, trial, 1.0);
        d = std::move(trial);
        return true;
      }
    }
  }
  return false;
}

Factored greedy_refine(const FdAlgebra& alg, Factored d, double p, int sweeps) {
  const auto moves = move_set();
  Vec ei, ej, fi, fj, e0, e1, f0, f1;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    bool improved = false;
    while (try_merge(alg, d, p)) improved = true;
    const Eigen::Index k = d.e.rows();
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = i + 1; j < k; ++j) {
        double best = term_cost(alg, d, i, p) + term_cost(alg, d, j, p);
        ei = d.e.row(i).transpose();
        ej = d.e.row(j).transpose();
        fi = d.f.col(i);
        fj = d.f.col(j);
        for (const auto& mv : moves) {
          e0 = mv.m(0, 0) * ei + mv.m(0, 1) * ej;
          e1 = mv.m(1, 0) * ei + mv.m(1, 1) * ej;
          f0 = mv.inv(0, 0) * fi + mv.inv(1, 0) * fj;
          f1 = mv.inv(0, 1) * fi + mv.inv(1, 1) * fj;
          const double c0 = coeff_norm(alg, e0) * f0.norm();
          const double c1 = coeff_norm(alg, e1) * f1.norm();
          const double c = (c0 > 0 ? std::pow(c0, p) : 0.0) + (c1 > 0 ? std::pow(c1, p) : 0.0);
          if (c < best * (1 - 1e-12)) {
            best = c;
            ei = e0;
            ej = e1;
            fi = f0;
            fj = f1;
            improved = true;
          }
        }
        d.e.row(i) = ei.transpose();
        d.e.row(j) = ej.transpose();
        d.f.col(i) = fi;
        d.f.col(j) = fj;
      }
    }
    drop_null_terms(alg, d, 1.0);
    if (!improved) break;
  }
  return d;
}

// Random invertible moves E -> (1 + tG) E, F -> F (1 + tG)^{-1} on all terms at once.
Factored local_search(const FdAlgebra& alg, Factored d, double p, Rng& rng, int tries) {
  const Eigen::Index k = d.e.rows();
  if (k == 0) return d;
  double cur = total_cost(alg, d, p);
  for (double t : {0.3, 0.1, 0.03, 0.01, 0.003, 0.001}) {
    for (int it = 0; it < tries; ++it) {
      const Mat m = Mat::Identity(k, k) + t * rng.ginibre(k, k);
      Eigen::PartialPivLU<Mat> lu(m);
      if (std::abs(lu.determinant()) < 1e-6) continue;
      Factored trial{m * d.e, d.f * lu.inverse()};
      const double c = total_cost(alg, trial, p);
      if (c < cur) {
        cur = c;
        d = std::move(trial);
      }
    }
  }
  return d;
}

Factored random_start(const Mat& x, Eigen::Index k, Rng& rng) {
  Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > 1e-13 * std::max(1e-300, s(0))) ++r;
  Mat e = k == r ? Mat(rng.ginibre(r, r) * svd.matrixV().leftCols(r).adjoint()) : rng.ginibre(k, x.cols());
  return Factored{e, x * pinv(e, 1e-12)};
}

NuclearDecomposition to_decomposition(const AlgebraRef& alg, const Factored& d, double p) {
  NuclearDecomposition dec;
  dec.source = alg;
  dec.p = p;
  for (Eigen::Index i = 0; i < d.e.rows(); ++i)
    dec.terms.push_back({functional_from_row(alg, d.e.row(i).transpose()), d.f.col(i)});
  return dec;
}

void check_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << "p must lie in (0, 1], got " << p;
    throw Error(ErrorKind::Parameter, os.str());
  }
}

Mat inverse_sum_quarter(const Mat& delta) {
  return herm_apply(delta, [](double l) {
    if (l <= kPowerClamp) return 0.0;
    const double q = std::pow(l, 0.25);
    return 1.0 / (q + 1.0 / q);
  });
}

}  // namespace

double NuclearDecomposition::cost(double q) const {
  double s = 0.0;
  for (const auto& t : terms) {
    const double c = t.e.norm() * t.f.norm();
    if (c > 0) s += std::pow(c, q);
  }
  return s;
}

double NuclearDecomposition::reconstruction_residual(const LinearMap& map) const {
  Mat x = Mat::Zero(map.matrix.rows(), map.matrix.cols());
  for (const auto& t : terms) x += t.f * row_of(t.e).transpose();
  double r = 0.0;
  for (Eigen::Index c = 0; c < x.cols(); ++c) r = std::max(r, (x.col(c) - map.matrix.col(c)).norm());
  return r;
}

LinearMap xi_map(const SplitPair& sp, Side side) {
  sp.require_separating();
  const auto& sys = sp.system();
  const bool is_a = side == Side::A;
  const AlgebraRef& src = is_a ? sys.a_local() : sys.b_local();
  const Mat q = psd_power(is_a ? sp.delta_b_prime() : sp.delta_a_prime(), 0.25);
  const auto basis = src->basis();
  LinearMap m{src, Mat(sp.dim(), static_cast<Eigen::Index>(basis.size()))};
  for (std::size_t c = 0; c < basis.size(); ++c) {
    const Mat op = is_a ? sys.a_op(basis[c]) : sys.b_op(basis[c]);
    m.matrix.col(static_cast<Eigen::Index>(c)) = q * (op * sp.omega());
  }
  return m;
}

NuclearDecomposition matrix_unit_decomposition(const LinearMap& map, double p) {
  check_p(p);
  Factored d = unit_factor(map.matrix);
  drop_null_terms(*map.source, d, 1.0);
  return to_decomposition(map.source, d, p);
}

PnormResult pnorm_upper(const LinearMap& map, double p, PnormStrategy strategy) {
  check_p(p);
  const FdAlgebra& alg = *map.source;
  Factored best = svd_factor(map.matrix);
  if (strategy == PnormStrategy::Greedy) {
    Factored units = unit_factor(map.matrix);
    drop_null_terms(alg, units, 1.0);
    if (total_cost(alg, units, p) < total_cost(alg, best, p)) best = units;
    best = greedy_refine(alg, best, p, 40);
    Rng rng(0x9e37ULL);
    best = local_search(alg, best, p, rng, 150);
    double cur = total_cost(alg, best, p);
    const Eigen::Index rank = svd_factor(map.matrix).e.rows();
    for (int start = 0; start < 8; ++start) {
      const Eigen::Index k = start % 2 == 0 ? rank : std::min<Eigen::Index>(rank + 1, map.matrix.cols());
      Factored cand = random_start(map.matrix, k, rng);
      if ((cand.f * cand.e - map.matrix).norm() > 1e-9 * std::max(1.0, map.matrix.norm())) continue;
      cand = local_search(alg, greedy_refine(alg, cand, p, 10), p, rng, 150);
      const double c = total_cost(alg, cand, p);
      if (c < cur) {
        cur = c;
        best = std::move(cand);
      }
    }
    drop_null_terms(alg, best, 1.0);
  }
  PnormResult r{0.0, to_decomposition(map.source, best, p)};
  r.bound = std::pow(total_cost(alg, best, p), 1.0 / p);
  return r;
}

PartitionResult partition_function_upper(const SplitPair& sp, double p, PnormStrategy strategy) {
  auto ra = pnorm_upper(xi_map(sp, Side::A), p, strategy);
  auto rb = pnorm_upper(xi_map(sp, Side::B), p, strategy);
  if (rb.bound < ra.bound) return {rb.bound, Side::B, std::move(rb)};
  return {ra.bound, Side::A, std::move(ra)};
}

double ProductDecomposition::cost(double q) const {
  double s = 0.0;
  for (const auto& t : terms) {
    const double c = t.a.norm() * t.b.norm();
    if (c > 0) s += std::pow(c, q);
  }
  return s;
}

double ProductDecomposition::residual(const SplitPair& sp) const {
  const auto& sys = sp.system();
  double r = 0.0;
  for (const auto& x : sys.a_local()->basis())
    for (const auto& y : sys.b_local()->basis()) {
      cplx s = 0.0;
      for (const auto& t : terms) s += t.a(x) * t.b(y);
      r = std::max(r, std::abs(sp.expect(sys.a_op(x) * sys.b_op(y)) - s));
    }
  return r;
}

ProductDecomposition hs3_product_decomposition(const SplitPair& sp, const NuclearDecomposition& dec) {
  const LinearMap xa = xi_map(sp, Side::A);
  if (!dec.source || !same_algebra(*dec.source, *xa.source))
    throw Error(ErrorKind::StaleDecomposition, "decomposition is not defined on A");
  const double res = dec.reconstruction_residual(xa);
  if (res > 1e-8 * std::max(1.0, xa.matrix.norm())) {
    std::ostringstream os;
    os << "decomposition does not reconstruct Xi_A (residual " << res << ")";
    throw Error(ErrorKind::StaleDecomposition, os.str());
  }
  const auto& sys = sp.system();
  const Mat g = inverse_sum_quarter(sp.delta_b_prime());
  const auto bbasis = sys.b_local()->basis();
  // v(b) = (Delta^{1/4} + Delta^{-1/4})^{-1} (b^* + J b J) Omega on the matrix units of B.
  std::vector<Vec> vs;
  for (const auto& y : bbasis) {
    const Mat b = sys.b_op(y);
    vs.push_back(g * ((Mat(b.adjoint()) + sp.j_b().conjugate_op(b)) * sp.omega()));
  }
  ProductDecomposition out;
  for (const auto& t : dec.terms) {
    Vec r(static_cast<Eigen::Index>(vs.size()));
    for (std::size_t c = 0; c < vs.size(); ++c) r(static_cast<Eigen::Index>(c)) = vs[c].dot(t.f);
    out.terms.push_back({t.e, functional_from_row(sys.b_local(), r)});
  }
  return out;
}

FourSplit four_split(const SplitPair& sp, const ProductDecomposition& dec) {
  const auto& sys = sp.system();
  ProductEnsemble plus, minus;
  for (const auto& t : dec.terms) {
    const auto pa = polarization(t.a);
    const auto pb = polarization(t.b);
    for (int a = 0; a < 4; ++a) {
      plus.terms.push_back({pa[a], pb[(4 - a) % 4]});
      minus.terms.push_back({pa[a], pb[(6 - a) % 4]});
    }
  }
  const double p1 = plus.induced(sys).unit_value().real();
  const double lambda = minus.induced(sys).unit_value().real();
  FourSplit out{lambda, {}, {}};
  for (auto& t : plus.terms) out.plus.terms.push_back({t.a * (1.0 / p1), t.b});
  if (lambda > kZeroEig)
    for (auto& t : minus.terms) out.minus.terms.push_back({t.a * (1.0 / lambda), t.b});
  return out;
}

DominatingResult dominating_separable(const SplitPair& sp, const ProductDecomposition& dec) {
  const auto& sys = sp.system();
  DominatingResult out;
  for (const auto& t : dec.terms) {
    if (t.a.norm() <= kZeroEig || t.b.norm() <= kZeroEig) continue;
    const auto pa = polar(t.a);
    const auto pb = polar(t.b);
    // phi(u^* .) restricted to the support is |phi|; the rotated copy is |phi|(u . u^*).
    const Mat ra = pa.u.adjoint() * pa.abs.density() * pa.u;
    const Mat rb = pb.u.adjoint() * pb.abs.density() * pb.u;
    out.sigma.terms.push_back({pa.abs * 0.5, pb.abs});
    out.sigma.terms.push_back({Functional(sys.a_local(), ra) * 0.5, Functional(sys.b_local(), rb)});
  }
  if (out.sigma.terms.empty()) throw Error(ErrorKind::Degenerate, "product decomposition has no nonzero term");
  const Functional s = out.sigma.induced(sys);
  out.norm = s.unit_value().real();
  out.min_eig_gap = min_eigenvalue(hermitian_part(s.density() - sp.state().density()));
  return out;
}

double c_p(double p) {
  check_p(p);
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return 1.0 / ((1.0 - p) * std::exp(1.0));
}

double mutual_information_bound(double z, double p) {
  if (z < 1.0) throw Error(ErrorKind::Domain, "partition function bound must be at least 1");
  return c_p(p) * z + eta(z - 1.0) - eta(z);
}

double otani_bound(double z, double p) {
  if (z < 1.0) throw Error(ErrorKind::Domain, "partition function bound must be at least 1");
  return z * std::log(z) + c_p(p) * std::pow(z, p);
}

IntermediateEval intermediate_entropy_eval(const SplitPair& sp, const FdAlgebra& r_u,
                                           const std::vector<IntermediateCandidate>& candidates) {
  if (candidates.empty()) throw Error(ErrorKind::Parameter, "no candidate states supplied");
  const auto& sys = sp.system();
  const Functional w = sys.to_ambient(sp.state());
  const auto r_ref = make_algebra(r_u);
  IntermediateEval out{std::numeric_limits<double>::infinity(), {}, {}};
  for (const auto& c : candidates) {
    if (!(c.lambda > 0.0)) throw Error(ErrorKind::Parameter, "lambda must be positive");
    const Functional on_joint = c.phi.restrict_to(sys.joint());
    double margin = std::numeric_limits<double>::infinity();
    const auto dp = on_joint.block_densities();
    const auto dw = w.block_densities();
    for (std::size_t k = 0; k < dp.size(); ++k)
      margin = std::min(margin, min_eigenvalue(hermitian_part(dp[k] - c.lambda * dw[k])));
    const bool ok = margin >= -1e-10;
    out.margins.push_back(margin);
    out.accepted.push_back(ok);
    if (ok) out.value = std::min(out.value, von_neumann_entropy(c.phi.restrict_to(r_ref)) / c.lambda);
  }
  if (std::isinf(out.value)) throw Error(ErrorKind::Validity, "no candidate dominates lambda * omega on A v B");
  return out;
}

IntermediateCandidate dominating_witness(const SplitPair& sp, const StandardImplementation& impl,
                                         const DominatingResult& sigma) {
  const Eigen::Index d = sp.dim();
  Mat rho = Mat::Zero(d, d);
  for (const auto& t : sigma.sigma.terms) {
    const Vec xa = hs_vector(t.a);
    const Vec xb = hs_vector(t.b);
    const Vec v = kron(xa, xb);
    rho += v * v.adjoint();
  }
  rho /= sigma.norm;
  const Mat pulled = impl.u.adjoint() * rho * impl.u;
  return {Functional(make_algebra(full_matrix_algebra(static_cast<int>(d))), hermitian_part(pulled)),
          1.0 / sigma.norm};
}

}  // namespace vnlab
