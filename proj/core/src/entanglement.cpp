#include "vnlab/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vnlab/errors.hpp"
#include "vnlab/random.hpp"

namespace vnlab {

BipartiteSystem::BipartiteSystem(FdAlgebra a_local, FdAlgebra b_local, int multiplicity)
    : r_(multiplicity) {
  if (multiplicity < 1) throw Error(ErrorKind::InvalidDimension, "multiplicity must be positive");
  const auto da = a_local.ambient_dim();
  const auto db = b_local.ambient_dim();
  const auto one_a = commutant(full_matrix_algebra(static_cast<int>(da)));
  const auto one_b = commutant(full_matrix_algebra(static_cast<int>(db)));
  const auto one_r = commutant(full_matrix_algebra(multiplicity));
  joint_local_ = make_algebra(tensor(a_local, b_local));
  a_ = make_algebra(tensor(tensor(a_local, one_b), one_r));
  b_ = make_algebra(tensor(tensor(one_a, b_local), one_r));
  joint_ = make_algebra(tensor(*joint_local_, one_r));
  a_local_ = make_algebra(std::move(a_local));
  b_local_ = make_algebra(std::move(b_local));
}

BipartiteSystem BipartiteSystem::matrices(int da, int db, int multiplicity) {
  return BipartiteSystem(full_matrix_algebra(da), full_matrix_algebra(db), multiplicity);
}

Mat BipartiteSystem::a_op(const Mat& x) const {
  return kron(kron(x, Mat::Identity(db(), db())), Mat::Identity(r_, r_));
}

Mat BipartiteSystem::b_op(const Mat& y) const {
  return kron(kron(Mat::Identity(da(), da()), y), Mat::Identity(r_, r_));
}

Mat BipartiteSystem::lift(const Mat& x) const { return kron(x, Mat::Identity(r_, r_)); }

Functional BipartiteSystem::state(const Mat& rho) const { return Functional::from_ambient(joint_local_, rho); }

Functional BipartiteSystem::product(const Functional& phi_a, const Functional& psi_b) const {
  return Functional(joint_local_, kron(phi_a.density(), psi_b.density()));
}

Functional BipartiteSystem::marginal_a(const Functional& omega) const {
  return Functional::from_ambient(a_local_, ptrace_second(omega.density(), da(), db()));
}

Functional BipartiteSystem::marginal_b(const Functional& omega) const {
  return Functional::from_ambient(b_local_, ptrace_first(omega.density(), da(), db()));
}

Functional BipartiteSystem::to_ambient(const Functional& omega) const {
  return Functional(joint_, lift(omega.density()) / static_cast<double>(r_));
}

double BipartiteSystem::iso_residual() const {
  double r = 0.0;
  for (const auto& x : a_local_->basis())
    for (const auto& y : b_local_->basis()) r = std::max(r, (a_op(x) * b_op(y) - lift(kron(x, y))).norm());
  return r;
}

Functional ProductEnsemble::induced(const BipartiteSystem& sys) const {
  Mat rho = Mat::Zero(sys.da() * sys.db(), sys.da() * sys.db());
  for (const auto& t : terms) rho += kron(t.a.density(), t.b.density());
  return Functional(sys.joint_local(), rho);
}

bool ProductEnsemble::all_positive() const {
  for (const auto& t : terms)
    if (!t.a.is_positive() || !t.b.is_positive()) return false;
  return true;
}

ExtendedReal mutual_information(const BipartiteSystem& sys, const Functional& omega) {
  return relative_entropy(omega, sys.product(sys.marginal_a(omega), sys.marginal_b(omega)));
}

double mutual_information_formula(const BipartiteSystem& sys, const Functional& omega) {
  return von_neumann_entropy(sys.marginal_a(omega)) + von_neumann_entropy(sys.marginal_b(omega)) -
         von_neumann_entropy(omega);
}

ExtendedReal relative_entropy_to(const BipartiteSystem& sys, const Functional& omega, const ProductEnsemble& sigma) {
  return relative_entropy(omega, sigma.induced(sys));
}

namespace {

// Adjoint Frechet derivative of log at sigma applied to omega.
Mat log_derivative(const Mat& sigma, const Mat& omega) {
  const HermEig e = herm_eig(sigma);
  const Eigen::Index n = e.values.size();
  const Mat w = e.vectors.adjoint() * omega * e.vectors;
  Mat g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double li = std::max(e.values(i), 1e-14);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double lj = std::max(e.values(j), 1e-14);
      const double gamma = std::abs(li - lj) > 1e-12 * std::max(li, lj) ? (std::log(li) - std::log(lj)) / (li - lj)
                                                                          : 2.0 / (li + lj);
      g(i, j) = gamma * w(i, j);
    }
  }
  return e.vectors * g * e.vectors.adjoint();
}

Mat top_projector(const Mat& h) {
  const HermEig e = herm_eig(h);
  const Vec v = e.vectors.col(e.values.size() - 1);
  return v * v.adjoint();
}

struct Ens {
  std::vector<double> w;
  std::vector<Mat> ra, rb;

  Mat density() const {
    Mat s = Mat::Zero(ra[0].rows() * rb[0].rows(), ra[0].cols() * rb[0].cols());
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * kron(ra[j], rb[j]);
    return s;
  }
};

ProductEnsemble to_ensemble(const BipartiteSystem& sys, const Ens& e) {
  ProductEnsemble out;
  for (std::size_t j = 0; j < e.w.size(); ++j) {
    if (e.w[j] <= 0.0) continue;
    out.terms.push_back({Functional(sys.a_local(), e.ra[j] * e.w[j]), Functional(sys.b_local(), e.rb[j])});
  }
  return out;
}

Ens from_ensemble(const ProductEnsemble& p) {
  Ens e;
  for (const auto& t : p.terms) {
    const double na = t.a.unit_value().real();
    const double nb = t.b.unit_value().real();
    if (na * nb <= 0.0) continue;
    e.w.push_back(na * nb);
    e.ra.push_back(t.a.density() / na);
    e.rb.push_back(t.b.density() / nb);
  }
  double s = 0.0;
  for (double w : e.w) s += w;
  for (double& w : e.w) w /= s;
  return e;
}

}  // namespace

ERResult relative_entanglement_upper(const BipartiteSystem& sys, const Functional& omega, const EROptions& opts) {
  if (opts.terms < 1) throw Error(ErrorKind::Parameter, "ensemble size K must be at least 1");
  if (!same_algebra(*omega.algebra(), *sys.joint_local()))
    throw Error(ErrorKind::Domain, "state must live on the joint algebra of the system");
  const auto& al = *sys.a_local();
  const auto& bl = *sys.b_local();
  const Mat& om = omega.density();

  auto value = [&](const Ens& e) -> double {
    const auto r = relative_entropy(omega, Functional(sys.joint_local(), e.density(), 1e-8));
    return r.is_infinite() ? std::numeric_limits<double>::infinity() : r.value();
  };

  // Baseline: product of the marginals.
  Ens best;
  best.w = {1.0};
  best.ra = {sys.marginal_a(omega).density()};
  best.rb = {sys.marginal_b(omega).density()};
  double best_val = value(best);

  auto optimise = [&](Ens e) {
    double cur = value(e);
    for (int it = 0; it < opts.iterations; ++it) {
      const double start = cur;
      if (!std::isfinite(cur)) break;
      Mat g = log_derivative(e.density(), om);
      // multiplicative weight update
      {
        Ens t = e;
        double s = 0.0;
        for (std::size_t j = 0; j < t.w.size(); ++j) {
          t.w[j] *= std::max(0.0, (g * kron(t.ra[j], t.rb[j])).trace().real());
          s += t.w[j];
        }
        if (s > 0) {
          for (double& w : t.w) w /= s;
          const double v = value(t);
          if (v < cur) {
            e = std::move(t);
            cur = v;
            g = log_derivative(e.density(), om);
          }
        }
      }
      // seesaw local moves with backtracking
      for (std::size_t j = 0; j < e.w.size(); ++j) {
        Mat na = e.ra[j], nb = e.rb[j];
        for (int s = 0; s < 2; ++s) {
          na = al.conditional_expectation(
              top_projector(ptrace_second(g * kron(Mat::Identity(na.rows(), na.cols()), nb), na.rows(), nb.rows())));
          nb = bl.conditional_expectation(
              top_projector(ptrace_first(g * kron(na, Mat::Identity(nb.rows(), nb.cols())), na.rows(), nb.rows())));
        }
        for (double t : {1.0, 0.5, 0.25, 0.1, 0.03}) {
          Ens trial = e;
          trial.ra[j] = (1 - t) * e.ra[j] + t * na;
          trial.rb[j] = (1 - t) * e.rb[j] + t * nb;
          const double v = value(trial);
          if (v < cur) {
            e = std::move(trial);
            cur = v;
            g = log_derivative(e.density(), om);
            break;
          }
        }
      }
      if (start - cur < 1e-13) break;
    }
    if (cur < best_val) {
      best_val = cur;
      best = e;
    }
  };

  for (const auto& ws : opts.warm_starts) {
    Ens e = from_ensemble(ws);
    if (!e.w.empty()) optimise(e);
  }
  for (int r = 0; r < opts.restarts; ++r) {
    Rng rng(opts.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(r));
    Ens e;
    for (int j = 0; j < opts.terms; ++j) {
      e.w.push_back(1.0 / opts.terms);
      e.ra.push_back(al.conditional_expectation(rng.density(sys.da())));
      e.rb.push_back(bl.conditional_expectation(rng.density(sys.db())));
    }
    optimise(e);
  }
  return {best_val, to_ensemble(sys, best)};
}

E1Result separable_bound_e1(const BipartiteSystem& sys, const ProductEnsemble& ensemble) {
  if (ensemble.terms.empty()) throw Error(ErrorKind::Decomposition, "empty ensemble");
  double total = 0.0, bound = 0.0;
  for (const auto& t : ensemble.terms) {
    if (!t.a.is_positive() || !t.b.is_positive()) throw Error(ErrorKind::Decomposition, "ensemble terms must be positive");
    const double l = t.a.unit_value().real() * t.b.unit_value().real();
    total += l;
    bound += eta(l);
  }
  if (std::abs(total - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "ensemble weights sum to " << total << ", not 1";
    throw Error(ErrorKind::Decomposition, os.str());
  }
  const double ei = mutual_information(sys, ensemble.induced(sys)).value();
  return {bound, ei, ei <= bound + 1e-8};
}

CpMap CpMap::identity(Eigen::Index n) { return CpMap{{Mat::Identity(n, n)}}; }

CpMap CpMap::from_choi(const Mat& choi, Eigen::Index din, Eigen::Index dout) {
  if (choi.rows() != din * dout || choi.cols() != din * dout) throw Error(ErrorKind::Shape, "Choi matrix has the wrong size");
  if ((choi - choi.adjoint()).norm() > 1e-10) throw Error(ErrorKind::Validity, "Choi matrix is not Hermitian");
  const HermEig e = herm_eig(choi);
  if (e.values(0) < -1e-10) {
    std::ostringstream os;
    os << "map is not completely positive (Choi eigenvalue " << e.values(0) << ")";
    throw Error(ErrorKind::Validity, os.str());
  }
  CpMap m;
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    if (e.values(k) <= 1e-14) continue;
    // choi = sum_ij E_ij (x) F(E_ij): eigenvector v reshaped with input index i, output index a
    const Vec v = e.vectors.col(k) * std::sqrt(e.values(k));
    Mat kr(dout, din);
    for (Eigen::Index i = 0; i < din; ++i)
      for (Eigen::Index a = 0; a < dout; ++a) kr(a, i) = v(i * dout + a);
    m.kraus.push_back(kr);
  }
  return m;
}

Mat CpMap::apply(const Mat& rho) const {
  Mat out = Mat::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

Mat CpMap::dual_apply(const Mat& x) const {
  Mat out = Mat::Zero(kraus.front().cols(), kraus.front().cols());
  for (const auto& k : kraus) out += k.adjoint() * x * k;
  return out;
}

namespace {

void check_local_dims(const BipartiteSystem& sys, const LocalOperation& op) {
  for (const auto& k : op.a.kraus)
    if (k.rows() != sys.da() || k.cols() != sys.da()) throw Error(ErrorKind::Shape, "A-side Kraus operator has the wrong size");
  for (const auto& k : op.b.kraus)
    if (k.rows() != sys.db() || k.cols() != sys.db()) throw Error(ErrorKind::Shape, "B-side Kraus operator has the wrong size");
  if (op.a.kraus.empty() || op.b.kraus.empty()) throw Error(ErrorKind::Shape, "empty Kraus family");
}

}  // namespace

std::vector<Outcome> apply_separable_operation(const BipartiteSystem& sys, const std::vector<LocalOperation>& ops,
                                               const Functional& omega) {
  if (ops.empty()) throw Error(ErrorKind::Shape, "no operations given");
  const Eigen::Index d = sys.da() * sys.db();
  Mat unit = Mat::Zero(d, d);
  for (const auto& op : ops) {
    check_local_dims(sys, op);
    unit += kron(op.a.dual_apply(Mat::Identity(sys.da(), sys.da())), op.b.dual_apply(Mat::Identity(sys.db(), sys.db())));
  }
  const double resid = (unit - Mat::Identity(d, d)).norm();
  if (resid > 1e-10) {
    std::ostringstream os;
    os << "operations do not sum to a unital map (residual " << resid << ")";
    throw Error(ErrorKind::Validity, os.str());
  }
  std::vector<Outcome> out;
  for (const auto& op : ops) {
    Mat rho = Mat::Zero(d, d);
    for (const auto& ka : op.a.kraus)
      for (const auto& kb : op.b.kraus) {
        const Mat k = kron(ka, kb);
        rho += k * omega.density() * k.adjoint();
      }
    const double p = rho.trace().real();
    if (p <= kZeroEig) continue;
    out.push_back({p, sys.state(hermitian_part(rho) / p)});
  }
  return out;
}

ProductEnsemble apply_local_operation(const BipartiteSystem& sys, const LocalOperation& op,
                                      const ProductEnsemble& ensemble) {
  check_local_dims(sys, op);
  ProductEnsemble out;
  for (const auto& t : ensemble.terms)
    out.terms.push_back({Functional::from_ambient(sys.a_local(), op.a.apply(t.a.density())),
                         Functional::from_ambient(sys.b_local(), op.b.apply(t.b.density()))});
  return out;
}

}  // namespace vnlab
