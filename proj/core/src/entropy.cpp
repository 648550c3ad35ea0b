#include "vnlab/entropy.hpp"

#include <cmath>
#include <sstream>

#include "vnlab/errors.hpp"
#include "vnlab/modular.hpp"
#include "vnlab/random.hpp"

namespace vnlab {

double ExtendedReal::value() const {
  if (infinite_) throw Error(ErrorKind::NotApplicable, "value is +infinity");
  return value_;
}

std::string ExtendedReal::to_string() const {
  if (infinite_) return "+inf";
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

const char* to_string(RelEntMethod m) { return m == RelEntMethod::Umegaki ? "umegaki" : "modular"; }

namespace {

void check_pair(const Functional& phi, const Functional& psi) {
  if (!same_algebra(*phi.algebra(), *psi.algebra()))
    throw Error(ErrorKind::Domain, "relative entropy needs functionals on the same algebra");
  if (!phi.is_positive() || !psi.is_positive())
    throw Error(ErrorKind::Domain, "relative entropy needs positive functionals");
}

ExtendedReal umegaki(const Functional& phi, const Functional& psi) {
  const auto dp = phi.block_densities();
  const auto ds = psi.block_densities();
  double total = 0.0;
  for (std::size_t k = 0; k < dp.size(); ++k) {
    const HermEig ep = herm_eig(dp[k]);
    const HermEig es = herm_eig(ds[k]);
    // weight of phi outside the support of psi
    double outside = 0.0;
    for (Eigen::Index i = 0; i < es.values.size(); ++i) {
      if (es.values(i) > kZeroEig) continue;
      outside += (es.vectors.col(i).adjoint() * dp[k] * es.vectors.col(i))(0, 0).real();
    }
    if (outside > kZeroEig * std::max(1.0, dp[k].trace().real())) return ExtendedReal::infinity();
    for (Eigen::Index i = 0; i < ep.values.size(); ++i) {
      const double l = ep.values(i);
      if (l > kZeroEig) total += l * std::log(l);
    }
    const Mat logs = es.vectors *
                     es.values.unaryExpr([](double x) { return x > kZeroEig ? std::log(x) : 0.0; }).asDiagonal() *
                     es.vectors.adjoint();
    const Mat p = support_projection(dp[k]);
    total -= (p * dp[k] * p * logs).trace().real();
  }
  return total;
}

ExtendedReal modular(const Functional& phi, const Functional& psi) {
  const auto rep = hs_space(*phi.algebra());
  const Vec xi = hs_vector(phi);
  const Vec eta = hs_vector(psi);
  if (xi.norm() <= kZeroEig) return 0.0;
  if (eta.norm() <= kZeroEig) return ExtendedReal::infinity();
  // S(phi||psi) = -(xi | log Delta_{eta,xi} xi) as a spectral integral
  const Mat delta = relative_modular(*rep, eta, xi).delta;
  const HermEig e = herm_eig(delta);
  const double top = std::max(1.0, e.values(e.values.size() - 1));
  const double norm2 = xi.squaredNorm();
  double total = 0.0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    const double w = std::norm(e.vectors.col(i).dot(xi));
    if (e.values(i) <= kZeroEig * top) {
      if (w > kZeroEig * norm2) return ExtendedReal::infinity();
      continue;
    }
    total -= w * std::log(e.values(i));
  }
  return total;
}

// Support-restricted cocycle D_psi^{it} D_phi^{-it}.
Mat block_cocycle(const Functional& psi, const Functional& phi, double t) {
  const auto dp = phi.block_densities();
  const auto ds = psi.block_densities();
  std::vector<Mat> parts;
  for (std::size_t k = 0; k < dp.size(); ++k)
    parts.push_back(psd_imag_power(ds[k], t, kZeroEig) * psd_imag_power(dp[k], -t, kZeroEig));
  return phi.algebra()->embed(parts);
}

}  // namespace

ExtendedReal relative_entropy(const Functional& phi, const Functional& psi, RelEntMethod method) {
  check_pair(phi, psi);
  return method == RelEntMethod::Umegaki ? umegaki(phi, psi) : modular(phi, psi);
}

CocycleCheck relative_entropy_cocycle_check(const Functional& phi, const Functional& psi, double h) {
  if (!(h >= 1e-6 && h <= 1e-2)) throw Error(ErrorKind::Parameter, "step h must lie in [1e-6, 1e-2]");
  const ExtendedReal ref = relative_entropy(phi, psi);
  if (ref.is_infinite()) throw Error(ErrorKind::NotApplicable, "cocycle derivative needs finite relative entropy");
  const bool faithful = phi.is_faithful() && psi.is_faithful();
  auto cocycle = [&](double t) { return faithful ? connes_cocycle(psi, phi, t) : block_cocycle(psi, phi, t); };
  const cplx fp = phi(cocycle(h));
  const cplx fm = phi(cocycle(-h));
  const double est = (cplx(0, 1) * (fp - fm) / (2.0 * h)).real();
  return {est, ref.value(), std::abs(est - ref.value()) / (h * h)};
}

double von_neumann_entropy(const Functional& phi) {
  if (!phi.is_positive()) throw Error(ErrorKind::Domain, "entropy needs a positive functional");
  double s = 0.0;
  for (const auto& d : phi.block_densities()) s += spectral_entropy(d);
  return s;
}

namespace {

void check_ensemble(const Functional& phi, const std::vector<EnsembleTerm>& ensemble, double tol) {
  if (ensemble.empty()) throw Error(ErrorKind::Decomposition, "empty ensemble");
  double wsum = 0.0;
  Mat rec = Mat::Zero(phi.density().rows(), phi.density().cols());
  for (const auto& t : ensemble) {
    if (!(t.weight > 0.0)) throw Error(ErrorKind::Decomposition, "ensemble weights must be positive");
    if (!same_algebra(*t.state.algebra(), *phi.algebra()))
      throw Error(ErrorKind::Decomposition, "ensemble member lives on another algebra");
    wsum += t.weight;
    rec += t.weight * t.state.density();
  }
  const double resid = (rec - phi.density()).norm();
  if (std::abs(wsum - 1.0) > tol || resid > tol) {
    std::ostringstream os;
    os << "ensemble does not reconstruct the state (residual " << resid << ", weight sum " << wsum << ")";
    throw Error(ErrorKind::Decomposition, os.str());
  }
}

double ensemble_value(const Functional& phi, const std::vector<EnsembleTerm>& ensemble, const AlgebraRef& sub) {
  const Functional base(sub, sub->conditional_expectation(phi.density()));
  double v = 0.0;
  for (const auto& t : ensemble) {
    const Functional r(sub, sub->conditional_expectation(t.state.density()));
    v += t.weight * relative_entropy(r, base).value();
  }
  return v;
}

}  // namespace

double entropy_decomposition_value(const Functional& phi, const std::vector<EnsembleTerm>& ensemble, double tol) {
  return entropy_decomposition_value(phi, ensemble, phi.algebra(), tol);
}

double entropy_decomposition_value(const Functional& phi, const std::vector<EnsembleTerm>& ensemble,
                                   const AlgebraRef& sub, double tol) {
  check_ensemble(phi, ensemble, tol);
  if (inclusion_residual(*sub, *phi.algebra()) > 1e-9) throw Error(ErrorKind::Domain, "A is not a subalgebra of B");
  return ensemble_value(phi, ensemble, sub);
}

std::vector<EnsembleTerm> spectral_ensemble(const Functional& phi) {
  const auto& alg = *phi.algebra();
  const auto ds = phi.block_densities();
  std::vector<EnsembleTerm> out;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const HermEig e = herm_eig(ds[k]);
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
      if (e.values(i) <= kZeroEig) continue;
      std::vector<Mat> blocks;
      for (std::size_t l = 0; l < ds.size(); ++l) blocks.push_back(Mat::Zero(ds[l].rows(), ds[l].cols()));
      blocks[k] = e.vectors.col(i) * e.vectors.col(i).adjoint();
      out.push_back({e.values(i), Functional::from_block_densities(phi.algebra(), blocks)});
    }
  }
  (void)alg;
  return out;
}

namespace {

struct PovmRun {
  std::vector<std::vector<Mat>> a;  // a[i][k]
};

// tau_i = D^{1/2} Pi_i D^{1/2}, Pi_i = G^{-1/2} A_i A_i^* G^{-1/2}.
std::vector<EnsembleTerm> povm_ensemble(const Functional& phi, const std::vector<Mat>& droot, const PovmRun& run) {
  const std::size_t nb = droot.size();
  std::vector<Mat> ginv(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    Mat g = Mat::Zero(droot[k].rows(), droot[k].cols());
    for (const auto& ai : run.a) g += ai[k] * ai[k].adjoint();
    ginv[k] = psd_power(g, -0.5);
  }
  std::vector<EnsembleTerm> out;
  for (const auto& ai : run.a) {
    std::vector<Mat> tau(nb);
    double w = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      const Mat pi = ginv[k] * ai[k] * ai[k].adjoint() * ginv[k];
      tau[k] = hermitian_part(droot[k] * pi * droot[k]);
      w += tau[k].trace().real();
    }
    if (w <= 1e-14) continue;
    for (auto& t : tau) t /= w;
    out.push_back({w, Functional::from_block_densities(phi.algebra(), tau)});
  }
  return out;
}

}  // namespace

ConditionalEntropyResult conditional_entropy(const Functional& phi, const AlgebraRef& sub,
                                             const ConditionalEntropyOptions& opts) {
  if (opts.max_terms < 1 || opts.restarts < 1) throw Error(ErrorKind::Parameter, "K and R must be at least 1");
  if (phi.kind() != FunctionalKind::State) throw Error(ErrorKind::Domain, "conditional entropy needs a state");
  if (sub->ambient_dim() != phi.algebra()->ambient_dim() || inclusion_residual(*sub, *phi.algebra()) > 1e-9)
    throw Error(ErrorKind::Domain, "A is not a subalgebra of B");

  ConditionalEntropyResult best{0.0, {{1.0, phi}}};
  auto consider = [&](const std::vector<EnsembleTerm>& ens) {
    if (ens.empty()) return;
    const double v = ensemble_value(phi, ens, sub);
    if (v > best.lower_estimate) best = {v, ens};
  };
  consider(spectral_ensemble(phi));
  for (const auto& w : opts.witnesses) {
    check_ensemble(phi, w, 1e-8);
    consider(w);
  }

  std::vector<Mat> droot;
  for (const auto& d : phi.block_densities()) droot.push_back(psd_power(d, 0.5, kZeroEig));
  for (int terms = 2; terms <= opts.max_terms; ++terms) {
    for (int r = 0; r < opts.restarts; ++r) {
      Rng rng(opts.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(terms) * 1000003ULL +
              static_cast<std::uint64_t>(r));
      PovmRun run;
      for (int i = 0; i < terms; ++i) {
        std::vector<Mat> ai;
        for (const auto& d : droot) {
          const bool last_full = i == terms - 1 && terms < d.rows();
          ai.push_back(rng.ginibre(d.rows(), last_full ? d.rows() : 1));
        }
        run.a.push_back(ai);
      }
      auto ens = povm_ensemble(phi, droot, run);
      double val = ens.empty() ? 0.0 : ensemble_value(phi, ens, sub);
      double step = 0.5;
      for (int it = 0; it < opts.iterations; ++it) {
        PovmRun trial = run;
        const auto i = static_cast<std::size_t>(rng.next_u64() % static_cast<std::uint64_t>(terms));
        for (auto& blk : trial.a[i]) blk += step * rng.ginibre(blk.rows(), blk.cols());
        auto tens = povm_ensemble(phi, droot, trial);
        if (tens.empty()) continue;
        const double tv = ensemble_value(phi, tens, sub);
        if (tv > val) {
          run = std::move(trial);
          ens = std::move(tens);
          val = tv;
          step *= 1.3;
        } else {
          step *= 0.7;
        }
      }
      if (val > best.lower_estimate && !ens.empty()) best = {val, ens};
    }
  }
  return best;
}

}  // namespace vnlab
