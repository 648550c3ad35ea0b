#include "vnlab/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "vnlab/errors.hpp"
#include "vnlab/random.hpp"

namespace vnlab {

namespace {

std::vector<Eigen::Index> make_offsets(const std::vector<Block>& blocks) {
  std::vector<Eigen::Index> off;
  Eigen::Index acc = 0;
  for (const auto& b : blocks) {
    off.push_back(acc);
    acc += static_cast<Eigen::Index>(b.n) * b.m;
  }
  return off;
}

Mat block_diag_sum(const std::vector<Mat>& parts, const std::vector<Block>& blocks,
                   Eigen::Index d) {
  Mat y = Mat::Zero(d, d);
  Eigen::Index off = 0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Eigen::Index sz = static_cast<Eigen::Index>(blocks[k].n) * blocks[k].m;
    y.block(off, off, sz, sz) = kron(parts[k], Mat::Identity(blocks[k].m, blocks[k].m));
    off += sz;
  }
  return y;
}

// Groups ascending eigenvalues into clusters separated by more than `gap`.
std::vector<std::vector<Eigen::Index>> cluster(const RVec& values, double gap) {
  std::vector<std::vector<Eigen::Index>> out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (out.empty() || values(i) - values(out.back().back()) > gap) out.emplace_back();
    out.back().push_back(i);
  }
  return out;
}

Mat random_combination(const std::vector<Mat>& basis, Rng& rng, Eigen::Index d) {
  Mat x = Mat::Zero(d, d);
  for (const auto& b : basis) x += rng.complex_normal() * b;
  return x;
}

Mat columns(const Mat& m, const std::vector<Eigen::Index>& idx) {
  Mat out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(k) = m.col(idx[k]);
  return out;
}

cplx phase_of(cplx z) {
  const double a = std::abs(z);
  return a > 0 ? z / a : cplx(1.0);
}

}  // namespace

FdAlgebra::FdAlgebra(Eigen::Index ambient_dim, std::vector<Block> blocks, Mat basis_unitary,
                     double tol)
    : ambient_dim_(ambient_dim), blocks_(std::move(blocks)), w_(std::move(basis_unitary)) {
  if (ambient_dim_ <= 0) throw Error(ErrorKind::InvalidDimension, "ambient dimension must be positive");
  if (blocks_.empty()) throw Error(ErrorKind::InvalidDimension, "algebra needs at least one block");
  Eigen::Index total = 0;
  for (const auto& b : blocks_) {
    if (b.n <= 0 || b.m <= 0) throw Error(ErrorKind::InvalidDimension, "block sizes must be positive");
    total += static_cast<Eigen::Index>(b.n) * b.m;
  }
  if (total != ambient_dim_) {
    throw Error(ErrorKind::Shape, "sum of n_k*m_k does not match the ambient dimension");
  }
  if (w_.rows() != ambient_dim_ || w_.cols() != ambient_dim_) {
    throw Error(ErrorKind::Shape, "basis unitary has the wrong shape");
  }
  const double err = op_norm(w_.adjoint() * w_ - Mat::Identity(ambient_dim_, ambient_dim_));
  if (err > tol) {
    std::ostringstream os;
    os << "basis matrix is not unitary (residual " << err << ")";
    throw Error(ErrorKind::Validity, os.str());
  }
  offsets_ = make_offsets(blocks_);
}

FdAlgebra FdAlgebra::full_matrix(int n) {
  if (n <= 0) throw Error(ErrorKind::InvalidDimension, "full_matrix_algebra needs n >= 1");
  return FdAlgebra(n, {Block{n, 1}}, Mat::Identity(n, n));
}

FdAlgebra full_matrix_algebra(int n) { return FdAlgebra::full_matrix(n); }

Eigen::Index FdAlgebra::dimension() const {
  Eigen::Index s = 0;
  for (const auto& b : blocks_) s += static_cast<Eigen::Index>(b.n) * b.n;
  return s;
}

Mat FdAlgebra::embed(const std::vector<Mat>& parts) const {
  if (parts.size() != blocks_.size()) throw Error(ErrorKind::Shape, "wrong number of block parts");
  for (std::size_t k = 0; k < parts.size(); ++k)
    if (parts[k].rows() != blocks_[k].n || parts[k].cols() != blocks_[k].n)
      throw Error(ErrorKind::Shape, "block part has the wrong size");
  return w_ * block_diag_sum(parts, blocks_, ambient_dim_) * w_.adjoint();
}

std::vector<Mat> FdAlgebra::block_parts(const Mat& x) const {
  if (x.rows() != ambient_dim_ || x.cols() != ambient_dim_)
    throw Error(ErrorKind::Shape, "matrix does not match the ambient dimension");
  const Mat y = w_.adjoint() * x * w_;
  std::vector<Mat> parts;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto& b = blocks_[k];
    const Eigen::Index sz = static_cast<Eigen::Index>(b.n) * b.m;
    const Mat yk = y.block(offsets_[k], offsets_[k], sz, sz);
    parts.push_back(ptrace_second(yk, b.n, b.m) / static_cast<double>(b.m));
  }
  return parts;
}

Mat FdAlgebra::conditional_expectation(const Mat& x) const { return embed(block_parts(x)); }

double FdAlgebra::distance(const Mat& x) const { return (x - conditional_expectation(x)).norm(); }

bool FdAlgebra::contains(const Mat& x, double tol) const {
  return distance(x) <= tol * std::max(1.0, x.norm());
}

Mat FdAlgebra::matrix_unit(std::size_t k, int i, int j) const {
  std::vector<Mat> parts;
  for (const auto& b : blocks_) parts.push_back(Mat::Zero(b.n, b.n));
  parts[k](i, j) = 1.0;
  return embed(parts);
}

std::vector<Mat> FdAlgebra::basis() const {
  std::vector<Mat> out;
  for (std::size_t k = 0; k < blocks_.size(); ++k)
    for (int i = 0; i < blocks_[k].n; ++i)
      for (int j = 0; j < blocks_[k].n; ++j) out.push_back(matrix_unit(k, i, j));
  return out;
}

Vec FdAlgebra::coordinates(const Mat& x) const {
  const auto parts = block_parts(x);
  Vec c(dimension());
  Eigen::Index idx = 0;
  for (const auto& p : parts)
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      for (Eigen::Index j = 0; j < p.cols(); ++j) c(idx++) = p(i, j);
  return c;
}

Mat FdAlgebra::from_coordinates(const Vec& c) const {
  if (c.size() != dimension()) throw Error(ErrorKind::Shape, "coordinate vector has the wrong length");
  std::vector<Mat> parts;
  Eigen::Index idx = 0;
  for (const auto& b : blocks_) {
    Mat p(b.n, b.n);
    for (int i = 0; i < b.n; ++i)
      for (int j = 0; j < b.n; ++j) p(i, j) = c(idx++);
    parts.push_back(p);
  }
  return embed(parts);
}

std::vector<Mat> FdAlgebra::vector_blocks(const Vec& v) const {
  if (v.size() != ambient_dim_) throw Error(ErrorKind::Shape, "vector does not match the ambient dimension");
  const Vec u = w_.adjoint() * v;
  std::vector<Mat> out;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto& b = blocks_[k];
    out.push_back(reshape_rows(u.segment(offsets_[k], static_cast<Eigen::Index>(b.n) * b.m), b.n, b.m));
  }
  return out;
}

Vec FdAlgebra::vector_from_blocks(const std::vector<Mat>& parts) const {
  if (parts.size() != blocks_.size()) throw Error(ErrorKind::Shape, "wrong number of vector blocks");
  Vec u(ambient_dim_);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto& b = blocks_[k];
    if (parts[k].rows() != b.n || parts[k].cols() != b.m) throw Error(ErrorKind::Shape, "vector block has the wrong size");
    u.segment(offsets_[k], static_cast<Eigen::Index>(b.n) * b.m) = flatten_rows(parts[k]);
  }
  return w_ * u;
}

Mat FdAlgebra::block_projection(std::size_t k) const {
  const Eigen::Index sz = static_cast<Eigen::Index>(blocks_[k].n) * blocks_[k].m;
  const Mat wk = w_.middleCols(offsets_[k], sz);
  return wk * wk.adjoint();
}

FdAlgebra canonicalize(Eigen::Index ambient_dim, std::vector<Block> blocks, const Mat& w) {
  const auto off = make_offsets(blocks);
  std::vector<RVec> diag;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Eigen::Index sz = static_cast<Eigen::Index>(blocks[k].n) * blocks[k].m;
    const Mat wk = w.middleCols(off[k], sz);
    diag.push_back((wk * wk.adjoint()).diagonal().real());
  }
  std::vector<std::size_t> order(blocks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (blocks[a].n != blocks[b].n) return blocks[a].n < blocks[b].n;
    if (blocks[a].m != blocks[b].m) return blocks[a].m < blocks[b].m;
    for (Eigen::Index i = 0; i < diag[a].size(); ++i) {
      const double da = std::round(diag[a](i) * 1e8);
      const double db = std::round(diag[b](i) * 1e8);
      if (da != db) return da > db;
    }
    return false;
  });
  std::vector<Block> sorted;
  Mat w2(ambient_dim, ambient_dim);
  Eigen::Index col = 0;
  for (auto k : order) {
    sorted.push_back(blocks[k]);
    const Eigen::Index sz = static_cast<Eigen::Index>(blocks[k].n) * blocks[k].m;
    w2.middleCols(col, sz) = w.middleCols(off[k], sz);
    col += sz;
  }
  return FdAlgebra(ambient_dim, std::move(sorted), std::move(w2));
}

std::vector<Mat> commutant_basis(const std::vector<Mat>& gens, double tol) {
  if (gens.empty()) throw Error(ErrorKind::Shape, "need at least one matrix");
  const Eigen::Index d = gens.front().rows();
  for (const auto& g : gens)
    if (g.rows() != d || g.cols() != d) throw Error(ErrorKind::Shape, "generators must be square with equal size");

  // Every solution commutes with a random selfadjoint h from span(gens, gens^*), so it is
  // block diagonal over the eigenspaces of h. Near-degenerate eigenvalues are merged, which
  // only enlarges the search space.
  Rng rng(0xc0ffeeULL);
  Mat h = Mat::Zero(d, d);
  for (const auto& g : gens) h += rng.normal() * (g + g.adjoint()) + rng.normal() * cplx(0, 1) * (g - g.adjoint());
  const HermEig eh = herm_eig(h);
  const double hscale = std::max(1.0, eh.values.cwiseAbs().maxCoeff());
  const auto groups = cluster(eh.values, 1e-8 * hscale);
  const Mat& q = eh.vectors;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> idx;
  for (const auto& g : groups)
    for (auto a : g)
      for (auto b : g) idx.emplace_back(a, b);
  const Eigen::Index n = static_cast<Eigen::Index>(idx.size());

  // Gram matrix of X -> [G, X] on the units E_ab, with G = Q^* g Q for g and g^*.
  Mat gram = Mat::Zero(n, n);
  for (const auto& g0 : gens) {
    for (int adj = 0; adj < 2; ++adj) {
      const Mat g = q.adjoint() * (adj ? Mat(g0.adjoint()) : g0) * q;
      const Mat gg = g.adjoint() * g;
      const Mat ggs = g * g.adjoint();
      for (Eigen::Index r = 0; r < n; ++r) {
        const auto [a, b] = idx[static_cast<std::size_t>(r)];
        for (Eigen::Index c2 = 0; c2 < n; ++c2) {
          const auto [c, e] = idx[static_cast<std::size_t>(c2)];
          cplx v = -std::conj(g(c, a)) * g(e, b) - g(a, c) * std::conj(g(b, e));
          if (b == e) v += gg(a, c);
          if (a == c) v += ggs(e, b);
          gram(r, c2) += v;
        }
      }
    }
  }
  const HermEig e = herm_eig(gram);
  const double scale = std::max(1.0, e.values(n - 1));
  std::vector<Mat> out;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (e.values(i) > std::max(tol, 1e-12) * scale) continue;
    Mat x = Mat::Zero(d, d);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto [a, b] = idx[static_cast<std::size_t>(r)];
      x(a, b) = e.vectors(r, i);
    }
    out.push_back(q * x * q.adjoint());
  }
  return out;
}

FdAlgebra algebra_from_generators(const std::vector<Mat>& gens, double tol) {
  if (gens.empty()) throw Error(ErrorKind::Shape, "algebra_from_generators needs a nonempty generator list");
  if (!(tol > 0.0 && tol <= 1e-4)) throw Error(ErrorKind::Parameter, "tolerance must lie in (0, 1e-4]");
  const Eigen::Index d = gens.front().rows();
  for (const auto& g : gens)
    if (g.rows() != d || g.cols() != d) throw Error(ErrorKind::Shape, "generators must be square with equal size");

  Rng rng(0x5eedULL);
  std::vector<Mat> gen_list = gens;
  gen_list.push_back(Mat::Identity(d, d));
  const auto comm = commutant_basis(gen_list, tol);  // M'
  std::vector<Mat> comm_gens;
  for (int r = 0; r < 2; ++r) comm_gens.push_back(random_combination(comm, rng, d));
  const auto alg = commutant_basis(comm_gens, tol);  // M = M''
  std::vector<Mat> both = gen_list;
  both.insert(both.end(), comm_gens.begin(), comm_gens.end());
  const auto center = commutant_basis(both, tol);  // Z = M ∩ M'

  const double gap = std::max(1e-7, 1e3 * tol);
  const Mat z = hermitian_part(random_combination(center, rng, d));
  const HermEig ez = herm_eig(z / std::max(1.0, op_norm(z)));
  const auto central = cluster(ez.values, gap);

  std::vector<Block> blocks;
  Mat w(d, d);
  Eigen::Index col = 0;
  const Mat hm = hermitian_part(random_combination(alg, rng, d));
  const Mat hc = hermitian_part(random_combination(comm, rng, d));
  const Mat xm = random_combination(alg, rng, d);
  const Mat yc = random_combination(comm, rng, d);
  for (const auto& cl : central) {
    const Mat q = columns(ez.vectors, cl);
    Mat hq = q.adjoint() * hm * q;
    const HermEig eh = herm_eig(hq / std::max(1.0, op_norm(hq)));
    const auto groups = cluster(eh.values, gap);
    const int n = static_cast<int>(groups.size());
    const int m = static_cast<int>(groups.front().size());
    for (const auto& g : groups) {
      if (static_cast<int>(g.size()) != m) {
        std::ostringstream os;
        os << "block separation did not converge: unequal multiplicities within a central summand";
        throw Error(ErrorKind::Decomposition, os.str());
      }
    }
    std::vector<std::vector<Vec>> g_vecs(n);
    for (int i = 0; i < n; ++i) {
      const Mat ui = q * columns(eh.vectors, groups[i]);
      const Mat hci = ui.adjoint() * hc * ui;
      const HermEig ec = herm_eig(hci / std::max(1.0, op_norm(hci)));
      for (Eigen::Index j = 1; j < ec.values.size(); ++j) {
        if (ec.values(j) - ec.values(j - 1) <= gap) {
          throw Error(ErrorKind::Decomposition, "block separation did not converge: degenerate commutant spectrum");
        }
      }
      for (int j = 0; j < m; ++j) g_vecs[i].push_back(ui * ec.vectors.col(j));
    }
    // Phase alignment so the joint eigenvectors form a product basis u_i (x) v_j.
    std::vector<std::vector<Vec>> f(n, std::vector<Vec>(m));
    f[0][0] = g_vecs[0][0];
    for (int i = 1; i < n; ++i) {
      const cplx c = g_vecs[i][0].dot(xm * f[0][0]);
      if (std::abs(c) < 1e-9) throw Error(ErrorKind::Decomposition, "phase alignment failed (non-generic sample)");
      f[i][0] = g_vecs[i][0] * phase_of(c);
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 1; j < m; ++j) {
        const cplx c = g_vecs[i][j].dot(yc * f[i][0]);
        if (std::abs(c) < 1e-9) throw Error(ErrorKind::Decomposition, "phase alignment failed (non-generic sample)");
        f[i][j] = g_vecs[i][j] * phase_of(c);
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) w.col(col + i * m + j) = f[i][j];
    col += static_cast<Eigen::Index>(n) * m;
    blocks.push_back(Block{n, m});
  }
  if (col != d) throw Error(ErrorKind::Decomposition, "central decomposition does not cover the space");
  // Re-orthonormalise against rounding before certifying.
  Eigen::HouseholderQR<Mat> qr(w);
  Mat wq = qr.householderQ();
  const Mat rr = qr.matrixQR();
  for (Eigen::Index j = 0; j < d; ++j) wq.col(j) *= phase_of(rr(j, j));
  FdAlgebra out = canonicalize(d, std::move(blocks), wq);

  double residual = 0.0;
  for (const auto& g : gens) residual = std::max(residual, out.distance(g) / std::max(1.0, g.norm()));
  if (residual > std::max(1e-8, 100 * tol) || out.dimension() != static_cast<Eigen::Index>(alg.size())) {
    std::ostringstream os;
    os << "block structure failed certification: generator residual " << residual << ", dimension "
       << out.dimension() << " vs span " << alg.size();
    throw Error(ErrorKind::Decomposition, os.str());
  }
  return out;
}

FdAlgebra commutant(const FdAlgebra& m) {
  const Eigen::Index d = m.ambient_dim();
  std::vector<Block> blocks;
  Mat w(d, d);
  for (std::size_t k = 0; k < m.blocks().size(); ++k) {
    const auto& b = m.blocks()[k];
    blocks.push_back(Block{b.m, b.n});
    const Eigen::Index off = m.block_offset(k);
    // new coordinate j*n + i corresponds to old coordinate i*m + j
    for (int i = 0; i < b.n; ++i)
      for (int j = 0; j < b.m; ++j) w.col(off + j * b.n + i) = m.basis_unitary().col(off + i * b.m + j);
  }
  return canonicalize(d, std::move(blocks), w);
}

FdAlgebra tensor(const FdAlgebra& m, const FdAlgebra& n) {
  const Eigen::Index dm = m.ambient_dim();
  const Eigen::Index dn = n.ambient_dim();
  const Eigen::Index d = dm * dn;
  const Mat wk = kron(m.basis_unitary(), n.basis_unitary());
  std::vector<Block> blocks;
  Mat w(d, d);
  Eigen::Index col = 0;
  for (std::size_t k = 0; k < m.blocks().size(); ++k) {
    for (std::size_t l = 0; l < n.blocks().size(); ++l) {
      const auto& bk = m.blocks()[k];
      const auto& bl = n.blocks()[l];
      const int nn = bk.n * bl.n;
      const int mm = bk.m * bl.m;
      for (int i = 0; i < bk.n; ++i)
        for (int ip = 0; ip < bl.n; ++ip)
          for (int j = 0; j < bk.m; ++j)
            for (int jp = 0; jp < bl.m; ++jp) {
              const Eigen::Index row = (i * bl.n + ip);
              const Eigen::Index cc = (j * bl.m + jp);
              const Eigen::Index a = m.block_offset(k) + i * bk.m + j;
              const Eigen::Index b = n.block_offset(l) + ip * bl.m + jp;
              w.col(col + row * mm + cc) = wk.col(a * dn + b);
            }
      col += static_cast<Eigen::Index>(nn) * mm;
      blocks.push_back(Block{nn, mm});
    }
  }
  return canonicalize(d, std::move(blocks), w);
}

FdAlgebra join(const FdAlgebra& m, const FdAlgebra& n, double tol) {
  if (m.ambient_dim() != n.ambient_dim()) throw Error(ErrorKind::Shape, "join needs a common ambient space");
  auto gens = m.basis();
  const auto nb = n.basis();
  gens.insert(gens.end(), nb.begin(), nb.end());
  return algebra_from_generators(gens, tol);
}

bool check_commuting(const FdAlgebra& m, const FdAlgebra& n, double tol) {
  if (m.ambient_dim() != n.ambient_dim()) throw Error(ErrorKind::Shape, "algebras act on different spaces");
  for (const auto& a : m.basis())
    for (const auto& b : n.basis())
      if (op_norm(a * b - b * a) > tol) return false;
  return true;
}

double inclusion_residual(const FdAlgebra& sub, const FdAlgebra& super) {
  if (sub.ambient_dim() != super.ambient_dim()) throw Error(ErrorKind::Shape, "algebras act on different spaces");
  double r = 0.0;
  for (const auto& x : sub.basis()) r = std::max(r, super.distance(x));
  return r;
}

double equality_residual(const FdAlgebra& a, const FdAlgebra& b) {
  return std::max(inclusion_residual(a, b), inclusion_residual(b, a));
}

FdAlgebra conjugate_by(const FdAlgebra& m, const Mat& u) {
  return canonicalize(m.ambient_dim(), m.blocks(), u * m.basis_unitary());
}

}  // namespace vnlab
