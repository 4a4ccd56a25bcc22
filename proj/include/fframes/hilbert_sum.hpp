#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fframes/linalg.hpp"

namespace fframes {

/// Finite Hilbert direct sum (sum_i ⊕ V_i)_{l2}: an ordered list of blocks,
/// each a closed subspace carried by an orthonormal basis. Elements are
/// stored blockwise in basis coordinates, so the l2-sum structure is exact.
template <ScalarField S>
class DirectSumSpace {
 public:
  DirectSumSpace() = default;
  explicit DirectSumSpace(std::vector<Subspace<S>> blocks) : blocks_(std::move(blocks)) {}

  /// Direct sum of full coordinate spaces F^{dims[i]}.
  static DirectSumSpace coordinate_spaces(const std::vector<Eigen::Index>& dims) {
    std::vector<Subspace<S>> blocks;
    blocks.reserve(dims.size());
    for (Eigen::Index k : dims) blocks.push_back(Subspace<S>::full(k));
    return DirectSumSpace(std::move(blocks));
  }

  std::size_t block_count() const { return blocks_.size(); }
  const Subspace<S>& block(std::size_t i) const { return blocks_[i]; }
  const std::vector<Subspace<S>>& blocks() const { return blocks_; }

  Eigen::Index total_dim() const {
    Eigen::Index n = 0;
    for (const auto& b : blocks_) n += b.dim();
    return n;
  }

  std::vector<Eigen::Index> dims() const {
    std::vector<Eigen::Index> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) out.push_back(b.dim());
    return out;
  }

  /// Structural compatibility: same block count and per-block dimensions.
  bool same_shape(const DirectSumSpace& other) const {
    if (block_count() != other.block_count()) return false;
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      if (blocks_[i].dim() != other.blocks_[i].dim() ||
          blocks_[i].ambient_dim() != other.blocks_[i].ambient_dim())
        return false;
    return true;
  }

 private:
  std::vector<Subspace<S>> blocks_;
};

/// Element (f_i) of a Hilbert direct sum; part i holds the coordinates of
/// f_i with respect to block i's stored basis.
template <ScalarField S>
struct BlockVector {
  DirectSumSpace<S> space;
  std::vector<Vector<S>> parts;

  BlockVector(DirectSumSpace<S> sp, std::vector<Vector<S>> p)
      : space(std::move(sp)), parts(std::move(p)) {
    if (parts.size() != space.block_count())
      throw SpaceMismatch("BlockVector: part count != block count");
    for (std::size_t i = 0; i < parts.size(); ++i)
      if (parts[i].size() != space.block(i).dim())
        throw SpaceMismatch("BlockVector: part length != block dimension");
  }

  static BlockVector zero(const DirectSumSpace<S>& sp) {
    std::vector<Vector<S>> p;
    p.reserve(sp.block_count());
    for (std::size_t i = 0; i < sp.block_count(); ++i)
      p.push_back(Vector<S>::Zero(sp.block(i).dim()));
    return BlockVector(sp, std::move(p));
  }
};

/// <f, g> = sum_i <f_i, g_i>, linear in the first argument.
template <ScalarField S>
S block_inner(const BlockVector<S>& f, const BlockVector<S>& g) {
  if (!f.space.same_shape(g.space))
    throw SpaceMismatch("block_inner: vectors live in different direct sums");
  S acc{};
  for (std::size_t i = 0; i < f.parts.size(); ++i) acc += g.parts[i].dot(f.parts[i]);
  return acc;
}

template <ScalarField S>
double block_norm(const BlockVector<S>& f) {
  double sq = 0.0;
  for (const auto& p : f.parts) sq += p.squaredNorm();
  return std::sqrt(sq);
}

/// Concatenation of the parts in block order; an isometry onto F^total.
template <ScalarField S>
Vector<S> flatten(const BlockVector<S>& f) {
  Vector<S> out(f.space.total_dim());
  Eigen::Index at = 0;
  for (const auto& p : f.parts) {
    out.segment(at, p.size()) = p;
    at += p.size();
  }
  return out;
}

template <ScalarField S>
BlockVector<S> unflatten(const DirectSumSpace<S>& space, const Vector<S>& flat) {
  if (flat.size() != space.total_dim())
    throw ShapeMismatch("unflatten: flat length != total dimension");
  std::vector<Vector<S>> parts;
  parts.reserve(space.block_count());
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < space.block_count(); ++i) {
    const Eigen::Index k = space.block(i).dim();
    parts.push_back(flat.segment(at, k));
    at += k;
  }
  return BlockVector<S>(space, std::move(parts));
}

/// Block-diagonal operator ⊕ O_i between two direct sums over the same index
/// set; block i maps block i of the domain into block i of the codomain and
/// nothing else, so blocks may be evaluated independently.
template <ScalarField S>
class BlockDiagonalOperator {
 public:
  BlockDiagonalOperator(DirectSumSpace<S> domain, DirectSumSpace<S> codomain,
                        std::vector<Matrix<S>> blocks)
      : domain_(std::move(domain)), codomain_(std::move(codomain)), blocks_(std::move(blocks)) {
    if (blocks_.size() != domain_.block_count() || blocks_.size() != codomain_.block_count())
      throw SpaceMismatch("BlockDiagonalOperator: block count mismatch");
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      if (blocks_[i].rows() != codomain_.block(i).dim() || blocks_[i].cols() != domain_.block(i).dim())
        throw SpaceMismatch("BlockDiagonalOperator: block shape mismatch");
  }

  static BlockDiagonalOperator identity(const DirectSumSpace<S>& space) {
    std::vector<Matrix<S>> blocks;
    blocks.reserve(space.block_count());
    for (std::size_t i = 0; i < space.block_count(); ++i)
      blocks.push_back(Matrix<S>::Identity(space.block(i).dim(), space.block(i).dim()));
    return BlockDiagonalOperator(space, space, std::move(blocks));
  }

  const DirectSumSpace<S>& domain() const { return domain_; }
  const DirectSumSpace<S>& codomain() const { return codomain_; }
  std::size_t block_count() const { return blocks_.size(); }
  const Matrix<S>& block(std::size_t i) const { return blocks_[i]; }
  const std::vector<Matrix<S>>& blocks() const { return blocks_; }

 private:
  DirectSumSpace<S> domain_;
  DirectSumSpace<S> codomain_;
  std::vector<Matrix<S>> blocks_;
};

template <ScalarField S>
BlockVector<S> apply_block_diag(const BlockDiagonalOperator<S>& op, const BlockVector<S>& f) {
  if (!f.space.same_shape(op.domain()))
    throw SpaceMismatch("apply_block_diag: vector not in operator domain");
  std::vector<Vector<S>> parts;
  parts.reserve(op.block_count());
  for (std::size_t i = 0; i < op.block_count(); ++i) parts.push_back(op.block(i) * f.parts[i]);
  return BlockVector<S>(op.codomain(), std::move(parts));
}

/// ‖⊕O_i‖ = max_i ‖O_i‖ (finite index set turns the sup into a max).
template <ScalarField S>
double block_diag_norm(const BlockDiagonalOperator<S>& op) {
  double n = 0.0;
  for (const auto& b : op.blocks()) n = std::max(n, spectral_norm<S>(b));
  return n;
}

template <ScalarField S>
BlockDiagonalOperator<S> block_diag_adjoint(const BlockDiagonalOperator<S>& op) {
  std::vector<Matrix<S>> blocks;
  blocks.reserve(op.block_count());
  for (const auto& b : op.blocks()) blocks.push_back(b.adjoint());
  return BlockDiagonalOperator<S>(op.codomain(), op.domain(), std::move(blocks));
}

/// (⊕O_i)(⊕P_i) = ⊕(O_i P_i).
template <ScalarField S>
BlockDiagonalOperator<S> block_diag_compose(const BlockDiagonalOperator<S>& o,
                                            const BlockDiagonalOperator<S>& p) {
  if (!p.codomain().same_shape(o.domain()))
    throw SpaceMismatch("block_diag_compose: inner spaces do not match");
  std::vector<Matrix<S>> blocks;
  blocks.reserve(o.block_count());
  for (std::size_t i = 0; i < o.block_count(); ++i) blocks.push_back(o.block(i) * p.block(i));
  return BlockDiagonalOperator<S>(p.domain(), o.codomain(), std::move(blocks));
}

template <ScalarField S>
bool block_diag_self_adjoint(const BlockDiagonalOperator<S>& op, const Tolerance& tol = {}) {
  if (!op.domain().same_shape(op.codomain())) return false;
  for (const auto& b : op.blocks())
    if (relative_residual(b, Matrix<S>(b.adjoint())) > tol.tau_res) return false;
  return true;
}

/// N(⊕O_i) as the direct sum of the blockwise null spaces, each expressed in
/// the coordinates of its domain block.
template <ScalarField S>
DirectSumSpace<S> block_diag_kernel(const BlockDiagonalOperator<S>& op, const Tolerance& tol = {}) {
  std::vector<Subspace<S>> blocks;
  blocks.reserve(op.block_count());
  for (std::size_t i = 0; i < op.block_count(); ++i) {
    const Matrix<S>& b = op.block(i);
    if (b.cols() == 0) {
      blocks.push_back(Subspace<S>::zero(0));
      continue;
    }
    if (b.rows() == 0) {
      blocks.push_back(Subspace<S>::full(b.cols()));
      continue;
    }
    Eigen::JacobiSVD<Matrix<S>> svd(b, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = tol.tau_rank * sv(0);
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv(k) > cutoff) ++rank;
    blocks.push_back(Subspace<S>(b.cols(), svd.matrixV().rightCols(b.cols() - rank), tol));
  }
  return DirectSumSpace<S>(std::move(blocks));
}

/// R(⊕O_i) as the direct sum of the blockwise column spaces, each expressed
/// in the coordinates of its codomain block (always closed in finite dim).
template <ScalarField S>
DirectSumSpace<S> block_diag_range(const BlockDiagonalOperator<S>& op, const Tolerance& tol = {}) {
  std::vector<Subspace<S>> blocks;
  blocks.reserve(op.block_count());
  for (std::size_t i = 0; i < op.block_count(); ++i) blocks.push_back(orthonormalize<S>(op.block(i), tol));
  return DirectSumSpace<S>(std::move(blocks));
}

/// (⊕O_i)† = ⊕O_i†.
template <ScalarField S>
BlockDiagonalOperator<S> block_diag_pseudo_inverse(const BlockDiagonalOperator<S>& op,
                                                   const Tolerance& tol = {}) {
  std::vector<Matrix<S>> blocks;
  blocks.reserve(op.block_count());
  for (const auto& b : op.blocks()) blocks.push_back(pseudo_inverse<S>(b, tol));
  return BlockDiagonalOperator<S>(op.codomain(), op.domain(), std::move(blocks));
}

/// (⊕O_i)^{-1} = ⊕O_i^{-1}. Every block must be square and invertible at the
/// operator-wide cutoff tau_rank * max_i sigma_max(O_i); the failing block is
/// reported.
template <ScalarField S>
BlockDiagonalOperator<S> block_diag_invert(const BlockDiagonalOperator<S>& op,
                                           const Tolerance& tol = {}) {
  const double scale = block_diag_norm(op);
  std::vector<Matrix<S>> blocks;
  blocks.reserve(op.block_count());
  for (std::size_t i = 0; i < op.block_count(); ++i) {
    const Matrix<S>& b = op.block(i);
    if (b.rows() != b.cols())
      throw NotInvertible(i, 0.0, "block_diag_invert: block " + std::to_string(i) + " is not square");
    if (b.rows() == 0) {
      blocks.push_back(b);
      continue;
    }
    Eigen::JacobiSVD<Matrix<S>> svd(b);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (!(smin > tol.tau_rank * scale))
      throw NotInvertible(i, smin,
                          "block_diag_invert: block " + std::to_string(i) +
                              " singular at tolerance (smallest singular value " +
                              std::to_string(smin) + ")");
    blocks.push_back(b.partialPivLu().inverse());
  }
  return BlockDiagonalOperator<S>(op.codomain(), op.domain(), std::move(blocks));
}

/// Blockwise orthogonal complement of U inside V:
/// (sum ⊕ U_i)^⊥ within (sum ⊕ V_i) is sum ⊕ (U_i^⊥ ∩ V_i).
template <ScalarField S>
DirectSumSpace<S> orthocomplement_blocks(const DirectSumSpace<S>& u, const DirectSumSpace<S>& v,
                                         const Tolerance& tol = {}) {
  if (u.block_count() != v.block_count())
    throw SpaceMismatch("orthocomplement_blocks: block count mismatch");
  std::vector<Subspace<S>> blocks;
  blocks.reserve(v.block_count());
  for (std::size_t i = 0; i < v.block_count(); ++i) {
    const Subspace<S>& ui = u.block(i);
    const Subspace<S>& vi = v.block(i);
    if (ui.ambient_dim() != vi.ambient_dim())
      throw SpaceMismatch("orthocomplement_blocks: ambient dimensions differ in block " + std::to_string(i));
    // containment U_i ⊆ V_i, checked by projection residual
    if (ui.dim() > 0) {
      const Matrix<S> resid = ui.basis() - vi.basis() * (vi.basis().adjoint() * ui.basis());
      if (resid.norm() > tol.tau_res * std::sqrt(double(ui.dim())))
        throw NotASubspace("orthocomplement_blocks: block " + std::to_string(i) +
                           " of U is not contained in V");
    }
    // coordinates of U_i inside V_i; complement = null space of their span
    const Matrix<S> coords = vi.basis().adjoint() * ui.basis();  // dim(V_i) x dim(U_i)
    Matrix<S> comp_coords;
    if (ui.dim() == 0) {
      comp_coords = Matrix<S>::Identity(vi.dim(), vi.dim());
    } else {
      Eigen::JacobiSVD<Matrix<S>> svd(coords, Eigen::ComputeFullU);
      const auto& sv = svd.singularValues();
      const double cutoff = sv.size() > 0 ? tol.tau_rank * sv(0) : 0.0;
      Eigen::Index rank = 0;
      for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > cutoff) ++rank;
      comp_coords = svd.matrixU().rightCols(vi.dim() - rank);
    }
    blocks.push_back(Subspace<S>(vi.ambient_dim(), vi.basis() * comp_coords, tol));
  }
  return DirectSumSpace<S>(std::move(blocks));
}

/// Dense realization of ⊕O_i: one matrix with the blocks on the diagonal,
/// rows/columns ordered by block. Used to move between the blockwise and the
/// flat pictures.
template <ScalarField S>
Matrix<S> embed_dense(const BlockDiagonalOperator<S>& op) {
  Matrix<S> out = Matrix<S>::Zero(op.codomain().total_dim(), op.domain().total_dim());
  Eigen::Index r = 0, c = 0;
  for (std::size_t i = 0; i < op.block_count(); ++i) {
    const Matrix<S>& b = op.block(i);
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

/// Truncated realization of the divergence phenomenon: O_i = i^{-1/2} on
/// one-dimensional blocks. The operator family stays bounded by 1 while the
/// inverse-family norm grows like sqrt(N); the target g with g_i = 1/i stays
/// square-summable but its only preimage has the harmonic series as its
/// squared norm, which is why g escapes the range in the limit.
struct DivergenceReport {
  std::int64_t n = 0;
  double op_norm = 0.0;
  double inverse_family_norm = 0.0;
  double g_norm_sq = 0.0;
  double preimage_norm_sq = 0.0;
};

inline DivergenceReport truncation_demo(std::int64_t n) {
  if (n < 1) throw Error("truncation_demo: N must be >= 1");
  std::vector<Eigen::Index> dims(static_cast<std::size_t>(n), 1);
  auto space = DirectSumSpace<double>::coordinate_spaces(dims);
  std::vector<RealMatrix> blocks;
  std::vector<RealVector> g_parts;
  blocks.reserve(dims.size());
  g_parts.reserve(dims.size());
  for (std::int64_t i = 1; i <= n; ++i) {
    RealMatrix b(1, 1);
    b(0, 0) = 1.0 / std::sqrt(double(i));
    blocks.push_back(std::move(b));
    RealVector g(1);
    g(0) = 1.0 / double(i);
    g_parts.push_back(std::move(g));
  }
  BlockDiagonalOperator<double> op(space, space, std::move(blocks));
  BlockVector<double> g(space, std::move(g_parts));

  DivergenceReport rep;
  rep.n = n;
  rep.op_norm = block_diag_norm(op);
  const auto inverse = block_diag_invert(op);
  rep.inverse_family_norm = block_diag_norm(inverse);
  const double gn = block_norm(g);
  rep.g_norm_sq = gn * gn;
  const auto preimage = apply_block_diag(inverse, g);
  const double pn = block_norm(preimage);
  rep.preimage_norm_sq = pn * pn;
  return rep;
}

}  // namespace fframes
