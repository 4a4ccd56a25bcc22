#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "fframes/frame.hpp"
#include "fframes/fusion.hpp"
#include "fframes/system.hpp"

namespace fframes {

/// SplitMix64: fixed 64-bit generator so that seeded fixtures regenerate
/// identically from the seed alone. Uniform doubles take the top 53 bits,
/// normals come from Box-Muller on those uniforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + std::int64_t(next_u64() % std::uint64_t(hi - lo + 1));
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = uniform01();
    while (u <= 0.0) u = uniform01();
    const double v = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double theta = 2.0 * std::numbers::pi * v;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

template <ScalarField S>
S random_scalar_normal(SplitMix64& rng) {
  if constexpr (is_complex_field<S>)
    return S(rng.normal(), rng.normal());
  else
    return rng.normal();
}

template <ScalarField S>
Matrix<S> random_gaussian_matrix(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix<S> m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = random_scalar_normal<S>(rng);
  return m;
}

template <ScalarField S>
Vector<S> random_vector(SplitMix64& rng, Eigen::Index n) {
  Vector<S> v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = random_scalar_normal<S>(rng);
  return v;
}

/// Haar-distributed k-dimensional subspace of F^d (column span of a Gaussian
/// matrix, orthonormalized).
template <ScalarField S>
Subspace<S> random_subspace(SplitMix64& rng, Eigen::Index d, Eigen::Index k,
                            const Tolerance& tol = {}) {
  while (true) {
    const Subspace<S> sub = orthonormalize<S>(random_gaussian_matrix<S>(rng, d, k), tol);
    if (sub.dim() == k) return sub;
  }
}

/// Random matrix with a conditioning floor: redraws until
/// sigma_min >= min_rel_sv * sigma_max. Keeps downstream inverse-based
/// identity checks meaningful at tight tolerances.
template <ScalarField S>
Matrix<S> random_conditioned_matrix(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols,
                                    double min_rel_sv = 3e-2) {
  while (true) {
    Matrix<S> m = random_gaussian_matrix<S>(rng, rows, cols);
    Eigen::JacobiSVD<Matrix<S>> svd(m);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) >= min_rel_sv * sv(0)) return m;
  }
}

template <ScalarField S>
Frame<S> random_frame(SplitMix64& rng, Eigen::Index d, Eigen::Index count,
                      double min_rel_sv = 3e-2) {
  return Frame<S>(random_conditioned_matrix<S>(rng, d, count, min_rel_sv));
}

/// Parseval frame of `count` >= d vectors: rows of a random orthonormal set.
template <ScalarField S>
Frame<S> random_parseval_frame(SplitMix64& rng, Eigen::Index d, Eigen::Index count,
                               const Tolerance& tol = {}) {
  const Subspace<S> stiefel = random_subspace<S>(rng, count, d, tol);
  return Frame<S>(stiefel.basis().adjoint());
}

struct SystemGenOptions {
  Eigen::Index dim = 0;                  // 0 = draw from [dim_min, dim_max]
  Eigen::Index dim_min = 2, dim_max = 12;
  Eigen::Index subspaces = 0;            // 0 = draw from [subspaces_min, subspaces_max]
  Eigen::Index subspaces_min = 1, subspaces_max = 5;
  double redundancy = 0.0;               // 0 = draw from [1, redundancy_max]
  double redundancy_max = 3.0;
  double weight_min = 0.5, weight_max = 2.0;
  double local_min_rel_sv = 3e-2;        // conditioning floor for local frames
  double frame_floor = 1e-6;             // reject: global lambda_min < floor * lambda_max
};

/// Log-uniform weight in [weight_min, weight_max].
inline double random_weight(SplitMix64& rng, const SystemGenOptions& opt) {
  const double lo = std::log(opt.weight_min), hi = std::log(opt.weight_max);
  return std::exp(rng.uniform(lo, hi));
}

/// Generic random fusion frame: Haar subspaces with log-uniform weights.
/// Subspace dimensions are drawn in [1, d]; spanning is not forced here, the
/// system generator rejects non-frames.
template <ScalarField S>
FusionFrame<S> random_fusion_frame(SplitMix64& rng, Eigen::Index d, Eigen::Index count,
                                   const SystemGenOptions& opt = {}, const Tolerance& tol = {}) {
  std::vector<WeightedSubspace<S>> members;
  members.reserve(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Eigen::Index k = rng.uniform_int(1, d);
    members.emplace_back(random_subspace<S>(rng, d, k, tol), random_weight(rng, opt));
  }
  return FusionFrame<S>(d, std::move(members));
}

/// Fusion Riesz basis: column groups of a conditioned invertible matrix span
/// the subspaces, so the subspace dimensions sum to d and the synthesis
/// operator is bijective.
template <ScalarField S>
FusionFrame<S> random_fusion_riesz(SplitMix64& rng, Eigen::Index d, Eigen::Index count,
                                   const SystemGenOptions& opt = {}, const Tolerance& tol = {}) {
  if (count > d) throw Error("random_fusion_riesz: more subspaces than dimensions");
  std::vector<Eigen::Index> dims(count, 1);
  for (Eigen::Index extra = d - count; extra > 0; --extra)
    dims[std::size_t(rng.uniform_int(0, count - 1))] += 1;
  const Matrix<S> mixer = random_conditioned_matrix<S>(rng, d, d, 1e-1);
  std::vector<WeightedSubspace<S>> members;
  members.reserve(count);
  Eigen::Index at = 0;
  for (Eigen::Index i = 0; i < count; ++i) {
    members.emplace_back(orthonormalize<S>(mixer.middleCols(at, dims[i]), tol),
                         random_weight(rng, opt));
    at += dims[i];
  }
  return FusionFrame<S>(d, std::move(members));
}

/// Orthonormal fusion basis: column groups of a Haar orthonormal matrix,
/// unit weights.
template <ScalarField S>
FusionFrame<S> random_orthonormal_fusion_basis(SplitMix64& rng, Eigen::Index d, Eigen::Index count,
                                               const Tolerance& tol = {}) {
  if (count > d) throw Error("random_orthonormal_fusion_basis: more subspaces than dimensions");
  std::vector<Eigen::Index> dims(count, 1);
  for (Eigen::Index extra = d - count; extra > 0; --extra)
    dims[std::size_t(rng.uniform_int(0, count - 1))] += 1;
  const Subspace<S> q = random_subspace<S>(rng, d, d, tol);
  std::vector<WeightedSubspace<S>> members;
  members.reserve(count);
  Eigen::Index at = 0;
  for (Eigen::Index i = 0; i < count; ++i) {
    members.emplace_back(Subspace<S>(d, q.basis().middleCols(at, dims[i]), tol), 1.0);
    at += dims[i];
  }
  return FusionFrame<S>(d, std::move(members));
}

enum class LocalStyle {
  Generic,      // conditioned full-rank coordinate matrices, redundancy >= 1
  RieszOnly,    // exactly dim(V_i) vectors (local Riesz bases)
  Parseval,     // rows of random orthonormal sets
  CommonTight,  // sqrt(A) * Parseval, one A for all members
  MixedTight    // sqrt(A_i) * Parseval with member-specific A_i
};

template <ScalarField S>
std::vector<Frame<S>> random_locals(SplitMix64& rng, const FusionFrame<S>& fusion,
                                    LocalStyle style, const SystemGenOptions& opt = {},
                                    const Tolerance& tol = {}) {
  const double redundancy =
      opt.redundancy > 0.0 ? opt.redundancy : rng.uniform(1.0, opt.redundancy_max);
  const double common_tight = rng.uniform(0.5, 3.0);
  std::vector<Frame<S>> locals;
  locals.reserve(fusion.member_count());
  for (std::size_t i = 0; i < fusion.member_count(); ++i) {
    const Eigen::Index k = fusion.member(i).subspace.dim();
    const Eigen::Index count =
        std::max<Eigen::Index>(k, Eigen::Index(std::ceil(redundancy * double(k))));
    switch (style) {
      case LocalStyle::Generic:
        locals.push_back(random_frame<S>(rng, k, count, opt.local_min_rel_sv));
        break;
      case LocalStyle::RieszOnly:
        locals.push_back(random_frame<S>(rng, k, k, opt.local_min_rel_sv));
        break;
      case LocalStyle::Parseval:
        locals.push_back(random_parseval_frame<S>(rng, k, count, tol));
        break;
      case LocalStyle::CommonTight:
        locals.push_back(Frame<S>(std::sqrt(common_tight) *
                                  random_parseval_frame<S>(rng, k, count, tol).vectors()));
        break;
      case LocalStyle::MixedTight: {
        const double a_i = rng.uniform(0.5, 3.0);
        locals.push_back(Frame<S>(std::sqrt(a_i) *
                                  random_parseval_frame<S>(rng, k, count, tol).vectors()));
        break;
      }
    }
  }
  return locals;
}

enum class FusionStyle { Generic, Riesz, OrthonormalBasis, Redundant };

/// Draws one valid fusion frame system. Redundant fusion parts force
/// sum dim(V_i) > d (and may duplicate a subspace), so they are never fusion
/// Riesz; systems whose global family fails the frame floor are redrawn.
template <ScalarField S>
FusionFrameSystem<S> random_system(SplitMix64& rng, FusionStyle fusion_style, LocalStyle local_style,
                                   const SystemGenOptions& opt = {}, const Tolerance& tol = {}) {
  for (;;) {
    const Eigen::Index d = opt.dim > 0 ? opt.dim : rng.uniform_int(opt.dim_min, opt.dim_max);
    Eigen::Index count =
        opt.subspaces > 0 ? opt.subspaces : rng.uniform_int(opt.subspaces_min, opt.subspaces_max);

    FusionFrame<S> fusion = [&] {
      switch (fusion_style) {
        case FusionStyle::Riesz:
          return random_fusion_riesz<S>(rng, d, std::min(count, d), opt, tol);
        case FusionStyle::OrthonormalBasis:
          return random_orthonormal_fusion_basis<S>(rng, d, std::min(count, d), tol);
        case FusionStyle::Redundant: {
          count = std::max<Eigen::Index>(count, 2);
          std::vector<WeightedSubspace<S>> members;
          Eigen::Index total = 0;
          for (Eigen::Index i = 0; i < count; ++i) {
            const Eigen::Index k = rng.uniform_int(1, d);
            members.emplace_back(random_subspace<S>(rng, d, k, tol), random_weight(rng, opt));
            total += k;
          }
          while (total <= d) {
            const Eigen::Index k = rng.uniform_int(1, d);
            members.emplace_back(random_subspace<S>(rng, d, k, tol), random_weight(rng, opt));
            total += k;
          }
          // degenerate overlap stress: sometimes repeat a subspace verbatim
          if (rng.uniform01() < 0.5)
            members.emplace_back(members.front().subspace, random_weight(rng, opt));
          return FusionFrame<S>(d, std::move(members));
        }
        case FusionStyle::Generic:
        default:
          return random_fusion_frame<S>(rng, d, count, opt, tol);
      }
    }();

    std::vector<Frame<S>> locals = random_locals<S>(rng, fusion, local_style, opt, tol);

    FusionFrameSystem<S> sys = build_system<S>(std::move(fusion), std::move(locals), tol);
    const Matrix<S> s_global = global_frame(sys).frame.frame_operator();
    const SpectralBounds sb = spectral_bounds<S>(s_global, tol);
    if (sb.lambda_min < opt.frame_floor * sb.lambda_max) continue;
    try {
      fusion_classify(sys.fusion(), tol);
    } catch (const InternalInconsistency&) {
      continue;  // fusion part sits on the rank cutoff, useless as a fixture
    }
    return sys;
  }
}

}  // namespace fframes
