#pragma once

#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "fframes/frame.hpp"
#include "fframes/fusion.hpp"
#include "fframes/hilbert_sum.hpp"
#include "fframes/system.hpp"

namespace fframes::jsonio {

using ordered_json = nlohmann::ordered_json;

enum class Field { Real, Complex };

inline const char* to_string(Field f) { return f == Field::Real ? "real" : "complex"; }

template <ScalarField S>
constexpr Field field_of() {
  return is_complex_field<S> ? Field::Complex : Field::Real;
}

inline Field field_from_json(const ordered_json& obj) {
  if (!obj.contains("field")) return Field::Real;
  const auto& f = obj.at("field");
  if (!f.is_string()) throw SchemaError("\"field\" must be \"real\" or \"complex\"");
  const std::string s = f.get<std::string>();
  if (s == "real") return Field::Real;
  if (s == "complex") return Field::Complex;
  throw SchemaError("\"field\" must be \"real\" or \"complex\", got \"" + s + "\"");
}

// ---------------------------------------------------------------------------
// scalars: real entries are plain numbers, complex entries are [re, im]
// ---------------------------------------------------------------------------

inline ordered_json scalar_to_json(double x) { return x; }

inline ordered_json scalar_to_json(const std::complex<double>& z) {
  return ordered_json::array({z.real(), z.imag()});
}

template <ScalarField S>
S scalar_from_json(const ordered_json& j, const std::string& where) {
  if constexpr (is_complex_field<S>) {
    if (j.is_number()) return S(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
      return S(j[0].get<double>(), j[1].get<double>());
    throw SchemaError(where + ": complex entry must be a number or [re, im]");
  } else {
    if (!j.is_number()) throw SchemaError(where + ": entry must be a plain number in a real workspace");
    return j.get<double>();
  }
}

// ---------------------------------------------------------------------------
// matrices and vectors: a matrix is an array of rows
// ---------------------------------------------------------------------------

template <ScalarField S>
ordered_json matrix_to_json(const Matrix<S>& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(scalar_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <ScalarField S>
Matrix<S> matrix_from_json(const ordered_json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw SchemaError(where + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty())
    throw SchemaError(where + ": each row must be a non-empty array");
  const std::size_t cols = j[0].size();
  Matrix<S> m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw SchemaError(where + ": ragged rows (row " + std::to_string(r) + ")");
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = scalar_from_json<S>(j[r][c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

template <ScalarField S>
ordered_json vector_to_json(const Vector<S>& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(scalar_to_json(v(i)));
  return out;
}

template <ScalarField S>
Vector<S> vector_from_json(const ordered_json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw SchemaError(where + ": expected a non-empty array of entries");
  Vector<S> v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v(i) = scalar_from_json<S>(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

// ---------------------------------------------------------------------------
// frames: {"dim": d, "field": ..., "vectors": [[...], ...]}
// ---------------------------------------------------------------------------

template <ScalarField S>
ordered_json frame_to_json(const Frame<S>& psi) {
  ordered_json out;
  out["dim"] = psi.ambient_dim();
  out["field"] = to_string(field_of<S>());
  ordered_json vecs = ordered_json::array();
  for (Eigen::Index j = 0; j < psi.count(); ++j) vecs.push_back(vector_to_json<S>(psi.vector(j)));
  out["vectors"] = std::move(vecs);
  return out;
}

template <ScalarField S>
Frame<S> frame_from_json(const ordered_json& j) {
  if (!j.contains("dim") || !j["dim"].is_number_integer())
    throw SchemaError("frame: missing integer \"dim\"");
  const Eigen::Index d = j["dim"].get<Eigen::Index>();
  if (d < 1) throw SchemaError("frame: \"dim\" must be >= 1");
  if (!j.contains("vectors")) throw SchemaError("frame: missing \"vectors\"");
  const auto& vecs = j["vectors"];
  if (!vecs.is_array() || vecs.empty()) throw SchemaError("frame: \"vectors\" must be a non-empty array");
  Matrix<S> m(d, vecs.size());
  for (std::size_t k = 0; k < vecs.size(); ++k) {
    const Vector<S> v = vector_from_json<S>(vecs[k], "vectors[" + std::to_string(k) + "]");
    if (v.size() != d)
      throw SchemaError("frame: vector " + std::to_string(k) + " has length " +
                        std::to_string(v.size()) + ", expected " + std::to_string(d));
    m.col(k) = v;
  }
  return Frame<S>(std::move(m));
}

// ---------------------------------------------------------------------------
// fusion frames: {"dim", "field", "members": [{"weight", "basis"}, ...]};
// basis columns need not be orthonormal on input, they are orthonormalized
// at load. Systems add "local_frame" per member, columns in subspace
// coordinates.
// ---------------------------------------------------------------------------

namespace detail {

template <ScalarField S>
std::pair<Eigen::Index, std::vector<ordered_json>> members_from_json(const ordered_json& j) {
  if (!j.contains("dim") || !j["dim"].is_number_integer())
    throw SchemaError("fusion frame: missing integer \"dim\"");
  const Eigen::Index d = j["dim"].get<Eigen::Index>();
  if (d < 1) throw SchemaError("fusion frame: \"dim\" must be >= 1");
  if (!j.contains("members") || !j["members"].is_array() || j["members"].empty())
    throw SchemaError("fusion frame: missing non-empty \"members\" array");
  std::vector<ordered_json> members;
  for (const auto& m : j["members"]) members.push_back(m);
  return {d, members};
}

template <ScalarField S>
WeightedSubspace<S> member_from_json(const ordered_json& m, Eigen::Index d, std::size_t index,
                                     const Tolerance& tol) {
  const std::string where = "member " + std::to_string(index);
  if (!m.contains("weight") || !m["weight"].is_number())
    throw SchemaError(where + ": missing numeric \"weight\"");
  const double weight = m["weight"].get<double>();
  if (!(weight > 0.0)) throw SchemaError(where + ": weight must be strictly positive");
  if (!m.contains("basis")) throw SchemaError(where + ": missing \"basis\"");
  const Matrix<S> raw = matrix_from_json<S>(m["basis"], where + ".basis");
  if (raw.rows() != d)
    throw SchemaError(where + ": basis has " + std::to_string(raw.rows()) + " rows, expected " +
                      std::to_string(d));
  // Already-orthonormal columns are kept verbatim so that local_frame
  // coordinates keep referring to exactly these columns; anything else is
  // orthonormalized.
  const Subspace<S> sub = [&] {
    if (raw.cols() <= d && all_finite(raw)) {
      const Matrix<S> gram = raw.adjoint() * raw;
      const Matrix<S> eye = Matrix<S>::Identity(raw.cols(), raw.cols());
      if ((gram - eye).norm() <= tol.tau_orth * std::sqrt(double(std::max<Eigen::Index>(1, raw.cols()))))
        return Subspace<S>(d, raw, tol);
    }
    return orthonormalize<S>(raw, tol);
  }();
  if (sub.dim() < 1) throw SchemaError(where + ": basis spans the zero subspace");
  return WeightedSubspace<S>(sub, weight);
}

}  // namespace detail

template <ScalarField S>
FusionFrame<S> fusion_from_json(const ordered_json& j, const Tolerance& tol = {}) {
  auto [d, member_objs] = detail::members_from_json<S>(j);
  std::vector<WeightedSubspace<S>> members;
  members.reserve(member_objs.size());
  for (std::size_t i = 0; i < member_objs.size(); ++i)
    members.push_back(detail::member_from_json<S>(member_objs[i], d, i, tol));
  return FusionFrame<S>(d, std::move(members));
}

template <ScalarField S>
ordered_json fusion_to_json(const FusionFrame<S>& v) {
  ordered_json out;
  out["dim"] = v.ambient_dim();
  out["field"] = to_string(field_of<S>());
  ordered_json members = ordered_json::array();
  for (const auto& m : v.members()) {
    ordered_json mem;
    mem["weight"] = m.weight;
    mem["basis"] = matrix_to_json<S>(m.subspace.basis());
    members.push_back(std::move(mem));
  }
  out["members"] = std::move(members);
  return out;
}

template <ScalarField S>
FusionFrameSystem<S> system_from_json(const ordered_json& j, const Tolerance& tol = {}) {
  auto [d, member_objs] = detail::members_from_json<S>(j);
  std::vector<WeightedSubspace<S>> members;
  std::vector<Frame<S>> locals;
  members.reserve(member_objs.size());
  locals.reserve(member_objs.size());
  for (std::size_t i = 0; i < member_objs.size(); ++i) {
    members.push_back(detail::member_from_json<S>(member_objs[i], d, i, tol));
    const std::string where = "member " + std::to_string(i);
    if (!member_objs[i].contains("local_frame"))
      throw SchemaError(where + ": missing \"local_frame\" (required for a fusion frame system)");
    Matrix<S> local = matrix_from_json<S>(member_objs[i]["local_frame"], where + ".local_frame");
    if (local.rows() != members.back().subspace.dim())
      throw SchemaError(where + ": local_frame has " + std::to_string(local.rows()) +
                        " coordinate rows, expected " + std::to_string(members.back().subspace.dim()));
    locals.emplace_back(std::move(local));
  }
  return build_system<S>(FusionFrame<S>(d, std::move(members)), std::move(locals), tol);
}

template <ScalarField S>
ordered_json system_to_json(const FusionFrameSystem<S>& sys) {
  ordered_json out;
  out["dim"] = sys.ambient_dim();
  out["field"] = to_string(field_of<S>());
  ordered_json members = ordered_json::array();
  for (std::size_t i = 0; i < sys.member_count(); ++i) {
    const auto& m = sys.fusion().member(i);
    ordered_json mem;
    mem["weight"] = m.weight;
    mem["basis"] = matrix_to_json<S>(m.subspace.basis());
    mem["local_frame"] = matrix_to_json<S>(sys.local(i).synthesis());
    members.push_back(std::move(mem));
  }
  out["members"] = std::move(members);
  return out;
}

// ---------------------------------------------------------------------------
// input kind detection for the CLI
// ---------------------------------------------------------------------------

enum class InputKind { Frame, Fusion, System };

inline InputKind detect_kind(const ordered_json& j) {
  if (j.contains("vectors")) return InputKind::Frame;
  if (j.contains("members")) {
    const auto& members = j["members"];
    if (members.is_array() && !members.empty() && members[0].is_object() &&
        members[0].contains("local_frame"))
      return InputKind::System;
    return InputKind::Fusion;
  }
  throw SchemaError("input is neither a frame (\"vectors\") nor a fusion frame/system (\"members\")");
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

inline ordered_json report_to_json(const FrameReport& r) {
  ordered_json out;
  out["kind"] = "frame";
  out["lower_bound"] = r.lower_bound;
  out["upper_bound"] = r.upper_bound;
  if (r.riesz_lower) out["riesz_lower"] = *r.riesz_lower;
  if (r.riesz_upper) out["riesz_upper"] = *r.riesz_upper;
  out["is_bessel"] = r.is_bessel;
  out["is_frame"] = r.is_frame;
  out["is_riesz_basis"] = r.is_riesz_basis;
  out["is_tight"] = r.is_tight;
  out["is_parseval"] = r.is_parseval;
  out["is_painless"] = r.is_painless;
  if (r.tight_constant) out["tight_constant"] = *r.tight_constant;
  return out;
}

inline ordered_json report_to_json(const FusionReport& r) {
  ordered_json out;
  out["kind"] = "fusion_frame";
  out["lower_bound"] = r.lower_bound;
  out["upper_bound"] = r.upper_bound;
  if (r.riesz_lower) out["riesz_lower"] = *r.riesz_lower;
  if (r.riesz_upper) out["riesz_upper"] = *r.riesz_upper;
  out["is_bessel"] = r.is_bessel;
  out["is_fusion_frame"] = r.is_fusion_frame;
  out["is_fusion_riesz"] = r.is_fusion_riesz;
  out["is_tight"] = r.is_tight;
  out["is_parseval"] = r.is_parseval;
  out["is_orthonormal_fusion_basis"] = r.is_orthonormal_fusion_basis;
  out["is_painless"] = r.is_painless;
  if (r.tight_constant) out["tight_constant"] = *r.tight_constant;
  return out;
}

inline ordered_json report_to_json(const IdentityReport& r) {
  ordered_json out;
  out["kind"] = "operator_identities";
  out["tolerance"] = r.tolerance;
  ordered_json identities = ordered_json::array();
  for (const auto& e : r.entries) {
    ordered_json entry;
    entry["name"] = e.name;
    entry["residual"] = e.residual;
    entry["pass"] = e.pass;
    identities.push_back(std::move(entry));
  }
  out["identities"] = std::move(identities);
  out["all_pass"] = r.all_pass();
  return out;
}

inline ordered_json report_to_json(const CommutationReport& r) {
  ordered_json out;
  out["kind"] = "commutation_condition";
  out["residuals"] = r.residuals;
  out["holds"] = r.holds;
  return out;
}

inline ordered_json report_to_json(const DivergenceReport& r) {
  ordered_json out;
  out["N"] = r.n;
  out["op_norm"] = r.op_norm;
  out["inverse_family_norm"] = r.inverse_family_norm;
  out["g_norm_sq"] = r.g_norm_sq;
  out["preimage_norm_sq"] = r.preimage_norm_sq;
  return out;
}

template <ScalarField S>
ordered_json report_to_json(const DualReconstruction<S>& r) {
  ordered_json out;
  out["kind"] = "reconstruction";
  out["centralized"] = vector_to_json<S>(r.centralized);
  out["distributed"] = vector_to_json<S>(r.distributed);
  out["centralized_residual"] = r.centralized_residual;
  out["distributed_residual"] = r.distributed_residual;
  out["dual_gap"] = r.dual_gap;
  out["dual_scale"] = r.dual_scale;
  return out;
}

}  // namespace fframes::jsonio
