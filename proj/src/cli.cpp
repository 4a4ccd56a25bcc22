#include "fframes/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <fstream>
#include <ostream>

#include "fframes/json_io.hpp"
#include "fframes/random_gen.hpp"

namespace fframes::cli {
namespace {

using jsonio::Field;
using jsonio::InputKind;
using jsonio::ordered_json;

struct Context {
  Tolerance tol;
  bool pretty = true;
  bool no_timestamp = false;
  std::string input_path;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
};

std::string utc_now_iso8601() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open input file: " + path);
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void emit(const Context& ctx, const std::string& verb, ordered_json payload, std::ostream& out) {
  ordered_json envelope;
  envelope["verb"] = verb;
  if (!ctx.input_path.empty()) envelope["input"] = ctx.input_path;
  envelope["tolerance"] = {{"tau_rank", ctx.tol.tau_rank},
                           {"tau_res", ctx.tol.tau_res},
                           {"tau_orth", ctx.tol.tau_orth}};
  if (!ctx.no_timestamp) {
    envelope["generated_at"] = utc_now_iso8601();
    envelope["elapsed_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - ctx.started)
            .count();
  }
  envelope["payload"] = std::move(payload);
  out << envelope.dump(ctx.pretty ? 2 : -1) << "\n";
}

/// Calls fn with a value of the scalar type matching the field tag.
template <class F>
auto with_field(Field field, F&& fn) {
  if (field == Field::Complex) return fn(std::complex<double>{});
  return fn(double{});
}

// --- analyze ---------------------------------------------------------------

template <ScalarField S>
std::pair<ordered_json, bool> analyze_payload(const ordered_json& input, const Context& ctx) {
  switch (jsonio::detect_kind(input)) {
    case InputKind::Frame: {
      const auto frame = jsonio::frame_from_json<S>(input);
      const FrameReport rep = classify(frame, ctx.tol);
      return {jsonio::report_to_json(rep), rep.is_frame};
    }
    case InputKind::Fusion: {
      const auto fusion = jsonio::fusion_from_json<S>(input, ctx.tol);
      const FusionReport rep = fusion_classify(fusion, ctx.tol);
      return {jsonio::report_to_json(rep), rep.is_fusion_frame};
    }
    case InputKind::System:
    default: {
      const auto sys = jsonio::system_from_json<S>(input, ctx.tol);
      const FusionReport fusion_rep = fusion_classify(sys.fusion(), ctx.tol);
      const FrameReport global_rep = classify(global_frame(sys).frame, ctx.tol);
      ordered_json payload;
      payload["kind"] = "system";
      payload["common_lower"] = sys.common_lower();
      payload["common_upper"] = sys.common_upper();
      payload["fusion"] = jsonio::report_to_json(fusion_rep);
      ordered_json locals = ordered_json::array();
      for (const auto& l : sys.locals()) locals.push_back(jsonio::report_to_json(classify(l, ctx.tol)));
      payload["locals"] = std::move(locals);
      payload["global"] = jsonio::report_to_json(global_rep);
      return {std::move(payload), global_rep.is_frame && fusion_rep.is_fusion_frame};
    }
  }
}

// --- verify ----------------------------------------------------------------

template <ScalarField S>
std::pair<ordered_json, bool> verify_payload(const ordered_json& input, const Context& ctx) {
  if (jsonio::detect_kind(input) != InputKind::System)
    throw SchemaError("verify: input must be a fusion frame system file");
  const auto sys = jsonio::system_from_json<S>(input, ctx.tol);
  const IdentityReport rep = verify_operator_identities(sys, ctx.tol);
  return {jsonio::report_to_json(rep), rep.all_pass()};
}

// --- reconstruct -----------------------------------------------------------

template <ScalarField S>
std::pair<ordered_json, bool> reconstruct_payload(const ordered_json& input,
                                                  const ordered_json& signal_json,
                                                  const Context& ctx) {
  const Vector<S> f = jsonio::vector_from_json<S>(signal_json, "signal");
  switch (jsonio::detect_kind(input)) {
    case InputKind::Frame: {
      const auto frame = jsonio::frame_from_json<S>(input);
      const auto rec = reconstruct(frame, f, ctx.tol);
      ordered_json payload;
      payload["kind"] = "frame_reconstruction";
      payload["reconstructed"] = jsonio::vector_to_json<S>(rec.reconstructed);
      payload["residual"] = rec.residual;
      return {std::move(payload), rec.residual <= ctx.tol.tau_res};
    }
    case InputKind::Fusion: {
      const auto fusion = jsonio::fusion_from_json<S>(input, ctx.tol);
      const auto rec = fusion_reconstruct(fusion, f, ctx.tol);
      ordered_json payload;
      payload["kind"] = "fusion_reconstruction";
      payload["reconstructed"] = jsonio::vector_to_json<S>(rec.reconstructed);
      payload["residual"] = rec.residual;
      return {std::move(payload), rec.residual <= ctx.tol.tau_res};
    }
    case InputKind::System:
    default: {
      const auto sys = jsonio::system_from_json<S>(input, ctx.tol);
      const auto rec = reconstruct_both(sys, f, ctx.tol);
      const bool pass = rec.centralized_residual <= ctx.tol.tau_res &&
                        rec.distributed_residual <= ctx.tol.tau_res;
      return {jsonio::report_to_json(rec), pass};
    }
  }
}

// --- duals -----------------------------------------------------------------

template <ScalarField S>
std::pair<ordered_json, bool> duals_payload(const ordered_json& input, const Context& ctx) {
  switch (jsonio::detect_kind(input)) {
    case InputKind::Frame: {
      const auto frame = jsonio::frame_from_json<S>(input);
      const Frame<S> dual = canonical_dual(frame, ctx.tol);
      ordered_json payload;
      payload["kind"] = "frame_duals";
      ordered_json vecs = ordered_json::array();
      for (Eigen::Index j = 0; j < dual.count(); ++j)
        vecs.push_back(jsonio::vector_to_json<S>(dual.vector(j)));
      payload["canonical"] = std::move(vecs);
      return {std::move(payload), true};
    }
    case InputKind::System: {
      const auto sys = jsonio::system_from_json<S>(input, ctx.tol);
      const GlobalFrame<S> global = global_frame(sys);
      const Matrix<S> s_global = global.frame.frame_operator();
      const SpectralBounds sb = spectral_bounds<S>(s_global, ctx.tol);
      if (!(sb.lambda_min > ctx.tol.tau_rank * sb.lambda_max))
        throw NotAFrame("duals: global family is not a frame");
      const Matrix<S> canonical = s_global.ldlt().solve(global.frame.synthesis());
      const auto fusion_ldlt = sys.fusion().frame_operator().ldlt();
      Matrix<S> distributed(sys.ambient_dim(), sys.total_vector_count());
      Eigen::Index at = 0;
      for (std::size_t i = 0; i < sys.member_count(); ++i) {
        const auto& m = sys.fusion().member(i);
        const Matrix<S> s_i = sys.local(i).frame_operator();
        const Matrix<S> local_duals = s_i.ldlt().solve(sys.local(i).synthesis());
        distributed.middleCols(at, sys.local(i).count()) =
            fusion_ldlt.solve(S(m.weight) * (m.subspace.basis() * local_duals));
        at += sys.local(i).count();
      }
      double gap = 0.0, scale = 0.0;
      for (Eigen::Index j = 0; j < canonical.cols(); ++j) {
        gap = std::max(gap, (canonical.col(j) - distributed.col(j)).norm());
        scale = std::max(scale, canonical.col(j).norm());
      }
      ordered_json payload;
      payload["kind"] = "system_duals";
      payload["canonical"] = jsonio::matrix_to_json<S>(Matrix<S>(canonical.transpose()));
      payload["distributed"] = jsonio::matrix_to_json<S>(Matrix<S>(distributed.transpose()));
      payload["dual_gap"] = gap;
      payload["dual_scale"] = scale;
      return {std::move(payload), true};
    }
    case InputKind::Fusion:
    default:
      throw SchemaError("duals: expects a frame or a fusion frame system file");
  }
}

// --- random ----------------------------------------------------------------

template <ScalarField S>
ordered_json random_payload(Eigen::Index dim, Eigen::Index subspaces, double redundancy,
                            std::uint64_t seed, const Context& ctx) {
  SplitMix64 rng(seed);
  SystemGenOptions opt;
  opt.dim = dim;
  opt.subspaces = subspaces;
  opt.redundancy = redundancy;
  const auto sys = random_system<S>(rng, FusionStyle::Generic, LocalStyle::Generic, opt, ctx.tol);
  return jsonio::system_to_json<S>(sys);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"frames, fusion frames, and fusion frame systems in finite dimensions"};
  app.require_subcommand(1);
  app.fallthrough();  // shared flags may follow the verb

  Context ctx;
  double tol_override = 0.0;
  bool compact = false, pretty = false;
  std::string field_name = "real";
  app.add_option("--tol", tol_override, "override the identity tolerance tau_res");
  app.add_option("--field", field_name,
                 "scalar field (real|complex) for generated data and files without a field key");
  app.add_flag("--json", compact, "compact single-line JSON output");
  app.add_flag("--pretty", pretty, "indented JSON output (default)");
  app.add_flag("--no-timestamp", ctx.no_timestamp, "omit timestamp and timing from the report");

  std::string analyze_path, verify_path, reconstruct_path, duals_path, signal_path, output_path;

  auto* cmd_analyze = app.add_subcommand("analyze", "classify a frame, fusion frame, or system file");
  cmd_analyze->add_option("input", analyze_path, "input JSON file")->required();

  auto* cmd_verify = app.add_subcommand("verify", "check the operator identities of a system file");
  cmd_verify->add_option("input", verify_path, "system JSON file")->required();

  auto* cmd_reconstruct = app.add_subcommand("reconstruct", "reconstruct a signal from its coefficients");
  cmd_reconstruct->add_option("input", reconstruct_path, "input JSON file")->required();
  cmd_reconstruct->add_option("--signal", signal_path, "signal JSON file (array of entries)")->required();

  auto* cmd_duals = app.add_subcommand("duals", "canonical and distributed dual vectors");
  cmd_duals->add_option("input", duals_path, "frame or system JSON file")->required();

  Eigen::Index rand_dim = 8, rand_subspaces = 3;
  double rand_redundancy = 2.0;
  std::uint64_t rand_seed = 1;
  auto* cmd_random = app.add_subcommand("random", "generate a reproducible random system file");
  cmd_random->add_option("--dim", rand_dim, "ambient dimension");
  cmd_random->add_option("--subspaces", rand_subspaces, "number of subspaces");
  cmd_random->add_option("--redundancy", rand_redundancy, "local redundancy factor (>= 1)");
  cmd_random->add_option("--seed", rand_seed, "PRNG seed");
  cmd_random->add_option("--output", output_path, "write the system file here instead of stdout");

  std::int64_t demo_n = 0;
  auto* cmd_demo = app.add_subcommand("truncation-demo",
                                      "bounded block family whose inverse family blows up");
  cmd_demo->add_option("--n", demo_n, "number of one-dimensional blocks")->required();

  std::vector<const char*> argv;
  argv.push_back("fframes");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "argument error: " << e.what() << "\n";
    return 2;
  }

  if (tol_override != 0.0) {
    if (!(tol_override > 0.0)) {
      err << "argument error: --tol must be positive\n";
      return 2;
    }
    ctx.tol.tau_res = tol_override;
  }
  ctx.tol.validate();
  ctx.pretty = !compact || pretty;

  Field field = Field::Real;
  if (field_name == "complex")
    field = Field::Complex;
  else if (field_name != "real") {
    err << "argument error: --field must be real or complex\n";
    return 2;
  }

  try {
    if (*cmd_random) {
      if (rand_dim < 1 || rand_subspaces < 1 || !(rand_redundancy >= 1.0)) {
        err << "argument error: random needs --dim >= 1, --subspaces >= 1, --redundancy >= 1\n";
        return 2;
      }
      const ordered_json system_json = with_field(field, [&]<ScalarField S>(S) {
        return random_payload<S>(rand_dim, rand_subspaces, rand_redundancy, rand_seed, ctx);
      });
      const std::string text = system_json.dump(ctx.pretty ? 2 : -1) + "\n";
      if (output_path.empty()) {
        out << text;
      } else {
        std::ofstream file(output_path);
        if (!file) throw ParseError("cannot write output file: " + output_path);
        file << text;
      }
      return 0;
    }

    if (*cmd_demo) {
      if (demo_n < 1) {
        err << "argument error: --n must be >= 1\n";
        return 2;
      }
      emit(ctx, "truncation-demo", jsonio::report_to_json(truncation_demo(demo_n)), out);
      return 0;
    }

    const std::string path = *cmd_analyze    ? analyze_path
                             : *cmd_verify   ? verify_path
                             : *cmd_reconstruct ? reconstruct_path
                                             : duals_path;
    ctx.input_path = path;
    const ordered_json input = load_json_file(path);
    const Field file_field = input.contains("field") ? jsonio::field_from_json(input) : field;

    std::pair<ordered_json, bool> result;
    std::string verb;
    if (*cmd_analyze) {
      verb = "analyze";
      result = with_field(file_field, [&]<ScalarField S>(S) { return analyze_payload<S>(input, ctx); });
    } else if (*cmd_verify) {
      verb = "verify";
      result = with_field(file_field, [&]<ScalarField S>(S) { return verify_payload<S>(input, ctx); });
    } else if (*cmd_reconstruct) {
      verb = "reconstruct";
      const ordered_json signal = load_json_file(signal_path);
      result = with_field(file_field, [&]<ScalarField S>(S) {
        return reconstruct_payload<S>(input, signal, ctx);
      });
    } else {
      verb = "duals";
      result = with_field(file_field, [&]<ScalarField S>(S) { return duals_payload<S>(input, ctx); });
    }
    emit(ctx, verb, std::move(result.first), out);
    return result.second ? 0 : 1;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const NotAFrame& e) {
    err << "classification failure: " << e.what() << "\n";
    return 1;
  } catch (const NotAFusionFrame& e) {
    err << "classification failure: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace fframes::cli
