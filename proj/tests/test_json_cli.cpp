#include <doctest.h>

#include <complex>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fframes/cli.hpp"
#include "fframes/json_io.hpp"
#include "fframes/random_gen.hpp"

using namespace fframes;
using jsonio::ordered_json;
using Complex = std::complex<double>;

namespace {

const std::string fixtures = FFRAMES_FIXTURE_DIR;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

ordered_json payload_of(const CliResult& r) {
  return ordered_json::parse(r.out).at("payload");
}

}  // namespace

TEST_CASE("matrices and vectors round-trip through JSON") {
  SplitMix64 rng(211);
  const RealMatrix m = random_gaussian_matrix<double>(rng, 3, 4);
  const RealMatrix back = jsonio::matrix_from_json<double>(jsonio::matrix_to_json<double>(m), "m");
  CHECK((m - back).norm() == 0.0);

  const ComplexMatrix c = random_gaussian_matrix<Complex>(rng, 2, 3);
  const ComplexMatrix cback =
      jsonio::matrix_from_json<Complex>(jsonio::matrix_to_json<Complex>(c), "c");
  CHECK((c - cback).norm() == 0.0);

  // complex loader accepts plain numbers, real loader rejects pairs
  CHECK(jsonio::scalar_from_json<Complex>(ordered_json(2.5), "x") == Complex(2.5, 0.0));
  CHECK_THROWS_AS(jsonio::scalar_from_json<double>(ordered_json::array({1.0, 2.0}), "x"),
                  SchemaError);
}

TEST_CASE("frame files load and classify") {
  std::ifstream in(fixtures + "/frame_mercedes.json");
  REQUIRE(in.good());
  const auto doc = ordered_json::parse(in);
  CHECK(jsonio::detect_kind(doc) == jsonio::InputKind::Frame);
  const auto mb = jsonio::frame_from_json<double>(doc);
  const FrameReport rep = classify(mb);
  CHECK(rep.is_tight);
  CHECK(*rep.tight_constant == doctest::Approx(1.5));
}

TEST_CASE("fusion files orthonormalize their bases at load") {
  ordered_json doc;
  doc["dim"] = 2;
  doc["field"] = "real";
  // a skewed spanning set of the whole plane
  doc["members"] = ordered_json::array(
      {{{"weight", 2.0}, {"basis", {{1.0, 1.0}, {0.0, 1.0}}}}});
  const auto fusion = jsonio::fusion_from_json<double>(doc);
  REQUIRE(fusion.member_count() == 1);
  const auto& basis = fusion.member(0).subspace.basis();
  CHECK((RealMatrix(basis.transpose() * basis) - RealMatrix::Identity(2, 2)).norm() <= 1e-12);
  CHECK((fusion.frame_operator() - 4.0 * RealMatrix::Identity(2, 2)).norm() <= 1e-12);
}

TEST_CASE("schema violations name the offending member") {
  std::ifstream in(fixtures + "/fusion_zero_weight.json");
  REQUIRE(in.good());
  const auto doc = ordered_json::parse(in);
  try {
    jsonio::fusion_from_json<double>(doc);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("member 1") != std::string::npos);
  }
}

TEST_CASE("system files round-trip losslessly enough to preserve the operators") {
  SplitMix64 rng(223);
  const auto sys = random_system<double>(rng, FusionStyle::Generic, LocalStyle::Generic);
  const ordered_json doc = jsonio::system_to_json<double>(sys);
  CHECK(jsonio::detect_kind(doc) == jsonio::InputKind::System);
  const auto back = jsonio::system_from_json<double>(doc);
  CHECK(relative_residual(sys.fusion().frame_operator(), back.fusion().frame_operator()) <= 1e-12);
  CHECK(relative_residual(global_frame(sys).frame.frame_operator(),
                          global_frame(back).frame.frame_operator()) <= 1e-12);
}

TEST_CASE("complex frames round-trip with [re, im] entries") {
  SplitMix64 rng(227);
  const auto psi = random_frame<Complex>(rng, 2, 3);
  const ordered_json doc = jsonio::frame_to_json<Complex>(psi);
  CHECK(doc["field"] == "complex");
  const auto back = jsonio::frame_from_json<Complex>(doc);
  CHECK((psi.vectors() - back.vectors()).norm() == 0.0);
}

TEST_CASE("cli analyze classifies the fixtures") {
  const auto frame_run = run_cli({"analyze", fixtures + "/frame_mercedes.json", "--no-timestamp"});
  CHECK(frame_run.code == 0);
  const auto frame_payload = payload_of(frame_run);
  CHECK(frame_payload["is_tight"] == true);
  CHECK(frame_payload["is_frame"] == true);

  const auto fusion_run = run_cli({"analyze", fixtures + "/fusion_planes.json", "--no-timestamp"});
  CHECK(fusion_run.code == 0);
  CHECK(payload_of(fusion_run)["is_fusion_frame"] == true);
  CHECK(payload_of(fusion_run)["is_fusion_riesz"] == false);

  const auto system_run = run_cli({"analyze", fixtures + "/system_e1_e2e2.json", "--no-timestamp"});
  CHECK(system_run.code == 0);
  const auto system_payload = payload_of(system_run);
  CHECK(system_payload["kind"] == "system");
  CHECK(system_payload["global"]["is_frame"] == true);
  CHECK(system_payload["common_upper"] == doctest::Approx(2.0));
}

TEST_CASE("cli exit codes separate input errors from classification failures") {
  const auto zero_weight =
      run_cli({"analyze", fixtures + "/fusion_zero_weight.json", "--no-timestamp"});
  CHECK(zero_weight.code == 2);
  CHECK(zero_weight.err.find("member 1") != std::string::npos);

  const auto not_frame =
      run_cli({"analyze", fixtures + "/frame_single_vector.json", "--no-timestamp"});
  CHECK(not_frame.code == 1);  // parses fine, fails to be a frame

  const auto missing = run_cli({"analyze", fixtures + "/does_not_exist.json"});
  CHECK(missing.code == 2);

  const auto verify_on_frame =
      run_cli({"verify", fixtures + "/frame_mercedes.json", "--no-timestamp"});
  CHECK(verify_on_frame.code == 2);
}

TEST_CASE("cli verify reports all six identities on the fixture system") {
  const auto r = run_cli({"verify", fixtures + "/system_e1_e2e2.json", "--no-timestamp", "--json"});
  CHECK(r.code == 0);
  const auto payload = payload_of(r);
  REQUIRE(payload["identities"].size() == 6);
  for (const auto& entry : payload["identities"]) {
    CHECK(entry["pass"] == true);
    CHECK(entry["residual"].get<double>() <= 1e-9);
  }
  CHECK(payload["all_pass"] == true);
}

TEST_CASE("cli reconstruct returns both reconstructions with residuals") {
  const auto r = run_cli({"reconstruct", fixtures + "/system_e1_e2e2.json", "--signal",
                          fixtures + "/signal_r2.json", "--no-timestamp"});
  CHECK(r.code == 0);
  const auto payload = payload_of(r);
  CHECK(payload["centralized_residual"].get<double>() <= 1e-12);
  CHECK(payload["distributed_residual"].get<double>() <= 1e-12);
  CHECK(payload["centralized"][0].get<double>() == doctest::Approx(3.0));
  CHECK(payload["centralized"][1].get<double>() == doctest::Approx(4.0));
}

TEST_CASE("cli duals reports the dual gap of the fixture system") {
  const auto r = run_cli({"duals", fixtures + "/system_e1_e2e2.json", "--no-timestamp"});
  CHECK(r.code == 0);
  const auto payload = payload_of(r);
  // the fusion part is an orthonormal fusion basis, so the duals coincide
  CHECK(payload["dual_gap"].get<double>() <= 1e-12);
  CHECK(payload["canonical"].size() == 3);
}

TEST_CASE("cli random is deterministic in the seed and loadable") {
  const std::vector<std::string> args = {"random", "--dim",  "5",    "--subspaces", "2",
                                         "--redundancy", "2", "--seed", "42",   "--json"};
  const auto first = run_cli(args);
  const auto second = run_cli(args);
  CHECK(first.code == 0);
  CHECK(first.out == second.out);

  const auto different = run_cli({"random", "--dim", "5", "--subspaces", "2", "--redundancy", "2",
                                  "--seed", "43", "--json"});
  CHECK(different.out != first.out);

  const auto doc = ordered_json::parse(first.out);
  const auto sys = jsonio::system_from_json<double>(doc);
  CHECK(sys.ambient_dim() == 5);
  CHECK(sys.member_count() == 2);
  CHECK(verify_operator_identities(sys).all_pass());

  const auto complex_run = run_cli({"random", "--dim", "4", "--subspaces", "2", "--redundancy",
                                    "1.5", "--seed", "7", "--field", "complex", "--json"});
  CHECK(complex_run.code == 0);
  const auto complex_doc = ordered_json::parse(complex_run.out);
  CHECK(complex_doc["field"] == "complex");
  const auto complex_sys = jsonio::system_from_json<Complex>(complex_doc);
  CHECK(verify_operator_identities(complex_sys).all_pass());
}

TEST_CASE("cli truncation demo reports the divergence quantities") {
  const auto r = run_cli({"truncation-demo", "--n", "10000", "--no-timestamp", "--json"});
  CHECK(r.code == 0);
  const auto payload = payload_of(r);
  CHECK(payload["op_norm"].get<double>() == 1.0);
  CHECK(payload["g_norm_sq"].get<double>() == doctest::Approx(1.6449).epsilon(1e-3));
  CHECK(payload["inverse_family_norm"].get<double>() == doctest::Approx(100.0));
}

TEST_CASE("cli reports are byte-identical without timestamps") {
  const std::vector<std::string> args = {"verify", fixtures + "/system_e1_e2e2.json",
                                         "--no-timestamp", "--json"};
  const auto first = run_cli(args);
  const auto second = run_cli(args);
  CHECK(first.out == second.out);
  // with timestamps the payload still matches even if the envelope differs
  const auto stamped = run_cli({"verify", fixtures + "/system_e1_e2e2.json", "--json"});
  CHECK(payload_of(stamped) == payload_of(first));
}

TEST_CASE("cli tolerance override is honored") {
  // an absurdly tight tolerance turns the identity check into a failure
  const auto strict =
      run_cli({"verify", fixtures + "/system_e1_e2e2.json", "--tol", "1e-30", "--no-timestamp"});
  CHECK(payload_of(strict)["tolerance"].get<double>() == doctest::Approx(1e-30));
}
