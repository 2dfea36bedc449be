#include "doctest.h"

#include "pidmd/errors.hpp"
#include "pidmd/io.hpp"
#include "test_helpers.hpp"

#include <filesystem>

using namespace pidmd;
using namespace pidmd::testing;
namespace fs = std::filesystem;

namespace {

RealVector scalar(double v) { return RealVector::Constant(1, v); }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pidmd_test_io";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<SnapshotSet> training(std::mt19937_64& rng, Index n, const std::vector<double>& thetas) {
  const RealMatrix A = random_stable(rng, n, 0.9);
  RealMatrix B = random_matrix(rng, n, n);
  B *= 0.05 / B.norm();
  std::vector<SnapshotSet> out;
  for (double t : thetas) {
    out.push_back({matrix_powers(A + t * B, random_matrix(rng, n, 1), 20), 0.1, scalar(t),
                   "theta=" + std::to_string(t)});
  }
  return out;
}

// Serialize, decode, serialize again: both encodings must match byte for byte.
ModelFile round_trip(const ModelFile& file) {
  const std::string first = encode_model(file);
  ModelFile back = decode_model(first);
  CHECK(encode_model(back) == first);
  CHECK(back.config_hash == file.config_hash);
  CHECK(back.method() == file.method());
  return back;
}

}  // namespace

TEST_CASE("snapshot files round trip") {
  std::mt19937_64 rng(1);
  SnapshotSet s{random_matrix(rng, 7, 5), 0.025, (RealVector(2) << 0.5, -1.25).finished(), "nu=0.5_-1.25"};
  const std::string bytes = encode_snapshot(s);
  CHECK(bytes.substr(0, 6) == "PDMD1L");
  const std::size_t header = 6 + 8 + 8 + 8 + 8 + 2 * 8 + 8 + s.label.size();
  CHECK(bytes.size() == header + 7 * 5 * 8);

  const SnapshotSet back = decode_snapshot(bytes);
  CHECK(back.states == s.states);
  CHECK(back.dt == s.dt);
  CHECK(back.theta == s.theta);
  CHECK(back.label == s.label);
  CHECK(encode_snapshot(back) == bytes);

  const fs::path path = scratch("s.pdmd");
  write_snapshot_file(path, s);
  CHECK(read_file(path) == bytes);
  CHECK(read_snapshot_file(path).states == s.states);
  CHECK_FALSE(fs::exists(path.string() + ".tmp"));

  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_snapshot(bad), Error);
  CHECK_THROWS_AS(decode_snapshot(bytes.substr(0, bytes.size() - 3)), Error);
  CHECK_THROWS_AS(decode_snapshot(bytes + "x"), Error);
  CHECK_THROWS_AS(read_snapshot_file(scratch("missing.pdmd")), Error);
}

TEST_CASE("fnv1a hash") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("method ids") {
  for (Method m : {Method::ExactDMD, Method::PiDMD, Method::Stacked, Method::RKOI}) {
    CHECK(method_from_id(method_id(m)) == m);
  }
  CHECK_THROWS_AS(method_from_id("dmdc"), Error);
}

TEST_CASE("exact DMD model file") {
  std::mt19937_64 rng(2);
  const auto sets = training(rng, 6, {0.3});
  const auto pairs = build_snapshot_pairs(sets[0]);
  const ModelFile file{fit_dmd(pairs.X, pairs.Xplus, 4, 0.1), "abc123"};
  const ModelFile back = round_trip(file);
  const RealVector x0 = random_matrix(rng, 6, 1);
  const auto& a = std::get<DMDModel>(file.model);
  const auto& b = std::get<DMDModel>(back.model);
  CHECK(b.rank == a.rank);
  CHECK((predict_dmd(a, x0, 30) - predict_dmd(b, x0, 30)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("piDMD model file") {
  std::mt19937_64 rng(3);
  const auto sets = training(rng, 5, {0.0, 0.5, 1.0});
  const auto map = ParamMap::coordinates(1, Normalization::fit({scalar(0.0), scalar(1.0)}));
  const ModelFile file{fit_pidmd(sets, map, 8, 5), "cfg"};
  const ModelFile back = round_trip(file);
  const auto& a = std::get<PiDMDModel>(file.model);
  const auto& b = std::get<PiDMDModel>(back.model);
  CHECK(b.Atilde == a.Atilde);
  CHECK(b.Btilde[0] == a.Btilde[0]);
  CHECK(b.training_residual == a.training_residual);
  CHECK(b.training.labels == a.training.labels);
  CHECK(to_json(b.param_map) == to_json(a.param_map));
  const RealVector x0 = random_matrix(rng, 5, 1);
  CHECK((predict_pidmd(a, scalar(0.7), x0, 40) - predict_pidmd(b, scalar(0.7), x0, 40))
            .cwiseAbs()
            .maxCoeff() <= 1e-15);

  const fs::path path = scratch("m.pdmdm");
  write_model_file(path, file);
  CHECK(read_file(path) == encode_model(file));
  CHECK(encode_model(read_model_file(path)) == encode_model(file));
}

TEST_CASE("baseline model files") {
  std::mt19937_64 rng(4);
  const auto sets = training(rng, 5, {0.0, 0.5, 1.0});
  const RealVector x0 = random_matrix(rng, 5, 1);

  const ModelFile stacked{fit_stacked(sets, 4), "s"};
  const auto sb = round_trip(stacked);
  CHECK((predict_stacked(std::get<StackedDMDModel>(stacked.model), scalar(0.2), x0, 20).states -
         predict_stacked(std::get<StackedDMDModel>(sb.model), scalar(0.2), x0, 20).states)
            .cwiseAbs()
            .maxCoeff() <= 1e-15);

  const ModelFile rkoi{fit_rkoi(sets, 4), "r"};
  const auto rb = round_trip(rkoi);
  CHECK((predict_rkoi(std::get<RKOIModel>(rkoi.model), scalar(0.2), x0, 20).states -
         predict_rkoi(std::get<RKOIModel>(rb.model), scalar(0.2), x0, 20).states)
            .cwiseAbs()
            .maxCoeff() <= 1e-15);
}

TEST_CASE("corrupt model files are rejected") {
  std::mt19937_64 rng(5);
  const auto sets = training(rng, 4, {0.0, 1.0});
  const std::string bytes = encode_model({fit_rkoi(sets, 3), "x"});
  CHECK(bytes.substr(0, 6) == "PDMDML");
  std::string bad = bytes;
  bad[1] = 'Q';
  CHECK_THROWS_AS(decode_model(bad), Error);
  bad = bytes;
  bad[6] = 9;  // format version
  CHECK_THROWS_AS(decode_model(bad), Error);
  CHECK_THROWS_AS(decode_model(bytes.substr(0, bytes.size() - 8)), Error);
  CHECK_THROWS_AS(decode_model(bytes.substr(0, 20)), Error);
}
