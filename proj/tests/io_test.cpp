#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "jmsdp/constructions.hpp"
#include "jmsdp/io.hpp"

namespace jmsdp {
namespace {

ErrorCode code_of_parse(const std::string& text) {
  try {
    io::effect_tuple_from_json(io::parse(text));
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorCode::InvalidArgument;
}

TEST(MatrixJson, Shape) {
  const auto j = io::to_json(pauli_y());
  EXPECT_EQ(j["dim"], 2);
  EXPECT_EQ(j["re"], io::json::parse("[[0.0,0.0],[0.0,0.0]]"));
  EXPECT_EQ(j["im"], io::json::parse("[[0.0,-1.0],[1.0,0.0]]"));
  EXPECT_EQ(io::matrix_from_json(j), pauli_y());
}

TEST(MatrixJson, ImaginaryPartOptional) {
  const auto m = io::matrix_from_json(io::parse(R"({"dim":2,"re":[[1,0.5],[0.5,0]]})"));
  EXPECT_EQ(m, HermitianMatrix::identity(2) * 0.5 + pauli_z() * 0.5 + pauli_x() * 0.5);
}

TEST(MatrixJson, RandomRoundTripIsExact) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = random_hermitian(1 + trial % 6, rng);
    const auto text = io::to_json(m).dump();
    const auto back = io::matrix_from_json(io::parse(text));
    EXPECT_EQ(back, m);
    EXPECT_EQ(io::to_json(back).dump(), text);
  }
}

TEST(EffectTupleJson, RoundTrip) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = random_effect_tuple(1 + seed % 4, 1 + seed % 5, seed);
    const auto j = io::to_json(t);
    EXPECT_EQ(j["schema"], "specjm/1");
    const auto back = io::effect_tuple_from_json(io::parse(j.dump()));
    EXPECT_TRUE(back == t);
    EXPECT_EQ(io::to_json(back), j);
  }
}

TEST(EffectTupleJson, Errors) {
  EXPECT_EQ(code_of_parse("{"), ErrorCode::Parse);
  EXPECT_EQ(code_of_parse(R"({"schema":"other/2","g":0,"dim":1,"effects":[]})"), ErrorCode::Parse);
  EXPECT_EQ(code_of_parse(R"({"g":1,"dim":1})"), ErrorCode::Parse);
  EXPECT_EQ(code_of_parse(R"({"g":2,"dim":1,"effects":[{"dim":1,"re":[[0.5]]}]})"), ErrorCode::LengthMismatch);
  EXPECT_EQ(code_of_parse(R"({"g":1,"dim":2,"effects":[{"dim":1,"re":[[0.5]]}]})"), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of_parse(R"({"g":1,"dim":2,"effects":[{"dim":2,"re":[[0.5,0]]}]})"), ErrorCode::NonSquare);
  EXPECT_EQ(code_of_parse(R"({"g":1,"dim":1,"effects":[{"dim":1,"re":[[1.5]]}]})"), ErrorCode::NotEffect);
  EXPECT_EQ(code_of_parse(R"({"g":1,"dim":2,"effects":[{"dim":2,"re":[[0.5,0.3],[0,0.5]]}]})"), ErrorCode::TooAsymmetric);
  EXPECT_EQ(code_of_parse(R"({"g":1,"dim":1,"effects":[{"dim":1,"re":[["x"]]}]})"), ErrorCode::Parse);
}

TEST(EffectTupleJson, ClampMode) {
  const auto text = R"({"g":1,"dim":1,"effects":[{"dim":1,"re":[[1.0000000001]]}]})";
  EXPECT_NO_THROW(io::effect_tuple_from_json(io::parse(text), EffectCheck::Clamp));
}

TEST(MatrixTupleJson, RoundTrip) {
  const auto spins = spin_system(5);
  const MatrixTuple x(spins.matrices);
  const auto j = io::to_json(x);
  EXPECT_EQ(j["level"], 4);
  EXPECT_EQ(j["g"], 5);
  EXPECT_EQ(io::matrix_tuple_from_json(io::parse(j.dump())), x);
  EXPECT_THROW(io::matrix_tuple_from_json(io::parse(R"({"g":1,"level":2,"matrices":[{"dim":1,"re":[[1]]}]})")), Error);
}

TEST(VerdictJson, Fields) {
  const auto id = HermitianMatrix::identity(2);
  const EffectTuple paulis({(id + pauli_x()) * 0.5, (id + pauli_z()) * 0.5});
  const auto v = io::verdict_json(check_compatibility(paulis));
  EXPECT_EQ(v["status"], "Incompatible");
  EXPECT_TRUE(v["t_star"].is_null());
  EXPECT_EQ(v["capped"], false);
  EXPECT_LT(v["margin"].get<double>(), 0.0);
  EXPECT_FALSE(v.contains("witness"));

  const auto r = io::verdict_json(robustness(paulis, {1.0, 1.0}, NoiseModel::balanced()));
  EXPECT_NEAR(r["t_star"].get<double>(), 1.0 / std::sqrt(2.0), 1e-5);
  EXPECT_EQ(r["capped"], false);
  EXPECT_TRUE(r.contains("witness"));

  const auto ok = io::verdict_json(check_compatibility(EffectTuple({id * 0.5, id * 0.25})));
  EXPECT_EQ(ok["status"], "Compatible");
  EXPECT_EQ(ok["witness"]["elements"].size(), 4u);
}

TEST(SdpProblemJson, RoundTripSolvesIdentically) {
  const auto p = assemble_jm_sdp(random_effect_tuple(2, 2, 5));
  const auto j = io::to_json(p);
  const auto back = io::sdp_problem_from_json(io::parse(j.dump()));
  EXPECT_EQ(io::to_json(back), j);
  const auto a = solve(p), b = solve(back);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.objective_value, b.objective_value);
  EXPECT_THROW(io::sdp_problem_from_json(io::parse(R"({"sense":"up","blocks":[],"objective":[],"constraints":[]})")),
               Error);
  EXPECT_THROW(io::sdp_problem_from_json(io::parse(R"({"sense":"minimize","blocks":[2],"objective":[],"constraints":[]})")),
               Error);
}

TEST(Files, WriteThenRead) {
  const auto path = std::filesystem::temp_directory_path() / "jmsdp_io_test.json";
  const auto t = mub_effect_tuple(mub_family(3), {{0}, {1}});
  io::write_file(path.string(), io::to_json(t));
  EXPECT_TRUE(io::effect_tuple_from_json(io::read_file(path.string())) == t);
  std::filesystem::remove(path);
  EXPECT_THROW(io::read_file(path.string()), Error);
}

}  // namespace
}  // namespace jmsdp
