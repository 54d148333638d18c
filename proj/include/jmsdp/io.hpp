#ifndef JMSDP_IO_HPP
#define JMSDP_IO_HPP

// JSON encodings shared by the CLI: matrices, effect and matrix tuples,
// verdicts, and SDP problem dumps. Every document carries "schema".

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jmsdp/jm.hpp"
#include "jmsdp/quantum.hpp"
#include "jmsdp/sdp.hpp"
#include "jmsdp/spectra.hpp"

namespace jmsdp::io {

using nlohmann::json;

inline constexpr const char* kSchema = "specjm/1";

namespace detail {

[[noreturn]] inline void fail(const std::string& what) { throw Error(ErrorCode::Parse, what); }

inline const json& field(const json& j, const char* key) {
  if (!j.is_object()) fail(std::string("expected an object holding \"") + key + "\"");
  const auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing field \"") + key + "\"");
  return *it;
}

inline std::size_t get_size(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    fail(std::string("\"") + key + "\" must be a nonnegative integer");
  return v.get<std::size_t>();
}

inline double get_double(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, where + " is not finite");
  return x;
}

inline void check_schema(const json& j) {
  if (!j.is_object()) fail("document must be a JSON object");
  const auto it = j.find("schema");
  if (it != j.end() && (!it->is_string() || it->get<std::string>() != kSchema))
    fail(std::string("unsupported schema, expected ") + kSchema);
}

inline json rows_of(const HermitianMatrix& m, bool imag) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.dim(); ++k) {
      const double v = imag ? m(i, k).imag() : m(i, k).real();
      row.push_back(v == 0.0 ? 0.0 : v);  // no negative zeros
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline json to_json(const HermitianMatrix& m) {
  return {{"dim", m.dim()}, {"re", detail::rows_of(m, false)}, {"im", detail::rows_of(m, true)}};
}

/// Parses {"dim","re","im"}; "im" may be omitted for real matrices.
inline HermitianMatrix matrix_from_json(const json& j) {
  const std::size_t d = detail::get_size(j, "dim");
  if (d == 0) detail::fail("matrix dimension must be >= 1");
  if (d > Limits{}.max_dim) throw Error(ErrorCode::DimensionOverflow, "matrix dimension exceeds cap");
  const auto& re = detail::field(j, "re");
  const json zero_im = nullptr;
  const auto& im = j.contains("im") ? j.at("im") : zero_im;
  auto check_rows = [&](const json& rows, const char* name) {
    if (!rows.is_array() || rows.size() != d) throw Error(ErrorCode::NonSquare, std::string("\"") + name + "\" needs dim rows");
    for (const auto& r : rows)
      if (!r.is_array() || r.size() != d) throw Error(ErrorCode::NonSquare, std::string("\"") + name + "\" rows need dim entries");
  };
  check_rows(re, "re");
  if (!im.is_null()) check_rows(im, "im");
  CMatrix raw(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      const double x = detail::get_double(re[a][b], "re entry");
      const double y = im.is_null() ? 0.0 : detail::get_double(im[a][b], "im entry");
      raw(a, b) = Complex(x, y);
    }
  return hermitize(raw);
}

inline json to_json(const EffectTuple& t) {
  json effects = json::array();
  for (const auto& e : t.effects()) effects.push_back(to_json(e));
  return {{"schema", kSchema}, {"g", t.size()}, {"dim", t.dim()}, {"effects", std::move(effects)}};
}

inline EffectTuple effect_tuple_from_json(const json& j, EffectCheck check = EffectCheck::Strict) {
  detail::check_schema(j);
  const std::size_t g = detail::get_size(j, "g");
  const std::size_t d = detail::get_size(j, "dim");
  const auto& arr = detail::field(j, "effects");
  if (!arr.is_array()) detail::fail("\"effects\" must be an array");
  if (arr.size() != g) throw Error(ErrorCode::LengthMismatch, "\"g\" differs from the number of effects");
  std::vector<HermitianMatrix> es;
  for (const auto& m : arr) {
    es.push_back(matrix_from_json(m));
    if (es.back().dim() != d) throw Error(ErrorCode::DimensionMismatch, "effect dimension differs from \"dim\"");
  }
  return EffectTuple(std::move(es), check);
}

inline json to_json(const MatrixTuple& x) {
  json ms = json::array();
  for (const auto& m : x.matrices()) ms.push_back(to_json(m));
  return {{"schema", kSchema}, {"g", x.size()}, {"level", x.level()}, {"matrices", std::move(ms)}};
}

inline MatrixTuple matrix_tuple_from_json(const json& j) {
  detail::check_schema(j);
  const std::size_t g = detail::get_size(j, "g");
  const std::size_t n = detail::get_size(j, "level");
  const auto& arr = detail::field(j, "matrices");
  if (!arr.is_array()) detail::fail("\"matrices\" must be an array");
  if (arr.size() != g) throw Error(ErrorCode::LengthMismatch, "\"g\" differs from the number of matrices");
  std::vector<HermitianMatrix> xs;
  for (const auto& m : arr) {
    xs.push_back(matrix_from_json(m));
    if (xs.back().dim() != n) throw Error(ErrorCode::DimensionMismatch, "matrix size differs from \"level\"");
  }
  return MatrixTuple(std::move(xs));
}

inline json to_json(const JointPovm& w) {
  json es = json::array();
  for (const auto& e : w.elements) es.push_back(to_json(e));
  return {{"g", w.g}, {"dim", w.d}, {"elements", std::move(es)}};
}

inline json verdict_json(const JmVerdict& v) {
  json j = {{"schema", kSchema},
            {"status", to_string(v.status)},
            {"t_star", nullptr},
            {"capped", false},
            {"margin", v.margin},
            {"sdp_status", std::string(to_string(v.sdp_status))},
            {"message", v.message}};
  if (v.witness) j["witness"] = to_json(*v.witness);
  if (!v.certificate.empty()) {
    j["certificate"] = v.certificate;
    j["certificate_residual"] = v.certificate_residual;
  }
  return j;
}

inline json verdict_json(const RobustnessResult& r) {
  json j = {{"schema", kSchema},
            {"status", std::string(to_string(r.status))},
            {"t_star", r.t_star},
            {"t_cap", r.t_cap},
            {"capped", r.capped},
            {"margin", r.t_star - 1.0},
            {"warnings", r.warnings}};
  if (r.witness) j["witness"] = to_json(*r.witness);
  return j;
}

inline json to_json(const SdpProblem& p) {
  json objective = json::array();
  for (const auto& c : p.objective) objective.push_back(to_json(c));
  json constraints = json::array();
  for (const auto& con : p.constraints) {
    json terms = json::array();
    for (const auto& t : con.terms) terms.push_back({{"block", t.block}, {"coeff", to_json(t.coeff)}});
    constraints.push_back({{"terms", std::move(terms)}, {"rhs", con.rhs}});
  }
  return {{"schema", kSchema},
          {"kind", "sdp-problem"},
          {"sense", p.sense == Sense::Minimize ? "minimize" : "maximize"},
          {"blocks", p.block_dims},
          {"objective", std::move(objective)},
          {"constraints", std::move(constraints)}};
}

inline SdpProblem sdp_problem_from_json(const json& j) {
  detail::check_schema(j);
  SdpProblem p;
  const auto& sense = detail::field(j, "sense");
  if (sense == "minimize")
    p.sense = Sense::Minimize;
  else if (sense == "maximize")
    p.sense = Sense::Maximize;
  else
    detail::fail("\"sense\" must be minimize or maximize");
  const auto& blocks = detail::field(j, "blocks");
  if (!blocks.is_array()) detail::fail("\"blocks\" must be an array");
  for (const auto& b : blocks) {
    if (!b.is_number_integer() || b.get<long long>() <= 0) detail::fail("block dimensions must be positive integers");
    p.block_dims.push_back(b.get<std::size_t>());
  }
  const auto& obj = detail::field(j, "objective");
  if (!obj.is_array()) detail::fail("\"objective\" must be an array");
  for (const auto& c : obj) p.objective.push_back(matrix_from_json(c));
  const auto& cons = detail::field(j, "constraints");
  if (!cons.is_array()) detail::fail("\"constraints\" must be an array");
  for (const auto& c : cons) {
    SdpConstraint con;
    con.rhs = detail::get_double(detail::field(c, "rhs"), "rhs");
    const auto& terms = detail::field(c, "terms");
    if (!terms.is_array()) detail::fail("\"terms\" must be an array");
    for (const auto& t : terms) con.terms.push_back({detail::get_size(t, "block"), matrix_from_json(detail::field(t, "coeff"))});
    p.constraints.push_back(std::move(con));
  }
  p.validate();
  return p;
}

inline json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

inline void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Parse, "cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace jmsdp::io

#endif  // JMSDP_IO_HPP
