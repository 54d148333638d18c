#ifndef JMSDP_CLI_APP_HPP
#define JMSDP_CLI_APP_HPP

// The jmsdp command line. run() takes the arguments after the program name
// and writes to the given streams so tests can drive it in-process.

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jmsdp/acceptance.hpp"
#include "jmsdp/constructions.hpp"
#include "jmsdp/io.hpp"
#include "jmsdp/jm.hpp"
#include "jmsdp/regions.hpp"
#include "jmsdp/spectra.hpp"

namespace jmsdp::cli {

inline constexpr int kOk = 0;
inline constexpr int kDomainError = 1;
inline constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError(std::string("cannot parse ") + what + " entry '" + item + "'");
    }
    if (used != item.size()) throw UsageError(std::string("cannot parse ") + what + " entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string(what) + " is empty");
  return out;
}

inline NoiseModel parse_noise(const std::string& name, const std::string& a) {
  if (name == "balanced") return NoiseModel::balanced();
  if (name == "linear") return NoiseModel::linear();
  if (name == "general") {
    if (a.empty()) throw UsageError("--noise general needs --a");
    return NoiseModel::general(parse_list(a, "--a"));
  }
  throw UsageError("unknown noise model '" + name + "'");
}

inline RegionKind parse_kind(const std::string& name) {
  for (auto k : {RegionKind::QC, RegionKind::CloneGeneral, RegionKind::CloneSymmetricValue, RegionKind::ClonePair,
                 RegionKind::SimplexLimit})
    if (to_string(k) == name) return k;
  throw UsageError("unknown region kind '" + name + "'");
}

/// Directions for a sweep: g = 2 uses evenly spaced angles on the quarter
/// circle; larger g draws seeded unit nonnegative vectors. Rows keep this order.
inline std::vector<ScalingVector> sweep_directions(std::size_t g, std::size_t points, std::uint64_t seed) {
  std::vector<ScalingVector> out;
  if (g == 2) {
    for (std::size_t k = 0; k < points; ++k) {
      const double th = points == 1 ? 0.0 : 0.5 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(points - 1);
      auto snap = [](double v) { return v < 1e-15 ? 0.0 : v; };
      out.push_back(ScalingVector({snap(std::cos(th)), snap(std::sin(th))}));
    }
    return out;
  }
  Rng rng(seed);
  for (std::size_t k = 0; k < points; ++k) out.push_back(acceptance::detail::random_unit_direction(g, rng));
  return out;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint measurability of binary quantum measurements via semidefinite programming."};
  app.name("jmsdp");
  app.require_subcommand(1);
  app.fallthrough();

  double tol = SdpOptions{}.tol;
  int max_iter = SdpOptions{}.max_iter;
  std::uint64_t seed = 0;
  std::size_t cap_g = JmOptions{}.max_g;
  std::string format = "json";
  app.add_option("--tol", tol, "solver tolerance")->check(CLI::PositiveNumber);
  app.add_option("--max-iter", max_iter, "solver iteration limit")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for sampled directions and selftest draws");
  app.add_option("--cap-g", cap_g, "largest number of measurements accepted")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));

  std::string effects_path, tuple_path, out_path, direction, noise = "balanced", noise_a, kind = "qc", only;
  std::vector<std::string> points_s;
  std::size_t g = 0, d = 0, points = 0, grid = 0, count = 0;
  double cap = 0.0;
  bool as_effects = false;

  auto* jm_check = app.add_subcommand("jm-check", "decide joint measurability of an effect tuple");
  jm_check->add_option("--effects", effects_path, "effect tuple JSON")->required();

  auto* robust = app.add_subcommand("robustness", "largest t keeping t*direction noisy effects compatible");
  robust->add_option("--effects", effects_path, "effect tuple JSON")->required();
  robust->add_option("--direction", direction, "comma-separated nonnegative weights")->required();
  robust->add_option("--noise", noise, "balanced | linear | general");
  robust->add_option("--a", noise_a, "comma-separated a_i for general noise");
  robust->add_option("--cap", cap, "upper limit for t (default 1/max direction)");

  auto* sweep = app.add_subcommand("sweep", "robustness along many directions (JMSDP_THREADS workers)");
  sweep->add_option("--effects", effects_path, "effect tuple JSON")->required();
  sweep->add_option("--points", points, "number of directions")->required()->check(CLI::PositiveNumber);
  sweep->add_option("--noise", noise, "balanced | linear | general");
  sweep->add_option("--a", noise_a, "comma-separated a_i for general noise");

  auto* spin = app.add_subcommand("spin-gen", "anticommuting spin system of g matrices");
  spin->add_option("--g", g, "number of matrices")->required()->check(CLI::PositiveNumber);
  spin->add_flag("--as-effects", as_effects, "emit the effects (I + F_i)/2 instead");

  auto* mub = app.add_subcommand("mub-gen", "rank-one effects from mutually unbiased bases, prime d");
  mub->add_option("--d", d, "prime dimension")->required();
  mub->add_option("--count", count, "number of bases used (default d + 1)");

  auto* zhu = app.add_subcommand("zhu", "Zhu bound of the binary POVMs {E_i, I - E_i}");
  zhu->add_option("--effects", effects_path, "effect tuple JSON")->required();

  auto* clone = app.add_subcommand("clone-region", "membership in closed-form scaling regions");
  clone->add_option("--kind", kind, "qc | clone | clone-symmetric | clone-pair | simplex");
  clone->add_option("--g", g, "number of measurements")->required()->check(CLI::PositiveNumber);
  clone->add_option("--d", d, "dimension (cloning kinds)");
  clone->add_option("--s", points_s, "comma-separated scaling vector (repeatable)");
  clone->add_option("--grid", grid, "for g = 2: all points (i, j)/(n - 1) of an n x n grid");

  auto* diamond = app.add_subcommand("diamond-check", "matrix diamond and ball membership, or diamond inclusion");
  auto* dt = diamond->add_option("--tuple", tuple_path, "matrix tuple JSON");
  auto* de = diamond->add_option("--effects", effects_path, "effect tuple JSON");
  dt->excludes(de);

  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
  selftest->add_option("--only", only, "comma-separated criterion numbers");

  for (auto* sub : {jm_check, robust, sweep, spin, mub, zhu, clone, diamond})
    sub->add_option("--out", out_path, "write the result here instead of stdout");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  JmOptions jm;
  jm.max_g = cap_g;
  jm.sdp.tol = tol;
  jm.sdp.max_iter = max_iter;
  const bool csv = format == "csv";

  auto emit_text = [&](const std::string& text) {
    if (out_path.empty())
      out << text;
    else {
      std::ofstream f(out_path);
      if (!f) throw Error(ErrorCode::Parse, "cannot write " + out_path);
      f << text;
    }
  };
  auto emit = [&](const io::json& j) { emit_text(j.dump(2) + "\n"); };
  auto no_csv = [&](const char* cmd) {
    if (csv) throw UsageError(std::string(cmd) + " has no CSV output");
  };

  try {
    if (jm_check->parsed()) {
      const auto t = io::effect_tuple_from_json(io::read_file(effects_path));
      const auto v = check_compatibility(t, jm);
      if (csv)
        emit_text("status,margin\n" + to_string(v.status) + "," + jmsdp::detail::csv_number(v.margin) + "\n");
      else
        emit(io::verdict_json(v));
      return kOk;
    }
    if (robust->parsed()) {
      const auto t = io::effect_tuple_from_json(io::read_file(effects_path));
      const auto model = detail::parse_noise(noise, noise_a);
      const ScalingVector dir(detail::parse_list(direction, "--direction"));
      const auto r = robustness(t, dir, model, cap > 0.0 ? std::optional<double>(cap) : std::nullopt, jm);
      if (csv)
        emit_text(sweep_csv({SweepEntry{dir, r, {}}}, model));
      else
        emit(io::verdict_json(r));
      return r.status == SdpStatus::Optimal ? kOk : kDomainError;
    }
    if (sweep->parsed()) {
      const auto t = io::effect_tuple_from_json(io::read_file(effects_path));
      const auto model = detail::parse_noise(noise, noise_a);
      const auto entries = region_sweep(t, detail::sweep_directions(t.size(), points, seed), model, jm, default_thread_count());
      if (csv) {
        emit_text(sweep_csv(entries, model));
      } else {
        io::json rows = io::json::array();
        for (const auto& e : entries) {
          io::json row = {{"direction", e.direction.values()}};
          if (e.result)
            row["verdict"] = io::verdict_json(*e.result);
          else
            row["error"] = e.error;
          rows.push_back(std::move(row));
        }
        emit({{"schema", io::kSchema}, {"noise", to_string(model.kind())}, {"rows", std::move(rows)}});
      }
      return kOk;
    }
    if (spin->parsed()) {
      no_csv("spin-gen");
      const auto sys = spin_system(g);
      for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = i + 1; j < g; ++j) {
          const auto& a = sys.matrices[i].matrix();
          const auto& b = sys.matrices[j].matrix();
          if ((a * b + b * a).max_abs() > 1e-12) throw Error(ErrorCode::NumericalBreakdown, "spin matrices do not anticommute");
        }
      if (as_effects)
        emit(io::to_json(extremal_effect_tuple(g)));
      else
        emit(io::to_json(MatrixTuple(sys.matrices)));
      return kOk;
    }
    if (mub->parsed()) {
      no_csv("mub-gen");
      const auto fam = mub_family(d);
      const std::size_t n = count == 0 ? fam.bases.size() : count;
      std::vector<std::vector<std::size_t>> subsets(n, std::vector<std::size_t>{0});
      emit(io::to_json(mub_effect_tuple(fam, subsets)));
      return kOk;
    }
    if (zhu->parsed()) {
      const auto t = io::effect_tuple_from_json(io::read_file(effects_path));
      const auto z = zhu_bound(binary_povms(t), jm.sdp);
      const bool certified = z.status == SdpStatus::Optimal && z.value > static_cast<double>(t.dim()) + 1e-9;
      if (csv)
        emit_text("value,d,certified_incompatible\n" + jmsdp::detail::csv_number(z.value) + "," + std::to_string(t.dim()) +
                  "," + (certified ? "true" : "false") + "\n");
      else
        emit({{"schema", io::kSchema},
              {"value", z.value},
              {"d", t.dim()},
              {"status", std::string(to_string(z.status))},
              {"certified_incompatible", certified},
              {"warnings", z.warnings}});
      return z.status == SdpStatus::Optimal ? kOk : kDomainError;
    }
    if (clone->parsed()) {
      const auto k = detail::parse_kind(kind);
      std::vector<RegionQuery> qs;
      for (const auto& text : points_s) qs.push_back({k, g, d, ScalingVector(detail::parse_list(text, "--s"))});
      if (grid > 0) {
        if (g != 2) throw UsageError("--grid needs --g 2");
        for (std::size_t i = 0; i < grid; ++i)
          for (std::size_t j = 0; j < grid; ++j) {
            const double n = grid == 1 ? 1.0 : static_cast<double>(grid - 1);
            qs.push_back({k, g, d, ScalingVector({static_cast<double>(i) / n, static_cast<double>(j) / n})});
          }
      }
      if (qs.empty()) throw UsageError("clone-region needs --s or --grid");
      if (csv) {
        emit_text(region_csv(qs));
      } else {
        io::json rows = io::json::array();
        for (const auto& q : qs) {
          const auto m = region_membership(q);
          rows.push_back({{"s", q.s.values()}, {"member", m.member}, {"margin", m.margin}});
        }
        emit({{"schema", io::kSchema}, {"kind", kind}, {"g", g}, {"d", d}, {"rows", std::move(rows)}});
      }
      return kOk;
    }
    if (diamond->parsed()) {
      no_csv("diamond-check");
      if (!tuple_path.empty()) {
        const auto x = io::matrix_tuple_from_json(io::read_file(tuple_path));
        const auto dm = diamond_membership(x, std::max<std::size_t>(cap_g, kDefaultDiamondMaxG));
        const auto bm = matrix_ball_membership(x);
        emit({{"schema", io::kSchema},
              {"diamond", {{"member", dm.member}, {"margin", dm.margin}}},
              {"ball", {{"member", bm.member}, {"margin", bm.margin}}}});
        return kOk;
      }
      if (effects_path.empty()) throw UsageError("diamond-check needs --tuple or --effects");
      const auto t = io::effect_tuple_from_json(io::read_file(effects_path));
      auto v = io::verdict_json(diamond_free_inclusion(t, jm));
      v["level1"] = diamond_level1_inclusion(t.effects());
      emit(v);
      return kOk;
    }
    if (selftest->parsed()) {
      no_csv("selftest");
      acceptance::Options o;
      o.sdp = jm.sdp;
      o.seed = seed;
      if (!only.empty())
        for (double v : detail::parse_list(only, "--only")) o.only.insert(static_cast<int>(v));
      const auto results = acceptance::run(o);
      int failed = 0;
      for (const auto& r : results) {
        out << acceptance::format_line(r) << "\n";
        failed += r.pass ? 0 : 1;
      }
      out << results.size() << " checks, " << failed << " failed\n";
      if (failed > 0)
        for (const auto& r : results)
          if (!r.pass) err << "selftest: criterion " << r.id << " (" << r.name << ") failed\n";
      return failed == 0 && !results.empty() ? kOk : kDomainError;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kUsageError;
}

}  // namespace jmsdp::cli

#endif  // JMSDP_CLI_APP_HPP
