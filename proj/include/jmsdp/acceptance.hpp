#ifndef JMSDP_ACCEPTANCE_HPP
#define JMSDP_ACCEPTANCE_HPP

// The acceptance suite: twelve numbered checks with pinned tolerances and
// wall-clock timing. Shared by the acceptance binary and `jmsdp selftest`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "jmsdp/constructions.hpp"
#include "jmsdp/jm.hpp"
#include "jmsdp/regions.hpp"
#include "jmsdp/spectra.hpp"

namespace jmsdp::acceptance {

struct Options {
  SdpOptions sdp;
  std::set<int> only;  // empty runs everything
  std::uint64_t seed = 0;
};

struct Result {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string measured;
  std::string expected;
  double seconds = 0.0;
};

namespace detail {

inline std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

inline std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

inline JmOptions jm_opts(const Options& o) {
  JmOptions j;
  j.sdp = o.sdp;
  return j;
}

inline EffectTuple pauli_effects(std::size_t g) {
  const auto id = HermitianMatrix::identity(2);
  const HermitianMatrix ps[3] = {pauli_x(), pauli_z(), pauli_y()};
  std::vector<HermitianMatrix> es;
  for (std::size_t i = 0; i < g; ++i) es.push_back((id + ps[i]) * 0.5);
  return EffectTuple(std::move(es));
}

inline ScalingVector random_unit_direction(std::size_t g, Rng& rng) {
  std::vector<double> v(g);
  double n = 0.0;
  for (auto& x : v) {
    x = std::abs(rng.normal());
    n += x * x;
  }
  for (auto& x : v) x /= std::sqrt(n);
  return ScalingVector(std::move(v));
}

inline bool robust_optimal(const RobustnessResult& r) { return r.status == SdpStatus::Optimal; }

// Each check fills measured/expected and returns pass.
using Check = std::function<bool(const Options&, Result&)>;

inline bool pauli_robustness(std::size_t g, double budget, const Options& o, Result& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = robustness(pauli_effects(g), ScalingVector::constant(g, 1.0), NoiseModel::balanced(), std::nullopt,
                              jm_opts(o));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double want = 1.0 / std::sqrt(static_cast<double>(g));
  r.measured = fmt("t*=%.9f", res.t_star) + " status=" + std::string(to_string(res.status)) + fmt(" solve=%.3fs", secs);
  r.expected = fmt("t*=%.9f +- 1e-05, runtime < %.0fs", want, budget);
  return robust_optimal(res) && std::abs(res.t_star - want) <= 1e-5 && secs < budget;
}

inline bool spin_extremality(const Options& o, Result& r) {
  bool ok = true;
  for (std::size_t g : {4u, 5u}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto t = extremal_effect_tuple(g);
    const auto res = robustness(t, ScalingVector::constant(g, 1.0), NoiseModel::balanced(), std::nullopt, jm_opts(o));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double want = 1.0 / std::sqrt(static_cast<double>(g));
    r.measured += "g=" + std::to_string(g) + fmt(" dim=%.0f", static_cast<double>(t.dim())) +
                  fmt(" t*=%.7f (%.2fs) ", res.t_star, secs);
    ok = ok && t.dim() == 4 && robust_optimal(res) && std::abs(res.t_star - want) <= 1e-4 && secs < 30.0;
  }
  r.expected = "dim 4, t*=1/sqrt(g) +- 1e-04, < 30s each";
  return ok;
}

inline bool qc_lower_bound(const Options& o, Result& r) {
  Rng rng(o.seed + 4);
  double worst = 1e300;
  int failures = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto t = random_effect_tuple(3, 3, o.seed + 1000 + s);
    for (int k = 0; k < 20; ++k) {
      const auto res = robustness(t, random_unit_direction(3, rng), NoiseModel::balanced(), std::nullopt, jm_opts(o));
      if (!robust_optimal(res)) ++failures;
      worst = std::min(worst, res.t_star);
    }
  }
  r.measured = fmt("min t*=%.9f over 1000 solves, non-optimal=%.0f", worst, failures);
  r.expected = "t* >= 1 - 1e-04 in every case";
  return failures == 0 && worst >= 1.0 - 1e-4;
}

inline bool symmetric_bound(const Options& o, Result& r) {
  double worst = 1e300;
  int failures = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto res = robustness(random_effect_tuple(4, 2, o.seed + 2000 + s), ScalingVector::constant(4, 1.0),
                                NoiseModel::balanced(), std::nullopt, jm_opts(o));
    if (!robust_optimal(res)) ++failures;
    worst = std::min(worst, res.t_star);
  }
  r.measured = fmt("min t*=%.9f over 100 tuples, non-optimal=%.0f", worst, failures);
  r.expected = "t* >= 1/(2d) = 0.25";
  return failures == 0 && worst >= 0.25;
}

inline bool zhu_tightness(const Options& o, Result& r) {
  const auto pair = mub_effect_tuple(mub_family(2), {{0}, {0}});
  auto zhu_at = [&](double t) {
    const auto z = zhu_bound(binary_povms(add_noise(pair, {t, t}, NoiseModel::balanced())), o.sdp);
    if (z.status != SdpStatus::Optimal) throw Error(ErrorCode::ConvergenceFailure, "zhu bound did not converge");
    return z.value;
  };
  double closed = 0.0;
  for (double t : {0.2, 0.5, 0.7, 0.9}) closed = std::max(closed, std::abs(zhu_at(t) - (1.0 + 2.0 * t * t)));
  double lo = 0.5, hi = 0.9;
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    (zhu_at(mid) <= 2.0 ? lo : hi) = mid;
  }
  const double crossing = 0.5 * (lo + hi);
  const auto res = robustness(pair, {1.0, 1.0}, NoiseModel::balanced(), std::nullopt, jm_opts(o));
  const double want = 1.0 / std::sqrt(2.0);
  r.measured = fmt("crossing=%.9f robustness=%.9f", crossing, res.t_star) + fmt(" closed-form err=%.1e", closed);
  r.expected = "crossing 1/sqrt(2) +- 1e-06, robustness +- 1e-05, value 1+2t^2";
  return std::abs(crossing - want) <= 1e-6 && robust_optimal(res) && std::abs(res.t_star - want) <= 1e-5 && closed <= 1e-6;
}

inline bool zhu_gram_values(const Options& o, Result& r) {
  Rng rng(o.seed + 7);
  double trace_err = 0.0, scale_err = 0.0;
  int count = 0;
  for (std::size_t d : {2u, 3u})
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t rank = 1 + static_cast<std::size_t>(trial) % (d - 1);
      const auto v = random_isometry(d, rank, rng);
      const auto p = hermitian_part(v * v.adjoint());
      const auto gbar = zhu_gram_binary(p).gbar;
      trace_err = std::max(trace_err, std::abs(gbar.trace() - 1.0));
      const double s = rng.uniform();
      const auto scaled = add_noise(EffectTuple({p}), {s}, NoiseModel::linear());
      scale_err = std::max(scale_err, max_abs_diff(zhu_gram_binary(scaled[0]).gbar, gbar * (s * s)));
      ++count;
    }
  r.measured = fmt("max |tr Gbar - 1|=%.1e, max scaling err=%.1e", trace_err, scale_err) + " over " +
               std::to_string(count) + " projections";
  r.expected = "both <= 1e-10";
  return trace_err <= 1e-10 && scale_err <= 1e-10;
}

inline bool cloning_formulas(const Options& o, Result& r) {
  double sym = 0.0, basis = 0.0, forms = 0.0;
  int pair_mismatch = 0;
  for (std::size_t g = 2; g <= 20; ++g)
    for (std::size_t d = 2; d <= 20; ++d) {
      const double gg = static_cast<double>(g), dd = static_cast<double>(d);
      sym = std::max(sym, std::abs(clone_boundary_scale(g, d, ScalingVector::constant(g, 1.0)) - (gg + dd) / (gg * (1 + dd))));
      for (std::size_t i = 0; i < g; ++i) {
        std::vector<double> e(g, 0.0);
        e[i] = 1.0;
        basis = std::max(basis, std::abs(clone_membership(g, d, ScalingVector(e)).slack));
      }
    }
  for (std::size_t d : {2u, 3u, 5u, 10u}) {
    const double dd = static_cast<double>(d);
    for (int i = 0; i < 100; ++i) {
      const double s = i / 99.0;
      for (int j = 0; j < 100; ++j) {
        const double t = j / 99.0;
        const double closed = 1.0 - (s + t - 2.0 / dd * std::sqrt((1 - s) * (1 - t)));
        if (std::abs(closed) > 1e-9 && (closed >= 0) != clone_membership(2, d, {s, t}).member) ++pair_mismatch;
      }
    }
  }
  Rng rng(o.seed + 8);
  for (int trial = 0; trial < 20000; ++trial) {
    const std::size_t g = 2 + rng.next_u64() % 19, d = 2 + rng.next_u64() % 19;
    std::vector<double> s(g);
    for (auto& v : s) v = rng.uniform();
    const auto c = clone_membership(g, d, ScalingVector(s));
    forms = std::max(forms, std::abs(c.original_slack / static_cast<double>(g + d - 1) - c.slack) /
                                std::max(1.0, std::abs(c.slack)));
  }
  r.measured = fmt("sym err=%.1e, e_i slack=%.1e, ", sym, basis) + "g=2 mismatches on 4x100x100 grid=" + std::to_string(pair_mismatch) + ", "  +
               fmt("form disagreement=%.1e", forms);
  r.expected = "sym <= 1e-12, e_i slack <= 1e-9, 0 mismatches on 100x100, forms <= 1e-9";
  return sym <= 1e-12 && basis <= 1e-9 && pair_mismatch == 0 && forms <= 1e-9;
}

inline bool spin_invariants(const Options& o, Result& r) {
  double worst = 0.0, norm_err = 0.0;
  for (std::size_t g = 1; g <= 9; ++g) {
    const auto sys = spin_system(g);
    for (std::size_t i = 0; i < g; ++i) {
      const auto& f = sys.matrices[i].matrix();
      worst = std::max(worst, max_abs_diff(f, f.adjoint()));
      worst = std::max(worst, max_abs_diff(f * f, CMatrix::identity(sys.dim)));
      Complex tr{};
      for (std::size_t k = 0; k < sys.dim; ++k) tr += f(k, k);
      if (g > 1) worst = std::max(worst, std::abs(tr));
      for (std::size_t j = i + 1; j < g; ++j) {
        const auto& h = sys.matrices[j].matrix();
        worst = std::max(worst, (f * h + h * f).max_abs());
      }
    }
  }
  Rng rng(o.seed + 9);
  const auto sys = spin_system(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(5);
    for (auto& v : a) v = rng.uniform();
    const auto n = conjugate_norm_identity_check(a, sys);
    norm_err = std::max(norm_err, std::abs(n.lhs - n.rhs));
  }
  r.measured = fmt("max invariant residual=%.1e, norm identity err=%.1e", worst, norm_err);
  r.expected = "residual <= 1e-12, norm identity <= 1e-08";
  return worst <= 1e-12 && norm_err <= 1e-8;
}

inline bool diamond_in_ball(const Options& o, Result& r) {
  double worst = 1e300;
  std::size_t total = 0, nonmembers = 0;
  for (std::size_t g = 1; g <= 4; ++g)
    for (std::size_t n = 1; n <= 4; ++n)
      for (const auto& x : sample_diamond(g, n, o.seed + 10 * g + n, 625)) {
        ++total;
        if (!diamond_membership(x).member) ++nonmembers;
        worst = std::min(worst, matrix_ball_membership(x).margin);
      }
  r.measured = fmt("min ball margin=%.3e over %.0f samples", worst, static_cast<double>(total)) +
               " (" + std::to_string(nonmembers) + " non-members)";
  r.expected = "10000 diamond members, margin >= -1e-09";
  return total == 10000 && nonmembers == 0 && worst >= -1e-9;
}

inline bool bridge_consistency(const Options& o, Result& r) {
  Rng rng(o.seed + 11);
  int agree = 0, compatible = 0, incompatible = 0, undecided = 0;
  for (std::uint64_t s = 0; s < 500; ++s) {
    const std::size_t g = 2 + s % 3, d = 2 + (s / 3) % 2;
    const auto base = random_effect_tuple(g, d, o.seed + 5000 + s);
    std::vector<HermitianMatrix> sharp;
    for (const auto& e : base.effects()) {
      auto dec = eig(e);
      for (auto& l : dec.eigenvalues) l = l > 0.5 ? 1.0 : 0.0;
      sharp.push_back(reconstruct(dec.eigenvectors, dec.eigenvalues));
    }
    const double scale = 0.4 + 0.6 * rng.uniform();
    const auto t = add_noise(s % 2 ? EffectTuple(sharp, EffectCheck::Clamp) : base, ScalingVector::constant(g, scale),
                             NoiseModel::balanced());
    const auto a = diamond_free_inclusion(t, jm_opts(o));
    const auto b = check_compatibility(t, jm_opts(o));
    if (a.status == JmStatus::Indeterminate || b.status == JmStatus::Indeterminate) ++undecided;
    if (a.status == b.status) ++agree;
    if (b.status == JmStatus::Compatible) ++compatible;
    if (b.status == JmStatus::Incompatible) ++incompatible;
  }
  r.measured = "agree=" + std::to_string(agree) + "/500 (compatible " + std::to_string(compatible) + ", incompatible " +
               std::to_string(incompatible) + ", undecided " + std::to_string(undecided) + ")";
  r.expected = "500/500 identical decisive verdicts, both kinds present";
  return agree == 500 && undecided == 0 && compatible > 0 && incompatible > 0;
}

inline bool compression(const Options& o, Result& r) {
  Rng rng(o.seed + 12);
  int parents = 0, compressed = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto t = add_noise(random_effect_tuple(3, 4, o.seed + 6000 + s), ScalingVector::constant(3, 0.55),
                             NoiseModel::balanced());
    if (check_compatibility(t, jm_opts(o)).status != JmStatus::Compatible) continue;
    ++parents;
    const auto c = compress(t, random_isometry(4, 2, rng));
    if (check_compatibility(c, jm_opts(o)).status == JmStatus::Compatible) ++compressed;
  }
  r.measured = "compatible parents=" + std::to_string(parents) + ", compressed compatible=" + std::to_string(compressed);
  r.expected = "100 and 100";
  return parents == 100 && compressed == 100;
}

}  // namespace detail

struct Criterion {
  int id;
  const char* name;
  detail::Check check;
};

inline const std::vector<Criterion>& criteria() {
  using namespace detail;
  static const std::vector<Criterion> all = {
      {1, "pauli-pair-robustness", [](const Options& o, Result& r) { return pauli_robustness(2, 1.0, o, r); }},
      {2, "pauli-triple-robustness", [](const Options& o, Result& r) { return pauli_robustness(3, 2.0, o, r); }},
      {3, "spin-extremality", spin_extremality},
      {4, "qc-lower-bound", qc_lower_bound},
      {5, "symmetric-1/(2d)-bound", symmetric_bound},
      {6, "zhu-sdp-tightness", zhu_tightness},
      {7, "zhu-gram-values", zhu_gram_values},
      {8, "cloning-formulas", cloning_formulas},
      {9, "spin-invariants", spin_invariants},
      {10, "diamond-in-ball", diamond_in_ball},
      {11, "bridge-consistency", bridge_consistency},
      {12, "compression", compression},
  };
  return all;
}

/// Runs the selected criteria in order. Exceptions count as failures.
inline std::vector<Result> run(const Options& o) {
  std::vector<Result> out;
  for (const auto& c : criteria()) {
    if (!o.only.empty() && !o.only.count(c.id)) continue;
    Result r;
    r.id = c.id;
    r.name = c.name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.pass = c.check(o, r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.measured = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string format_line(const Result& r) {
  char head[96];
  std::snprintf(head, sizeof head, "[%s] %2d %-26s %8.3fs  ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds);
  return head + r.measured + " | expected " + r.expected;
}

inline bool all_passed(const std::vector<Result>& rs) {
  for (const auto& r : rs)
    if (!r.pass) return false;
  return !rs.empty();
}

}  // namespace jmsdp::acceptance

#endif  // JMSDP_ACCEPTANCE_HPP
