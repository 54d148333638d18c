#ifndef JMSDP_JM_HPP
#define JMSDP_JM_HPP

// Joint measurability of g binary measurements as an SDP over 2^g parent
// effects G_eta, and noise robustness along a scaling direction.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "jmsdp/quantum.hpp"
#include "jmsdp/sdp.hpp"

namespace jmsdp {

/// eta in {-1,+1}^g. Index k encodes eta_i = -1 iff bit i of k is set.
struct SignVector {
  std::vector<int> signs;

  static SignVector from_index(std::size_t k, std::size_t g) {
    SignVector s;
    s.signs.resize(g);
    for (std::size_t i = 0; i < g; ++i) s.signs[i] = ((k >> i) & 1U) ? -1 : 1;
    return s;
  }
  std::size_t index() const {
    std::size_t k = 0;
    for (std::size_t i = 0; i < signs.size(); ++i) {
      if (signs[i] != 1 && signs[i] != -1) throw Error(ErrorCode::InvalidArgument, "sign entries must be +-1");
      if (signs[i] == -1) k |= std::size_t{1} << i;
    }
    return k;
  }
};

inline bool plus_at(std::size_t k, std::size_t i) { return ((k >> i) & 1U) == 0; }

struct JointPovmCheck {
  double min_eig = 0.0;
  double sum_residual = 0.0;       // ||sum_eta G_eta - I||_max
  double marginal_residual = 0.0;  // max_i ||sum_{eta_i=+1} G_eta - E_i||_max
  bool valid = false;
};

/// Parent POVM {G_eta} indexed as in SignVector.
struct JointPovm {
  std::size_t g = 0;
  std::size_t d = 0;
  std::vector<HermitianMatrix> elements;

  const HermitianMatrix& at(const SignVector& eta) const { return elements.at(eta.index()); }

  HermitianMatrix marginal(std::size_t i) const {
    auto m = HermitianMatrix::zero(d);
    for (std::size_t k = 0; k < elements.size(); ++k)
      if (plus_at(k, i)) m += elements[k];
    return m;
  }

  /// Independent re-check of positivity, normalization and marginals.
  JointPovmCheck check(const std::vector<HermitianMatrix>& targets, double tol = 1e-8) const {
    JointPovmCheck c;
    if (elements.size() != (std::size_t{1} << g) || targets.size() != g) return c;
    c.min_eig = std::numeric_limits<double>::infinity();
    auto sum = HermitianMatrix::zero(d);
    for (const auto& e : elements) {
      c.min_eig = std::min(c.min_eig, min_eigenvalue(e));
      sum += e;
    }
    c.sum_residual = max_abs_diff(sum, HermitianMatrix::identity(d));
    for (std::size_t i = 0; i < g; ++i)
      c.marginal_residual = std::max(c.marginal_residual, max_abs_diff(marginal(i), targets[i]));
    c.valid = c.min_eig >= -tol && c.sum_residual <= tol && c.marginal_residual <= tol;
    return c;
  }
};

enum class JmStatus { Compatible, Incompatible, Indeterminate };

inline std::string to_string(JmStatus s) {
  switch (s) {
    case JmStatus::Compatible: return "Compatible";
    case JmStatus::Incompatible: return "Incompatible";
    case JmStatus::Indeterminate: return "Indeterminate";
  }
  return "?";
}

struct JmVerdict {
  JmStatus status = JmStatus::Indeterminate;
  std::optional<JointPovm> witness;
  /// Compatible: min eig over G_eta minus the worst equality residual.
  /// Incompatible: -1/||y||_inf
  /// for the normalized Farkas ray y. Indeterminate: the best iterate's
  /// min(min eig, -primal residual).
  double margin = 0.0;
  std::vector<double> certificate;
  double certificate_residual = 0.0;
  SdpStatus sdp_status = SdpStatus::MaxIter;
  std::string message;
};

struct JmOptions {
  std::size_t max_g = 6;
  SdpOptions sdp{};
  double witness_tol = 1e-8;
};

inline void check_g_cap(std::size_t g, const JmOptions& opts) {
  if (g > opts.max_g)
    throw Error(ErrorCode::TooManyMeasurements,
                "g = " + std::to_string(g) + " exceeds the cap of " + std::to_string(opts.max_g));
}

/// Feasibility SDP: sum_eta G_eta = I and sum_{eta_i=+1} G_eta = E_i.
inline SdpProblem assemble_jm_sdp(const EffectTuple& t, const JmOptions& opts = {}) {
  const std::size_t g = t.size(), d = t.dim();
  check_g_cap(g, opts);
  const std::size_t n = std::size_t{1} << g;
  SdpProblem p;
  for (std::size_t k = 0; k < n; ++k) p.add_block(d);
  std::vector<MatrixTerm> all;
  for (std::size_t k = 0; k < n; ++k) all.push_back({k, 1.0, std::nullopt});
  add_hermitian_equality(p, all, HermitianMatrix::identity(d));
  for (std::size_t i = 0; i < g; ++i) {
    std::vector<MatrixTerm> terms;
    for (std::size_t k = 0; k < n; ++k)
      if (plus_at(k, i)) terms.push_back({k, 1.0, std::nullopt});
    add_hermitian_equality(p, terms, t[i]);
  }
  return p;
}

namespace detail {

inline double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline JmVerdict verdict_from(const SdpSolution& sol, std::size_t g, std::size_t d,
                              const std::vector<HermitianMatrix>& targets, const JmOptions& opts) {
  JmVerdict v;
  v.sdp_status = sol.status;
  if (sol.status == SdpStatus::Infeasible) {
    v.certificate = sol.duals;
    v.certificate_residual = sol.certificate_residual;
    if (sol.certificate_residual <= 1e-8) {
      v.status = JmStatus::Incompatible;
      v.margin = -1.0 / std::max(inf_norm(sol.duals), 1e-300);
    } else {
      v.message = "infeasibility certificate residual " + std::to_string(sol.certificate_residual) + " above 1e-8";
    }
    return v;
  }
  const std::size_t n = std::size_t{1} << g;
  if (sol.block_values.size() >= n) {
    JointPovm w{g, d, std::vector<HermitianMatrix>(sol.block_values.begin(),
                                                   sol.block_values.begin() + static_cast<std::ptrdiff_t>(n))};
    const auto c = w.check(targets, opts.witness_tol);
    v.margin = c.min_eig - std::max(c.sum_residual, c.marginal_residual);
    if (c.valid) {
      v.status = JmStatus::Compatible;
      v.witness = std::move(w);
      return v;
    }
    v.message = "solver point failed the independent witness check";
  }
  if (v.message.empty()) v.message = "solver returned " + std::string(to_string(sol.status));
  if (sol.block_values.empty()) v.margin = std::min(sol.residuals.min_block_eig, -sol.residuals.primal_eq);
  return v;
}

}  // namespace detail

inline JmVerdict check_compatibility(const EffectTuple& t, const JmOptions& opts = {}) {
  const auto p = assemble_jm_sdp(t, opts);
  try {
    const auto sol = solve(p, opts.sdp);
    return detail::verdict_from(sol, t.size(), t.dim(), t.effects(), opts);
  } catch (const Error& e) {
    JmVerdict v;
    v.message = e.what();
    v.margin = -std::numeric_limits<double>::infinity();
    return v;
  }
}

struct RobustnessResult {
  double t_star = 0.0;
  double t_cap = 0.0;
  bool capped = false;
  SdpStatus status = SdpStatus::MaxIter;
  /// Parent POVM for the noisy tuple at t_star.
  std::optional<JointPovm> witness;
  std::vector<std::string> warnings;
};

/// Noisy target N_i + t dir_i (E_i - N_i) at the given t.
inline std::vector<HermitianMatrix> noisy_targets(const EffectTuple& t, const ScalingVector& dir,
                                                  const NoiseModel& model, double tt) {
  std::vector<HermitianMatrix> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto n = model.noise_operator(t[i], i);
    out.push_back(n + (t[i] - n) * (tt * dir[i]));
  }
  return out;
}

/// sup { t in [0, t_cap] : add_noise(t * direction) compatible } as one SDP
/// with t entering the marginal constraints affinely.
inline RobustnessResult robustness(const EffectTuple& t, const ScalingVector& direction, const NoiseModel& model,
                                   std::optional<double> t_cap = std::nullopt, const JmOptions& opts = {}) {
  const std::size_t g = t.size(), d = t.dim();
  if (direction.size() != g) throw Error(ErrorCode::LengthMismatch, "direction length differs from tuple size");
  if (model.kind() == NoiseModel::Kind::General)
    throw Error(ErrorCode::UnsupportedModel, "robustness supports balanced and linear noise only");
  if (!(direction.max() > 0.0)) throw Error(ErrorCode::InvalidArgument, "direction must be nonzero");
  check_g_cap(g, opts);
  const double cap = t_cap.value_or(1.0 / direction.max());
  if (!(cap >= 0.0) || !std::isfinite(cap)) throw Error(ErrorCode::OutOfRange, "t_cap must be finite and >= 0");

  const std::size_t n = std::size_t{1} << g;
  SdpProblem p;
  p.sense = Sense::Maximize;
  for (std::size_t k = 0; k < n; ++k) p.add_block(d);
  const std::size_t tb = p.add_block(1);
  const std::size_t ub = p.add_block(1);
  p.objective[tb] = HermitianMatrix::identity(1);

  std::vector<MatrixTerm> all;
  for (std::size_t k = 0; k < n; ++k) all.push_back({k, 1.0, std::nullopt});
  add_hermitian_equality(p, all, HermitianMatrix::identity(d));
  for (std::size_t i = 0; i < g; ++i) {
    const auto noise = model.noise_operator(t[i], i);
    std::vector<MatrixTerm> terms;
    for (std::size_t k = 0; k < n; ++k)
      if (plus_at(k, i)) terms.push_back({k, 1.0, std::nullopt});
    terms.push_back({tb, -direction[i], t[i] - noise});
    add_hermitian_equality(p, terms, noise);
  }
  p.constraints.push_back(
      {{{tb, HermitianMatrix::identity(1)}, {ub, HermitianMatrix::identity(1)}}, cap});

  const auto sol = solve(p, opts.sdp);
  RobustnessResult r;
  r.t_cap = cap;
  r.status = sol.status;
  r.warnings = sol.warnings;
  if (sol.block_values.size() == n + 2) {
    r.t_star = std::clamp(sol.block_values[tb](0, 0).real(), 0.0, cap);
    r.capped = r.t_star >= cap - 1e-7 * std::max(1.0, cap);
    JointPovm w{g, d, std::vector<HermitianMatrix>(sol.block_values.begin(),
                                                   sol.block_values.begin() + static_cast<std::ptrdiff_t>(n))};
    if (w.check(noisy_targets(t, direction, model, r.t_star), opts.witness_tol).valid) r.witness = std::move(w);
  }
  return r;
}

/// JMSDP_THREADS if set and positive, else the hardware concurrency.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("JMSDP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

struct SweepEntry {
  ScalingVector direction;
  std::optional<RobustnessResult> result;
  std::string error;
};

/// Robustness for each direction, in input order. Errors are recorded per
/// entry. threads == 0 uses default_thread_count().
inline std::vector<SweepEntry> region_sweep(const EffectTuple& t, const std::vector<ScalingVector>& directions,
                                            const NoiseModel& model, const JmOptions& opts = {},
                                            unsigned threads = 0) {
  std::vector<SweepEntry> out(directions.size());
  for (std::size_t i = 0; i < directions.size(); ++i) out[i].direction = directions[i];
  if (directions.empty()) return out;
  if (threads == 0) threads = default_thread_count();
  threads = std::min<unsigned>(threads, static_cast<unsigned>(directions.size()));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < directions.size(); i = next++) {
      try {
        out[i].result = robustness(t, directions[i], model, std::nullopt, opts);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

}  // namespace jmsdp

#endif  // JMSDP_JM_HPP
