#ifndef JMSDP_REGIONS_HPP
#define JMSDP_REGIONS_HPP

// Closed-form regions of scaling vectors: the quarter circle, the
// asymmetric cloning region and its g = 2, 3 forms, the map F, and CSV export.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "jmsdp/jm.hpp"
#include "jmsdp/quantum.hpp"
#include "jmsdp/spectra.hpp"

namespace jmsdp {

/// Boundary points count as members.
inline constexpr double kRegionTol = 1e-9;

enum class RegionKind { QC, CloneGeneral, CloneSymmetricValue, ClonePair, SimplexLimit };

inline std::string to_string(RegionKind k) {
  switch (k) {
    case RegionKind::QC: return "qc";
    case RegionKind::CloneGeneral: return "clone";
    case RegionKind::CloneSymmetricValue: return "clone-symmetric";
    case RegionKind::ClonePair: return "clone-pair";
    case RegionKind::SimplexLimit: return "simplex";
  }
  return "?";
}

namespace detail {

inline void check_unit_box(const ScalingVector& s) {
  if (!s.in_unit_box()) throw Error(ErrorCode::OutOfRange, "scaling components must lie in [0,1]");
}

inline void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::OutOfRange, std::string(name) + " must lie in [0,1]");
}

}  // namespace detail

/// sum s_i^2 <= 1; margin = 1 - sum s_i^2.
inline Membership qc_membership(const ScalingVector& s) {
  double n2 = 0.0;
  for (double v : s.values()) n2 += v * v;
  const double margin = 1.0 - n2;
  return {margin >= -kRegionTol, margin};
}

struct CloneCheck {
  bool member = false;
  double slack = 0.0;           // ||t||_1 - ||t||_{1/2}/(g+d-1) - d(d-1)
  double original_slack = 0.0;  // (g+d-1)[g-d^2+d+(d^2-1) sum s] - (sum sqrt t)^2
};

/// Asymmetric cloning region for g clones of a d-dimensional system, with
/// t_i = s_i (d^2 - 1) + 1. Both algebraic forms are evaluated and must agree.
inline CloneCheck clone_membership(std::size_t g, std::size_t d, const ScalingVector& s) {
  if (g < 2 || d < 2) throw Error(ErrorCode::OutOfRange, "cloning region needs g, d >= 2");
  if (s.size() != g) throw Error(ErrorCode::LengthMismatch, "scaling length differs from g");
  detail::check_unit_box(s);
  const double dd = static_cast<double>(d), gg = static_cast<double>(g);
  double t1 = 0.0, sqrt_sum = 0.0, s_sum = 0.0;
  for (double v : s.values()) {
    const double t = v * (dd * dd - 1.0) + 1.0;
    t1 += t;
    sqrt_sum += std::sqrt(t);
    s_sum += v;
  }
  const double half_norm = sqrt_sum * sqrt_sum;
  CloneCheck c;
  c.slack = t1 - half_norm / (gg + dd - 1.0) - dd * (dd - 1.0);
  c.original_slack = (gg + dd - 1.0) * (gg - dd * dd + dd + (dd * dd - 1.0) * s_sum) - half_norm;
  const double scale = std::max(1.0, half_norm);
  if (std::abs(c.original_slack / (gg + dd - 1.0) - c.slack) > 1e-9 * scale)
    throw Error(ErrorCode::NumericalBreakdown, "the two forms of the cloning condition disagree");
  c.member = c.slack <= kRegionTol;
  return c;
}

/// g = 2: s + t - (2/d) sqrt((1-s)(1-t)) <= 1; margin = 1 - lhs.
inline Membership clone_pair_membership(std::size_t d, double s, double t) {
  if (d < 2) throw Error(ErrorCode::OutOfRange, "cloning region needs d >= 2");
  detail::check_unit(s, "s");
  detail::check_unit(t, "t");
  const double lhs = s + t - 2.0 / static_cast<double>(d) * std::sqrt((1.0 - s) * (1.0 - t));
  return {lhs <= 1.0 + kRegionTol, 1.0 - lhs};
}

/// g = 3 at the point (s, t, t):
/// (d+2)[3 - d^2 + d + (d^2-1)(s+2t)] <= (sqrt((d^2-1)s+1) + 2 sqrt((d^2-1)t+1))^2.
/// margin = rhs - lhs.
inline Membership clone_triple_slice(std::size_t d, double s, double t) {
  if (d < 2) throw Error(ErrorCode::OutOfRange, "cloning region needs d >= 2");
  detail::check_unit(s, "s");
  detail::check_unit(t, "t");
  const double dd = static_cast<double>(d), k = dd * dd - 1.0;
  const double lhs = (dd + 2.0) * (3.0 - dd * dd + dd + k * (s + 2.0 * t));
  const double root = std::sqrt(k * s + 1.0) + 2.0 * std::sqrt(k * t + 1.0);
  const double margin = root * root - lhs;
  return {margin >= -kRegionTol * std::max(1.0, root * root), margin};
}

/// Componentwise s / (2 - s).
inline ScalingVector f_map(const ScalingVector& s) {
  detail::check_unit_box(s);
  std::vector<double> out;
  for (double v : s.values()) out.push_back(v / (2.0 - v));
  return ScalingVector(std::move(out));
}

/// (g + d) / (g (1 + d)).
inline double symmetric_clone_value(std::size_t g, std::size_t d) {
  if (g < 1 || d < 1) throw Error(ErrorCode::OutOfRange, "symmetric cloning value needs g, d >= 1");
  const double gg = static_cast<double>(g), dd = static_cast<double>(d);
  return (gg + dd) / (gg * (1.0 + dd));
}

/// Radius sqrt(d - 1) of the quarter circle enclosing the linear-noise region
/// for g measurements; independent of g. d = 1 gives 0.
inline double zhu_region_scale(std::size_t g, std::size_t d) {
  if (g < 1 || d < 1) throw Error(ErrorCode::OutOfRange, "zhu region scale needs g, d >= 1");
  return std::sqrt(static_cast<double>(d) - 1.0);
}

/// Largest t with t * direction in the cloning region, by bisection. The
/// region is convex and contains 0, so membership along the ray is an
/// interval.
inline double clone_boundary_scale(std::size_t g, std::size_t d, const ScalingVector& direction) {
  if (!(direction.max() > 0.0)) throw Error(ErrorCode::InvalidArgument, "direction must be nonzero");
  double lo = 0.0, hi = 1.0 / direction.max();
  auto slack = [&](double t) { return clone_membership(g, d, direction.scaled(t)).slack; };
  if (slack(hi) <= 0.0) return hi;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (slack(mid) <= 0.0 ? lo : hi) = mid;
  }
  return lo;
}

struct RegionQuery {
  RegionKind kind = RegionKind::QC;
  std::size_t g = 0;
  std::size_t d = 0;
  ScalingVector s;
};

/// Membership with a margin that is nonnegative inside. CloneSymmetricValue
/// tests every s_i against the symmetric cloning value; SimplexLimit tests
/// sum s_i <= 1.
inline Membership region_membership(const RegionQuery& q) {
  if (q.s.size() != q.g) throw Error(ErrorCode::LengthMismatch, "scaling length differs from g");
  switch (q.kind) {
    case RegionKind::QC: return qc_membership(q.s);
    case RegionKind::CloneGeneral: {
      const auto c = clone_membership(q.g, q.d, q.s);
      return {c.member, -c.slack};
    }
    case RegionKind::CloneSymmetricValue: {
      detail::check_unit_box(q.s);
      const double margin = symmetric_clone_value(q.g, q.d) - q.s.max();
      return {margin >= -kRegionTol, margin};
    }
    case RegionKind::ClonePair:
      if (q.g != 2) throw Error(ErrorCode::InvalidArgument, "clone-pair needs g = 2");
      return clone_pair_membership(q.d, q.s[0], q.s[1]);
    case RegionKind::SimplexLimit: {
      detail::check_unit_box(q.s);
      double sum = 0.0;
      for (double v : q.s.values()) sum += v;
      return {sum <= 1.0 + kRegionTol, 1.0 - sum};
    }
  }
  return {};
}

namespace detail {

inline std::string csv_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << (v == 0.0 ? 0.0 : v);
  return os.str();
}

inline std::string csv_header(std::size_t g, const char* value) {
  std::string h;
  for (std::size_t i = 0; i < g; ++i) h += "s" + std::to_string(i + 1) + ",";
  return h + value + ",kind\n";
}

}  // namespace detail

/// One row per query: s_1..s_g, margin, kind. All queries must share g.
inline std::string region_csv(const std::vector<RegionQuery>& qs) {
  if (qs.empty()) return "";
  const std::size_t g = qs.front().g;
  std::string out = detail::csv_header(g, "margin");
  for (const auto& q : qs) {
    if (q.g != g) throw Error(ErrorCode::LengthMismatch, "CSV rows need a common g");
    const auto m = region_membership(q);
    for (double v : q.s.values()) out += detail::csv_number(v) + ",";
    out += detail::csv_number(m.margin) + "," + to_string(q.kind) + "\n";
  }
  return out;
}

/// One row per sweep entry: direction, t_star (empty on error), kind.
inline std::string sweep_csv(const std::vector<SweepEntry>& entries, const NoiseModel& model) {
  if (entries.empty()) return "";
  const std::size_t g = entries.front().direction.size();
  std::string out = detail::csv_header(g, "t_star");
  for (const auto& e : entries) {
    for (double v : e.direction.values()) out += detail::csv_number(v) + ",";
    out += (e.result ? detail::csv_number(e.result->t_star) : std::string()) + ",robustness-" + to_string(model.kind()) +
           "\n";
  }
  return out;
}

}  // namespace jmsdp

#endif  // JMSDP_REGIONS_HPP
