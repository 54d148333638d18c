#ifndef JMSDP_SPECTRA_HPP
#define JMSDP_SPECTRA_HPP

// Matrix diamond and matrix ball membership at a fixed level, and the
// diamond inclusion test for effect tuples.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "jmsdp/jm.hpp"
#include "jmsdp/quantum.hpp"
#include "jmsdp/random.hpp"

namespace jmsdp {

/// g Hermitian matrices of a common size n (the level).
class MatrixTuple {
 public:
  explicit MatrixTuple(std::vector<HermitianMatrix> xs) : xs_(std::move(xs)) {
    if (xs_.empty()) throw Error(ErrorCode::InvalidArgument, "matrix tuple needs g >= 1");
    for (std::size_t i = 1; i < xs_.size(); ++i)
      if (xs_[i].dim() != xs_.front().dim())
        throw Error(ErrorCode::DimensionMismatch, "matrix " + std::to_string(i + 1) + " has a different size");
  }

  /// Level-1 tuple of scalars.
  static MatrixTuple scalars(const std::vector<double>& x) {
    std::vector<HermitianMatrix> out;
    for (double v : x) out.push_back(HermitianMatrix::identity(1) * v);
    return MatrixTuple(std::move(out));
  }

  std::size_t size() const noexcept { return xs_.size(); }
  std::size_t level() const noexcept { return xs_.front().dim(); }
  const HermitianMatrix& operator[](std::size_t i) const { return xs_.at(i); }
  const std::vector<HermitianMatrix>& matrices() const noexcept { return xs_; }

  friend bool operator==(const MatrixTuple& a, const MatrixTuple& b) { return a.xs_ == b.xs_; }

 private:
  std::vector<HermitianMatrix> xs_;
};

struct Membership {
  bool member = false;
  double margin = 0.0;
};

inline constexpr double kMembershipTol = 1e-9;
inline constexpr std::size_t kDefaultDiamondMaxG = 16;

/// max over eps of the largest eigenvalue of sum eps_i X_i. Flipping every
/// sign negates the spectrum, so eps_1 = +1 with both spectrum ends suffices.
inline double diamond_gauge(const MatrixTuple& x, std::size_t max_g = kDefaultDiamondMaxG) {
  const std::size_t g = x.size();
  if (g > max_g)
    throw Error(ErrorCode::TooManyMeasurements, "diamond check with g = " + std::to_string(g) + " exceeds cap");
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < (std::size_t{1} << (g - 1)); ++k) {
    HermitianMatrix s = x[0];
    for (std::size_t i = 1; i < g; ++i) {
      if ((k >> (i - 1)) & 1U)
        s -= x[i];
      else
        s += x[i];
    }
    const auto ev = eig(s).eigenvalues;
    worst = std::max({worst, ev.back(), -ev.front()});
  }
  return worst;
}

/// sum eps_i X_i <= I for every sign vector eps; margin = 1 - gauge.
inline Membership diamond_membership(const MatrixTuple& x, std::size_t max_g = kDefaultDiamondMaxG) {
  const double gauge = diamond_gauge(x, max_g);
  return {gauge <= 1.0 + kMembershipTol, 1.0 - gauge};
}

/// sum X_i^2 <= I; margin = min eig (I - sum X_i^2).
inline Membership matrix_ball_membership(const MatrixTuple& x) {
  CMatrix sum(x.level(), x.level());
  for (const auto& m : x.matrices()) sum += m * m;
  const auto sq = hermitian_part(sum);
  const double margin = min_eigenvalue(HermitianMatrix::identity(x.level()) - sq);
  return {margin >= -kMembershipTol, margin};
}

/// Level-1 inclusion of the diamond in D_{2E-I}: the vertices +-e_i map to
/// +-(2E_i - I) <= I. Accepts arbitrary Hermitian inputs.
inline bool diamond_level1_inclusion(const std::vector<HermitianMatrix>& es, double tol = kDefaultPsdTol) {
  if (es.empty()) throw Error(ErrorCode::InvalidArgument, "inclusion check needs g >= 1");
  for (const auto& e : es) {
    const auto id = HermitianMatrix::identity(e.dim());
    const auto a = e * 2.0 - id;
    if (!is_psd(id - a, tol) || !is_psd(id + a, tol)) return false;
  }
  return true;
}

/// Free inclusion of the diamond in D_{2E-I}. The diamond is cut out by the
/// diagonal sign matrices, so free inclusion holds iff the unital map
/// a_i -> 2E_i - I on the diagonal algebra C^{2^g} is positive: PSD H_eta with
/// sum H_eta = I and sum_eta eta_i H_eta = 2E_i - I. Solved in this signed form
/// and checked on its own terms.
inline JmVerdict diamond_free_inclusion(const EffectTuple& t, const JmOptions& opts = {}) {
  const std::size_t g = t.size(), d = t.dim();
  check_g_cap(g, opts);
  const std::size_t n = std::size_t{1} << g;
  const auto id = HermitianMatrix::identity(d);
  SdpProblem p;
  for (std::size_t k = 0; k < n; ++k) p.add_block(d);
  std::vector<MatrixTerm> all;
  for (std::size_t k = 0; k < n; ++k) all.push_back({k, 1.0, std::nullopt});
  add_hermitian_equality(p, all, id);
  std::vector<HermitianMatrix> b;
  for (std::size_t i = 0; i < g; ++i) {
    b.push_back(t[i] * 2.0 - id);
    std::vector<MatrixTerm> terms;
    for (std::size_t k = 0; k < n; ++k) terms.push_back({k, plus_at(k, i) ? 1.0 : -1.0, std::nullopt});
    add_hermitian_equality(p, terms, b.back());
  }
  JmVerdict v;
  SdpSolution sol;
  try {
    sol = solve(p, opts.sdp);
  } catch (const Error& e) {
    v.message = e.what();
    v.margin = -std::numeric_limits<double>::infinity();
    return v;
  }
  v.sdp_status = sol.status;
  if (sol.status == SdpStatus::Infeasible) {
    v.certificate = sol.duals;
    v.certificate_residual = sol.certificate_residual;
    if (sol.certificate_residual <= 1e-8) {
      v.status = JmStatus::Incompatible;
      v.margin = -1.0 / std::max(detail::inf_norm(sol.duals), 1e-300);
    } else {
      v.message = "infeasibility certificate residual above 1e-8";
    }
    return v;
  }
  if (sol.block_values.size() < n) {
    v.message = "solver returned " + std::string(to_string(sol.status));
    return v;
  }
  double min_eig = std::numeric_limits<double>::infinity(), residual = 0.0;
  auto sum = HermitianMatrix::zero(d);
  for (std::size_t k = 0; k < n; ++k) {
    min_eig = std::min(min_eig, min_eigenvalue(sol.block_values[k]));
    sum += sol.block_values[k];
  }
  residual = max_abs_diff(sum, id);
  for (std::size_t i = 0; i < g; ++i) {
    auto signed_sum = HermitianMatrix::zero(d);
    for (std::size_t k = 0; k < n; ++k) signed_sum += sol.block_values[k] * (plus_at(k, i) ? 1.0 : -1.0);
    residual = std::max(residual, max_abs_diff(signed_sum, b[i]));
  }
  v.margin = min_eig - residual;
  if (min_eig >= -opts.witness_tol && residual <= opts.witness_tol) {
    v.status = JmStatus::Compatible;
    v.witness = JointPovm{g, d, std::vector<HermitianMatrix>(sol.block_values.begin(),
                                                             sol.block_values.begin() + static_cast<std::ptrdiff_t>(n))};
  } else {
    v.message = "solver point failed the signed-form witness check";
  }
  return v;
}

inline MatrixTuple scale_tuple(const MatrixTuple& x, const ScalingVector& s) {
  if (s.size() != x.size()) throw Error(ErrorCode::LengthMismatch, "scaling length differs from tuple size");
  std::vector<HermitianMatrix> out;
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(x[i] * s[i]);
  return MatrixTuple(std::move(out));
}

/// count tuples of g random n x n Hermitian matrices, each normalized by its
/// diamond gauge and scaled by a uniform radius in [0, 1).
inline std::vector<MatrixTuple> sample_diamond(std::size_t g, std::size_t n, std::uint64_t seed, std::size_t count) {
  if (g == 0 || n == 0) throw Error(ErrorCode::InvalidArgument, "sampler needs g, n >= 1");
  Rng rng(seed);
  std::vector<MatrixTuple> out;
  out.reserve(count);
  while (out.size() < count) {
    std::vector<HermitianMatrix> xs;
    for (std::size_t i = 0; i < g; ++i) xs.push_back(random_hermitian(n, rng));
    MatrixTuple x(std::move(xs));
    const double gauge = diamond_gauge(x);
    if (!(gauge > 0.0)) continue;
    const double radius = rng.uniform() * (1.0 - 1e-12) / gauge;
    out.push_back(scale_tuple(x, ScalingVector::constant(g, radius)));
  }
  return out;
}

}  // namespace jmsdp

#endif  // JMSDP_SPECTRA_HPP
