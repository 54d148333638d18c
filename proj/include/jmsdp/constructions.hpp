#ifndef JMSDP_CONSTRUCTIONS_HPP
#define JMSDP_CONSTRUCTIONS_HPP

// Witness families: anti-commuting spin systems, mutually unbiased bases in
// prime dimension, and Zhu's Gram-matrix incompatibility SDP.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "jmsdp/quantum.hpp"
#include "jmsdp/sdp.hpp"

namespace jmsdp {

// --------------------------------------------------------------------------
// Spin systems.

struct SpinSystem {
  std::size_t k = 0;
  std::size_t dim = 1;
  std::vector<HermitianMatrix> matrices;
};

/// Level-k system of 2k+1 matrices: F(0) = ([1]) and
/// F(k+1) = (X (x) F(k)_1, ..., X (x) F(k)_{2k+1}, Y (x) I, Z (x) I).
inline SpinSystem spin_level(std::size_t k, const Limits& limits = {}) {
  if (k >= 63 || (std::size_t{1} << k) > limits.max_dim)
    throw Error(ErrorCode::DimensionOverflow, "spin system dimension 2^" + std::to_string(k) + " exceeds cap");
  SpinSystem s;
  s.matrices.push_back(HermitianMatrix::identity(1));
  for (std::size_t level = 0; level < k; ++level) {
    std::vector<HermitianMatrix> next;
    for (const auto& f : s.matrices) next.push_back(kron(pauli_x(), f, limits));
    const auto id = HermitianMatrix::identity(std::size_t{1} << level);
    next.push_back(kron(pauli_y(), id, limits));
    next.push_back(kron(pauli_z(), id, limits));
    s.matrices = std::move(next);
  }
  s.k = k;
  s.dim = std::size_t{1} << k;
  return s;
}

/// First g matrices of the level ceil((g-1)/2) system, dimension 2^ceil((g-1)/2).
inline SpinSystem spin_system(std::size_t g, const Limits& limits = {}) {
  if (g == 0) throw Error(ErrorCode::InvalidArgument, "spin system needs g >= 1");
  auto s = spin_level(g / 2, limits);
  s.matrices.resize(g);
  return s;
}

/// Effects (F_i + I)/2 of the g-matrix spin system.
inline EffectTuple extremal_effect_tuple(std::size_t g, const Limits& limits = {}) {
  if (g < 2) throw Error(ErrorCode::InvalidArgument, "extremal tuple needs g >= 2");
  const auto s = spin_system(g, limits);
  std::vector<HermitianMatrix> out;
  const auto id = HermitianMatrix::identity(s.dim);
  for (const auto& f : s.matrices) out.push_back((f + id) * 0.5);
  return EffectTuple(std::move(out));
}

struct NormIdentity {
  double lhs = 0.0;  // ||sum a_i conj(F_i) (x) F_i||
  double rhs = 0.0;  // sum a_i
};

inline NormIdentity conjugate_norm_identity_check(const std::vector<double>& a, const SpinSystem& sys,
                                                  const Limits& limits = {}) {
  if (a.size() > sys.matrices.size()) throw Error(ErrorCode::LengthMismatch, "more weights than spin matrices");
  NormIdentity out;
  auto sum = HermitianMatrix::zero(sys.dim * sys.dim);
  if (sys.dim * sys.dim > limits.max_dim) throw Error(ErrorCode::DimensionOverflow, "dim^2 exceeds cap");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0.0) throw Error(ErrorCode::NegativeComponent, "weights must be nonnegative");
    out.rhs += a[i];
    if (a[i] != 0.0) sum += kron(conj_entrywise(sys.matrices[i]), sys.matrices[i], limits) * a[i];
  }
  out.lhs = op_norm(sum);
  return out;
}

// --------------------------------------------------------------------------
// Mutually unbiased bases.

using Vector = std::vector<Complex>;

struct MubFamily {
  std::size_t d = 0;
  std::vector<std::vector<Vector>> bases;  // bases[b][j] is the j-th vector of basis b
};

inline bool is_prime(std::size_t n) {
  if (n < 2) return false;
  for (std::size_t p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

/// d+1 bases for prime d: the computational basis, then for b = 0..d-1 the
/// vectors d^{-1/2} sum_j w^{b j^2 + a j} |j>. d = 2 uses the computational,
/// Hadamard and circular bases.
inline MubFamily mub_family(std::size_t d, const Limits& limits = {}) {
  if (!is_prime(d)) throw Error(ErrorCode::NotPrime, std::to_string(d) + " is not prime");
  if (d > limits.max_dim) throw Error(ErrorCode::DimensionOverflow, "MUB dimension exceeds cap");
  MubFamily f;
  f.d = d;
  std::vector<Vector> comp(d, Vector(d));
  for (std::size_t j = 0; j < d; ++j) comp[j][j] = 1.0;
  f.bases.push_back(std::move(comp));
  const double r = 1.0 / std::sqrt(static_cast<double>(d));
  if (d == 2) {
    const Complex i1(0.0, 1.0);
    f.bases.push_back({{r, r}, {r, -r}});
    f.bases.push_back({{r, r * i1}, {r, -r * i1}});
    return f;
  }
  for (std::size_t b = 0; b < d; ++b) {
    std::vector<Vector> basis(d, Vector(d));
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t j = 0; j < d; ++j) {
        const std::size_t e = (b * j % d * j + a * j) % d;
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(d);
        basis[a][j] = std::polar(r, phase);
      }
    f.bases.push_back(std::move(basis));
  }
  return f;
}

/// E_i = sum_{j in J_i} |x_j><x_j| from basis i; indices are 0-based.
inline EffectTuple mub_effect_tuple(const MubFamily& fam, const std::vector<std::vector<std::size_t>>& subsets) {
  if (subsets.empty() || subsets.size() > fam.bases.size())
    throw Error(ErrorCode::InvalidArgument, "need between 1 and d+1 subsets");
  std::vector<HermitianMatrix> out;
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    const auto& J = subsets[i];
    std::vector<bool> seen(fam.d, false);
    for (auto j : J) {
      if (j >= fam.d) throw Error(ErrorCode::OutOfRange, "basis index out of range");
      seen[j] = true;
    }
    const auto count = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
    if (count == 0 || count == fam.d) throw Error(ErrorCode::TrivialSubset, "subset " + std::to_string(i) + " is empty or full");
    auto e = HermitianMatrix::zero(fam.d);
    for (std::size_t j = 0; j < fam.d; ++j)
      if (seen[j]) e += HermitianMatrix::outer(fam.bases[i][j]);
    out.push_back(e);
  }
  return EffectTuple(std::move(out));
}

// --------------------------------------------------------------------------
// Zhu's criterion.

/// Column-stacking vectorization: vec(A)[j d + i] = A(i, j).
inline Vector vectorize(const HermitianMatrix& a) {
  const std::size_t d = a.dim();
  Vector v(d * d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) v[j * d + i] = a(i, j);
  return v;
}

struct ZhuGram {
  HermitianMatrix g;     // sum |A><A| / tr A
  HermitianMatrix gbar;  // sum |A°><A°| / tr A, A° traceless part
  std::vector<std::string> warnings;
};

inline constexpr double kZhuTraceFloor = 1e-10;

/// Gram matrices of one POVM given by its outcomes.
inline ZhuGram zhu_gram(const std::vector<HermitianMatrix>& outcomes) {
  if (outcomes.empty()) throw Error(ErrorCode::InvalidArgument, "POVM has no outcomes");
  const std::size_t d = outcomes.front().dim();
  ZhuGram z{HermitianMatrix::zero(d * d), HermitianMatrix::zero(d * d), {}};
  std::size_t used = 0;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    const auto& a = outcomes[k];
    if (a.dim() != d) throw Error(ErrorCode::DimensionMismatch, "POVM outcomes differ in dimension");
    const double tr = a.trace();
    if (tr < -kZhuTraceFloor) throw Error(ErrorCode::DegenerateOutcome, "outcome " + std::to_string(k) + " has negative trace");
    if (tr <= kZhuTraceFloor) {
      z.warnings.push_back("outcome " + std::to_string(k) + " has zero trace and was skipped");
      continue;
    }
    const auto traceless = a - HermitianMatrix::identity(d) * (tr / static_cast<double>(d));
    z.g += HermitianMatrix::outer(vectorize(a)) * (1.0 / tr);
    z.gbar += HermitianMatrix::outer(vectorize(traceless)) * (1.0 / tr);
    ++used;
  }
  if (used == 0) throw Error(ErrorCode::DegenerateOutcome, "every outcome has zero trace");
  return z;
}

inline ZhuGram zhu_gram_binary(const HermitianMatrix& e) {
  return zhu_gram({e, HermitianMatrix::identity(e.dim()) - e});
}

struct ZhuBound {
  double value = 0.0;  // 1 + min tr H
  SdpStatus status = SdpStatus::MaxIter;
  std::vector<std::string> warnings;
};

/// 1 + min tr H subject to H >= Gbar_i for every POVM i. A value above d
/// certifies incompatibility.
inline ZhuBound zhu_bound(const std::vector<std::vector<HermitianMatrix>>& povms, const SdpOptions& opts = {}) {
  if (povms.empty()) throw Error(ErrorCode::InvalidArgument, "zhu_bound needs at least one POVM");
  ZhuBound out;
  std::vector<HermitianMatrix> gbars;
  for (const auto& p : povms) {
    auto z = zhu_gram(p);
    gbars.push_back(z.gbar);
    out.warnings.insert(out.warnings.end(), z.warnings.begin(), z.warnings.end());
  }
  const std::size_t n = gbars.front().dim();
  for (const auto& gb : gbars)
    if (gb.dim() != n) throw Error(ErrorCode::DimensionMismatch, "POVMs act on different dimensions");
  SdpProblem p;
  const auto h = p.add_block(n);
  p.objective[h] = HermitianMatrix::identity(n);
  for (const auto& gb : gbars) {
    const auto s = p.add_block(n);
    add_hermitian_equality(p, {{h, 1.0, std::nullopt}, {s, -1.0, std::nullopt}}, gb);
  }
  const auto sol = solve(p, opts);
  out.status = sol.status;
  out.value = 1.0 + sol.objective_value;
  out.warnings.insert(out.warnings.end(), sol.warnings.begin(), sol.warnings.end());
  return out;
}

/// Binary POVMs {E_i, I - E_i} for every effect in the tuple.
inline std::vector<std::vector<HermitianMatrix>> binary_povms(const EffectTuple& t) {
  std::vector<std::vector<HermitianMatrix>> out;
  const auto id = HermitianMatrix::identity(t.dim());
  for (const auto& e : t.effects()) out.push_back({e, id - e});
  return out;
}

}  // namespace jmsdp

#endif  // JMSDP_CONSTRUCTIONS_HPP
