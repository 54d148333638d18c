#ifndef JMSDP_QUANTUM_HPP
#define JMSDP_QUANTUM_HPP

// Effects, tuples of binary measurements, noise models and the embeddings
// used to move tuples between dimensions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "jmsdp/linalg.hpp"
#include "jmsdp/random.hpp"

namespace jmsdp {

enum class EffectCheck { Strict, Clamp };

/// Smallest eigenvalue margins of E and I - E.
struct EffectMargins {
  double lower = 0.0;  // min eig E
  double upper = 0.0;  // min eig (I - E)
};

inline EffectMargins effect_margins(const HermitianMatrix& e) {
  const auto ev = eig(e).eigenvalues;
  return {ev.front(), 1.0 - ev.back()};
}

/// 0 <= E <= I with the shared relative PSD tolerance.
inline bool is_effect(const HermitianMatrix& e, double tol = kDefaultPsdTol) {
  const auto m = effect_margins(e);
  const double slack = std::max(tol * std::max(1.0, e.max_abs()), kPsdAbsFloor);
  return m.lower >= -slack && m.upper >= -slack;
}

/// Eigenvalues projected to [0, 1].
inline HermitianMatrix clamp_effect(const HermitianMatrix& e) {
  auto dec = eig(e);
  for (auto& v : dec.eigenvalues) v = std::clamp(v, 0.0, 1.0);
  return reconstruct(dec.eigenvectors, dec.eigenvalues);
}

class EffectTuple {
 public:
  EffectTuple(std::vector<HermitianMatrix> effects, EffectCheck check = EffectCheck::Strict,
              double tol = kDefaultPsdTol)
      : effects_(std::move(effects)) {
    if (effects_.empty()) throw Error(ErrorCode::InvalidArgument, "effect tuple needs g >= 1");
    const std::size_t d = effects_.front().dim();
    for (std::size_t i = 0; i < effects_.size(); ++i) {
      if (effects_[i].dim() != d)
        throw Error(ErrorCode::DimensionMismatch, "effect " + std::to_string(i + 1) + " has a different dimension");
      if (check == EffectCheck::Clamp)
        effects_[i] = clamp_effect(effects_[i]);
      else if (!is_effect(effects_[i], tol))
        throw Error(ErrorCode::NotEffect, "effect " + std::to_string(i + 1) + " violates 0 <= E <= I");
    }
  }

  std::size_t size() const noexcept { return effects_.size(); }
  std::size_t dim() const noexcept { return effects_.front().dim(); }
  const HermitianMatrix& operator[](std::size_t i) const { return effects_.at(i); }
  const std::vector<HermitianMatrix>& effects() const noexcept { return effects_; }

  friend bool operator==(const EffectTuple& a, const EffectTuple& b) { return a.effects_ == b.effects_; }

 private:
  std::vector<HermitianMatrix> effects_;
};

/// Nonnegative per-measurement scaling s.
class ScalingVector {
 public:
  ScalingVector() = default;
  ScalingVector(std::vector<double> s) : s_(std::move(s)) {  // NOLINT(google-explicit-constructor)
    for (double v : s_) {
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "scaling component is not finite");
      if (v < 0.0) throw Error(ErrorCode::NegativeComponent, "scaling component is negative");
    }
  }
  ScalingVector(std::initializer_list<double> s) : ScalingVector(std::vector<double>(s)) {}

  static ScalingVector constant(std::size_t g, double v) { return ScalingVector(std::vector<double>(g, v)); }

  std::size_t size() const noexcept { return s_.size(); }
  double operator[](std::size_t i) const { return s_.at(i); }
  const std::vector<double>& values() const noexcept { return s_; }
  bool in_unit_box() const {
    return std::all_of(s_.begin(), s_.end(), [](double v) { return v <= 1.0; });
  }
  double max() const { return s_.empty() ? 0.0 : *std::max_element(s_.begin(), s_.end()); }

  ScalingVector scaled(double t) const {
    auto out = s_;
    for (auto& v : out) v *= t;
    return ScalingVector(std::move(out));
  }

 private:
  std::vector<double> s_;
};

/// What an effect is mixed with: I/2, tr(E)/d I, or a_i I.
class NoiseModel {
 public:
  enum class Kind { Balanced, Linear, General };

  static NoiseModel balanced() { return NoiseModel(Kind::Balanced, {}); }
  static NoiseModel linear() { return NoiseModel(Kind::Linear, {}); }
  static NoiseModel general(std::vector<double> a) {
    for (double v : a)
      if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::OutOfRange, "general noise needs a_i in [0,1]");
    return NoiseModel(Kind::General, std::move(a));
  }

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& a() const noexcept { return a_; }

  /// Trivial effect that E_i is mixed with.
  HermitianMatrix noise_operator(const HermitianMatrix& e, std::size_t i) const {
    const std::size_t d = e.dim();
    switch (kind_) {
      case Kind::Balanced: return HermitianMatrix::identity(d) * 0.5;
      case Kind::Linear: return HermitianMatrix::identity(d) * (e.trace() / static_cast<double>(d));
      case Kind::General: return HermitianMatrix::identity(d) * a_.at(i);
    }
    return HermitianMatrix::zero(d);
  }

 private:
  NoiseModel(Kind k, std::vector<double> a) : kind_(k), a_(std::move(a)) {}
  Kind kind_;
  std::vector<double> a_;
};

inline std::string to_string(NoiseModel::Kind k) {
  switch (k) {
    case NoiseModel::Kind::Balanced: return "balanced";
    case NoiseModel::Kind::Linear: return "linear";
    case NoiseModel::Kind::General: return "general";
  }
  return "?";
}

/// E'_i = s_i E_i + (1 - s_i) N_i.
inline EffectTuple add_noise(const EffectTuple& t, const ScalingVector& s, const NoiseModel& model) {
  if (s.size() != t.size()) throw Error(ErrorCode::LengthMismatch, "scaling length differs from tuple size");
  if (!s.in_unit_box()) throw Error(ErrorCode::OutOfRange, "noise scaling needs s_i in [0,1]");
  if (model.kind() == NoiseModel::Kind::General && model.a().size() != t.size())
    throw Error(ErrorCode::LengthMismatch, "general noise vector length differs from tuple size");
  std::vector<HermitianMatrix> out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    out.push_back(t[i] * s[i] + model.noise_operator(t[i], i) * (1.0 - s[i]));
  return EffectTuple(std::move(out));
}

/// E_i -> E_i (+) 0.
inline EffectTuple embed_zero_pad(const EffectTuple& t) {
  std::vector<HermitianMatrix> out;
  for (const auto& e : t.effects()) out.push_back(direct_sum(e, HermitianMatrix::zero(1)));
  return EffectTuple(std::move(out));
}

/// E_i -> E_i (+) (I - E_i); every output has trace d.
inline EffectTuple embed_unbias(const EffectTuple& t) {
  std::vector<HermitianMatrix> out;
  const auto id = HermitianMatrix::identity(t.dim());
  for (const auto& e : t.effects()) out.push_back(direct_sum(e, id - e));
  return EffectTuple(std::move(out));
}

/// E_i -> V* E_i V for an isometry V (d x k).
inline EffectTuple compress(const EffectTuple& t, const CMatrix& v, double tol = 1e-10) {
  if (v.rows() != t.dim()) throw Error(ErrorCode::DimensionMismatch, "isometry row count differs from tuple dimension");
  if (v.cols() == 0 || v.cols() > v.rows()) throw Error(ErrorCode::NotIsometry, "isometry needs 1 <= k <= d");
  if (max_abs_diff(v.adjoint() * v, CMatrix::identity(v.cols())) > tol)
    throw Error(ErrorCode::NotIsometry, "V*V differs from the identity");
  std::vector<HermitianMatrix> out;
  for (const auto& e : t.effects()) out.push_back(e.congruence(v));
  return EffectTuple(std::move(out), EffectCheck::Strict, 1e-8);
}

/// g effects U diag(lambda) U*, U Haar, lambda uniform on [0,1]^d.
inline EffectTuple random_effect_tuple(std::size_t g, std::size_t d, std::uint64_t seed) {
  if (g == 0 || d == 0) throw Error(ErrorCode::InvalidArgument, "random tuple needs g, d >= 1");
  Rng rng(seed);
  std::vector<HermitianMatrix> out;
  out.reserve(g);
  for (std::size_t i = 0; i < g; ++i) {
    const CMatrix u = random_unitary(d, rng);
    std::vector<double> lambda(d);
    for (auto& l : lambda) l = rng.uniform();
    out.push_back(reconstruct(u, lambda));
  }
  return EffectTuple(std::move(out));
}

/// Checks that every (1/s_i) E_i - (1 - s_i)/(2 s_i) I is an effect. When s
/// lies in the compatibility region for (g, d) this certifies compatibility
/// without an SDP; the caller supplies such an s (QC_g always qualifies).
inline bool sufficient_compatibility_criterion(const EffectTuple& t, const ScalingVector& s) {
  if (s.size() != t.size()) throw Error(ErrorCode::LengthMismatch, "scaling length differs from tuple size");
  const auto id = HermitianMatrix::identity(t.dim());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(s[i] > 0.0)) throw Error(ErrorCode::ZeroScaling, "criterion needs s_i > 0");
    const auto pre = t[i] * (1.0 / s[i]) - id * ((1.0 - s[i]) / (2.0 * s[i]));
    if (!is_effect(pre)) return false;
  }
  return true;
}

}  // namespace jmsdp

#endif  // JMSDP_QUANTUM_HPP
