#ifndef JMSDP_RANDOM_HPP
#define JMSDP_RANDOM_HPP

// Seeded sampling helpers. std::mt19937_64 output is fixed by the standard;
// the real-valued transforms below are written out so that draws do not
// depend on the standard library's distribution implementations.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "jmsdp/linalg.hpp"

namespace jmsdp {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Haar-distributed d x k isometry: modified Gram-Schmidt on a complex
/// Ginibre matrix, columns rephased so that R has a positive diagonal.
inline CMatrix random_isometry(std::size_t d, std::size_t k, Rng& rng) {
  if (k > d) throw Error(ErrorCode::InvalidArgument, "isometry needs k <= d");
  CMatrix g(d, k);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < k; ++j) g(i, j) = rng.complex_normal();
  for (std::size_t j = 0; j < k; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t p = 0; p < j; ++p) {
        Complex dot{};
        for (std::size_t i = 0; i < d; ++i) dot += std::conj(g(i, p)) * g(i, j);
        for (std::size_t i = 0; i < d; ++i) g(i, j) -= dot * g(i, p);
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) norm += std::norm(g(i, j));
    norm = std::sqrt(norm);
    if (norm == 0.0) throw Error(ErrorCode::NumericalBreakdown, "degenerate Gaussian draw");
    for (std::size_t i = 0; i < d; ++i) g(i, j) /= norm;
  }
  return g;
}

inline CMatrix random_unitary(std::size_t d, Rng& rng) { return random_isometry(d, d, rng); }

/// Hermitian matrix with i.i.d. complex Gaussian entries (GUE-like), scaled
/// by `scale`.
inline HermitianMatrix random_hermitian(std::size_t d, Rng& rng, double scale = 1.0) {
  CMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    m(i, i) = scale * rng.normal();
    for (std::size_t j = i + 1; j < d; ++j) {
      m(i, j) = scale * rng.complex_normal();
      m(j, i) = std::conj(m(i, j));
    }
  }
  return hermitize(m);
}

}  // namespace jmsdp

#endif  // JMSDP_RANDOM_HPP
