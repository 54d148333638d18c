#ifndef JMSDP_LINALG_HPP
#define JMSDP_LINALG_HPP

// Dense complex linear algebra with Hermitian matrices as the central value
// type. Storage is row-major std::complex<double>, i.e. interleaved re/im.

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <limits>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jmsdp/error.hpp"

namespace jmsdp {

using Complex = std::complex<double>;

struct Limits {
  /// Largest matrix dimension accepted by kron and eig.
  std::size_t max_dim = 4096;
};

inline constexpr double kDefaultPsdTol = 1e-9;
inline constexpr double kPsdAbsFloor = 1e-12;
inline constexpr double kHermitizeTol = 1e-8;

/// General rectangular complex matrix, row-major.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static CMatrix identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  /// Builds from nested rows; all rows must share a length.
  static CMatrix from_rows(const std::vector<std::vector<Complex>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.front().size();
    CMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw Error(ErrorCode::DimensionMismatch, "ragged matrix rows");
      for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const Complex> data() const noexcept { return data_; }
  std::span<Complex> data() noexcept { return data_; }

  CMatrix adjoint() const {
    CMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  CMatrix& operator+=(const CMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  CMatrix& operator*=(Complex a) {
    for (auto& v : data_) v *= a;
    return *this;
  }

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
  friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorCode::DimensionMismatch, "matrix product shape mismatch");
    CMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  /// Largest absolute entry.
  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
  }

 private:
  void check_same(const CMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorCode::DimensionMismatch, "matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// Dense complex self-adjoint matrix. Entries satisfy a(j,i) == conj(a(i,j))
/// exactly and the diagonal is real; construction symmetrizes.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  static HermitianMatrix zero(std::size_t d) {
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
    return HermitianMatrix(CMatrix(d, d), Trusted{});
  }
  static HermitianMatrix identity(std::size_t d) {
    if (d == 0) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
    return HermitianMatrix(CMatrix::identity(d), Trusted{});
  }
  static HermitianMatrix diagonal(std::span<const double> diag) {
    auto m = zero(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m.m_(i, i) = diag[i];
    return m;
  }
  static HermitianMatrix diagonal(std::initializer_list<double> diag) {
    std::vector<double> v(diag);
    return diagonal(std::span<const double>(v));
  }
  /// Rank-one projector |v><v| (v not normalized here).
  static HermitianMatrix outer(std::span<const Complex> v) {
    auto m = zero(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) m.m_(i, j) = v[i] * std::conj(v[j]);
    m.symmetrize();
    return m;
  }

  std::size_t dim() const noexcept { return m_.rows(); }
  Complex operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const CMatrix& matrix() const noexcept { return m_; }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) t += m_(i, i).real();
    return t;
  }

  double max_abs() const { return m_.max_abs(); }

  bool is_real() const {
    return std::all_of(m_.data().begin(), m_.data().end(), [](const Complex& v) { return v.imag() == 0.0; });
  }

  HermitianMatrix& operator+=(const HermitianMatrix& o) {
    check_dim(o);
    m_ += o.m_;
    return *this;
  }
  HermitianMatrix& operator-=(const HermitianMatrix& o) {
    check_dim(o);
    m_ -= o.m_;
    return *this;
  }
  HermitianMatrix& operator*=(double a) {
    m_ *= a;
    return *this;
  }
  HermitianMatrix operator-() const { return HermitianMatrix(m_ * Complex(-1.0), Trusted{}); }

  friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
  friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
  friend HermitianMatrix operator*(HermitianMatrix a, double s) { return a *= s; }
  friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }

  /// General product; the result is not Hermitian in general.
  friend CMatrix operator*(const HermitianMatrix& a, const HermitianMatrix& b) { return a.m_ * b.m_; }

  /// tr(A B) for Hermitian A, B (always real).
  friend double trace_product(const HermitianMatrix& a, const HermitianMatrix& b) {
    a.check_dim(b);
    double t = 0.0;
    const std::size_t d = a.dim();
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) t += (a.m_(i, j) * b.m_(j, i)).real();
    return t;
  }

  /// V* H V for any d x k matrix V.
  HermitianMatrix congruence(const CMatrix& v) const {
    if (v.rows() != dim()) throw Error(ErrorCode::DimensionMismatch, "congruence shape mismatch");
    return HermitianMatrix(v.adjoint() * m_ * v, Untrusted{});
  }

  friend bool operator==(const HermitianMatrix& a, const HermitianMatrix& b) {
    return a.dim() == b.dim() && std::equal(a.m_.data().begin(), a.m_.data().end(), b.m_.data().begin());
  }

 private:
  struct Trusted {};
  struct Untrusted {};
  friend HermitianMatrix hermitize(const CMatrix& raw, double tol);
  friend HermitianMatrix kron(const HermitianMatrix& a, const HermitianMatrix& b, const Limits& limits);
  friend HermitianMatrix conj_entrywise(const HermitianMatrix& m);

  HermitianMatrix(CMatrix m, Trusted) : m_(std::move(m)) {}
  HermitianMatrix(CMatrix m, Untrusted) : m_(std::move(m)) { symmetrize(); }

  void symmetrize() {
    const std::size_t d = m_.rows();
    for (std::size_t i = 0; i < d; ++i) {
      m_(i, i) = Complex(m_(i, i).real(), 0.0);
      for (std::size_t j = i + 1; j < d; ++j) {
        const Complex avg = 0.5 * (m_(i, j) + std::conj(m_(j, i)));
        m_(i, j) = avg;
        m_(j, i) = std::conj(avg);
      }
    }
  }

  void check_dim(const HermitianMatrix& o) const {
    if (dim() != o.dim()) throw Error(ErrorCode::DimensionMismatch, "Hermitian dimension mismatch");
  }

  CMatrix m_;
};

/// (M + M*)/2. Rejects input whose largest entry of M - M* exceeds
/// tol * max(1, max|M_ij|).
inline HermitianMatrix hermitize(const CMatrix& raw, double tol = kHermitizeTol) {
  if (raw.rows() != raw.cols()) throw Error(ErrorCode::NonSquare, "matrix is not square");
  if (raw.rows() == 0) throw Error(ErrorCode::InvalidArgument, "empty matrix");
  if (!raw.all_finite()) throw Error(ErrorCode::NonFinite, "matrix has NaN or Inf entries");
  const std::size_t d = raw.rows();
  double asym = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) asym = std::max(asym, std::abs(raw(i, j) - std::conj(raw(j, i))));
  if (asym > tol * std::max(1.0, raw.max_abs()))
    throw Error(ErrorCode::TooAsymmetric, "asymmetry " + std::to_string(asym) + " exceeds tolerance");
  return HermitianMatrix(raw, HermitianMatrix::Untrusted{});
}

inline HermitianMatrix hermitize(const std::vector<std::vector<Complex>>& rows, double tol = kHermitizeTol) {
  return hermitize(CMatrix::from_rows(rows), tol);
}

/// Symmetrizes without the asymmetry check. For internal results that are
/// Hermitian up to rounding.
inline HermitianMatrix hermitian_part(const CMatrix& raw) { return hermitize(raw, 1e300); }

inline HermitianMatrix kron(const HermitianMatrix& a, const HermitianMatrix& b, const Limits& limits = {}) {
  const std::size_t da = a.dim(), db = b.dim();
  if (da * db > limits.max_dim)
    throw Error(ErrorCode::DimensionOverflow, "kron dimension " + std::to_string(da * db) + " exceeds cap");
  CMatrix out(da * db, da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l) out(i * db + k, j * db + l) = aij * b(k, l);
    }
  return HermitianMatrix(std::move(out), HermitianMatrix::Trusted{});
}

inline HermitianMatrix conj_entrywise(const HermitianMatrix& m) {
  CMatrix out = m.m_;
  for (auto& v : out.data()) v = std::conj(v);
  return HermitianMatrix(std::move(out), HermitianMatrix::Trusted{});
}

/// Direct sum diag(a, b).
inline HermitianMatrix direct_sum(const HermitianMatrix& a, const HermitianMatrix& b) {
  const std::size_t da = a.dim(), db = b.dim();
  CMatrix out(da + db, da + db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j) out(i, j) = a(i, j);
  for (std::size_t i = 0; i < db; ++i)
    for (std::size_t j = 0; j < db; ++j) out(da + i, da + j) = b(i, j);
  return hermitian_part(out);
}

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  CMatrix eigenvectors;             // unitary, columns match eigenvalues
  int sweeps = 0;
};

struct EigOptions {
  int max_sweeps = 100;
  Limits limits{};
};

/// Cyclic Jacobi eigensolver for Hermitian matrices. Rotations are applied
/// in fixed row-major (p, q) order, so results are deterministic.
inline EigenDecomposition eig(const HermitianMatrix& m, const EigOptions& opts = {}) {
  const std::size_t n = m.dim();
  if (n > opts.limits.max_dim)
    throw Error(ErrorCode::DimensionOverflow, "eig dimension " + std::to_string(n) + " exceeds cap");
  CMatrix a = m.matrix();
  CMatrix v = CMatrix::identity(n);

  auto off_norm2 = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += std::norm(a(p, q));
    return 2.0 * s;
  };
  double total2 = 0.0;
  for (const auto& x : a.data()) total2 += std::norm(x);
  const double eps = std::numeric_limits<double>::epsilon();
  const double stop2 = eps * eps * std::max(total2, std::numeric_limits<double>::min());

  int sweep = 0;
  for (; sweep < opts.max_sweeps; ++sweep) {
    if (off_norm2() <= stop2) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const double app = a(p, p).real(), aqq = a(q, q).real();
        // Skip rotations that cannot change the diagonal at working precision.
        if (sweep > 3 && mag < eps * 1e-2 * (std::abs(app) + std::abs(aqq))) {
          a(p, q) = a(q, p) = Complex{};
          continue;
        }
        const Complex phase = apq / mag;
        const double theta = (aqq - app) / (2.0 * mag);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // J = diag(1, conj(phase)) * [[c, s], [-s, c]] restricted to (p, q).
        const Complex jpp = c, jpq = s;
        const Complex jqp = -s * std::conj(phase), jqq = c * std::conj(phase);
        for (std::size_t r = 0; r < n; ++r) {
          const Complex arp = a(r, p), arq = a(r, q);
          a(r, p) = arp * jpp + arq * jqp;
          a(r, q) = arp * jpq + arq * jqq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const Complex apr = a(p, r), aqr = a(q, r);
          a(p, r) = std::conj(jpp) * apr + std::conj(jqp) * aqr;
          a(q, r) = std::conj(jpq) * apr + std::conj(jqq) * aqr;
        }
        a(p, q) = a(q, p) = Complex{};
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t r = 0; r < n; ++r) {
          const Complex vrp = v(r, p), vrq = v(r, q);
          v(r, p) = vrp * jpp + vrq * jqp;
          v(r, q) = vrp * jpq + vrq * jqq;
        }
      }
    }
  }
  if (sweep == opts.max_sweeps && off_norm2() > stop2)
    throw Error(ErrorCode::ConvergenceFailure,
                "Jacobi did not converge; off-diagonal residual " + std::to_string(std::sqrt(off_norm2())));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  EigenDecomposition out;
  out.sweeps = sweep;
  out.eigenvalues.resize(n);
  out.eigenvectors = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

/// U diag(values) U*.
inline HermitianMatrix reconstruct(const CMatrix& u, std::span<const double> values) {
  const std::size_t n = u.rows();
  CMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s{};
      for (std::size_t k = 0; k < values.size(); ++k) s += u(i, k) * values[k] * std::conj(u(j, k));
      out(i, j) = s;
    }
  return hermitian_part(out);
}

inline double min_eigenvalue(const HermitianMatrix& m) { return eig(m).eigenvalues.front(); }
inline double max_eigenvalue(const HermitianMatrix& m) { return eig(m).eigenvalues.back(); }

inline double op_norm(const HermitianMatrix& m) {
  const auto ev = eig(m).eigenvalues;
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

/// min eig >= -tol * max(1, ||m||), with an absolute floor of 1e-12.
inline bool is_psd(const HermitianMatrix& m, double tol = kDefaultPsdTol) {
  const auto ev = eig(m).eigenvalues;
  const double norm = std::max(std::abs(ev.front()), std::abs(ev.back()));
  return ev.front() >= -std::max(tol * std::max(1.0, norm), kPsdAbsFloor);
}

/// Pauli matrices.
inline HermitianMatrix pauli_x() { return hermitize({{0.0, 1.0}, {1.0, 0.0}}); }
inline HermitianMatrix pauli_y() { return hermitize({{0.0, Complex(0, -1)}, {Complex(0, 1), 0.0}}); }
inline HermitianMatrix pauli_z() { return HermitianMatrix::diagonal({1.0, -1.0}); }

/// Largest |a_ij - b_ij|.
inline double max_abs_diff(const CMatrix& a, const CMatrix& b) { return (a - b).max_abs(); }
inline double max_abs_diff(const HermitianMatrix& a, const HermitianMatrix& b) {
  return max_abs_diff(a.matrix(), b.matrix());
}

}  // namespace jmsdp

#endif  // JMSDP_LINALG_HPP
