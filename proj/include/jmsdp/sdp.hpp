#ifndef JMSDP_SDP_HPP
#define JMSDP_SDP_HPP

// Small dense semidefinite programs with block-diagonal Hermitian PSD
// variables:
//
//   minimize (or maximize)  sum_k tr(C_k X_k)
//   subject to              sum_k tr(A_{j,k} X_k) = b_j   for every j
//                           X_k >= 0                      for every k
//
// The complex problem is mapped to a real symmetric one (realify) and solved
// with a primal-dual interior-point method on the homogeneous self-dual
// embedding. Iterates use Nesterov-Todd scaling and a Mehrotra
// predictor-corrector step. The embedding yields either an optimal pair or
// a Farkas-type certificate of primal (or dual) infeasibility.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "jmsdp/error.hpp"
#include "jmsdp/linalg.hpp"

namespace jmsdp {

enum class Sense { Minimize, Maximize };

enum class SdpStatus { Optimal, Infeasible, Unbounded, MaxIter, NumericalBreakdown };

inline std::string_view to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::Infeasible: return "Infeasible";
    case SdpStatus::Unbounded: return "Unbounded";
    case SdpStatus::MaxIter: return "MaxIter";
    case SdpStatus::NumericalBreakdown: return "NumericalBreakdown";
  }
  return "Unknown";
}

struct SdpTerm {
  std::size_t block = 0;
  HermitianMatrix coeff;
};

/// One real equality sum_k tr(A_{j,k} X_k) = rhs. Blocks not listed have a
/// zero coefficient.
struct SdpConstraint {
  std::vector<SdpTerm> terms;
  double rhs = 0.0;
};

struct SdpProblem {
  std::vector<std::size_t> block_dims;
  std::vector<HermitianMatrix> objective;  // one cost matrix per block
  std::vector<SdpConstraint> constraints;
  Sense sense = Sense::Minimize;

  std::size_t add_block(std::size_t dim) {
    if (dim == 0) throw Error(ErrorCode::InvalidArgument, "block dimension must be >= 1");
    block_dims.push_back(dim);
    objective.push_back(HermitianMatrix::zero(dim));
    return block_dims.size() - 1;
  }

  std::size_t num_blocks() const noexcept { return block_dims.size(); }

  /// Throws DimensionMismatch / InvalidArgument on malformed data.
  void validate() const {
    if (objective.size() != block_dims.size())
      throw Error(ErrorCode::DimensionMismatch, "objective needs one matrix per block");
    for (std::size_t k = 0; k < block_dims.size(); ++k) {
      if (block_dims[k] == 0) throw Error(ErrorCode::InvalidArgument, "zero block dimension");
      if (objective[k].dim() != block_dims[k])
        throw Error(ErrorCode::DimensionMismatch, "objective block " + std::to_string(k) + " has wrong dimension");
    }
    for (std::size_t j = 0; j < constraints.size(); ++j) {
      const auto& con = constraints[j];
      if (!std::isfinite(con.rhs)) throw Error(ErrorCode::NonFinite, "constraint rhs not finite");
      for (const auto& t : con.terms) {
        if (t.block >= block_dims.size())
          throw Error(ErrorCode::InvalidArgument, "constraint " + std::to_string(j) + " names a missing block");
        if (t.coeff.dim() != block_dims[t.block])
          throw Error(ErrorCode::DimensionMismatch, "constraint " + std::to_string(j) + " coefficient has wrong dimension");
      }
    }
  }
};

/// Real coordinates of a Hermitian d x d matrix: tr(B_r M) over the d^2
/// basis matrices returned here gives (M_pp, Re M_pq, Im M_pq) for p < q.
/// Used to turn a Hermitian matrix equality into d^2 real constraints.
inline std::vector<HermitianMatrix> hermitian_coordinate_basis(std::size_t d) {
  std::vector<HermitianMatrix> basis;
  basis.reserve(d * d);
  for (std::size_t p = 0; p < d; ++p) {
    CMatrix e(d, d);
    e(p, p) = 1.0;
    basis.push_back(hermitize(e));
  }
  for (std::size_t p = 0; p < d; ++p)
    for (std::size_t q = p + 1; q < d; ++q) {
      CMatrix re(d, d), im(d, d);
      re(p, q) = re(q, p) = 0.5;
      im(p, q) = Complex(0, 0.5);
      im(q, p) = Complex(0, -0.5);
      basis.push_back(hermitize(re));
      basis.push_back(hermitize(im));
    }
  return basis;
}

/// Term of a Hermitian matrix equality: either weight * X_block (block of
/// the equality's dimension) or X_block * matrix for a 1x1 scalar block.
struct MatrixTerm {
  std::size_t block = 0;
  double weight = 1.0;
  std::optional<HermitianMatrix> scalar_times;
};

/// Appends the d^2 real constraints expressing sum(terms) = rhs.
inline void add_hermitian_equality(SdpProblem& p, const std::vector<MatrixTerm>& terms, const HermitianMatrix& rhs) {
  const std::size_t d = rhs.dim();
  const auto basis = hermitian_coordinate_basis(d);
  for (const auto& br : basis) {
    SdpConstraint con;
    con.rhs = trace_product(br, rhs);
    for (const auto& t : terms) {
      if (t.block >= p.block_dims.size()) throw Error(ErrorCode::InvalidArgument, "equality names a missing block");
      if (t.scalar_times) {
        if (p.block_dims[t.block] != 1) throw Error(ErrorCode::DimensionMismatch, "scalar term needs a 1x1 block");
        const double v = t.weight * trace_product(br, *t.scalar_times);
        if (v != 0.0) con.terms.push_back({t.block, HermitianMatrix::diagonal({v})});
      } else {
        if (p.block_dims[t.block] != d) throw Error(ErrorCode::DimensionMismatch, "matrix term dimension mismatch");
        con.terms.push_back({t.block, br * t.weight});
      }
    }
    p.constraints.push_back(std::move(con));
  }
}

struct SdpOptions {
  double tol = 1e-9;
  int max_iter = 200;
  /// Cap on the sum of squared block dimensions.
  double max_reals = 2e6;
  /// Relative threshold for declaring a constraint row dependent.
  double rank_tol = 1e-10;
  /// Fraction of the distance to the cone boundary taken per step.
  double step_fraction = 0.98;
};

struct SdpResiduals {
  double primal_eq = 0.0;
  double min_block_eig = 0.0;
  double duality_gap = 0.0;
};

struct SdpIteration {
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double mu = 0.0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  double step = 0.0;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::MaxIter;
  double objective_value = 0.0;
  double dual_objective = 0.0;
  std::vector<HermitianMatrix> block_values;
  /// Optimal duals, or the normalized Farkas ray when Infeasible (b.y = 1).
  std::vector<double> duals;
  SdpResiduals residuals;
  /// Infeasible: max(0, -min eig of -sum_j y_j A_j) for the reported ray.
  double certificate_residual = 0.0;
  int iterations = 0;
  std::vector<std::size_t> dropped_rows;
  std::vector<std::string> warnings;
  std::vector<SdpIteration> history;
};

// --------------------------------------------------------------------------
// Real symmetric form.

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// [[Re, -Im], [Im, Re]]; eigenvalues are those of m, each twice.
inline RealMatrix realify_matrix(const HermitianMatrix& m) {
  const auto d = static_cast<Eigen::Index>(m.dim());
  RealMatrix out(2 * d, 2 * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const Complex v = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      out(i, j) = v.real();
      out(d + i, d + j) = v.real();
      out(i, d + j) = -v.imag();
      out(d + i, j) = v.imag();
    }
  return out;
}

/// Inverse of realify_matrix on its range; for a general symmetric 2d x 2d
/// matrix returns the Hermitian matrix of its orthogonal projection onto
/// that range. PSD input gives PSD output.
inline HermitianMatrix unrealify_matrix(const RealMatrix& y) {
  const auto d = y.rows() / 2;
  CMatrix out(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          Complex(0.5 * (y(i, j) + y(d + i, d + j)), 0.5 * (y(d + i, j) - y(i, d + j)));
  return hermitian_part(out);
}

struct RealProblem {
  std::vector<Eigen::Index> dims;
  std::vector<RealMatrix> cost;
  /// rows[j]: (block, coefficient) pairs.
  std::vector<std::vector<std::pair<std::size_t, RealMatrix>>> rows;
  RealVector rhs;
  /// Realified cost and constraint matrices carry a factor 1/2 so that
  /// <A', realify(X)> = tr(A X). Objective values therefore agree with the
  /// complex problem without rescaling.
  bool negated_objective = false;
};

inline RealProblem realify(const SdpProblem& p) {
  p.validate();
  RealProblem r;
  r.negated_objective = p.sense == Sense::Maximize;
  const double csign = r.negated_objective ? -1.0 : 1.0;
  for (std::size_t k = 0; k < p.num_blocks(); ++k) {
    r.dims.push_back(static_cast<Eigen::Index>(2 * p.block_dims[k]));
    r.cost.push_back(0.5 * csign * realify_matrix(p.objective[k]));
  }
  r.rows.resize(p.constraints.size());
  r.rhs.resize(static_cast<Eigen::Index>(p.constraints.size()));
  for (std::size_t j = 0; j < p.constraints.size(); ++j) {
    r.rhs(static_cast<Eigen::Index>(j)) = p.constraints[j].rhs;
    for (const auto& t : p.constraints[j].terms) {
      auto it = std::find_if(r.rows[j].begin(), r.rows[j].end(), [&](const auto& e) { return e.first == t.block; });
      RealMatrix a = 0.5 * realify_matrix(t.coeff);
      if (it == r.rows[j].end())
        r.rows[j].emplace_back(t.block, std::move(a));
      else
        it->second += a;
    }
  }
  return r;
}

namespace detail {

using Blocks = std::vector<RealMatrix>;

inline double dot(const RealMatrix& a, const RealMatrix& b) { return a.cwiseProduct(b).sum(); }

inline double dot(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += dot(a[k], b[k]);
  return s;
}

inline double norm(const Blocks& a) { return std::sqrt(dot(a, a)); }

inline Blocks zeros_like(const std::vector<Eigen::Index>& dims) {
  Blocks out;
  for (auto n : dims) out.push_back(RealMatrix::Zero(n, n));
  return out;
}

struct Workspace {
  const RealProblem& prob;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> by_block;  // (row, index in row)

  explicit Workspace(const RealProblem& p) : prob(p), by_block(p.dims.size()) {
    for (std::size_t j = 0; j < p.rows.size(); ++j)
      for (std::size_t e = 0; e < p.rows[j].size(); ++e) by_block[p.rows[j][e].first].emplace_back(j, e);
  }

  Eigen::Index m() const { return static_cast<Eigen::Index>(prob.rows.size()); }

  RealVector apply_a(const Blocks& x) const {
    RealVector out = RealVector::Zero(m());
    for (std::size_t j = 0; j < prob.rows.size(); ++j) {
      double s = 0.0;
      for (const auto& [k, a] : prob.rows[j]) s += dot(a, x[k]);
      out(static_cast<Eigen::Index>(j)) = s;
    }
    return out;
  }

  Blocks apply_at(const RealVector& y) const {
    Blocks out = zeros_like(prob.dims);
    for (std::size_t j = 0; j < prob.rows.size(); ++j) {
      const double yj = y(static_cast<Eigen::Index>(j));
      if (yj == 0.0) continue;
      for (const auto& [k, a] : prob.rows[j]) out[k] += yj * a;
    }
    return out;
  }
};

/// Nesterov-Todd scaling of one block: X = G L G^T, Z = G^{-T} L G^{-1}
/// with L = diag(lambda).
struct NtScaling {
  RealMatrix g;
  RealMatrix g_inv;
  RealMatrix w;  // G G^T
  RealVector lambda;
};

inline std::optional<NtScaling> nt_scaling(const RealMatrix& x, const RealMatrix& z) {
  Eigen::LLT<RealMatrix> lx(x), lz(z);
  if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return std::nullopt;
  const RealMatrix l = lx.matrixL();
  const RealMatrix r = lz.matrixL();
  Eigen::JacobiSVD<RealMatrix> svd(r.transpose() * l, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector sigma = svd.singularValues();
  if (sigma.minCoeff() <= 0.0 || !sigma.allFinite()) return std::nullopt;
  NtScaling s;
  s.lambda = sigma;
  const RealVector inv_sqrt = sigma.cwiseSqrt().cwiseInverse();
  s.g = l * svd.matrixV() * inv_sqrt.asDiagonal();
  // G^{-1} = Sigma^{1/2} V^T L^{-1}
  const RealMatrix l_inv = lx.matrixL().solve(RealMatrix::Identity(x.rows(), x.cols()));
  s.g_inv = sigma.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() * l_inv;
  s.w = s.g * s.g.transpose();
  return s;
}

/// Largest alpha in [0, inf) with lambda-scaled block L + alpha D >= 0.
inline double max_step(const RealVector& lambda, const RealMatrix& d_scaled) {
  const RealVector is = lambda.cwiseSqrt().cwiseInverse();
  const RealMatrix m = is.asDiagonal() * d_scaled * is.asDiagonal();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  return lo >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lo;
}

inline double ratio_step(double v, double dv) {
  return dv >= 0.0 ? std::numeric_limits<double>::infinity() : -v / dv;
}

}  // namespace detail

/// Solves p. Never throws for numerical trouble: failures are reported
/// through SdpSolution::status with the best iterate found. Throws Error for
/// malformed problems or when the size cap is exceeded.
/// Tolerances an Optimal report must meet.
inline constexpr double kAcceptPrimal = 1e-8;
inline constexpr double kAcceptGap = 1e-7;

inline SdpSolution solve(const SdpProblem& p, const SdpOptions& opts = {}) {
  using namespace detail;
  p.validate();
  double reals = 0.0;
  for (auto d : p.block_dims) reals += static_cast<double>(d) * static_cast<double>(d);
  if (reals > opts.max_reals)
    throw Error(ErrorCode::DimensionOverflow, "SDP has " + std::to_string(reals) + " real variables, above cap");

  SdpSolution sol;
  RealProblem full = realify(p);
  const std::size_t m_all = full.rows.size();
  const double bnorm_all = full.rhs.size() ? full.rhs.cwiseAbs().maxCoeff() : 0.0;

  // Row scaling to unit Frobenius norm. Zero rows are either trivially
  // satisfied (dropped) or make the problem infeasible.
  std::vector<double> row_scale(m_all, 1.0);
  for (std::size_t j = 0; j < m_all; ++j) {
    double n2 = 0.0;
    for (const auto& [k, a] : full.rows[j]) n2 += a.squaredNorm();
    row_scale[j] = n2 > 0.0 ? 1.0 / std::sqrt(n2) : 0.0;
  }

  // Dependent rows: column-pivoted QR on the stacked, scaled row vectors.
  std::vector<Eigen::Index> offsets(full.dims.size() + 1, 0);
  for (std::size_t k = 0; k < full.dims.size(); ++k) offsets[k + 1] = offsets[k] + full.dims[k] * full.dims[k];
  RealMatrix stacked = RealMatrix::Zero(offsets.back(), static_cast<Eigen::Index>(m_all));
  for (std::size_t j = 0; j < m_all; ++j)
    for (const auto& [k, a] : full.rows[j])
      stacked.block(offsets[k], static_cast<Eigen::Index>(j), a.size(), 1) +=
          row_scale[j] * Eigen::Map<const RealVector>(a.data(), a.size());

  std::vector<std::size_t> kept;
  if (m_all > 0) {
    Eigen::ColPivHouseholderQR<RealMatrix> qr(stacked);
    qr.setThreshold(opts.rank_tol);
    const auto rank = qr.rank();
    std::vector<bool> keep(m_all, false);
    for (Eigen::Index i = 0; i < rank; ++i) keep[static_cast<std::size_t>(qr.colsPermutation().indices()(i))] = true;
    for (std::size_t j = 0; j < m_all; ++j) {
      if (keep[j] && row_scale[j] > 0.0)
        kept.push_back(j);
      else
        sol.dropped_rows.push_back(j);
    }
  }
  // Consistency of dropped rows: express each in terms of kept rows.
  if (!sol.dropped_rows.empty()) {
    const auto mk = static_cast<Eigen::Index>(kept.size());
    RealMatrix basis(stacked.rows(), mk);
    RealVector bk(mk);
    for (Eigen::Index i = 0; i < mk; ++i) {
      basis.col(i) = stacked.col(static_cast<Eigen::Index>(kept[static_cast<std::size_t>(i)]));
      bk(i) = full.rhs(static_cast<Eigen::Index>(kept[static_cast<std::size_t>(i)])) *
              row_scale[kept[static_cast<std::size_t>(i)]];
    }
    Eigen::ColPivHouseholderQR<RealMatrix> qr(basis);
    for (auto j : sol.dropped_rows) {
      const auto jj = static_cast<Eigen::Index>(j);
      RealVector coef = mk > 0 ? RealVector(qr.solve(stacked.col(jj))) : RealVector();
      const double bj_scaled = row_scale[j] > 0.0 ? full.rhs(jj) * row_scale[j] : full.rhs(jj);
      const double predicted = mk > 0 ? coef.dot(bk) : 0.0;
      const double mismatch = bj_scaled - predicted;
      if (std::abs(mismatch) > 1e-9 * std::max(1.0, std::abs(bj_scaled))) {
        // A^T y = 0 with b.y != 0: exact Farkas ray.
        sol.status = SdpStatus::Infeasible;
        sol.duals.assign(m_all, 0.0);
        const double sign = mismatch > 0 ? 1.0 : -1.0;
        const double scale = sign / std::abs(mismatch);
        const double s_j = row_scale[j] > 0.0 ? row_scale[j] : 1.0;
        sol.duals[j] = scale * s_j;
        for (Eigen::Index i = 0; i < mk; ++i) {
          const std::size_t kj = kept[static_cast<std::size_t>(i)];
          sol.duals[kj] = -scale * coef(i) * row_scale[kj];
        }
        sol.dual_objective = 1.0;
        sol.warnings.push_back("dependent constraint " + std::to_string(j) + " is inconsistent");
        return sol;
      }
    }
    sol.warnings.push_back(std::to_string(sol.dropped_rows.size()) + " dependent constraint row(s) dropped");
  }

  RealProblem rp;
  rp.dims = full.dims;
  rp.cost = full.cost;
  rp.negated_objective = full.negated_objective;
  rp.rhs.resize(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const std::size_t j = kept[i];
    rp.rhs(static_cast<Eigen::Index>(i)) = full.rhs(static_cast<Eigen::Index>(j)) * row_scale[j];
    auto row = full.rows[j];
    for (auto& e : row) e.second *= row_scale[j];
    rp.rows.push_back(std::move(row));
  }

  const Workspace ws(rp);
  const auto m = ws.m();
  const std::size_t nb = rp.dims.size();
  double nu = 0.0;
  for (auto n : rp.dims) nu += static_cast<double>(n);
  const RealVector& b = rp.rhs;
  const Blocks& c = rp.cost;
  const double bnorm = b.size() ? b.norm() : 0.0;
  const double cnorm = norm(c);

  // Gram matrix A A^T, used to restore A dx = r exactly in each direction.
  RealMatrix gram = RealMatrix::Zero(m, m);
  for (std::size_t k = 0; k < nb; ++k) {
    const auto& entries = ws.by_block[k];
    for (std::size_t e = 0; e < entries.size(); ++e)
      for (std::size_t f = e; f < entries.size(); ++f) {
        const double v = dot(rp.rows[entries[e].first][entries[e].second].second,
                             rp.rows[entries[f].first][entries[f].second].second);
        const auto je = static_cast<Eigen::Index>(entries[e].first), jf = static_cast<Eigen::Index>(entries[f].first);
        gram(je, jf) += v;
        if (f != e) gram(jf, je) += v;
      }
  }
  const Eigen::LDLT<RealMatrix> gram_ldlt(gram);

  Blocks x, z;
  for (auto n : rp.dims) {
    x.push_back(RealMatrix::Identity(n, n));
    z.push_back(RealMatrix::Identity(n, n));
  }
  RealVector y = RealVector::Zero(m);
  double tau = 1.0, kappa = 1.0;

  struct Snapshot {
    Blocks x, z;
    RealVector y;
    double tau, kappa, score;
  };
  std::optional<Snapshot> best;

  SdpStatus status = SdpStatus::MaxIter;
  int iter = 0;
  for (;; ++iter) {
    const RealVector ax = ws.apply_a(x);
    const Blocks aty = ws.apply_at(y);
    const RealVector r_p = ax - b * tau;
    Blocks r_d(nb);
    for (std::size_t k = 0; k < nb; ++k) r_d[k] = aty[k] + z[k] - tau * c[k];
    const double cx = dot(c, x);
    const double by = b.size() ? b.dot(y) : 0.0;
    const double r_g = kappa + cx - by;
    const double mu = (dot(x, z) + tau * kappa) / (nu + 1.0);

    const double pres = r_p.size() ? r_p.norm() / tau / std::max(1.0, bnorm) : 0.0;
    const double dres = norm(r_d) / tau / std::max(1.0, cnorm);
    const double pobj = cx / tau, dobj = by / tau;
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    sol.history.push_back({pobj, dobj, mu, pres, dres, 0.0});

    const double score = std::max({pres, dres, gap});
    if (!best || score < best->score) best = Snapshot{x, z, y, tau, kappa, score};

    if (pres <= opts.tol && dres <= opts.tol && gap <= opts.tol) {
      status = SdpStatus::Optimal;
      break;
    }
    // Primal infeasibility: b.y > 0 with A^T y + z ~ 0.
    if (by > 0.0) {
      Blocks ray(nb);
      for (std::size_t k = 0; k < nb; ++k) ray[k] = aty[k] + z[k];
      if (norm(ray) / by <= opts.tol && tau / by <= 1e-3) {
        status = SdpStatus::Infeasible;
        break;
      }
    }
    // Dual infeasibility: c.x < 0 with A x ~ 0.
    if (cx < 0.0) {
      if ((ax.size() ? ax.norm() : 0.0) / -cx <= opts.tol && tau / -cx <= 1e-3) {
        status = SdpStatus::Unbounded;
        break;
      }
    }
    if (iter >= opts.max_iter) {
      status = SdpStatus::MaxIter;
      break;
    }

    // Scaling and Schur complement.
    std::vector<NtScaling> nt(nb);
    bool ok = true;
    for (std::size_t k = 0; k < nb && ok; ++k) {
      auto s = nt_scaling(x[k], z[k]);
      if (!s) ok = false;
      else nt[k] = std::move(*s);
    }
    if (!ok) {
      status = SdpStatus::NumericalBreakdown;
      sol.warnings.push_back("lost positive definiteness at iteration " + std::to_string(iter));
      break;
    }
    RealMatrix schur = RealMatrix::Zero(m, m);
    for (std::size_t k = 0; k < nb; ++k) {
      const auto& entries = ws.by_block[k];
      std::vector<RealMatrix> waw(entries.size());
      for (std::size_t e = 0; e < entries.size(); ++e) {
        const auto& a = rp.rows[entries[e].first][entries[e].second].second;
        waw[e] = nt[k].w * a * nt[k].w;
      }
      for (std::size_t e = 0; e < entries.size(); ++e) {
        const auto je = static_cast<Eigen::Index>(entries[e].first);
        for (std::size_t f = e; f < entries.size(); ++f) {
          const auto jf = static_cast<Eigen::Index>(entries[f].first);
          const double v = dot(waw[e], rp.rows[entries[f].first][entries[f].second].second);
          schur(je, jf) += v;
          if (f != e) schur(jf, je) += v;
        }
      }
    }
    Eigen::LDLT<RealMatrix> ldlt;
    Eigen::LLT<RealMatrix> llt(schur);
    const bool use_llt = llt.info() == Eigen::Success;
    if (!use_llt) {
      ldlt.compute(schur);
      if (ldlt.info() != Eigen::Success && schur.allFinite()) {
        const double shift = 1e-14 * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
        ldlt.compute(schur + shift * RealMatrix::Identity(schur.rows(), schur.cols()));
      }
      if (ldlt.info() != Eigen::Success) {
        status = SdpStatus::NumericalBreakdown;
        sol.warnings.push_back("Schur complement factorization failed at iteration " + std::to_string(iter));
        break;
      }
    }
    auto schur_solve = [&](const RealVector& rhs) -> RealVector {
      auto once = [&](const RealVector& r) { return use_llt ? RealVector(llt.solve(r)) : RealVector(ldlt.solve(r)); };
      RealVector sol_v = once(rhs);
      sol_v += once(rhs - schur * sol_v);
      return sol_v;
    };

    Blocks wcw(nb);
    for (std::size_t k = 0; k < nb; ++k) wcw[k] = nt[k].w * c[k] * nt[k].w;
    const RealVector u = ws.apply_a(wcw);
    const RealVector y1 = m > 0 ? schur_solve(u + b) : RealVector();
    const double c_wcw = dot(c, wcw);
    const double denom_base = (m > 0 ? (b - u).dot(y1) : 0.0) + c_wcw;

    struct Direction {
      Blocks dx, dz;
      RealVector dy;
      double dtau = 0.0, dkappa = 0.0;
    };
    // Solves the linearized system for right-hand sides
    //   A dx - b dtau = r1,  A^T dy + dz - c dtau = r2,
    //   -c.dx + b.dy - dkappa = r3,  lambda o (dx~ + dz~) = rc,
    //   tau dkappa + kappa dtau = rtk.
    auto direction = [&](const RealVector& r1, const Blocks& r2, double r3, const Blocks& rc, double rtk) {
      Direction dir;
      Blocks r4(nb), wr2w(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        const RealVector& lam = nt[k].lambda;
        RealMatrix v = rc[k];
        for (Eigen::Index i = 0; i < v.rows(); ++i)
          for (Eigen::Index j = 0; j < v.cols(); ++j) v(i, j) *= 2.0 / (lam(i) + lam(j));
        r4[k] = nt[k].g * v * nt[k].g.transpose();
        wr2w[k] = nt[k].w * r2[k] * nt[k].w;
      }
      RealVector y2;
      if (m > 0) y2 = schur_solve(r1 - ws.apply_a(r4) + ws.apply_a(wr2w));
      const double num = r3 + dot(c, r4) - dot(c, wr2w) - (m > 0 ? (b - u).dot(y2) : 0.0) + rtk / tau;
      dir.dtau = num / (denom_base + kappa / tau);
      dir.dy = m > 0 ? RealVector(y2 + dir.dtau * y1) : RealVector();
      const Blocks atdy = ws.apply_at(dir.dy);
      dir.dz.resize(nb);
      dir.dx.resize(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        dir.dz[k] = r2[k] - atdy[k] + dir.dtau * c[k];
        dir.dx[k] = r4[k] - nt[k].w * dir.dz[k] * nt[k].w;
      }
      if (m > 0) {
        const RealVector err = ws.apply_a(dir.dx) - b * dir.dtau - r1;
        const Blocks fix = ws.apply_at(gram_ldlt.solve(err));
        for (std::size_t k = 0; k < nb; ++k) dir.dx[k] -= fix[k];
      }
      dir.dkappa = (rtk - kappa * dir.dtau) / tau;
      return dir;
    };

    auto scaled = [&](const Direction& dir, std::size_t k) {
      RealMatrix dxs = nt[k].g_inv * dir.dx[k] * nt[k].g_inv.transpose();
      RealMatrix dzs = nt[k].g.transpose() * dir.dz[k] * nt[k].g;
      return std::pair{RealMatrix(0.5 * (dxs + dxs.transpose())), RealMatrix(0.5 * (dzs + dzs.transpose()))};
    };

    auto step_length = [&](const Direction& dir) {
      double alpha = std::min(ratio_step(tau, dir.dtau), ratio_step(kappa, dir.dkappa));
      for (std::size_t k = 0; k < nb; ++k) {
        auto [dxs, dzs] = scaled(dir, k);
        alpha = std::min({alpha, max_step(nt[k].lambda, dxs), max_step(nt[k].lambda, dzs)});
      }
      return alpha;
    };

    // Predictor.
    Blocks neg_rd(nb), rc(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      neg_rd[k] = -r_d[k];
      const RealVector& lam = nt[k].lambda;
      rc[k] = RealMatrix((-lam.cwiseProduct(lam)).asDiagonal());
    }
    const Direction aff = direction(-r_p, neg_rd, r_g, rc, -tau * kappa);
    const double alpha_aff = std::min(1.0, step_length(aff));
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);

    // Corrector.
    const double eta = 1.0 - sigma;
    for (std::size_t k = 0; k < nb; ++k) {
      neg_rd[k] = -eta * r_d[k];
      auto [dxs, dzs] = scaled(aff, k);
      const RealMatrix prod = 0.5 * (dxs * dzs + dzs * dxs);
      const RealVector& lam = nt[k].lambda;
      rc[k] = RealMatrix((-lam.cwiseProduct(lam)).asDiagonal()) - prod;
      rc[k].diagonal().array() += sigma * mu;
    }
    const Direction dir =
        direction(-eta * r_p, neg_rd, eta * r_g, rc, -tau * kappa + sigma * mu - aff.dtau * aff.dkappa);
    const double alpha = std::min(1.0, opts.step_fraction * step_length(dir));
    sol.history.back().step = alpha;

    for (std::size_t k = 0; k < nb; ++k) {
      x[k] += alpha * dir.dx[k];
      z[k] += alpha * dir.dz[k];
      x[k] = 0.5 * (x[k] + x[k].transpose()).eval();
      z[k] = 0.5 * (z[k] + z[k].transpose()).eval();
    }
    if (m > 0) y += alpha * dir.dy;
    tau += alpha * dir.dtau;
    kappa += alpha * dir.dkappa;
    if (!(tau > 0.0) || !(kappa > 0.0) || !std::isfinite(tau) || !std::isfinite(kappa)) {
      status = SdpStatus::NumericalBreakdown;
      sol.warnings.push_back("homogenizing variables left the cone at iteration " + std::to_string(iter));
      break;
    }
    if (alpha < 1e-10) {
      status = SdpStatus::NumericalBreakdown;
      sol.warnings.push_back("step length stalled at iteration " + std::to_string(iter));
      break;
    }
  }
  sol.iterations = iter;

  if (status == SdpStatus::MaxIter || status == SdpStatus::NumericalBreakdown) {
    x = best->x;
    z = best->z;
    y = best->y;
    tau = best->tau;
    kappa = best->kappa;
  }
  sol.status = status;

  // Map back to the complex problem, undoing row scaling and dropped rows.
  auto full_duals = [&](const RealVector& yy) {
    std::vector<double> out(m_all, 0.0);
    for (std::size_t i = 0; i < kept.size(); ++i) out[kept[i]] = yy(static_cast<Eigen::Index>(i)) * row_scale[kept[i]];
    return out;
  };

  if (status == SdpStatus::Infeasible) {
    const double by = b.dot(y);
    sol.duals = full_duals(y / by);
    sol.dual_objective = 1.0;
    sol.objective_value = std::numeric_limits<double>::quiet_NaN();
    double worst = 0.0;
    for (std::size_t k = 0; k < p.num_blocks(); ++k) {
      HermitianMatrix s = HermitianMatrix::zero(p.block_dims[k]);
      for (std::size_t j = 0; j < m_all; ++j)
        for (const auto& t : p.constraints[j].terms)
          if (t.block == k && sol.duals[j] != 0.0) s -= t.coeff * sol.duals[j];
      worst = std::max(worst, -min_eigenvalue(s));
    }
    sol.certificate_residual = worst;
    return sol;
  }
  if (status == SdpStatus::Unbounded) {
    const double cx = dot(c, x);
    for (std::size_t k = 0; k < nb; ++k) sol.block_values.push_back(unrealify_matrix(x[k] / -cx));
    sol.objective_value = rp.negated_objective ? std::numeric_limits<double>::infinity()
                                               : -std::numeric_limits<double>::infinity();
    return sol;
  }

  for (std::size_t k = 0; k < nb; ++k) sol.block_values.push_back(unrealify_matrix(x[k] / tau));
  sol.duals = full_duals(y / tau);
  const double sign = rp.negated_objective ? -1.0 : 1.0;
  double pobj = 0.0;
  for (std::size_t k = 0; k < p.num_blocks(); ++k) pobj += trace_product(p.objective[k], sol.block_values[k]);
  double dobj = 0.0;
  for (std::size_t j = 0; j < m_all; ++j) dobj += sol.duals[j] * p.constraints[j].rhs;
  sol.objective_value = pobj;
  sol.dual_objective = sign * dobj;

  double worst_eq = 0.0;
  for (std::size_t j = 0; j < m_all; ++j) {
    double lhs = 0.0;
    for (const auto& t : p.constraints[j].terms) lhs += trace_product(t.coeff, sol.block_values[t.block]);
    worst_eq = std::max(worst_eq, std::abs(lhs - p.constraints[j].rhs));
  }
  sol.residuals.primal_eq = worst_eq / std::max(1.0, bnorm_all);
  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& xb : sol.block_values) min_eig = std::min(min_eig, min_eigenvalue(xb));
  sol.residuals.min_block_eig = min_eig;
  sol.residuals.duality_gap = std::abs(pobj - sol.dual_objective) / (1.0 + std::abs(pobj) + std::abs(sol.dual_objective));
  // A stalled run whose best iterate already meets the reporting tolerances
  // is reported as Optimal.
  if (status != SdpStatus::Optimal && best->score <= kAcceptGap && sol.residuals.primal_eq <= kAcceptPrimal &&
      sol.residuals.min_block_eig >= -kAcceptPrimal && sol.residuals.duality_gap <= kAcceptGap) {
    sol.warnings.push_back("accepted best iterate after " + std::string(to_string(status)) + " at iteration " +
                           std::to_string(iter));
    sol.status = SdpStatus::Optimal;
  }
  return sol;
}

}  // namespace jmsdp

#endif  // JMSDP_SDP_HPP
