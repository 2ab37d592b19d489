#pragma once

// Symmetric extendibility: the closed-form two-qubit Bell-diagonal test and a
// Dykstra alternating-projection search for sigma_ABB' with
//   Tr_B' sigma = rho_AB,  swap_BB' sigma swap_BB' = sigma,  sigma >= 0.
//
// The solver only ever certifies feasibility. A run that does not reach the
// tolerance is Inconclusive, never "infeasible".

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "redbound/states.hpp"

namespace redbound {

enum class Verdict { FeasibleWitness, FeasibleClosedForm, InfeasibleClosedForm, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::FeasibleWitness: return "FeasibleWitness";
    case Verdict::FeasibleClosedForm: return "FeasibleClosedForm";
    case Verdict::InfeasibleClosedForm: return "InfeasibleClosedForm";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

inline bool is_feasible(Verdict v) { return v == Verdict::FeasibleWitness || v == Verdict::FeasibleClosedForm; }

// ---------------------------------------------------------------------------
// Bell-diagonal states.

inline constexpr double kBellOffDiagonalTolerance = 1e-8;
inline constexpr double kBellCriterionTolerance = 1e-10;

struct BellDiagonalForm {
  std::array<double, 4> p{};  // descending
};

// Columns: Phi+, Phi-, Psi+, Psi-.
inline CMatrix bell_basis() {
  const double h = 1.0 / std::sqrt(2.0);
  return CMatrix::from_rows({{h, h, 0.0, 0.0}, {0.0, 0.0, h, h}, {0.0, 0.0, h, -h}, {h, -h, 0.0, 0.0}});
}

inline DensityMatrix bell_diagonal_state(const std::array<double, 4>& weights) {
  const CMatrix b = bell_basis();
  CMatrix m = b * CMatrix::diagonal(std::span<const double>(weights.data(), 4)) * b.adjoint();
  return DensityMatrix{hermitian_part(m), {2, 2}, {"A", "B"}};
}

inline BellDiagonalForm make_bell_form(std::array<double, 4> p) {
  double total = 0.0;
  for (double x : p) {
    if (x < -kStateTolerance) throw InvalidState("BellDiagonalForm: negative weight");
    total += x;
  }
  if (std::abs(total - 1.0) > kStateTolerance) throw InvalidState("BellDiagonalForm: weights do not sum to 1");
  for (double& x : p) x = std::max(x, 0.0);
  std::sort(p.begin(), p.end(), std::greater<>());
  return BellDiagonalForm{p};
}

// Weights in the Bell basis, or nullopt when the state has coherences there.
inline std::optional<BellDiagonalForm> bell_diagonal_form(const DensityMatrix& rho) {
  require_valid(rho, "bell_diagonal_form");
  if (rho.dim() != 4 || rho.dims.size() != 2 || rho.dims[0] != 2) return std::nullopt;
  const CMatrix b = bell_basis();
  const CMatrix m = adjoint_times(b, rho.mat * b);
  double off = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j) off += std::norm(m(i, j));
  if (std::sqrt(off) > kBellOffDiagonalTolerance) return std::nullopt;
  return make_bell_form({m(0, 0).real(), m(1, 1).real(), m(2, 2).real(), m(3, 3).real()});
}

struct BellCriterion {
  bool holds = false;
  double margin = 0.0;
};

// 4 sqrt(det rho) - (Tr rho^2 - 1/2), with det rho = p1 p2 p3 p4.
inline BellCriterion bell_criterion(const BellDiagonalForm& f) {
  double det = 1.0;
  double purity = 0.0;
  for (double x : f.p) {
    det *= x;
    purity += x * x;
  }
  double margin = 4.0 * std::sqrt(std::max(det, 0.0)) - (purity - 0.5);
  // Both terms are O(1); anything within a few ulps of zero is rounding.
  if (std::abs(margin) <= 8.0 * std::numeric_limits<double>::epsilon()) margin = 0.0;
  return BellCriterion{margin >= -kBellCriterionTolerance, margin};
}

// ---------------------------------------------------------------------------
// Extension search.

struct ExtensionConfig {
  int max_iters = 5000;
  double feasibility_tol = 1e-7;
  int plateau_window = 200;
  bool record_history = false;
};

struct ExtensionResidual {
  double marginal = 0.0;
  double symmetry = 0.0;
  double negativity = 0.0;
  double trace = 0.0;
  double total() const { return std::max({marginal, symmetry, negativity, trace}); }
};

struct ExtensionCertificate {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<DensityMatrix> witness;     // on A (x) B (x) B'
  double residual = std::numeric_limits<double>::quiet_NaN();  // NaN when no solver ran
  int iterations = 0;
  std::optional<double> margin;             // closed-form margin when applicable
  std::vector<double> history;              // per-iteration ||a - y||_F when recorded
};

namespace detail {

// rho rearranged as (A factors ascending) (x) (B factors in cut order).
struct Bipartition {
  Indices a_parts;
  Indices b_parts;
  std::size_t d_a = 1;
  std::size_t d_b = 1;
  CMatrix mat;
};

inline Bipartition bipartition(const DensityMatrix& rho, std::span<const std::size_t> cut_b) {
  detail::require_distinct(rho.dims.size(), cut_b, "symmetric extension");
  if (cut_b.empty()) throw InvalidState("symmetric extension: B is empty");
  Bipartition p;
  p.b_parts.assign(cut_b.begin(), cut_b.end());
  p.a_parts = complement(rho.dims.size(), cut_b);
  Indices order = p.a_parts;
  order.insert(order.end(), p.b_parts.begin(), p.b_parts.end());
  p.d_a = product(select_dims(rho.dims, p.a_parts));
  p.d_b = product(select_dims(rho.dims, p.b_parts));
  p.mat = permute_subsystems(rho.mat, rho.dims, order);
  return p;
}

// Tr over a trailing factor of dimension d.
inline CMatrix trace_last(const CMatrix& m, std::size_t d) {
  const std::size_t n = m.rows() / d;
  CMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += m(i * d + c, j * d + c);
      r(i, j) = s;
    }
  return r;
}

inline CMatrix kron_identity(const CMatrix& m, std::size_t d) {
  const std::size_t n = m.rows();
  CMatrix r(n * d, n * d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const cplx v = m(i, j);
      if (v == cplx(0.0)) continue;
      for (std::size_t c = 0; c < d; ++c) r(i * d + c, j * d + c) = v;
    }
  return r;
}

// Index map of the B <-> B' exchange on A (x) B (x) B'.
inline Indices swap_permutation(std::size_t d_a, std::size_t d_b) {
  Indices pi(d_a * d_b * d_b);
  for (std::size_t a = 0; a < d_a; ++a)
    for (std::size_t b = 0; b < d_b; ++b)
      for (std::size_t c = 0; c < d_b; ++c) pi[(a * d_b + b) * d_b + c] = (a * d_b + c) * d_b + b;
  return pi;
}

inline CMatrix conjugate_by_swap(const CMatrix& m, const Indices& pi) {
  CMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(pi[i], pi[j]);
  return r;
}

inline CMatrix symmetrize(const CMatrix& m, const Indices& pi) {
  CMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = 0.5 * (m(i, j) + m(pi[i], pi[j]));
  return r;
}

inline ExtensionResidual extension_residual(const CMatrix& sigma, const CMatrix& rho, std::size_t d_a,
                                            std::size_t d_b) {
  ExtensionResidual r;
  const Indices pi = swap_permutation(d_a, d_b);
  r.marginal = frobenius_distance(trace_last(sigma, d_b), rho);
  r.symmetry = frobenius_distance(conjugate_by_swap(sigma, pi), sigma);
  r.negativity = std::max(0.0, -min_eigenvalue(hermitian_part(sigma)));
  r.trace = std::abs(sigma.trace() - cplx(1.0));
  return r;
}

// Joint projection onto {Hermitian, swap symmetric, Tr_B' sigma = rho}. The
// marginal map restricted to symmetric operators has a closed-form
// pseudo-inverse, so one pass is exact.
class AffineProjector {
 public:
  AffineProjector(const CMatrix& rho, std::size_t d_a, std::size_t d_b)
      : rho_(rho), d_a_(d_a), d_b_(d_b), pi_(swap_permutation(d_a, d_b)) {}

  CMatrix operator()(const CMatrix& x) const {
    CMatrix s = symmetrize(hermitian_part(x), pi_);
    const CMatrix r = trace_last(s, d_b_) - rho_;
    const CMatrix r_a = trace_last(r, d_b_);
    const double db = static_cast<double>(d_b_);
    CMatrix y = r * cplx(2.0 / db) - kron_identity(r_a, d_b_) * cplx(1.0 / (db * db));
    s -= symmetrize(kron_identity(y, d_b_), pi_);
    return s;
  }

  const Indices& swap() const { return pi_; }

 private:
  CMatrix rho_;
  std::size_t d_a_, d_b_;
  Indices pi_;
};

// Projection onto {sum_b V_b T_b V_b^dagger : T_b >= 0} for mutually
// orthogonal isometries V_b. Eigenvectors of the previous call seed Jacobi.
class BlockConeProjector {
 public:
  explicit BlockConeProjector(std::vector<CMatrix> blocks) : blocks_(std::move(blocks)) {
    for (const auto& v : blocks_) warm_.push_back(CMatrix::identity(v.cols()));
  }

  CMatrix operator()(const CMatrix& h) {
    CMatrix out(h.rows(), h.cols());
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const CMatrix& v = blocks_[k];
      if (v.cols() == 0) continue;
      const CMatrix hb = hermitian_part(adjoint_times(v, h * v));
      EigDecomposition e = hermitian_eig(hb, warm_[k]);
      warm_[k] = e.eigenvectors;
      const CMatrix pb = spectral_apply(e, [](double x) { return x > 0.0 ? x : 0.0; });
      out += v * pb * v.adjoint();
    }
    return out;
  }

 private:
  std::vector<CMatrix> blocks_;
  std::vector<CMatrix> warm_;
};

// Bases of the swap-symmetric and swap-antisymmetric subspaces.
inline std::vector<CMatrix> parity_blocks(std::size_t d_a, std::size_t d_b) {
  const std::size_t n = d_a * d_b * d_b;
  const double h = 1.0 / std::sqrt(2.0);
  std::vector<CVector> sym, anti;
  for (std::size_t a = 0; a < d_a; ++a)
    for (std::size_t b = 0; b < d_b; ++b)
      for (std::size_t c = b; c < d_b; ++c) {
        const std::size_t i = (a * d_b + b) * d_b + c;
        const std::size_t j = (a * d_b + c) * d_b + b;
        CVector v(n);
        if (b == c) {
          v[i] = 1.0;
          sym.push_back(v);
          continue;
        }
        v[i] = h;
        v[j] = h;
        sym.push_back(v);
        v[j] = -h;
        anti.push_back(v);
      }
  auto to_matrix = [n](const std::vector<CVector>& cols) {
    CMatrix m(n, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
      for (std::size_t r = 0; r < n; ++r) m(r, c) = cols[c][r];
    return m;
  };
  return {to_matrix(sym), to_matrix(anti)};
}

inline constexpr double kSupportTolerance = 1e-10;

// Any extension is supported on supp(rho) (x) H_B' and, by symmetry, on the
// swapped copy of that space. Restricting the cone to the intersection W,
// split by swap parity, leaves the feasible set unchanged.
inline std::vector<CMatrix> face_blocks(const CMatrix& rho, std::size_t d_a, std::size_t d_b, const Indices& pi) {
  const CMatrix support = eigenspace_above(rho, kSupportTolerance);
  if (support.cols() == rho.rows()) return parity_blocks(d_a, d_b);
  const CMatrix pi1 = kron_identity(support * support.adjoint(), d_b);
  const CMatrix pi2 = conjugate_by_swap(pi1, pi);
  const CMatrix w = eigenspace_above(pi1 + pi2, 2.0 - 1e-8);
  if (w.cols() == 0) return parity_blocks(d_a, d_b);
  CMatrix pw(pi.size(), pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) pw(i, pi[i]) = 1.0;
  const auto e = hermitian_eig(hermitian_part(adjoint_times(w, pw * w)));
  std::vector<std::size_t> plus, minus;
  for (std::size_t k = 0; k < e.eigenvalues.size(); ++k) (e.eigenvalues[k] > 0.0 ? plus : minus).push_back(k);
  auto gather = [&](const std::vector<std::size_t>& idx) {
    CMatrix c(w.cols(), idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j)
      for (std::size_t r = 0; r < w.cols(); ++r) c(r, j) = e.eigenvectors(r, idx[j]);
    return w * c;
  };
  return {gather(plus), gather(minus)};
}

// Isometry onto the support of a marginal.
inline CMatrix support_isometry(const CMatrix& marginal) {
  const CMatrix v = eigenspace_above(marginal, kSupportTolerance);
  return v.cols() == 0 ? CMatrix::identity(marginal.rows()) : v;
}

// Real coordinates of a k x k Hermitian matrix, orthonormal for Re Tr(A B):
// the diagonal, then sqrt(2) Re and sqrt(2) Im of each upper entry.
inline void herm_coords(const CMatrix& h, double* out) {
  const std::size_t k = h.rows();
  const double r2 = std::sqrt(2.0);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < k; ++i) out[idx++] = h(i, i).real();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      out[idx++] = r2 * h(i, j).real();
      out[idx++] = r2 * h(i, j).imag();
    }
}

inline CMatrix herm_from_coords(const double* c, std::size_t k) {
  CMatrix h(k, k);
  const double s = 1.0 / std::sqrt(2.0);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < k; ++i) h(i, i) = c[idx++];
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      h(i, j) = cplx(s * c[idx], s * c[idx + 1]);
      h(j, i) = std::conj(h(i, j));
      idx += 2;
    }
  return h;
}

inline constexpr std::size_t kBarrierMaxParams = 400;

// Strictly feasible point by a phase-I log-barrier path: maximize t subject to
// T_b - t I > 0 and Tr_B' sum_b V_b T_b V_b^dagger = rho, in the real
// coordinates of the blocks T_b. Dykstra stalls when the feasible set is thin,
// and any t > 0 yields an extension whose only error is rounding. Never used
// to conclude infeasibility.
inline std::optional<CMatrix> barrier_extension(const CMatrix& rho, std::size_t d_b,
                                                const std::vector<CMatrix>& blocks, const CMatrix& start,
                                                int& steps) {
  std::vector<std::size_t> ks, off;
  std::size_t p = 0, n_face = 0;
  for (const auto& v : blocks) {
    ks.push_back(v.cols());
    off.push_back(p);
    p += v.cols() * v.cols();
    n_face += v.cols();
  }
  if (p == 0 || p > kBarrierMaxParams) return std::nullopt;
  const std::size_t q = p + 1;  // unknowns (x, t)

  // Marginal map in coordinates, m x p row-major.
  const std::size_t m = rho.rows() * rho.rows();
  std::vector<double> mm(m * p), col(m), unit(p, 0.0);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (std::size_t i = 0; i < ks[b] * ks[b]; ++i) {
      unit[i] = 1.0;
      const CMatrix e = herm_from_coords(unit.data(), ks[b]);
      unit[i] = 0.0;
      herm_coords(trace_last(blocks[b] * e * blocks[b].adjoint(), d_b), col.data());
      for (std::size_t r = 0; r < m; ++r) mm[r * p + off[b] + i] = col[r];
    }
  std::vector<double> target(m);
  herm_coords(rho, target.data());

  // Independent constraint rows with orthonormal rows: C = D^{-1/2} U^T M.
  CMatrix gram(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < p; ++k) s += mm[i * p + k] * mm[j * p + k];
      gram(i, j) = gram(j, i) = s;
    }
  const EigDecomposition ge = hermitian_eig(gram);
  const double gmax = ge.eigenvalues.empty() ? 0.0 : ge.eigenvalues.back();
  std::vector<std::vector<double>> c_rows;
  std::vector<double> c_rhs;
  std::vector<double> reach(m, 0.0);
  for (std::size_t l = 0; l < m; ++l) {
    const double lam = ge.eigenvalues[l];
    if (!(lam > 1e-12 * gmax)) continue;
    std::vector<double> u(m);
    for (std::size_t r = 0; r < m; ++r) u[r] = ge.eigenvectors(r, l).real();
    std::vector<double> row(p, 0.0);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t k = 0; k < p; ++k) row[k] += u[r] * mm[r * p + k];
    double ut = 0.0;
    for (std::size_t r = 0; r < m; ++r) ut += u[r] * target[r];
    for (std::size_t r = 0; r < m; ++r) reach[r] += ut * u[r];
    const double sc = 1.0 / std::sqrt(lam);
    for (double& v : row) v *= sc;
    c_rows.push_back(std::move(row));
    c_rhs.push_back(ut * sc);
  }
  double miss = 0.0;
  for (std::size_t r = 0; r < m; ++r) miss += (reach[r] - target[r]) * (reach[r] - target[r]);
  if (std::sqrt(miss) > 1e-9) return std::nullopt;
  const std::size_t nc = c_rows.size();

  // Start from the given point, moved onto the affine set.
  std::vector<double> w(q, 0.0);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    herm_coords(hermitian_part(adjoint_times(blocks[b], start * blocks[b])), w.data() + off[b]);
  for (std::size_t l = 0; l < nc; ++l) {
    double v = -c_rhs[l];
    for (std::size_t k = 0; k < p; ++k) v += c_rows[l][k] * w[k];
    for (std::size_t k = 0; k < p; ++k) w[k] -= v * c_rows[l][k];
  }

  auto block_of = [&](const std::vector<double>& x, std::size_t b) {
    CMatrix s = herm_from_coords(x.data() + off[b], ks[b]);
    for (std::size_t i = 0; i < ks[b]; ++i) s(i, i) -= x[p];
    return s;
  };
  // Barrier objective kappa t + sum log det S_b, or nullopt outside the domain.
  auto objective = [&](const std::vector<double>& x, double kappa) -> std::optional<double> {
    double f = kappa * x[p];
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (ks[b] == 0) continue;
      for (double lam : hermitian_eig(block_of(x, b)).eigenvalues) {
        if (!(lam > 0.0)) return std::nullopt;
        f += std::log(lam);
      }
    }
    return f;
  };

  double lmin = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < blocks.size(); ++b)
    if (ks[b] > 0) lmin = std::min(lmin, min_eigenvalue(herm_from_coords(w.data() + off[b], ks[b])));
  const double nf = static_cast<double>(n_face);
  w[p] = lmin - 1.0 / nf;

  auto lift = [&](const std::vector<double>& x) {
    CMatrix sigma(blocks.front().rows(), blocks.front().rows());
    for (std::size_t b = 0; b < blocks.size(); ++b)
      if (ks[b] > 0) sigma += blocks[b] * herm_from_coords(x.data() + off[b], ks[b]) * blocks[b].adjoint();
    return hermitian_part(sigma);
  };
  if (w[p] + 1.0 / nf > 0.0) return lift(w);

  std::vector<double> h(q * q), g(q), cq(q * nc), zq(q * nc), kk(nc * nc), nu(nc), dir(q), unitk;
  for (double kappa = nf; kappa < 1e18 && steps < 600; kappa *= 10.0) {
    for (int it = 0; it < 80 && steps < 600; ++it) {
      ++steps;
      std::fill(h.begin(), h.end(), 0.0);
      std::fill(g.begin(), g.end(), 0.0);
      g[p] = kappa;
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        const std::size_t k = ks[b];
        if (k == 0) continue;
        const CMatrix sinv = spectral_apply(hermitian_eig(block_of(w, b)), [](double x) { return 1.0 / x; });
        const CMatrix s2 = sinv * sinv;
        herm_coords(sinv, g.data() + off[b]);
        std::vector<double> c2(k * k);
        herm_coords(s2, c2.data());
        for (std::size_t i = 0; i < k; ++i) {
          g[p] -= sinv(i, i).real();
          h[p * q + p] += c2[i];
        }
        for (std::size_t i = 0; i < k * k; ++i) h[(off[b] + i) * q + p] = h[p * q + off[b] + i] = -c2[i];
        unitk.assign(k * k, 0.0);
        std::vector<double> row(k * k);
        for (std::size_t i = 0; i < k * k; ++i) {
          unitk[i] = 1.0;
          herm_coords(sinv * herm_from_coords(unitk.data(), k) * sinv, row.data());
          unitk[i] = 0.0;
          for (std::size_t j = 0; j < k * k; ++j) h[(off[b] + i) * q + off[b] + j] = row[j];
        }
      }
      // H is singular along (I, 1); adding gamma C^T C leaves the constrained
      // step unchanged and makes the system definite.
      double gamma = 0.0;
      for (std::size_t k = 0; k < q; ++k) gamma += h[k * q + k];
      gamma /= static_cast<double>(q);
      for (std::size_t l = 0; l < nc; ++l)
        for (std::size_t i = 0; i < p; ++i)
          for (std::size_t j = 0; j < p; ++j) h[i * q + j] += gamma * c_rows[l][i] * c_rows[l][j];
      if (!cholesky_in_place(h, q)) return std::nullopt;
      std::vector<double> u = g;
      cholesky_solve(h, q, u);
      for (std::size_t l = 0; l < nc; ++l) {
        std::span<double> z(zq.data() + l * q, q);
        for (std::size_t k = 0; k < p; ++k) z[k] = c_rows[l][k];
        z[p] = 0.0;
        cholesky_solve(h, q, z);
      }
      for (std::size_t a = 0; a < nc; ++a) {
        for (std::size_t b2 = 0; b2 < nc; ++b2) {
          double s = 0.0;
          for (std::size_t k = 0; k < p; ++k) s += c_rows[a][k] * zq[b2 * q + k];
          kk[a * nc + b2] = s;
        }
        double s = 0.0;
        for (std::size_t k = 0; k < p; ++k) s += c_rows[a][k] * u[k];
        nu[a] = s;
      }
      if (nc > 0) {
        if (!cholesky_in_place(kk, nc)) return std::nullopt;
        cholesky_solve(kk, nc, nu);
      }
      for (std::size_t k = 0; k < q; ++k) {
        double v = u[k];
        for (std::size_t l = 0; l < nc; ++l) v -= zq[l * q + k] * nu[l];
        dir[k] = v;
      }
      double dec = 0.0;
      for (std::size_t k = 0; k < q; ++k) dec += g[k] * dir[k];
      if (dec < 1e-10) break;

      const double f0 = *objective(w, kappa);
      double alpha = 1.0;
      std::vector<double> trial(q);
      bool moved = false;
      while (alpha > 1e-12) {
        for (std::size_t k = 0; k < q; ++k) trial[k] = w[k] + alpha * dir[k];
        const auto f1 = objective(trial, kappa);
        if (f1 && *f1 >= f0 + 0.25 * alpha * dec) {
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
      w = trial;
      if (w[p] > 0.0) return lift(w);
    }
    // Centered: the best achievable t is at most t + n_face / kappa.
    if (w[p] + nf / kappa < 0.0) return std::nullopt;
  }
  return std::nullopt;
}

struct SolverRun {
  CMatrix witness;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::vector<double> history;
};

// Dykstra on the (already compressed) problem. Returns the better of the
// affine iterate and the cone iterate, judged by the full residual.
inline SolverRun dykstra_extension(const CMatrix& rho, std::size_t d_a, std::size_t d_b, const ExtensionConfig& cfg) {
  const AffineProjector affine(rho, d_a, d_b);
  const std::vector<CMatrix> blocks = face_blocks(rho, d_a, d_b, affine.swap());
  BlockConeProjector cone(blocks);
  const double tol = cfg.feasibility_tol;

  CMatrix x = kron_identity(rho, d_b) * cplx(1.0 / static_cast<double>(d_b));
  CMatrix q(x.rows(), x.cols());
  CMatrix best_a, best_y;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_trace;  // best residual after each iteration
  SolverRun run;

  int polish = -1;  // iterations left after reaching tol
  int k = 0;
  while (k < cfg.max_iters) {
    ++k;
    const CMatrix a = affine(x);
    CMatrix aq = a + q;
    CMatrix y = cone(aq);
    q = aq - y;
    const double res = frobenius_distance(a, y);
    if (cfg.record_history) run.history.push_back(res);
    if (res < best) {
      best = res;
      best_a = a;
      best_y = y;
    }
    best_trace.push_back(best);
    x = std::move(y);

    if (polish < 0 && best <= tol) polish = 100;
    if (polish >= 0) {
      if (polish-- == 0 || best <= 1e-3 * tol) break;
      continue;
    }
    const int w = cfg.plateau_window;
    if (w > 0 && k >= 50 && k > w) {
      const double before = best_trace[static_cast<std::size_t>(k - 1 - w)];
      if (best > 0.99 * before) break;
    }
  }
  run.iterations = k;

  const ExtensionResidual ra = extension_residual(best_a, rho, d_a, d_b);
  const ExtensionResidual ry = extension_residual(best_y, rho, d_a, d_b);
  if (ra.total() <= ry.total()) {
    run.witness = std::move(best_a);
    run.residual = ra.total();
  } else {
    run.witness = std::move(best_y);
    run.residual = ry.total();
  }
  if (run.residual > tol) {
    int steps = 0;
    if (auto sigma = barrier_extension(rho, d_b, blocks, run.witness, steps)) {
      const double r = extension_residual(*sigma, rho, d_a, d_b).total();
      if (r < run.residual) {
        run.witness = std::move(*sigma);
        run.residual = r;
      }
    }
    run.iterations += steps;
  }
  return run;
}

}  // namespace detail

// Residual record of sigma as a symmetric extension of rho with B = cut_b.
// sigma is laid out as (A factors ascending) (x) B (x) B'.
inline ExtensionResidual verify_extension(const CMatrix& sigma, const DensityMatrix& rho,
                                          std::span<const std::size_t> cut_b) {
  const auto p = detail::bipartition(rho, cut_b);
  if (sigma.rows() != p.d_a * p.d_b * p.d_b || !sigma.is_square())
    throw InvalidState("verify_extension: extension has the wrong dimension");
  return detail::extension_residual(sigma, p.mat, p.d_a, p.d_b);
}

inline ExtensionResidual verify_extension(const DensityMatrix& sigma, const DensityMatrix& rho,
                                          std::span<const std::size_t> cut_b) {
  return verify_extension(sigma.mat, rho, cut_b);
}

// Bob's factors by label, or factor 1 of an unlabeled bipartite state.
inline Indices default_cut(const DensityMatrix& rho) {
  Indices b = rho.parts(Party::Bob);
  if (!b.empty()) return b;
  if (rho.dims.size() == 2) return {1};
  throw InvalidState("symmetric extension: cannot tell which factors are Bob's");
}

inline ExtensionCertificate find_symmetric_extension(const DensityMatrix& rho, std::span<const std::size_t> cut_b,
                                                     const ExtensionConfig& cfg = {}) {
  require_valid(rho, "find_symmetric_extension");
  if (cfg.max_iters <= 0 || !(cfg.feasibility_tol > 0.0))
    throw InvalidState("find_symmetric_extension: bad solver configuration");
  const auto p = detail::bipartition(rho, cut_b);

  // Compress A and B to the supports of their marginals.
  const Indices keep_a{0};
  const Dims ab{p.d_a, p.d_b};
  const CMatrix va = detail::support_isometry(partial_trace(p.mat, ab, keep_a));
  const Indices keep_b{1};
  const CMatrix vb = detail::support_isometry(partial_trace(p.mat, ab, keep_b));
  const CMatrix vab = kron(va, vb);
  const CMatrix small = hermitian_part(adjoint_times(vab, p.mat * vab));

  detail::SolverRun run = detail::dykstra_extension(small, va.cols(), vb.cols(), cfg);
  const CMatrix lift = kron(vab, vb);
  CMatrix sigma = lift * run.witness * lift.adjoint();

  ExtensionCertificate cert;
  cert.iterations = run.iterations;
  cert.history = std::move(run.history);
  cert.residual = detail::extension_residual(sigma, p.mat, p.d_a, p.d_b).total();
  Dims dims = select_dims(rho.dims, p.a_parts);
  std::vector<std::string> labels;
  for (std::size_t k : p.a_parts) labels.push_back(rho.label(k));
  for (std::size_t k : p.b_parts) {
    dims.push_back(rho.dims[k]);
    labels.push_back(rho.label(k));
  }
  for (std::size_t k : p.b_parts) {
    dims.push_back(rho.dims[k]);
    labels.push_back(rho.label(k) + "'");
  }
  cert.witness = DensityMatrix{std::move(sigma), std::move(dims), std::move(labels)};
  cert.verdict = cert.residual <= cfg.feasibility_tol ? Verdict::FeasibleWitness : Verdict::Inconclusive;
  return cert;
}

inline ExtensionCertificate find_symmetric_extension(const DensityMatrix& rho, const ExtensionConfig& cfg = {}) {
  return find_symmetric_extension(rho, default_cut(rho), cfg);
}

// Closed form for two-qubit Bell-diagonal input, solver otherwise.
inline ExtensionCertificate certify_extension(const DensityMatrix& rho, std::span<const std::size_t> cut_b,
                                              const ExtensionConfig& cfg = {}) {
  require_valid(rho, "certify_extension");
  if (rho.dims.size() == 2 && cut_b.size() == 1) {
    if (auto form = bell_diagonal_form(rho)) {
      const auto c = bell_criterion(*form);
      ExtensionCertificate cert;
      cert.verdict = c.holds ? Verdict::FeasibleClosedForm : Verdict::InfeasibleClosedForm;
      cert.margin = c.margin;
      return cert;
    }
  }
  return find_symmetric_extension(rho, cut_b, cfg);
}

inline ExtensionCertificate certify_extension(const DensityMatrix& rho, const ExtensionConfig& cfg = {}) {
  return certify_extension(rho, default_cut(rho), cfg);
}

}  // namespace redbound
