#pragma once

// Constructors for the worked example states and channels.

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "redbound/entropy.hpp"
#include "redbound/symext.hpp"

namespace redbound {

namespace detail {

inline std::vector<std::string> numbered(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

inline CVector basis_ket(std::size_t dim, std::size_t index) {
  CVector v(dim);
  v.at(index) = 1.0;
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Upsilon and the block-singlet state built on it.

// Upsilon_AB = d/(2d-1) P+ + 1/(2d-1) sum_{i>=1} |i0><i0| on C^d (x) C^d.
inline DensityMatrix upsilon_state(std::size_t d) {
  if (d < 2) throw InvalidState("upsilon_state: d must be at least 2");
  const double dd = static_cast<double>(d);
  CVector phi(d * d);
  for (std::size_t i = 0; i < d; ++i) phi[i * d + i] = 1.0 / std::sqrt(dd);
  CMatrix m = CMatrix::projector(phi) * cplx(dd / (2.0 * dd - 1.0));
  for (std::size_t i = 1; i < d; ++i) m(i * d, i * d) += 1.0 / (2.0 * dd - 1.0);
  return DensityMatrix{std::move(m), {d, d}, {"A", "B"}};
}

// 1/2 [[U, 0, 0, K], [0, 0, 0, 0], [0, 0, 0, 0], [K^dagger, 0, 0, U]] over the
// qubit pair a'b', with Upsilon-sized blocks U and K. Factors are
// A0 = a' (2), A1 = A (d), B0 = B (d), B1 = b' (2).
inline DensityMatrix block_singlet_state(std::size_t d, const CMatrix& coupling) {
  const DensityMatrix ups = upsilon_state(d);
  if (coupling.rows() != d * d || coupling.cols() != d * d)
    throw InvalidState("block_singlet_state: coupling operator must act on C^d (x) C^d");
  const std::size_t n = d * d;
  CMatrix m(4 * n, 4 * n);  // (a' b') (x) (A B)
  auto put = [&](std::size_t bi, std::size_t bj, const CMatrix& blk) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(bi * n + i, bj * n + j) = 0.5 * blk(i, j);
  };
  put(0, 0, ups.mat);
  put(3, 3, ups.mat);
  put(0, 3, coupling);
  put(3, 0, coupling.adjoint());
  const Dims raw{2, 2, d, d};
  const Indices order{0, 2, 3, 1};
  DensityMatrix rho{permute_subsystems(m, raw, order), {2, d, d, 2}, {"A0", "A1", "B0", "B1"}};
  const auto diag = validate(rho);
  if (!diag.pass) throw InvalidState("block_singlet_state: coupling does not give a valid state (" + diag.reason + ")");
  return rho;
}

// Default coupling amp * Upsilon.
inline DensityMatrix block_singlet_state(std::size_t d, double amp) {
  if (!(amp >= 0.0 && amp <= 1.0)) throw InvalidState("block_singlet_state: amp must lie in [0,1]");
  return block_singlet_state(d, upsilon_state(d).mat * cplx(amp));
}

// ---------------------------------------------------------------------------
// Graph states.

struct GraphSpec {
  std::size_t n_vertices = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

inline void require_valid(const GraphSpec& g) {
  if (g.n_vertices == 0 || g.n_vertices > 20) throw InvalidState("GraphSpec: vertex count must lie in [1,20]");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto [i, j] : g.edges) {
    if (i >= g.n_vertices || j >= g.n_vertices) throw InvalidState("GraphSpec: vertex out of range");
    if (i == j) throw InvalidState("GraphSpec: self-loop");
    if (!seen.insert(std::minmax(i, j)).second) throw InvalidState("GraphSpec: duplicate edge");
  }
}

inline GraphSpec chain_graph(std::size_t n) {
  GraphSpec g{n, {}};
  for (std::size_t i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
  return g;
}

inline GraphSpec complete_graph(std::size_t n) {
  GraphSpec g{n, {}};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
  return g;
}

// prod CZ |+>^n. Vertex 0 is the most significant qubit.
inline CVector graph_state_vector(const GraphSpec& g) {
  require_valid(g);
  const std::size_t n = g.n_vertices;
  const std::size_t dim = std::size_t{1} << n;
  const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
  CVector psi(dim);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    int parity = 0;
    for (auto [i, j] : g.edges) parity ^= static_cast<int>((idx >> (n - 1 - i)) & (idx >> (n - 1 - j)) & 1U);
    psi[idx] = parity ? -amp : amp;
  }
  return psi;
}

inline DensityMatrix graph_state(const GraphSpec& g) {
  return DensityMatrix{CMatrix::projector(graph_state_vector(g)), Dims(g.n_vertices, 2),
                       detail::numbered("V", g.n_vertices)};
}

// Marginal of a pure state on `keep`, in the order given.
inline CMatrix pure_marginal(const CVector& psi, const Dims& dims, std::span<const std::size_t> keep) {
  Indices order(keep.begin(), keep.end());
  const Indices rest = detail::complement(dims.size(), keep);
  order.insert(order.end(), rest.begin(), rest.end());
  const CVector v = permute_subsystems(psi, dims, order);
  const std::size_t dk = product(select_dims(dims, keep));
  const std::size_t dr = v.size() / dk;
  CMatrix r(dk, dk);
  for (std::size_t i = 0; i < dk; ++i)
    for (std::size_t j = 0; j < dk; ++j) {
      cplx s = 0.0;
      for (std::size_t t = 0; t < dr; ++t) s += v[i * dr + t] * std::conj(v[j * dr + t]);
      r(i, j) = s;
    }
  return r;
}

// Alice keeps n vertices, Bob n + 1, the rest are traced out.
inline DensityMatrix example2_state(std::size_t n, const GraphSpec& g, std::span<const std::size_t> alice,
                                    std::span<const std::size_t> bob) {
  if (n == 0) throw InvalidState("example2_state: n must be positive");
  if (g.n_vertices != 3 * n + 1) throw InvalidState("example2_state: graph must have 3n+1 vertices");
  if (alice.size() != n || bob.size() != n + 1) throw InvalidState("example2_state: need n Alice and n+1 Bob vertices");
  Indices keep(alice.begin(), alice.end());
  keep.insert(keep.end(), bob.begin(), bob.end());
  detail::require_distinct(g.n_vertices, keep, "example2_state");
  const Dims dims(g.n_vertices, 2);
  auto labels = detail::numbered("A", n);
  for (auto& s : detail::numbered("B", n + 1)) labels.push_back(s);
  return DensityMatrix{hermitian_part(pure_marginal(graph_state_vector(g), dims, keep)), Dims(2 * n + 1, 2),
                       std::move(labels)};
}

// Vertices 0..n-1 to Alice, n..2n to Bob.
inline DensityMatrix example2_state(std::size_t n, const GraphSpec& g) {
  Indices alice, bob;
  for (std::size_t k = 0; k < n; ++k) alice.push_back(k);
  for (std::size_t k = n; k <= 2 * n; ++k) bob.push_back(k);
  return example2_state(n, g, alice, bob);
}

// ---------------------------------------------------------------------------
// The explicit rank-2 five-qubit state and its two-qubit logical form.

struct Eq9Basis {
  CVector a0, a1;  // two qubits
  CVector b0, b1;  // three qubits
};

inline Eq9Basis eq9_basis() {
  auto ket = [](std::size_t nbits, std::initializer_list<std::pair<std::size_t, double>> terms) {
    CVector v(std::size_t{1} << nbits);
    for (auto [idx, c] : terms) v[idx] = c;
    return normalized(std::move(v));
  };
  Eq9Basis e;
  e.a0 = ket(2, {{0b00, 1}, {0b01, -1}, {0b10, -1}, {0b11, -1}});
  e.a1 = ket(2, {{0b00, 1}, {0b01, 1}, {0b10, 1}, {0b11, -1}});
  e.b0 = ket(3, {{0b001, 1}, {0b010, 1}, {0b100, 1}, {0b111, -1}});
  e.b1 = ket(3, {{0b000, 1}, {0b011, -1}, {0b101, -1}, {0b110, -1}});
  return e;
}

// 1/2 (|phi0><phi0| + |phi1><phi1|) with phi0 = |0_A 0_B> + |1_A 1_B> and
// phi1 = |0_A 1_B> - |1_A 0_B>.
inline DensityMatrix eq9_state() {
  const Eq9Basis e = eq9_basis();
  CVector phi0 = kron(e.a0, e.b0);
  CVector phi1 = kron(e.a0, e.b1);
  const CVector t0 = kron(e.a1, e.b1);
  const CVector t1 = kron(e.a1, e.b0);
  for (std::size_t i = 0; i < phi0.size(); ++i) {
    phi0[i] += t0[i];
    phi1[i] -= t1[i];
  }
  CMatrix m = CMatrix::projector(normalized(phi0)) + CMatrix::projector(normalized(phi1));
  m *= 0.5;
  return DensityMatrix{std::move(m), Dims(5, 2), {"A0", "A1", "B0", "B1", "B2"}};
}

// Same state written in the {0_A,1_A} (x) {0_B,1_B} qubit basis.
inline DensityMatrix eq9_logical_state() { return bell_diagonal_state({0.5, 0.0, 0.0, 0.5}); }

// Isometry from the logical qubit pair into the five-qubit space.
inline CMatrix eq9_logical_isometry() {
  const Eq9Basis e = eq9_basis();
  const CVector cols[4] = {kron(e.a0, e.b0), kron(e.a0, e.b1), kron(e.a1, e.b0), kron(e.a1, e.b1)};
  CMatrix v(32, 4);
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t r = 0; r < 32; ++r) v(r, c) = cols[c][r];
  return v;
}

struct Eq9Match {
  double distance = std::numeric_limits<double>::infinity();
  Indices alice;
  Indices bob;
  std::size_t assignments = 0;
};

// Smallest Frobenius distance between the n = 2 graph marginal and the
// explicit state, over ordered Alice pairs and ordered Bob triples.
inline Eq9Match match_eq9(const GraphSpec& g) {
  if (g.n_vertices != 7) throw InvalidState("match_eq9: the n = 2 instance needs 7 vertices");
  const CVector psi = graph_state_vector(g);
  const CMatrix target = eq9_state().mat;
  const Dims dims(7, 2);
  Eq9Match best;
  Indices keep(5);
  for (keep[0] = 0; keep[0] < 7; ++keep[0])
    for (keep[1] = 0; keep[1] < 7; ++keep[1])
      for (keep[2] = 0; keep[2] < 7; ++keep[2])
        for (keep[3] = 0; keep[3] < 7; ++keep[3])
          for (keep[4] = 0; keep[4] < 7; ++keep[4]) {
            if (std::set<std::size_t>(keep.begin(), keep.end()).size() != 5) continue;
            ++best.assignments;
            const double dist = frobenius_distance(pure_marginal(psi, dims, keep), target);
            if (dist < best.distance - 1e-12) {
              best.distance = dist;
              best.alice = {keep[0], keep[1]};
              best.bob = {keep[2], keep[3], keep[4]};
            }
          }
  return best;
}

// ---------------------------------------------------------------------------
// Dur states.

// sum_s l0^s |Psi_0^s><Psi_0^s| + sum_{k != 0} l_k (|Psi_k^+><Psi_k^+| + |Psi_k^-><Psi_k^-|)
// with |Psi_k^+-> = (|k 0> +- |~k 1>)/sqrt 2 and k an (N-1)-bit chain. lams[k-1]
// holds l_k for k = 1 .. 2^(N-1) - 1. The first n_alice qubits are Alice's.
inline DensityMatrix dur_state(std::size_t n_qubits, double lam0_plus, double lam0_minus,
                               const std::vector<double>& lams, std::size_t n_alice) {
  if (n_qubits < 2 || n_qubits > 12) throw InvalidState("dur_state: N must lie in [2,12]");
  if (n_alice == 0 || n_alice >= n_qubits) throw InvalidState("dur_state: both parties need a qubit");
  const std::size_t half = std::size_t{1} << (n_qubits - 1);
  if (lams.size() != half - 1) throw InvalidState("dur_state: need 2^(N-1) - 1 coefficients");
  double total = lam0_plus + lam0_minus;
  if (lam0_plus < 0.0 || lam0_minus < 0.0) throw InvalidState("dur_state: negative coefficient");
  for (double l : lams) {
    if (l < 0.0) throw InvalidState("dur_state: negative coefficient");
    total += 2.0 * l;
  }
  if (std::abs(total - 1.0) > kStateTolerance) throw InvalidState("dur_state: coefficients are not normalized");

  const std::size_t dim = std::size_t{1} << n_qubits;
  CMatrix m(dim, dim);
  // k = 0: GHZ pair on |0...0> and |1...1>.
  m(0, 0) = m(dim - 1, dim - 1) = 0.5 * (lam0_plus + lam0_minus);
  m(0, dim - 1) = m(dim - 1, 0) = 0.5 * (lam0_plus - lam0_minus);
  // k != 0: the +- pair sums to |k0><k0| + |~k1><~k1|.
  for (std::size_t k = 1; k < half; ++k) {
    const std::size_t lo = k << 1;
    const std::size_t hi = (((half - 1) ^ k) << 1) | 1U;
    m(lo, lo) += lams[k - 1];
    m(hi, hi) += lams[k - 1];
  }
  auto labels = detail::numbered("A", n_alice);
  for (auto& s : detail::numbered("B", n_qubits - n_alice)) labels.push_back(s);
  return DensityMatrix{std::move(m), Dims(n_qubits, 2), std::move(labels)};
}

// Alice's share under the 60/40 split.
inline std::size_t dur_alice_count(std::size_t n_qubits) { return (3 * n_qubits + 2) / 5; }

// l0+ = 1/2, l0- = 0 and every l_k equal.
inline DensityMatrix dur_equal_state(std::size_t n_qubits) {
  const std::size_t count = (std::size_t{1} << (n_qubits - 1)) - 1;
  const std::vector<double> lams(count, 0.25 / static_cast<double>(count));
  return dur_state(n_qubits, 0.5, 0.0, lams, dur_alice_count(n_qubits));
}

// -2 s log2 s with s = l0 + 2 sum_k l_k.
inline double dur_scalar_form(double lam0, const std::vector<double>& lams) {
  double s = lam0;
  for (double l : lams) s += 2.0 * l;
  return s > 0.0 ? -2.0 * s * std::log2(s) : 0.0;
}

// ---------------------------------------------------------------------------

// Remove coherences between computational levels of the target factors.
inline DensityMatrix dephase(const DensityMatrix& rho, std::span<const std::size_t> targets) {
  require_valid(rho, "dephase");
  detail::require_distinct(rho.dims.size(), targets, "dephase");
  const Indices st = detail::strides(rho.dims);
  DensityMatrix out = rho;
  const std::size_t n = rho.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t t : targets) {
        if ((i / st[t]) % rho.dims[t] != (j / st[t]) % rho.dims[t]) {
          out.mat(i, j) = 0.0;
          break;
        }
      }
  return out;
}

// The graph marginal of the n = 2 instance on the complete graph K7, with
// Alice compressed to the support of her marginal, read as a Choi state. The
// channel maps one qubit into Bob's three.
inline Channel example3_channel() {
  const DensityMatrix rho = example2_state(2, complete_graph(7));
  const Indices alice{0, 1};
  const CMatrix va = eigenspace_above(partial_trace(rho.mat, rho.dims, alice), 1e-10);
  if (va.cols() != 2) throw NumericalError("example3_channel: Alice's marginal does not have rank 2");
  const CMatrix v = kron(va, CMatrix::identity(8));
  DensityMatrix compressed{hermitian_part(adjoint_times(v, rho.mat * v)), {2, 2, 2, 2}, {"A", "B0", "B1", "B2"}};
  return channel_from_choi(compressed);
}

}  // namespace redbound
