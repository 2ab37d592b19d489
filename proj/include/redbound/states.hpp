#pragma once

// Density matrices, ensembles, POVMs and Kraus channels.
//
// Subsystem labels double as party tags: a label starting with 'A' belongs to
// Alice, 'B' to Bob, 'E' to Eve and 'X' to a classical register. Classical
// registers produced by this library are always factor 0.

#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "redbound/linalg.hpp"

namespace redbound {

inline constexpr double kStateTolerance = 1e-9;
inline constexpr double kLinearTolerance = 1e-12;

class InvalidState : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Where ingestion warnings go. Tests and the CLI may redirect it.
inline std::function<void(const std::string&)>& warning_handler() {
  static std::function<void(const std::string&)> handler = [](const std::string& msg) {
    std::cerr << "redbound warning: " << msg << '\n';
  };
  return handler;
}

enum class Party { Alice, Bob, Eve, Classical, Other };

inline Party party_of(const std::string& label) {
  if (label.empty()) return Party::Other;
  switch (label.front()) {
    case 'A': return Party::Alice;
    case 'B': return Party::Bob;
    case 'E': return Party::Eve;
    case 'X': return Party::Classical;
    default: return Party::Other;
  }
}

struct DensityMatrix {
  CMatrix mat;
  Dims dims;
  std::vector<std::string> labels;  // empty, or one per factor

  std::size_t dim() const { return mat.rows(); }
  std::size_t num_subsystems() const { return dims.size(); }

  std::string label(std::size_t k) const {
    if (k < labels.size()) return labels[k];
    return "S" + std::to_string(k);
  }

  Indices parts(Party p) const {
    Indices out;
    for (std::size_t k = 0; k < dims.size(); ++k)
      if (party_of(label(k)) == p) out.push_back(k);
    return out;
  }

  std::optional<std::size_t> find_label(const std::string& name) const {
    for (std::size_t k = 0; k < labels.size(); ++k)
      if (labels[k] == name) return k;
    return std::nullopt;
  }
};

struct StateDiagnostics {
  bool shape_ok = false;
  bool finite = false;
  double hermiticity_defect = 0.0;
  double trace_defect = 0.0;
  double min_eigenvalue = 0.0;
  bool pass = false;
  std::string reason;
};

inline StateDiagnostics validate(const DensityMatrix& rho) {
  StateDiagnostics d;
  d.shape_ok = rho.mat.is_square() && !rho.dims.empty() && product(rho.dims) == rho.mat.rows() &&
               (rho.labels.empty() || rho.labels.size() == rho.dims.size());
  for (std::size_t x : rho.dims)
    if (x == 0) d.shape_ok = false;
  if (!d.shape_ok) {
    d.reason = "dims/labels do not match the matrix";
    return d;
  }
  d.finite = rho.mat.all_finite();
  if (!d.finite) {
    d.reason = "non-finite entries";
    return d;
  }
  d.hermiticity_defect = hermiticity_defect(rho.mat);
  d.trace_defect = std::abs(rho.mat.trace() - cplx(1.0));
  if (d.hermiticity_defect > kStateTolerance) {
    d.reason = "not Hermitian";
    return d;
  }
  d.min_eigenvalue = hermitian_eig(rho.mat).eigenvalues.front();
  if (d.trace_defect > kStateTolerance)
    d.reason = "trace differs from 1";
  else if (d.min_eigenvalue < -kStateTolerance)
    d.reason = "negative eigenvalue";
  else
    d.pass = true;
  return d;
}

inline void require_valid(const DensityMatrix& rho, const char* what) {
  const auto d = validate(rho);
  if (!d.pass) throw InvalidState(std::string(what) + ": invalid density matrix (" + d.reason + ")");
}

// Checked construction from raw data. Eigenvalues in [-1e-9, 0) are clipped
// and the trace renormalized, with a warning.
inline DensityMatrix ingest_state(CMatrix mat, Dims dims, std::vector<std::string> labels = {}) {
  DensityMatrix rho{std::move(mat), std::move(dims), std::move(labels)};
  auto d = validate(rho);
  if (!d.shape_ok || !d.finite || d.hermiticity_defect > kStateTolerance || d.trace_defect > kStateTolerance ||
      d.min_eigenvalue < -kStateTolerance)
    throw InvalidState("ingest_state: " + (d.reason.empty() ? std::string("invalid state") : d.reason));
  rho.mat = hermitian_part(rho.mat);
  if (d.min_eigenvalue < 0.0) {
    auto e = hermitian_eig(rho.mat);
    CMatrix clipped = spectral_apply(e, [](double x) { return x > 0.0 ? x : 0.0; });
    const double tr = clipped.trace().real();
    clipped *= 1.0 / tr;
    rho.mat = std::move(clipped);
    warning_handler()("clipped negative eigenvalue " + std::to_string(d.min_eigenvalue) + " and renormalized");
  }
  return rho;
}

inline DensityMatrix make_state(CMatrix mat, Dims dims, std::vector<std::string> labels = {}) {
  return ingest_state(std::move(mat), std::move(dims), std::move(labels));
}

inline DensityMatrix pure_state(const CVector& ket, Dims dims, std::vector<std::string> labels = {}) {
  return DensityMatrix{CMatrix::projector(normalized(ket)), std::move(dims), std::move(labels)};
}

inline DensityMatrix maximally_mixed(Dims dims, std::vector<std::string> labels = {}) {
  const std::size_t n = product(dims);
  CMatrix m = CMatrix::identity(n);
  m *= 1.0 / static_cast<double>(n);
  return DensityMatrix{std::move(m), std::move(dims), std::move(labels)};
}

// |Phi+> = (|00> + |11>)/sqrt 2 on A (x) B.
inline DensityMatrix bell_state() {
  const double h = 1.0 / std::sqrt(2.0);
  return pure_state({h, 0.0, 0.0, h}, {2, 2}, {"A", "B"});
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  Dims dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  std::vector<std::string> labels;
  if (!a.labels.empty() || !b.labels.empty()) {
    for (std::size_t k = 0; k < a.dims.size(); ++k) labels.push_back(a.label(k));
    for (std::size_t k = 0; k < b.dims.size(); ++k) labels.push_back(b.label(k));
  }
  return DensityMatrix{kron(a.mat, b.mat), std::move(dims), std::move(labels)};
}

// Marginal on `keep` (ascending order), labels carried along.
inline DensityMatrix reduce(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  Indices kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  DensityMatrix out{partial_trace(rho.mat, rho.dims, kept), select_dims(rho.dims, kept), {}};
  if (!rho.labels.empty())
    for (std::size_t k : kept) out.labels.push_back(rho.labels[k]);
  return out;
}

inline DensityMatrix permute(const DensityMatrix& rho, std::span<const std::size_t> order) {
  DensityMatrix out{permute_subsystems(rho.mat, rho.dims, order), select_dims(rho.dims, order), {}};
  if (!rho.labels.empty())
    for (std::size_t k : order) out.labels.push_back(rho.labels[k]);
  return out;
}

inline DensityMatrix relabel(DensityMatrix rho, std::vector<std::string> labels) {
  if (labels.size() != rho.dims.size()) throw InvalidState("relabel: one label per factor required");
  rho.labels = std::move(labels);
  return rho;
}

inline DensityMatrix apply_unitary(const DensityMatrix& rho, const CMatrix& u, std::span<const std::size_t> targets) {
  return DensityMatrix{apply_local_unitary(rho.mat, rho.dims, u, targets), rho.dims, rho.labels};
}

// Pure state on system (x) reference whose reduction is rho. The reference
// dimension equals rank(rho) and is labelled "E".
inline DensityMatrix purify(const DensityMatrix& rho) {
  require_valid(rho, "purify");
  const auto e = hermitian_eig(rho.mat);
  Indices support;
  for (std::size_t k = e.eigenvalues.size(); k-- > 0;)
    if (e.eigenvalues[k] > kLinearTolerance) support.push_back(k);
  const std::size_t r = support.size();
  const std::size_t n = rho.dim();
  CVector psi(n * r);
  double norm2 = 0.0;
  for (std::size_t c = 0; c < r; ++c) norm2 += e.eigenvalues[support[c]];
  for (std::size_t c = 0; c < r; ++c) {
    const double w = std::sqrt(e.eigenvalues[support[c]] / norm2);
    for (std::size_t i = 0; i < n; ++i) psi[i * r + c] = w * e.eigenvectors(i, support[c]);
  }
  Dims dims = rho.dims;
  dims.push_back(r);
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < rho.dims.size(); ++k) labels.push_back(rho.label(k));
  labels.push_back("E");
  return DensityMatrix{CMatrix::projector(psi), std::move(dims), std::move(labels)};
}

// ---------------------------------------------------------------------------
// Random sampling. Everything is driven by std::mt19937_64 so a seed fixes the
// output bit-for-bit on a given standard library.

using Rng = std::mt19937_64;

inline CMatrix ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(rows, cols);
  for (auto& v : m.data()) {
    const double re = g(rng);
    const double im = g(rng);
    v = cplx(re, im);
  }
  return m;
}

inline CMatrix haar_unitary(std::size_t d, Rng& rng) {
  if (d == 0) throw LinalgError("haar_unitary: dimension must be positive");
  // Gram-Schmidt leaves R with a positive diagonal, which is the phase fix
  // that makes Q Haar distributed.
  return orthonormalize_columns(ginibre(d, d, rng));
}

inline CMatrix haar_unitary(std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  return haar_unitary(d, rng);
}

inline CVector random_ket(std::size_t d, Rng& rng) {
  const CMatrix g = ginibre(d, 1, rng);
  return normalized(g.col(0));
}

// Induced-measure mixed state G G^dagger / Tr with G of shape d x rank.
inline CMatrix random_density_matrix(std::size_t d, std::size_t rank, Rng& rng) {
  const CMatrix g = ginibre(d, rank, rng);
  CMatrix m = g * g.adjoint();
  m *= 1.0 / m.trace().real();
  return hermitian_part(m);
}

inline DensityMatrix random_state(Dims dims, std::size_t rank, Rng& rng, std::vector<std::string> labels = {}) {
  const std::size_t n = product(dims);
  return DensityMatrix{random_density_matrix(n, rank, rng), std::move(dims), std::move(labels)};
}

inline DensityMatrix random_pure(Dims dims, Rng& rng, std::vector<std::string> labels = {}) {
  return DensityMatrix{CMatrix::projector(random_ket(product(dims), rng)), std::move(dims), std::move(labels)};
}

// ---------------------------------------------------------------------------
// Ensembles and cq states.

struct Ensemble {
  std::vector<double> weights;
  std::vector<DensityMatrix> members;
};

inline void require_valid(const Ensemble& e, const char* what) {
  if (e.members.empty() || e.weights.size() != e.members.size())
    throw InvalidState(std::string(what) + ": ensemble needs one weight per member");
  double total = 0.0;
  for (double w : e.weights) {
    if (!(w >= 0.0)) throw InvalidState(std::string(what) + ": negative ensemble weight");
    total += w;
  }
  if (std::abs(total - 1.0) > kStateTolerance) throw InvalidState(std::string(what) + ": weights do not sum to 1");
  for (const auto& m : e.members) {
    if (m.dims != e.members.front().dims) throw InvalidState(std::string(what) + ": members live on different spaces");
    require_valid(m, what);
  }
}

inline DensityMatrix ensemble_average(const Ensemble& e) {
  DensityMatrix avg{CMatrix(e.members.front().dim(), e.members.front().dim()), e.members.front().dims,
                    e.members.front().labels};
  for (std::size_t i = 0; i < e.members.size(); ++i) avg.mat += e.members[i].mat * cplx(e.weights[i]);
  return avg;
}

// Marginal of every member on `keep`.
inline Ensemble reduce(const Ensemble& e, std::span<const std::size_t> keep) {
  Ensemble out{e.weights, {}};
  for (const auto& m : e.members) out.members.push_back(reduce(m, keep));
  return out;
}

// sum_i p_i |i><i| (x) rho_i with the classical register as factor 0.
inline DensityMatrix cq_embed(const Ensemble& e) {
  require_valid(e, "cq_embed");
  const std::size_t k = e.members.size();
  const std::size_t n = e.members.front().dim();
  CMatrix m(k * n, k * n);
  for (std::size_t x = 0; x < k; ++x)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(x * n + i, x * n + j) = e.weights[x] * e.members[x].mat(i, j);
  Dims dims{k};
  dims.insert(dims.end(), e.members.front().dims.begin(), e.members.front().dims.end());
  std::vector<std::string> labels{"X"};
  for (std::size_t q = 0; q < e.members.front().dims.size(); ++q) labels.push_back(e.members.front().label(q));
  return DensityMatrix{std::move(m), std::move(dims), std::move(labels)};
}

// ---------------------------------------------------------------------------
// POVMs.

struct Povm {
  std::vector<CMatrix> elements;
};

inline void require_valid(const Povm& q, std::size_t d, const char* what) {
  if (q.elements.empty()) throw InvalidState(std::string(what) + ": empty POVM");
  CMatrix sum(d, d);
  for (const auto& el : q.elements) {
    if (el.rows() != d || !el.is_square()) throw InvalidState(std::string(what) + ": POVM element has wrong dimension");
    if (hermiticity_defect(el) > kStateTolerance || min_eigenvalue(el) < -kStateTolerance)
      throw InvalidState(std::string(what) + ": POVM element is not positive semidefinite");
    sum += el;
  }
  if (frobenius_distance(sum, CMatrix::identity(d)) > kStateTolerance)
    throw InvalidState(std::string(what) + ": POVM elements do not sum to the identity");
}

inline Povm computational_povm(std::size_t d) {
  Povm q;
  for (std::size_t x = 0; x < d; ++x) {
    CMatrix p(d, d);
    p(x, x) = 1.0;
    q.elements.push_back(std::move(p));
  }
  return q;
}

// omega_XR = sum_x |x><x| (x) Tr_targets((Q_x (x) I) rho): outcome register
// first, then the unmeasured factors in their original order.
inline DensityMatrix measure_to_cqq(const DensityMatrix& rho, const Povm& q, std::span<const std::size_t> targets) {
  require_valid(rho, "measure_to_cqq");
  detail::require_distinct(rho.dims.size(), targets, "measure_to_cqq");
  if (targets.empty()) throw InvalidState("measure_to_cqq: no measured subsystem");
  const std::size_t dt = product(select_dims(rho.dims, targets));
  require_valid(q, dt, "measure_to_cqq");
  const Indices rest = detail::complement(rho.dims.size(), targets);
  const Dims rest_dims = select_dims(rho.dims, rest);
  const std::size_t nr = product(rest_dims);
  const std::size_t k = q.elements.size();
  CMatrix out(k * nr, k * nr);
  for (std::size_t x = 0; x < k; ++x) {
    const CMatrix full = embed_operator(q.elements[x], rho.dims, targets);
    const CMatrix block = partial_trace(full * rho.mat, rho.dims, rest);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nr; ++j) out(x * nr + i, x * nr + j) = block(i, j);
  }
  Dims dims{k};
  dims.insert(dims.end(), rest_dims.begin(), rest_dims.end());
  std::vector<std::string> labels{"X"};
  for (std::size_t r : rest) labels.push_back(rho.label(r));
  return DensityMatrix{hermitian_part(out), std::move(dims), std::move(labels)};
}

inline DensityMatrix measure_to_cqq(const DensityMatrix& rho, const Povm& q) {
  return measure_to_cqq(rho, q, rho.parts(Party::Alice));
}

// ---------------------------------------------------------------------------
// Channels.

struct Channel {
  std::vector<CMatrix> kraus;  // each d_out x d_in
  std::size_t d_in = 0;
  std::size_t d_out = 0;
  Dims out_dims;  // factorization of d_out; {d_out} when unspecified

  Dims output_dims() const { return out_dims.empty() ? Dims{d_out} : out_dims; }
};

inline double trace_preservation_defect(const Channel& c) {
  CMatrix sum(c.d_in, c.d_in);
  for (const auto& k : c.kraus) sum += adjoint_times(k, k);
  return frobenius_distance(sum, CMatrix::identity(c.d_in));
}

inline void require_valid(const Channel& c, const char* what) {
  if (c.kraus.empty() || c.d_in == 0 || c.d_out == 0) throw InvalidState(std::string(what) + ": empty channel");
  for (const auto& k : c.kraus)
    if (k.rows() != c.d_out || k.cols() != c.d_in)
      throw InvalidState(std::string(what) + ": Kraus operator has wrong shape");
  if (!c.out_dims.empty() && product(c.out_dims) != c.d_out)
    throw InvalidState(std::string(what) + ": out_dims do not multiply to d_out");
  if (trace_preservation_defect(c) > kStateTolerance)
    throw InvalidState(std::string(what) + ": channel is not trace preserving");
}

inline Channel identity_channel(std::size_t d) { return Channel{{CMatrix::identity(d)}, d, d, {}}; }

// rho -> Tr(rho) I/d, with Kraus operators |i><j|/sqrt d.
inline Channel fully_depolarizing_channel(std::size_t d) {
  Channel c{{}, d, d, {}};
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      CMatrix k(d, d);
      k(i, j) = 1.0 / std::sqrt(static_cast<double>(d));
      c.kraus.push_back(std::move(k));
    }
  return c;
}

// Qubit dephasing: Z applied with probability p/2.
inline Channel dephasing_channel(double p) {
  if (p < 0.0 || p > 1.0) throw InvalidState("dephasing_channel: p must lie in [0,1]");
  CMatrix k0 = CMatrix::identity(2);
  k0 *= std::sqrt(1.0 - p / 2.0);
  CMatrix k1 = CMatrix::diagonal({1.0, -1.0});
  k1 *= std::sqrt(p / 2.0);
  return Channel{{k0, k1}, 2, 2, {}};
}

// Qubit depolarizing: rho -> (1-p) rho + p I/2.
inline Channel depolarizing_channel(double p) {
  if (p < 0.0 || p > 1.0) throw InvalidState("depolarizing_channel: p must lie in [0,1]");
  const CMatrix x = CMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
  const CMatrix y = CMatrix::from_rows({{0.0, cplx(0, -1)}, {cplx(0, 1), 0.0}});
  const CMatrix z = CMatrix::diagonal({1.0, -1.0});
  Channel c{{}, 2, 2, {}};
  c.kraus.push_back(CMatrix::identity(2) * cplx(std::sqrt(1.0 - 3.0 * p / 4.0)));
  for (const auto& pauli : {x, y, z}) c.kraus.push_back(pauli * cplx(std::sqrt(p / 4.0)));
  return c;
}

// outer after inner.
inline Channel compose(const Channel& outer, const Channel& inner) {
  if (outer.d_in != inner.d_out) throw InvalidState("compose: dimension mismatch");
  Channel c{{}, inner.d_in, outer.d_out, outer.out_dims};
  for (const auto& a : outer.kraus)
    for (const auto& b : inner.kraus) c.kraus.push_back(a * b);
  return c;
}

// Post-compose with a unitary on the output.
inline Channel then_unitary(const Channel& c, const CMatrix& u) {
  Channel out = c;
  for (auto& k : out.kraus) k = u * k;
  return out;
}

// (I (x) Lambda)|Phi><Phi| with |Phi> = sum_i |ii>/sqrt(d_in). Factor 0 is the
// reference "A"; the output factors are Bob's.
inline DensityMatrix choi(const Channel& c) {
  require_valid(c, "choi");
  const std::size_t n = c.d_in * c.d_out;
  CMatrix m(n, n);
  const double s = 1.0 / std::sqrt(static_cast<double>(c.d_in));
  for (const auto& k : c.kraus) {
    CVector v(n);
    for (std::size_t i = 0; i < c.d_in; ++i)
      for (std::size_t o = 0; o < c.d_out; ++o) v[i * c.d_out + o] = s * k(o, i);
    m += CMatrix::projector(v);
  }
  Dims dims{c.d_in};
  const Dims od = c.output_dims();
  dims.insert(dims.end(), od.begin(), od.end());
  std::vector<std::string> labels{"A"};
  if (od.size() == 1)
    labels.push_back("B");
  else
    for (std::size_t k = 0; k < od.size(); ++k) labels.push_back("B" + std::to_string(k));
  return DensityMatrix{hermitian_part(m), std::move(dims), std::move(labels)};
}

// Inverse of choi(): factor 0 is the input reference, which must be maximally
// mixed; the remaining factors are the channel output.
inline Channel channel_from_choi(const DensityMatrix& rho) {
  require_valid(rho, "channel_from_choi");
  if (rho.dims.size() < 2) throw InvalidState("channel_from_choi: need a reference factor and an output");
  const std::size_t d_in = rho.dims.front();
  const Dims out_dims(rho.dims.begin() + 1, rho.dims.end());
  const std::size_t d_out = product(out_dims);
  const Indices ref{0};
  CMatrix ref_marginal = partial_trace(rho.mat, rho.dims, ref);
  CMatrix target = CMatrix::identity(d_in);
  target *= 1.0 / static_cast<double>(d_in);
  if (frobenius_distance(ref_marginal, target) > kStateTolerance)
    throw InvalidState("channel_from_choi: reference marginal is not maximally mixed");
  const auto e = hermitian_eig(rho.mat);
  Channel c{{}, d_in, d_out, out_dims.size() > 1 ? out_dims : Dims{}};
  for (std::size_t k = 0; k < e.eigenvalues.size(); ++k) {
    const double mu = e.eigenvalues[k];
    if (mu <= kLinearTolerance) continue;
    const double w = std::sqrt(static_cast<double>(d_in) * mu);
    CMatrix kr(d_out, d_in);
    for (std::size_t i = 0; i < d_in; ++i)
      for (std::size_t o = 0; o < d_out; ++o) kr(o, i) = w * e.eigenvectors(i * d_out + o, k);
    c.kraus.push_back(std::move(kr));
  }
  return c;
}

// Apply the channel to the factors `targets`. The output factors take the
// place of the first target; all other factors keep their relative order.
inline DensityMatrix apply_channel(const Channel& c, const DensityMatrix& rho, std::span<const std::size_t> targets) {
  require_valid(c, "apply_channel");
  detail::require_distinct(rho.dims.size(), targets, "apply_channel");
  if (targets.empty() || product(select_dims(rho.dims, targets)) != c.d_in)
    throw InvalidState("apply_channel: target dims do not match the channel input");
  const std::size_t first = *std::min_element(targets.begin(), targets.end());
  Indices left, right;
  for (std::size_t k = 0; k < rho.dims.size(); ++k) {
    if (std::find(targets.begin(), targets.end(), k) != targets.end()) continue;
    (k < first ? left : right).push_back(k);
  }
  Indices order = left;
  order.insert(order.end(), targets.begin(), targets.end());
  order.insert(order.end(), right.begin(), right.end());
  const CMatrix arranged = permute_subsystems(rho.mat, rho.dims, order);
  const std::size_t dl = product(select_dims(rho.dims, left));
  const std::size_t dr = product(select_dims(rho.dims, right));
  const std::size_t n_out = dl * c.d_out * dr;
  CMatrix out(n_out, n_out);
  for (const auto& k : c.kraus) {
    const CMatrix big = kron(kron(CMatrix::identity(dl), k), CMatrix::identity(dr));
    out += big * arranged * big.adjoint();
  }
  Dims dims = select_dims(rho.dims, left);
  const Dims od = c.output_dims();
  dims.insert(dims.end(), od.begin(), od.end());
  const Dims rd = select_dims(rho.dims, right);
  dims.insert(dims.end(), rd.begin(), rd.end());
  std::vector<std::string> labels;
  if (!rho.labels.empty()) {
    for (std::size_t k : left) labels.push_back(rho.labels[k]);
    const std::string base = rho.label(targets.front());
    if (od.size() == 1)
      labels.push_back(base);
    else
      for (std::size_t k = 0; k < od.size(); ++k) labels.push_back(base + "." + std::to_string(k));
    for (std::size_t k : right) labels.push_back(rho.labels[k]);
  }
  return DensityMatrix{hermitian_part(out), std::move(dims), std::move(labels)};
}

}  // namespace redbound
