#pragma once

// Reduced upper bounds: discard part of Bob's system (optionally after a
// Bob-local unitary), certify that what is left is symmetric extendible and
// therefore carries zero one-way rate, and charge an entropic defect for the
// discarded part.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "redbound/entropy.hpp"
#include "redbound/symext.hpp"

namespace redbound {

enum class Quantity { KeyRate, DistillableEnt, ChannelCapacity, PrivateCapacity };

inline const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::KeyRate: return "KeyRate";
    case Quantity::DistillableEnt: return "DistillableEnt";
    case Quantity::ChannelCapacity: return "ChannelCapacity";
    case Quantity::PrivateCapacity: return "PrivateCapacity";
  }
  return "KeyRate";
}

inline std::optional<Quantity> parse_quantity(const std::string& s) {
  for (Quantity q : {Quantity::KeyRate, Quantity::DistillableEnt, Quantity::ChannelCapacity, Quantity::PrivateCapacity})
    if (s == to_string(q)) return q;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Defects.

inline double defect_key(const DensityMatrix& rho_bp) { return 4.0 * von_neumann(rho_bp); }
inline double defect_dist(const DensityMatrix& rho_bp) { return 2.0 * von_neumann(rho_bp); }
inline double defect_private(const DensityMatrix& rho_bp) { return 4.0 * von_neumann(rho_bp); }

inline double state_defect(Quantity q, const DensityMatrix& rho_bp) {
  switch (q) {
    case Quantity::KeyRate: return defect_key(rho_bp);
    case Quantity::DistillableEnt: return defect_dist(rho_bp);
    case Quantity::PrivateCapacity: return defect_private(rho_bp);
    case Quantity::ChannelCapacity: break;
  }
  throw InvalidState("state_defect: ChannelCapacity needs a channel");
}

struct ChannelDefectConfig {
  bool search = false;  // false: analytic cap 2 log2 d_B'
  int restarts = 4;
  int steps = 200;
  double step_size = 0.5;
  std::uint64_t seed = 0;
};

namespace detail {

// Kraus operators of rho -> Tr_kept Lambda(rho), keeping only `discarded`.
inline Channel discarded_output_channel(const Channel& c, std::span<const std::size_t> discarded) {
  const Dims od = c.output_dims();
  detail::require_distinct(od.size(), discarded, "defect_channel");
  const Indices kept = complement(od.size(), discarded);
  const Indices off_d = offsets(od, discarded);
  const Indices off_k = offsets(od, kept);
  Channel r{{}, c.d_in, off_d.size(), {}};
  if (discarded.size() > 1) r.out_dims = select_dims(od, discarded);
  for (const auto& k : c.kraus)
    for (std::size_t b : off_k) {
      CMatrix kb(off_d.size(), c.d_in);
      for (std::size_t o = 0; o < off_d.size(); ++o)
        for (std::size_t i = 0; i < c.d_in; ++i) kb(o, i) = k(b + off_d[o], i);
      r.kraus.push_back(std::move(kb));
    }
  return r;
}

inline CMatrix channel_apply(const Channel& c, const CMatrix& rho) {
  CMatrix out(c.d_out, c.d_out);
  for (const auto& k : c.kraus) out += k * rho * k.adjoint();
  return out;
}

inline CMatrix channel_adjoint_apply(const Channel& c, const CMatrix& x) {
  CMatrix out(c.d_in, c.d_in);
  for (const auto& k : c.kraus) out += adjoint_times(k, x * k);
  return out;
}

}  // namespace detail

// 2 sup_rho S(Tr_B Lambda(rho)) over input states, with B' = discarded output
// factors. The cap 2 log2 d_B' is returned unless search mode is on, in which
// case matrix exponentiated-gradient ascent estimates the supremum.
inline double defect_channel(const Channel& c, std::span<const std::size_t> discarded,
                             const ChannelDefectConfig& cfg = {}) {
  require_valid(c, "defect_channel");
  if (discarded.empty()) return 0.0;
  const Channel red = detail::discarded_output_channel(c, discarded);
  const double cap = 2.0 * std::log2(static_cast<double>(red.d_out));
  if (!cfg.search) return cap;

  Rng rng(cfg.seed);
  const std::size_t d = c.d_in;
  double best = 0.0;
  for (int r = 0; r < std::max(cfg.restarts, 1); ++r) {
    CMatrix sigma = CMatrix::identity(d) * cplx(1.0 / static_cast<double>(d));
    if (r > 0) sigma = sigma * cplx(0.5) + random_density_matrix(d, d, rng) * cplx(0.5);
    for (int t = 0; t <= cfg.steps; ++t) {
      const auto we = hermitian_eig(hermitian_part(detail::channel_apply(red, sigma)));
      best = std::max(best, shannon_bits(we.eigenvalues));
      if (t == cfg.steps) break;
      const CMatrix grad = detail::channel_adjoint_apply(
          red, spectral_apply(we, [](double x) { return -std::log2(std::max(x, 1e-15)); }));
      const auto se = hermitian_eig(sigma);
      CMatrix log_next = spectral_apply(se, [](double x) { return std::log(std::max(x, 1e-300)); }) +
                         hermitian_part(grad) * cplx(cfg.step_size);
      const auto le = hermitian_eig(hermitian_part(log_next));
      const double shift = le.eigenvalues.back();
      sigma = spectral_apply(le, [shift](double x) { return std::exp(x - shift); });
      sigma *= 1.0 / sigma.trace().real();
      sigma = hermitian_part(sigma);
    }
  }
  return std::min(2.0 * best, cap);
}

// ---------------------------------------------------------------------------
// Reports.

struct DiscardPlan {
  Indices bob_parts;        // retained Bob factors (B)
  Indices discarded_parts;  // B'
  std::optional<CMatrix> unitary;  // on all of Bob's factors, in order
  std::uint64_t seed = 0;
};

struct BoundReport {
  Quantity quantity = Quantity::KeyRate;
  double bound_bits = std::numeric_limits<double>::infinity();
  double defect_bits = std::numeric_limits<double>::quiet_NaN();
  DiscardPlan plan;
  ExtensionCertificate certificate;
  bool certified = false;
  std::size_t plans_tried = 0;
};

struct SearchConfig {
  ExtensionConfig extension;
  std::size_t min_discarded = 0;
  bool unitary_search = false;
  int unitary_restarts = 8;
  int unitary_steps = 200;
  int unitary_probe_iters = 300;  // solver budget per objective evaluation
  std::uint64_t seed = 0;
  ChannelDefectConfig channel;
};

namespace detail {

// exp(i H) for Hermitian H.
inline CMatrix expi_hermitian(const CMatrix& h) {
  const auto e = hermitian_eig(h);
  const std::size_t n = h.rows();
  CMatrix u(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const cplx ph = std::polar(1.0, e.eigenvalues[c]);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx vi = ph * e.eigenvectors(i, c);
      for (std::size_t j = 0; j < n; ++j) u(i, j) += vi * std::conj(e.eigenvectors(j, c));
    }
  }
  return u;
}

// Hermitian matrix from d^2 real coordinates.
inline CMatrix hermitian_from(std::span<const double> t, std::size_t d) {
  CMatrix h(d, d);
  std::size_t k = 0;
  for (std::size_t i = 0; i < d; ++i) h(i, i) = t[k++];
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      const cplx v(t[k], t[k + 1]);
      k += 2;
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  return h;
}

// Plain Nelder-Mead; `steps` counts iterations.
inline std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x0, double scale, int steps, double* fbest) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> val(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += scale;
  for (std::size_t i = 0; i <= n; ++i) val[i] = f(pts[i]);
  std::vector<std::size_t> idx(n + 1);
  for (int it = 0; it < steps; ++it) {
    for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    const std::size_t lo = idx.front(), hi = idx.back(), second = idx[n - 1];
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != hi)
        for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);
    auto along = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (pts[hi][j] - centroid[j]);
      return p;
    };
    auto xr = along(-1.0);
    const double fr = f(xr);
    if (fr < val[lo]) {
      auto xe = along(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[hi] = std::move(xe);
        val[hi] = fe;
      } else {
        pts[hi] = std::move(xr);
        val[hi] = fr;
      }
    } else if (fr < val[second]) {
      pts[hi] = std::move(xr);
      val[hi] = fr;
    } else {
      auto xc = along(fr < val[hi] ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, val[hi])) {
        pts[hi] = std::move(xc);
        val[hi] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == lo) continue;
          for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[lo][j] + 0.5 * (pts[i][j] - pts[lo][j]);
          val[i] = f(pts[i]);
        }
      }
    }
  }
  const std::size_t best = static_cast<std::size_t>(std::min_element(val.begin(), val.end()) - val.begin());
  if (fbest) *fbest = val[best];
  return pts[best];
}

inline double residual_or_inf(const ExtensionCertificate& c) {
  if (is_feasible(c.verdict)) return 0.0;
  return std::isnan(c.residual) ? std::numeric_limits<double>::infinity() : c.residual;
}

struct Candidate {
  Indices discarded;
  double cap = 0.0;
};

inline std::vector<Candidate> discard_candidates(const DensityMatrix& rho, const Indices& bob, std::size_t min_discarded) {
  if (bob.size() > 16) throw InvalidState("reduced bound: too many Bob factors to enumerate");
  std::vector<Candidate> out;
  const std::size_t full = (std::size_t{1} << bob.size()) - 1;
  for (std::size_t mask = 0; mask < full; ++mask) {
    Candidate c;
    for (std::size_t k = 0; k < bob.size(); ++k)
      if (mask >> k & 1U) {
        c.discarded.push_back(bob[k]);
        c.cap += std::log2(static_cast<double>(rho.dims[bob[k]]));
      }
    if (c.discarded.size() < min_discarded) continue;
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (std::abs(a.cap - b.cap) > 1e-12) return a.cap < b.cap;
    if (a.discarded.size() != b.discarded.size()) return a.discarded.size() < b.discarded.size();
    return a.discarded < b.discarded;
  });
  return out;
}

// Defect of a plan, given the state after the plan's unitary.
using DefectFn = std::function<double(const DensityMatrix& rotated, const Indices& discarded,
                                      const std::optional<CMatrix>& unitary)>;

struct PlanOutcome {
  ExtensionCertificate cert;
  std::optional<CMatrix> unitary;
  DensityMatrix rotated;
};

inline ExtensionCertificate certify_retained(const DensityMatrix& rho, const Indices& retained, const ExtensionConfig& cfg) {
  const DensityMatrix r = reduce(rho, retained);
  return certify_extension(r, r.parts(Party::Bob), cfg);
}

// Bob-local unitary search for one discard set: Haar restarts, each refined by
// Nelder-Mead on exp(i H) with a short solver run as the objective.
inline PlanOutcome unitary_search(const DensityMatrix& rho, const Indices& bob, const Indices& retained,
                                  const SearchConfig& cfg, std::uint64_t stream) {
  const std::size_t d = product(select_dims(rho.dims, bob));
  Rng rng(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
  ExtensionConfig probe = cfg.extension;
  probe.max_iters = cfg.unitary_probe_iters;
  probe.record_history = false;

  double best_val = std::numeric_limits<double>::infinity();
  CMatrix best_u = CMatrix::identity(d);
  for (int r = 0; r < cfg.unitary_restarts; ++r) {
    const CMatrix u0 = haar_unitary(d, rng);
    auto objective = [&](const std::vector<double>& t) {
      const CMatrix u = u0 * expi_hermitian(hermitian_from(t, d));
      return residual_or_inf(certify_retained(apply_unitary(rho, u, bob), retained, probe));
    };
    double val = 0.0;
    const auto t = nelder_mead(objective, std::vector<double>(d * d, 0.0), 0.3, cfg.unitary_steps, &val);
    if (val < best_val) {
      best_val = val;
      best_u = u0 * expi_hermitian(hermitian_from(t, d));
    }
  }
  PlanOutcome out{{}, best_u, apply_unitary(rho, best_u, bob)};
  out.cert = certify_retained(out.rotated, retained, cfg.extension);
  return out;
}

inline BoundReport search_bound(const DensityMatrix& rho, Quantity quantity, const SearchConfig& cfg,
                                const DefectFn& defect) {
  require_valid(rho, "reduced bound");
  const Indices alice = rho.parts(Party::Alice);
  const Indices bob = rho.parts(Party::Bob);
  if (alice.empty() || bob.empty())
    throw InvalidState("reduced bound: state needs factors labelled for Alice (A...) and Bob (B...)");

  const auto candidates = discard_candidates(rho, bob, cfg.min_discarded);
  BoundReport best;
  best.quantity = quantity;
  best.plan.seed = cfg.seed;
  double best_residual = std::numeric_limits<double>::infinity();
  bool have_uncertified = false;

  std::size_t i = 0;
  std::uint64_t stream = 0;
  while (i < candidates.size()) {
    const double level = candidates[i].cap;
    for (; i < candidates.size() && std::abs(candidates[i].cap - level) <= 1e-12; ++i) {
      const Candidate& c = candidates[i];
      Indices retained = alice;
      Indices kept_bob;
      for (std::size_t b : bob)
        if (std::find(c.discarded.begin(), c.discarded.end(), b) == c.discarded.end()) kept_bob.push_back(b);
      retained.insert(retained.end(), kept_bob.begin(), kept_bob.end());
      std::sort(retained.begin(), retained.end());

      PlanOutcome outcome{certify_retained(rho, retained, cfg.extension), std::nullopt, rho};
      ++best.plans_tried;
      if (!is_feasible(outcome.cert.verdict) && cfg.unitary_search) {
        PlanOutcome searched = unitary_search(rho, bob, retained, cfg, stream++);
        if (residual_or_inf(searched.cert) < residual_or_inf(outcome.cert)) outcome = std::move(searched);
      }

      DiscardPlan plan{kept_bob, c.discarded, outcome.unitary, cfg.seed};
      if (is_feasible(outcome.cert.verdict)) {
        const double delta = defect(outcome.rotated, c.discarded, outcome.unitary);
        if (!best.certified || delta < best.bound_bits) {
          best.certified = true;
          best.bound_bits = delta;
          best.defect_bits = delta;
          best.plan = std::move(plan);
          best.certificate = std::move(outcome.cert);
        }
      } else if (!best.certified) {
        const double res = residual_or_inf(outcome.cert);
        if (!have_uncertified || res < best_residual) {
          have_uncertified = true;
          best_residual = res;
          best.defect_bits = defect(outcome.rotated, c.discarded, outcome.unitary);
          best.plan = std::move(plan);
          best.certificate = std::move(outcome.cert);
        }
      }
    }
    if (best.certified) return best;
  }
  best.bound_bits = std::numeric_limits<double>::infinity();
  return best;
}

}  // namespace detail

// Smallest certified Delta(rho_B') over discard plans. Factors labelled A...
// are Alice's, B... Bob's; anything else is ignored.
inline BoundReport certified_state_bound(const DensityMatrix& rho, Quantity quantity, const SearchConfig& cfg = {}) {
  if (quantity == Quantity::ChannelCapacity)
    throw InvalidState("certified_state_bound: ChannelCapacity is a channel quantity");
  return detail::search_bound(rho, quantity, cfg,
                              [quantity](const DensityMatrix& rotated, const Indices& discarded,
                                         const std::optional<CMatrix>&) {
                                if (discarded.empty()) return 0.0;
                                return state_defect(quantity, reduce(rotated, discarded));
                              });
}

// Runs the state search on the Choi state; the output factors are Bob's.
inline BoundReport certified_channel_bound(const Channel& c, Quantity quantity, const SearchConfig& cfg = {}) {
  if (quantity != Quantity::ChannelCapacity && quantity != Quantity::PrivateCapacity)
    throw InvalidState("certified_channel_bound: quantity must be ChannelCapacity or PrivateCapacity");
  const DensityMatrix rho = choi(c);
  if (quantity == Quantity::PrivateCapacity) return certified_state_bound(rho, quantity, cfg);
  return detail::search_bound(rho, quantity, cfg,
                              [&c, &cfg](const DensityMatrix&, const Indices& discarded,
                                         const std::optional<CMatrix>& u) {
                                // Choi factor k + 1 is output factor k.
                                Indices outputs;
                                for (std::size_t k : discarded) outputs.push_back(k - 1);
                                const Channel rotated = u ? then_unitary(c, *u) : c;
                                return defect_channel(rotated, outputs, cfg.channel);
                              });
}

// ---------------------------------------------------------------------------
// Lower-bound witnesses.

// I_c(A>B) between the A... and B... factors.
inline double coherent_info_witness(const DensityMatrix& rho) { return coherent_info(rho); }

// I(X:B) - I(X:E) after measuring Alice's factors with q.
inline double dw_witness(const DensityMatrix& rho_abe, const Povm& q) {
  return devetak_winter(measure_to_cqq(rho_abe, q, rho_abe.parts(Party::Alice)));
}

// Eve holds the purification; Alice measures in the computational basis.
inline double dw_witness(const DensityMatrix& rho_ab) {
  const DensityMatrix full = purify(rho_ab);
  const std::size_t da = product(select_dims(full.dims, full.parts(Party::Alice)));
  return dw_witness(full, computational_povm(da));
}

}  // namespace redbound
