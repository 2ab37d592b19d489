#pragma once

// Entropic functionals, all in bits.

#include <cmath>
#include <span>
#include <vector>

#include "redbound/states.hpp"

namespace redbound {

// Eigenvalues at or below this are exact zeros inside entropy sums.
inline constexpr double kEntropyCutoff = 1e-12;

inline double shannon_bits(std::span<const double> p) {
  double h = 0.0;
  for (double x : p)
    if (x > kEntropyCutoff) h -= x * std::log2(x);
  return h;
}

inline double von_neumann(const CMatrix& m) {
  const auto e = hermitian_eig(m);
  const double h = shannon_bits(e.eigenvalues);
  return h > 0.0 ? h : 0.0;
}

inline double von_neumann(const DensityMatrix& rho) {
  require_valid(rho, "von_neumann");
  return von_neumann(rho.mat);
}

// S of the marginal on `parts`; the empty set has zero entropy.
inline double entropy_of(const DensityMatrix& rho, std::span<const std::size_t> parts) {
  if (parts.empty()) return 0.0;
  if (parts.size() == rho.dims.size()) return von_neumann(rho.mat);
  return von_neumann(partial_trace(rho.mat, rho.dims, parts));
}

namespace detail {

inline Indices join(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  Indices out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline void require_disjoint(std::size_t n, std::initializer_list<std::span<const std::size_t>> sets,
                             const char* what) {
  std::vector<bool> seen(n, false);
  for (auto s : sets)
    for (std::size_t k : s) {
      if (k >= n) throw LinalgError(std::string(what) + ": subsystem index out of range");
      if (seen[k]) throw LinalgError(std::string(what) + ": subsystem sets overlap");
      seen[k] = true;
    }
}

}  // namespace detail

// I_c(A>B) = S(B) - S(AB) for the marginal on A u B.
inline double coherent_info(const DensityMatrix& rho, std::span<const std::size_t> a, std::span<const std::size_t> b) {
  require_valid(rho, "coherent_info");
  detail::require_disjoint(rho.dims.size(), {a, b}, "coherent_info");
  if (b.empty()) throw LinalgError("coherent_info: B is empty");
  return entropy_of(rho, b) - entropy_of(rho, detail::join(a, b));
}

// Alice's factors versus Bob's, by label.
inline double coherent_info(const DensityMatrix& rho) {
  return coherent_info(rho, rho.parts(Party::Alice), rho.parts(Party::Bob));
}

inline double mutual_info(const DensityMatrix& rho, std::span<const std::size_t> a, std::span<const std::size_t> b) {
  require_valid(rho, "mutual_info");
  detail::require_disjoint(rho.dims.size(), {a, b}, "mutual_info");
  return entropy_of(rho, a) + entropy_of(rho, b) - entropy_of(rho, detail::join(a, b));
}

// I(A:B|C) = S(AC) + S(BC) - S(ABC) - S(C).
inline double cond_mutual_info(const DensityMatrix& rho, std::span<const std::size_t> a,
                               std::span<const std::size_t> b, std::span<const std::size_t> c) {
  require_valid(rho, "cond_mutual_info");
  detail::require_disjoint(rho.dims.size(), {a, b, c}, "cond_mutual_info");
  const Indices ac = detail::join(a, c);
  const Indices bc = detail::join(b, c);
  const Indices abc = detail::join(ac, b);
  return entropy_of(rho, ac) + entropy_of(rho, bc) - entropy_of(rho, abc) - entropy_of(rho, c);
}

inline double holevo(const Ensemble& e) {
  require_valid(e, "holevo");
  double avg_entropy = 0.0;
  for (std::size_t i = 0; i < e.members.size(); ++i)
    if (e.weights[i] > 0.0) avg_entropy += e.weights[i] * von_neumann(e.members[i].mat);
  const double chi = von_neumann(ensemble_average(e).mat) - avg_entropy;
  return chi;
}

// Largest coherence between different values of the classical register.
inline double classical_register_defect(const DensityMatrix& omega) {
  if (omega.dims.empty()) return 0.0;
  const std::size_t k = omega.dims.front();
  const std::size_t n = omega.dim() / k;
  double off = 0.0;
  for (std::size_t x = 0; x < k; ++x)
    for (std::size_t y = 0; y < k; ++y) {
      if (x == y) continue;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) off += std::norm(omega.mat(x * n + i, y * n + j));
    }
  return std::sqrt(off);
}

// I(X:B) - I(X:E) on a cqq state with the register first. Factors are
// assigned to B and E by label; unlabeled states must be X (x) B (x) E.
inline double devetak_winter(const DensityMatrix& omega) {
  require_valid(omega, "devetak_winter");
  if (classical_register_defect(omega) > kStateTolerance)
    throw InvalidState("devetak_winter: factor 0 is not a classical register");
  Indices b, e;
  if (omega.labels.empty()) {
    if (omega.dims.size() != 3) throw InvalidState("devetak_winter: unlabeled input must be X (x) B (x) E");
    b = {1};
    e = {2};
  } else {
    b = omega.parts(Party::Bob);
    e = omega.parts(Party::Eve);
  }
  const Indices x{0};
  return mutual_info(omega, x, b) - mutual_info(omega, x, e);
}

// chi(rho_B) + 2 S(rho_B') - chi(rho_BB'); nonnegative up to rounding.
inline double holevo_gap_check(const Ensemble& e, std::span<const std::size_t> b, std::span<const std::size_t> bp) {
  require_valid(e, "holevo_gap_check");
  const auto& proto = e.members.front();
  detail::require_disjoint(proto.dims.size(), {b, bp}, "holevo_gap_check");
  const Ensemble eb = reduce(e, b);
  const DensityMatrix avg = ensemble_average(e);
  return holevo(eb) + 2.0 * entropy_of(avg, bp) - holevo(e);
}

// S(A) + S(B) - S(AB).
inline double subadditivity_slack(const DensityMatrix& rho, std::span<const std::size_t> a,
                                  std::span<const std::size_t> b) {
  return mutual_info(rho, a, b);
}

// S(AB) - |S(A) - S(B)|.
inline double araki_lieb_slack(const DensityMatrix& rho, std::span<const std::size_t> a,
                               std::span<const std::size_t> b) {
  require_valid(rho, "araki_lieb_slack");
  detail::require_disjoint(rho.dims.size(), {a, b}, "araki_lieb_slack");
  return entropy_of(rho, detail::join(a, b)) - std::abs(entropy_of(rho, a) - entropy_of(rho, b));
}

// I_c(A>B) + 2 S(B') - I_c(A>BB').
inline double coherent_info_gap(const DensityMatrix& rho, std::span<const std::size_t> a,
                                std::span<const std::size_t> b, std::span<const std::size_t> bp) {
  require_valid(rho, "coherent_info_gap");
  detail::require_disjoint(rho.dims.size(), {a, b, bp}, "coherent_info_gap");
  return coherent_info(rho, a, b) + 2.0 * entropy_of(rho, bp) - coherent_info(rho, a, detail::join(b, bp));
}

}  // namespace redbound
