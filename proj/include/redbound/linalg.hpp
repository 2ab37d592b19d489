#pragma once

// Dense complex matrices and the tensor-product bookkeeping used everywhere
// else in the library.
//
// Subsystem convention: a dims list {d0, d1, ..., dk} describes the product
// space C^d0 (x) C^d1 (x) ... (x) C^dk, with factor 0 the leftmost tensor
// factor and therefore the most significant digit of a flat basis index.
// This is the order produced by kron(a, b): a is factor 0, b is factor 1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace redbound {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;
using Dims = std::vector<std::size_t>;
using Indices = std::vector<std::size_t>;

class LinalgError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static CMatrix identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static CMatrix diagonal(std::span<const double> d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static CMatrix diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
  }

  static CMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    CMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) throw LinalgError("CMatrix::from_rows: ragged rows");
      std::size_t j = 0;
      for (const auto& v : row) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  // |v><v|
  static CMatrix projector(std::span<const cplx> v) {
    CMatrix m(v.size(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
    return m;
  }

  static CMatrix column(std::span<const cplx> v) {
    CMatrix m(v.size(), 1);
    std::copy(v.begin(), v.end(), m.data_.begin());
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }

  CMatrix adjoint() const {
    CMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  CMatrix transpose() const {
    CMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  CVector col(std::size_t j) const {
    CVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const cplx& v) {
      return std::isfinite(v.real()) && std::isfinite(v.imag());
    });
  }

  CMatrix& operator+=(const CMatrix& o) {
    require_same_shape(o, "operator+=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    require_same_shape(o, "operator-=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  CMatrix& operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  bool operator==(const CMatrix&) const = default;

 private:
  void require_same_shape(const CMatrix& o, const char* what) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw LinalgError(std::string("CMatrix::") + what + ": shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

inline CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
inline CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
inline CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
inline CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

inline CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw LinalgError("matmul: inner dimension mismatch");
  CMatrix r(a.rows(), b.cols());
  const std::size_t n = a.cols();
  const std::size_t m = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx* out = &r(i, 0);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx(0.0)) continue;
      const cplx* brow = &b(k, 0);
      for (std::size_t j = 0; j < m; ++j) out[j] += aik * brow[j];
    }
  }
  return r;
}

inline CVector operator*(const CMatrix& a, std::span<const cplx> v) {
  if (a.cols() != v.size()) throw LinalgError("matvec: dimension mismatch");
  CVector r(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) r[i] += a(i, k) * v[k];
  return r;
}

// a^dagger * b without forming the adjoint.
inline CMatrix adjoint_times(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows()) throw LinalgError("adjoint_times: dimension mismatch");
  CMatrix r(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const cplx* brow = &b(k, 0);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const cplx aki = std::conj(a(k, i));
      if (aki == cplx(0.0)) continue;
      cplx* out = &r(i, 0);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aki * brow[j];
    }
  }
  return r;
}

inline double frobenius_distance(const CMatrix& a, const CMatrix& b) { return (a - b).frobenius_norm(); }

inline double hermiticity_defect(const CMatrix& m) {
  if (!m.is_square()) throw LinalgError("hermiticity_defect: matrix not square");
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s += std::norm(m(i, j) - std::conj(m(j, i)));
  return std::sqrt(s);
}

inline CMatrix hermitian_part(const CMatrix& m) {
  CMatrix r = m + m.adjoint();
  r *= 0.5;
  return r;
}

inline double unitarity_defect(const CMatrix& u) {
  if (!u.is_square()) return std::numeric_limits<double>::infinity();
  return frobenius_distance(adjoint_times(u, u), CMatrix::identity(u.rows()));
}

inline double vector_norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

inline CVector normalized(CVector v) {
  const double n = vector_norm(v);
  if (n == 0.0) throw LinalgError("normalized: zero vector");
  for (auto& x : v) x /= n;
  return v;
}

inline cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw LinalgError("inner: dimension mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// Real part of Tr(a^dagger b): the Frobenius inner product on Hermitian matrices.
inline double frobenius_inner(const CMatrix& a, const CMatrix& b) {
  double s = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t k = 0; k < da.size(); ++k) s += (std::conj(da[k]) * db[k]).real();
  return s;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx(0.0)) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return r;
}

inline CVector kron(std::span<const cplx> a, std::span<const cplx> b) {
  CVector r(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) r[i * b.size() + k] = a[i] * b[k];
  return r;
}

inline std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

namespace detail {

inline Indices strides(std::span<const std::size_t> dims) {
  Indices s(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * dims[k];
  return s;
}

// Flat offsets of every digit combination over `factors`, enumerated with
// factors[0] as the most significant digit.
inline Indices offsets(std::span<const std::size_t> dims, std::span<const std::size_t> factors) {
  const Indices st = strides(dims);
  Indices out{0};
  for (std::size_t f : factors) {
    Indices next;
    next.reserve(out.size() * dims[f]);
    for (std::size_t base : out)
      for (std::size_t digit = 0; digit < dims[f]; ++digit) next.push_back(base + digit * st[f]);
    out = std::move(next);
  }
  return out;
}

inline void require_order(const CMatrix& m, std::span<const std::size_t> dims, const char* what) {
  if (!m.is_square() || product(dims) != m.rows())
    throw LinalgError(std::string(what) + ": product of dims does not match matrix order");
  for (std::size_t d : dims)
    if (d == 0) throw LinalgError(std::string(what) + ": zero subsystem dimension");
}

inline Indices complement(std::size_t n, std::span<const std::size_t> set) {
  std::vector<bool> in(n, false);
  for (std::size_t k : set) in.at(k) = true;
  Indices out;
  for (std::size_t k = 0; k < n; ++k)
    if (!in[k]) out.push_back(k);
  return out;
}

inline void require_distinct(std::size_t n, std::span<const std::size_t> set, const char* what) {
  std::vector<bool> seen(n, false);
  for (std::size_t k : set) {
    if (k >= n) throw LinalgError(std::string(what) + ": subsystem index out of range");
    if (seen[k]) throw LinalgError(std::string(what) + ": repeated subsystem index");
    seen[k] = true;
  }
}

}  // namespace detail

inline Dims select_dims(std::span<const std::size_t> dims, std::span<const std::size_t> which) {
  Dims out;
  for (std::size_t k : which) out.push_back(dims[k]);
  return out;
}

// Trace out every factor not in `keep`. The result lists the kept factors in
// ascending index order.
inline CMatrix partial_trace(const CMatrix& m, std::span<const std::size_t> dims, std::span<const std::size_t> keep) {
  detail::require_order(m, dims, "partial_trace");
  detail::require_distinct(dims.size(), keep, "partial_trace");
  Indices kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  const Indices traced = detail::complement(dims.size(), kept);
  const Indices ok = detail::offsets(dims, kept);
  const Indices ot = detail::offsets(dims, traced);
  CMatrix r(ok.size(), ok.size());
  for (std::size_t i = 0; i < ok.size(); ++i)
    for (std::size_t j = 0; j < ok.size(); ++j) {
      cplx s = 0.0;
      for (std::size_t t : ot) s += m(ok[i] + t, ok[j] + t);
      r(i, j) = s;
    }
  return r;
}

// Reorder tensor factors: factor k of the result is factor order[k] of m.
inline CMatrix permute_subsystems(const CMatrix& m, std::span<const std::size_t> dims,
                                  std::span<const std::size_t> order) {
  detail::require_order(m, dims, "permute_subsystems");
  if (order.size() != dims.size()) throw LinalgError("permute_subsystems: order must list every factor");
  detail::require_distinct(dims.size(), order, "permute_subsystems");
  const Indices map = detail::offsets(dims, order);
  CMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < map.size(); ++i)
    for (std::size_t j = 0; j < map.size(); ++j) r(i, j) = m(map[i], map[j]);
  return r;
}

inline CVector permute_subsystems(std::span<const cplx> v, std::span<const std::size_t> dims,
                                  std::span<const std::size_t> order) {
  if (product(dims) != v.size()) throw LinalgError("permute_subsystems: vector length mismatch");
  detail::require_distinct(dims.size(), order, "permute_subsystems");
  const Indices map = detail::offsets(dims, order);
  CVector r(v.size());
  for (std::size_t i = 0; i < map.size(); ++i) r[i] = v[map[i]];
  return r;
}

inline CMatrix swap_subsystems(const CMatrix& m, std::span<const std::size_t> dims, std::size_t i, std::size_t j) {
  if (i >= dims.size() || j >= dims.size()) throw LinalgError("swap_subsystems: index out of range");
  if (dims[i] != dims[j]) throw LinalgError("swap_subsystems: exchanged factors must have equal dimension");
  Indices order(dims.size());
  std::iota(order.begin(), order.end(), 0);
  std::swap(order[i], order[j]);
  return permute_subsystems(m, dims, order);
}

// The operator I (x) op on the full space, with op acting on `targets`
// (in the listed order) and identity elsewhere.
inline CMatrix embed_operator(const CMatrix& op, std::span<const std::size_t> dims,
                              std::span<const std::size_t> targets) {
  detail::require_distinct(dims.size(), targets, "embed_operator");
  const std::size_t dt = product(select_dims(dims, targets));
  if (!op.is_square() || op.rows() != dt) throw LinalgError("embed_operator: operator does not match target dims");
  const Indices rest = detail::complement(dims.size(), targets);
  const Indices ot = detail::offsets(dims, targets);
  const Indices orr = detail::offsets(dims, rest);
  const std::size_t n = product(dims);
  CMatrix full(n, n);
  for (std::size_t r : orr)
    for (std::size_t a = 0; a < dt; ++a)
      for (std::size_t b = 0; b < dt; ++b) full(r + ot[a], r + ot[b]) = op(a, b);
  return full;
}

inline CMatrix apply_local_unitary(const CMatrix& rho, std::span<const std::size_t> dims, const CMatrix& u,
                                   std::span<const std::size_t> targets) {
  detail::require_order(rho, dims, "apply_local_unitary");
  if (unitarity_defect(u) > 1e-9) throw LinalgError("apply_local_unitary: operator is not unitary");
  const CMatrix full = embed_operator(u, dims, targets);
  return full * rho * full.adjoint();
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition: cyclic complex Jacobi.

struct EigDecomposition {
  std::vector<double> eigenvalues;  // ascending
  CMatrix eigenvectors;             // columns
};

inline constexpr double kJacobiOffTolerance = 1e-12;
inline constexpr int kJacobiMaxSweeps = 100;

namespace detail {

inline double off_diagonal_mass(const CMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Diagonalize the Hermitian matrix `a` in place while accumulating the
// rotations into `v`; on entry `v` holds the basis `a` is expressed in.
inline EigDecomposition jacobi_sweeps(CMatrix a, CMatrix v, double scale) {
  const std::size_t n = a.rows();
  const double target = kJacobiOffTolerance * std::max(1.0, scale);
  int sweep = 0;
  for (; sweep < kJacobiMaxSweeps; ++sweep) {
    if (off_diagonal_mass(a) < target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag < 1e-300) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const cplx ph = apq / mag;  // e^{i phi}
        const cplx s_ph = s * ph;
        const cplx s_phc = s * std::conj(ph);
        // columns: A <- A G, G = [[c, s e^{i phi}], [-s e^{-i phi}, c]]
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = c * akp - s_phc * akq;
          a(k, q) = s_ph * akp + c * akq;
        }
        // rows: A <- G^dagger A
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = c * apk - s_ph * aqk;
          a(q, k) = s_phc * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < v.rows(); ++k) {
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = c * vkp - s_phc * vkq;
          v(k, q) = s_ph * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == kJacobiMaxSweeps && off_diagonal_mass(a) >= target)
    throw NumericalError("hermitian_eig: Jacobi iteration did not converge");

  Indices order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  EigDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = CMatrix(v.rows(), n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < v.rows(); ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

inline void require_hermitian(const CMatrix& m, const char* what) {
  if (!m.is_square()) throw LinalgError(std::string(what) + ": matrix not square");
  const double scale = m.frobenius_norm();
  if (hermiticity_defect(m) > 1e-9 * std::max(scale, 1e-300) && scale > 0)
    throw LinalgError(std::string(what) + ": matrix is not Hermitian within tolerance");
}

}  // namespace detail

inline EigDecomposition hermitian_eig(const CMatrix& m) {
  detail::require_hermitian(m, "hermitian_eig");
  const CMatrix h = hermitian_part(m);
  return detail::jacobi_sweeps(h, CMatrix::identity(h.rows()), h.frobenius_norm());
}

// Warm-started variant: `basis` is a unitary whose columns approximately
// diagonalize m (for example the eigenvectors of a nearby matrix). Jacobi then
// only has to clean up the residual off-diagonal part.
inline EigDecomposition hermitian_eig(const CMatrix& m, const CMatrix& basis) {
  detail::require_hermitian(m, "hermitian_eig");
  if (basis.rows() != m.rows() || basis.cols() != m.rows())
    throw LinalgError("hermitian_eig: warm-start basis has wrong shape");
  const CMatrix h = hermitian_part(m);
  CMatrix rotated = hermitian_part(adjoint_times(basis, h * basis));
  return detail::jacobi_sweeps(std::move(rotated), basis, h.frobenius_norm());
}

// V f(lambda) V^dagger
inline CMatrix spectral_apply(const EigDecomposition& e, const std::function<double(double)>& f) {
  const std::size_t n = e.eigenvectors.rows();
  const std::size_t k = e.eigenvalues.size();
  CMatrix r(n, n);
  for (std::size_t c = 0; c < k; ++c) {
    const double w = f(e.eigenvalues[c]);
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx vi = w * e.eigenvectors(i, c);
      if (vi == cplx(0.0)) continue;
      for (std::size_t j = 0; j < n; ++j) r(i, j) += vi * std::conj(e.eigenvectors(j, c));
    }
  }
  return r;
}

inline CMatrix reconstruct(const EigDecomposition& e) {
  return spectral_apply(e, [](double x) { return x; });
}

// Frobenius-nearest positive semidefinite matrix: clip negative eigenvalues.
inline CMatrix psd_project(const CMatrix& h) {
  const EigDecomposition e = hermitian_eig(h);
  return spectral_apply(e, [](double x) { return x > 0.0 ? x : 0.0; });
}

inline double min_eigenvalue(const CMatrix& h) {
  const auto e = hermitian_eig(h);
  return e.eigenvalues.empty() ? 0.0 : e.eigenvalues.front();
}

// Orthonormal basis (columns) of the span of the eigenvectors of the Hermitian
// matrix h whose eigenvalues exceed `threshold`.
inline CMatrix eigenspace_above(const CMatrix& h, double threshold) {
  const EigDecomposition e = hermitian_eig(h);
  std::size_t count = 0;
  for (double x : e.eigenvalues)
    if (x > threshold) ++count;
  CMatrix v(h.rows(), count);
  std::size_t c = 0;
  for (std::size_t k = 0; k < e.eigenvalues.size(); ++k) {
    if (e.eigenvalues[k] <= threshold) continue;
    for (std::size_t r = 0; r < h.rows(); ++r) v(r, c) = e.eigenvectors(r, k);
    ++c;
  }
  return v;
}

// Thin QR by twice-iterated modified Gram-Schmidt. R has a positive real
// diagonal, so Q is unique for full-rank input.
inline CMatrix orthonormalize_columns(const CMatrix& a) {
  CMatrix q = a;
  const std::size_t n = q.rows();
  for (std::size_t j = 0; j < q.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        cplx proj = 0.0;
        for (std::size_t r = 0; r < n; ++r) proj += std::conj(q(r, k)) * q(r, j);
        for (std::size_t r = 0; r < n; ++r) q(r, j) -= proj * q(r, k);
      }
    }
    double nrm = 0.0;
    for (std::size_t r = 0; r < n; ++r) nrm += std::norm(q(r, j));
    nrm = std::sqrt(nrm);
    if (nrm < 1e-300) throw NumericalError("orthonormalize_columns: rank-deficient input");
    for (std::size_t r = 0; r < n; ++r) q(r, j) /= nrm;
  }
  return q;
}

// Cholesky factor of a real symmetric positive definite matrix (row-major,
// n x n), overwritten in place by its lower factor. False if not SPD.
inline bool cholesky_in_place(std::vector<double>& a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    a[j * n + j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / d;
    }
  }
  return true;
}

// Solves L L^T x = b in place for a factor from cholesky_in_place.
inline void cholesky_solve(const std::vector<double>& l, std::size_t n, std::span<double> b) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * b[k];
    b[i] = s / l[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l[k * n + i] * b[k];
    b[i] = s / l[i * n + i];
  }
}

}  // namespace redbound
