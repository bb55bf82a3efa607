#pragma once

// The finite section Q_F of the quarter-plane matrix over the symmetric index
// window F_k = {-k, ..., k}:
//
//   a(j,k) = [j >= 0][k >= 0][j == k] / 2
//          + i phi(k - j) ([j + k >= 0] + [j + k == -1] / 2).
//
// All public indexing is in window coordinates; IndexWindow owns the
// bijection to array offsets.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "qplane/errors.hpp"
#include "qplane/phi.hpp"
#include "qplane/xprec.hpp"

namespace qplane {

inline constexpr int kMaxWindowHalfWidth = 20000;

class IndexWindow {
 public:
  explicit IndexWindow(int k) : k_(k) {
    if (k < 0) throw std::invalid_argument("window half-width must be nonnegative");
  }

  int k() const noexcept { return k_; }
  int n() const noexcept { return 2 * k_ + 1; }
  int first() const noexcept { return -k_; }
  int last() const noexcept { return k_; }
  bool contains(int j) const noexcept { return j >= -k_ && j <= k_; }

  std::size_t to_array(int j) const noexcept { return static_cast<std::size_t>(j + k_); }
  int to_window(std::size_t i) const noexcept { return static_cast<int>(i) - k_; }

  friend bool operator==(const IndexWindow&, const IndexWindow&) = default;

 private:
  int k_;
};

enum class Precision { Binary64, DD };

inline const char* to_string(Precision p) { return p == Precision::Binary64 ? "binary64" : "dd"; }

/// Real and imaginary parts of one entry in scalar type T.
template <class T>
struct EntryParts {
  T re;
  T im;
};

/// Closed-form entry a(j,k). Total on Z^2.
template <class T = double>
EntryParts<T> entry_parts(std::int64_t j, std::int64_t k, PhiMode mode = PhiMode::StableForm) {
  const T re = (j == k && j >= 0) ? T(0.5) : T(0.0);
  const std::int64_t s = j + k;
  double weight = 0.0;
  if (s >= 0) weight = 1.0;
  if (s == -1) weight = 0.5;
  const T im = (weight == 0.0 || j == k) ? T(0.0) : T(weight) * phi<T>(k - j, mode);
  return {re, im};
}

inline std::complex<double> entry(std::int64_t j, std::int64_t k, PhiMode mode = PhiMode::StableForm) {
  const auto e = entry_parts<double>(j, k, mode);
  return {e.re, e.im};
}

/// a(j,k,eps) = eps * a(j,k): the entries of the discretization at cell width eps.
inline std::complex<double> scale(std::complex<double> a, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("scale factor must be positive");
  return {a.real() * eps, a.imag() * eps};
}

namespace detail {

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<std::complex<double>> {
  using Real = double;
  static constexpr Precision precision = Precision::Binary64;
  static std::complex<double> make(double re, double im) { return {re, im}; }
  static std::complex<double> conj(const std::complex<double>& z) { return std::conj(z); }
  static double abs(const std::complex<double>& z) { return std::abs(z); }
};

template <>
struct ScalarTraits<DDComplex> {
  using Real = DDReal;
  static constexpr Precision precision = Precision::DD;
  static DDComplex make(DDReal re, DDReal im) { return {re, im}; }
  static DDComplex conj(const DDComplex& z) { return qplane::conj(z); }
  static double abs(const DDComplex& z) { return std::abs(z.to_complex()); }
};

}  // namespace detail

/// Dense Hermitian matrix of entries a(j,k), immutable after build.
template <class S>
class QMatrixT {
 public:
  using Scalar = S;
  using Real = typename detail::ScalarTraits<S>::Real;

  static QMatrixT build(IndexWindow window, PhiMode mode = PhiMode::StableForm) {
    if (window.k() > kMaxWindowHalfWidth) {
      throw CapacityError("window half-width " + std::to_string(window.k()) + " exceeds guard " +
                          std::to_string(kMaxWindowHalfWidth));
    }
    QMatrixT q(window, mode);
    const std::size_t n = static_cast<std::size_t>(window.n());
    // phi depends only on k - j; tabulate it once per offset.
    std::vector<Real> phi_by_offset(2 * n - 1);
    for (std::size_t d = 0; d < phi_by_offset.size(); ++d) {
      const std::int64_t l = static_cast<std::int64_t>(d) - static_cast<std::int64_t>(n - 1);
      phi_by_offset[d] = phi<Real>(l, mode);
    }
    for (std::size_t r = 0; r < n; ++r) {
      const int j = window.to_window(r);
      for (std::size_t c = r; c < n; ++c) {
        const int k = window.to_window(c);
        const Real re = (j == k && j >= 0) ? Real(0.5) : Real(0.0);
        const int s = j + k;
        Real im(0.0);
        if (j != k && s >= -1) {
          const Real& p = phi_by_offset[c - r + n - 1];
          im = (s >= 0) ? p : Real(0.5) * p;
        }
        const S a = detail::ScalarTraits<S>::make(re, im);
        q.data_[r * n + c] = a;
        q.data_[c * n + r] = detail::ScalarTraits<S>::conj(a);
      }
    }
    return q;
  }

  const IndexWindow& window() const noexcept { return window_; }
  std::size_t n() const noexcept { return static_cast<std::size_t>(window_.n()); }
  Precision precision() const noexcept { return detail::ScalarTraits<S>::precision; }
  PhiMode phi_mode() const noexcept { return mode_; }

  /// Entry at window indices (row j, column k).
  const S& operator()(int j, int k) const { return data_.at(window_.to_array(j) * n() + window_.to_array(k)); }

  /// Row-major storage in array order (row i <-> window index i - k).
  std::span<const S> storage() const noexcept { return data_; }
  std::span<const S> row(std::size_t array_row) const noexcept {
    return std::span<const S>(data_).subspan(array_row * n(), n());
  }

  double max_abs_entry() const {
    double m = 0.0;
    for (const auto& a : data_) m = std::max(m, detail::ScalarTraits<S>::abs(a));
    return m;
  }

 private:
  QMatrixT(IndexWindow w, PhiMode mode) : window_(w), mode_(mode), data_(w.n() * static_cast<std::size_t>(w.n())) {}

  IndexWindow window_;
  PhiMode mode_;
  std::vector<S> data_;
};

using QMatrix = QMatrixT<std::complex<double>>;
using QMatrixDD = QMatrixT<DDComplex>;

using CVector = std::vector<std::complex<double>>;

/// Complex product with the textbook operation order (two real products per
/// component, then one real sum); the rounding model of the error analysis.
inline std::complex<double> mul_model(std::complex<double> a, std::complex<double> b) noexcept {
  const double re = a.real() * b.real() - a.imag() * b.imag();
  const double im = a.real() * b.imag() + a.imag() * b.real();
  return {re, im};
}

inline std::complex<double> add_model(std::complex<double> a, std::complex<double> b) noexcept {
  return {a.real() + b.real(), a.imag() + b.imag()};
}

/// Dense product Q z. Each row is accumulated left to right in ascending array
/// index, so repeated calls are bit-identical.
inline CVector matvec(const QMatrix& q, std::span<const std::complex<double>> z) {
  const std::size_t n = q.n();
  if (z.size() != n) {
    throw DimensionError("matvec: vector length " + std::to_string(z.size()) + " != " + std::to_string(n));
  }
  CVector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = q.row(i);
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) acc = add_model(acc, mul_model(row[j], z[j]));
    out[i] = acc;
  }
  return out;
}

/// Same product in double-double, used by the oracle checks.
inline std::vector<DDComplex> matvec(const QMatrixDD& q, std::span<const DDComplex> z) {
  const std::size_t n = q.n();
  if (z.size() != n) throw DimensionError("matvec: dimension mismatch");
  std::vector<DDComplex> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = q.row(i);
    DDComplex acc;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * z[j];
    out[i] = acc;
  }
  return out;
}

}  // namespace qplane
