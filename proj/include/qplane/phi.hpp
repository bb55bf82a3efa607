#pragma once

// The logarithmic cell integral
//
//   phi(l) = 1/(2 pi) * integral_l^{l+1} log|y / (y - 1)| dy,   l integer,
//
// which populates every off-diagonal entry of the quarter-plane matrix.
// Three closed-form evaluations (naive three-log form, cancellation-free
// rearrangement, 1/l power series) and an adaptive quadrature oracle.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "qplane/quadrature.hpp"
#include "qplane/xprec.hpp"

namespace qplane {

enum class PhiMode { NaiveClosedForm, StableForm, Series };

inline const char* to_string(PhiMode m) {
  switch (m) {
    case PhiMode::NaiveClosedForm: return "naive";
    case PhiMode::StableForm: return "stable";
    case PhiMode::Series: return "series";
  }
  return "?";
}

inline PhiMode parse_phi_mode(const std::string& s) {
  if (s == "naive") return PhiMode::NaiveClosedForm;
  if (s == "stable") return PhiMode::StableForm;
  if (s == "series") return PhiMode::Series;
  throw std::invalid_argument("unknown phi mode '" + s + "' (expected naive|stable|series)");
}

namespace detail {

// Scalar shims so the binary64 and double-double paths share one body.
inline double log_of(double x) { return std::log(x); }
inline DDReal log_of(DDReal x) { return log(x); }
inline double log1p_of(double x) { return std::log1p(x); }
inline DDReal log1p_of(DDReal x) { return log1p(x); }

template <class T>
T two_pi() {
  if constexpr (std::is_same_v<T, DDReal>) {
    return dd_const::two_pi;
  } else {
    return T(2.0 * M_PI);
  }
}

}  // namespace detail

/// Three-log closed form ((l+1)log(l+1) - 2l log l + (l-1)log(l-1)) / 2pi,
/// with 0 log 0 = 0 and phi(-l) = -phi(l).
template <class T = double>
T phi_naive(std::int64_t l) {
  if (l == 0) return T(0.0);
  if (l < 0) return -phi_naive<T>(-l);
  const T x(static_cast<double>(l));
  const T one(1.0);
  const T t1 = (x + one) * detail::log_of(x + one);
  const T t2 = T(2.0) * x * detail::log_of(x);
  const T t3 = (l == 1) ? T(0.0) : (x - one) * detail::log_of(x - one);
  return (t1 - t2 + t3) / detail::two_pi<T>();
}

/// (x log(1 - 1/x^2) + log(1 + 2/(x-1))) / 2pi. No cancellation between
/// leading terms. Requires |l| >= 2.
template <class T = double>
T phi_stable(std::int64_t l) {
  if (l >= -1 && l <= 1) {
    throw std::domain_error("phi_stable requires |l| >= 2, got " + std::to_string(l));
  }
  if (l < 0) return -phi_stable<T>(-l);
  const T x(static_cast<double>(l));
  const T one(1.0);
  const T a = x * detail::log1p_of(-(one / (x * x)));
  const T b = detail::log1p_of(T(2.0) / (x - one));
  return (a + b) / detail::two_pi<T>();
}

/// Partial sum of sum_{r>=1} 1 / ((2r-1) r l^(2r-1)) / 2pi, smallest terms first.
inline double phi_series(std::int64_t l, int terms) {
  if (l >= -1 && l <= 1) {
    throw std::domain_error("phi_series requires |l| >= 2, got " + std::to_string(l));
  }
  if (terms < 1) throw std::invalid_argument("phi_series requires terms >= 1");
  if (l < 0) return -phi_series(-l, terms);
  const double inv = 1.0 / static_cast<double>(l);
  const double inv2 = inv * inv;
  std::vector<double> powers(terms);
  powers[0] = inv;
  for (int r = 1; r < terms; ++r) powers[r] = powers[r - 1] * inv2;
  double sum = 0.0;
  for (int r = terms; r >= 1; --r) {
    sum += powers[r - 1] / ((2.0 * r - 1.0) * r);
  }
  return sum / (2.0 * M_PI);
}

/// Dispatching evaluation used by the matrix builder.
template <class T = double>
T phi(std::int64_t l, PhiMode mode = PhiMode::StableForm) {
  if (mode == PhiMode::NaiveClosedForm || (l >= -1 && l <= 1)) return phi_naive<T>(l);
  if (mode == PhiMode::Series) {
    if constexpr (std::is_same_v<T, double>) {
      return phi_series(l, 40);
    } else {
      return phi_stable<T>(l);
    }
  }
  return phi_stable<T>(l);
}

/// Adaptive quadrature of the defining integral. For cells touching the log
/// singularities at y = 0 or y = 1, the singular log on a neighbourhood of
/// width 1/16 is integrated with its antiderivative t log t - t.
inline quad::QuadResult<double> phi_quad(std::int64_t l, double tol) {
  if (!(tol > 1e-14 && tol < 1e-2)) {
    throw std::invalid_argument("phi_quad tolerance must lie in (1e-14, 1e-2)");
  }
  const double lo = static_cast<double>(l);
  const double hi = lo + 1.0;
  auto log_y = [](double y) { return std::log(std::abs(y)); };
  auto log_y1 = [](double y) { return std::log(std::abs(y - 1.0)); };
  auto full = [&](double y) { return log_y(y) - log_y1(y); };

  constexpr double h = 1.0 / 16.0;
  const double int_log_h = h * std::log(h) - h;  // integral_0^h log t dt
  const double piece_tol = tol * 2.0 * M_PI / 4.0;

  quad::QuadResult<double> out;
  out.converged = true;
  double a = lo;
  double b = hi;
  auto add = [&](const quad::QuadResult<double>& r) {
    out.value += r.value;
    out.error += r.error;
    out.evaluations += r.evaluations;
    out.converged = out.converged && r.converged;
  };
  // Singular point at the left end: y = 0 (l = 0) or y = 1 (l = 1).
  if (l == 0 || l == 1) {
    const bool at_zero = (l == 0);
    out.value += at_zero ? int_log_h : -int_log_h;
    add(at_zero ? quad::integrate([&](double y) { return -log_y1(y); }, lo, lo + h, piece_tol)
                : quad::integrate(log_y, lo, lo + h, piece_tol));
    a = lo + h;
  }
  // Singular point at the right end: y = 1 (l = 0) or y = 0 (l = -1).
  if (l == 0 || l == -1) {
    const bool at_one = (l == 0);
    out.value += at_one ? -int_log_h : int_log_h;
    add(at_one ? quad::integrate(log_y, hi - h, hi, piece_tol)
               : quad::integrate([&](double y) { return -log_y1(y); }, hi - h, hi, piece_tol));
    b = hi - h;
  }
  add(quad::integrate(full, a, b, piece_tol));
  out.value /= 2.0 * M_PI;
  out.error /= 2.0 * M_PI;
  out.converged = out.converged && out.error <= tol;
  return out;
}

}  // namespace qplane
