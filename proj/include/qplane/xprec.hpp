#pragma once

// Double-double arithmetic: an unevaluated sum hi + lo of two binary64
// values, roughly 106 significant bits. Used as the high-precision reference
// when estimating the entrywise error of the binary64 matrix.

#include <cmath>
#include <complex>
#include <limits>
#include <ostream>

namespace qplane {

namespace eft {

/// Error-free sum: s + e == a + b exactly.
inline void two_sum(double a, double b, double& s, double& e) noexcept {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

/// Requires |a| >= |b| (or a == 0).
inline void quick_two_sum(double a, double b, double& s, double& e) noexcept {
  s = a + b;
  e = b - (s - a);
}

/// Error-free product through a fused multiply-add.
inline void two_prod(double a, double b, double& p, double& e) noexcept {
  p = a * b;
  e = std::fma(a, b, -p);
}

}  // namespace eft

class DDReal {
 public:
  constexpr DDReal() noexcept = default;
  constexpr DDReal(double x) noexcept : hi_(x), lo_(0.0) {}  // NOLINT(implicit)
  DDReal(double hi, double lo) noexcept { eft::two_sum(hi, lo, hi_, lo_); }

  /// Construct from components that are already non-overlapping.
  static constexpr DDReal raw(double hi, double lo) noexcept {
    DDReal r;
    r.hi_ = hi;
    r.lo_ = lo;
    return r;
  }

  constexpr double hi() const noexcept { return hi_; }
  constexpr double lo() const noexcept { return lo_; }
  explicit constexpr operator double() const noexcept { return hi_ + lo_; }

  /// Overflow or NaN anywhere in a computation ends here.
  bool finite() const noexcept { return std::isfinite(hi_) && std::isfinite(lo_); }

  DDReal renormalized() const noexcept {
    DDReal r;
    eft::two_sum(hi_, lo_, r.hi_, r.lo_);
    return r;
  }

  friend DDReal operator-(DDReal a) noexcept { return raw(-a.hi_, -a.lo_); }

  friend DDReal operator+(DDReal a, DDReal b) noexcept {
    double s, e, t, f;
    eft::two_sum(a.hi_, b.hi_, s, e);
    eft::two_sum(a.lo_, b.lo_, t, f);
    e += t;
    eft::quick_two_sum(s, e, s, e);
    e += f;
    DDReal r;
    eft::quick_two_sum(s, e, r.hi_, r.lo_);
    return finalize(r);
  }
  friend DDReal operator-(DDReal a, DDReal b) noexcept { return a + (-b); }

  friend DDReal operator*(DDReal a, DDReal b) noexcept {
    double p, e;
    eft::two_prod(a.hi_, b.hi_, p, e);
    e += a.hi_ * b.lo_ + a.lo_ * b.hi_;
    DDReal r;
    eft::quick_two_sum(p, e, r.hi_, r.lo_);
    return finalize(r);
  }

  // Newton-refined quotient. Oracle grade (about 2^-100 relative), not used on
  // the certified path.
  friend DDReal operator/(DDReal a, DDReal b) noexcept {
    const double q1 = a.hi_ / b.hi_;
    DDReal r = a - b * DDReal(q1);
    const double q2 = r.hi_ / b.hi_;
    r = r - b * DDReal(q2);
    const double q3 = r.hi_ / b.hi_;
    DDReal q;
    eft::quick_two_sum(q1, q2, q.hi_, q.lo_);
    return finalize(q + DDReal(q3));
  }

  DDReal& operator+=(DDReal b) noexcept { return *this = *this + b; }
  DDReal& operator-=(DDReal b) noexcept { return *this = *this - b; }
  DDReal& operator*=(DDReal b) noexcept { return *this = *this * b; }
  DDReal& operator/=(DDReal b) noexcept { return *this = *this / b; }

  friend bool operator==(DDReal a, DDReal b) noexcept { return a.hi_ == b.hi_ && a.lo_ == b.lo_; }
  friend bool operator<(DDReal a, DDReal b) noexcept {
    return a.hi_ < b.hi_ || (a.hi_ == b.hi_ && a.lo_ < b.lo_);
  }
  friend bool operator>(DDReal a, DDReal b) noexcept { return b < a; }
  friend bool operator<=(DDReal a, DDReal b) noexcept { return !(b < a); }
  friend bool operator>=(DDReal a, DDReal b) noexcept { return !(a < b); }

  friend std::ostream& operator<<(std::ostream& os, DDReal a) {
    return os << '(' << a.hi_ << " + " << a.lo_ << ')';
  }

 private:
  static DDReal finalize(DDReal r) noexcept {
    if (!std::isfinite(r.hi_)) r.lo_ = 0.0;
    return r;
  }

  double hi_ = 0.0;
  double lo_ = 0.0;
};

inline DDReal abs(DDReal a) noexcept { return a.hi() < 0.0 ? -a : a; }

inline DDReal ldexp(DDReal a, int e) noexcept {
  return DDReal::raw(std::ldexp(a.hi(), e), std::ldexp(a.lo(), e));
}

namespace dd_const {
inline const DDReal pi = DDReal::raw(3.141592653589793116e+00, 1.224646799147353207e-16);
inline const DDReal two_pi = DDReal::raw(6.283185307179586232e+00, 2.449293598294706414e-16);
inline const DDReal ln2 = DDReal::raw(6.931471805599452862e-01, 2.319046813846299558e-17);
}  // namespace dd_const

/// exp by reduction x = m ln2 + r, r scaled by 2^-10, Taylor, then squaring.
inline DDReal exp(DDReal x) noexcept {
  if (x.hi() > 709.0) return DDReal(std::numeric_limits<double>::infinity());
  if (x.hi() < -745.0) return DDReal(0.0);
  const double m = std::nearbyint(x.hi() / dd_const::ln2.hi());
  DDReal r = x - dd_const::ln2 * DDReal(m);
  constexpr int kSquarings = 10;
  r = ldexp(r, -kSquarings);
  // |r| < 3.4e-4, so 12 terms leave a truncation error far below 2^-106.
  DDReal term = r;
  DDReal sum = r;
  for (int i = 2; i <= 12; ++i) {
    term = term * r / DDReal(static_cast<double>(i));
    sum += term;
  }
  // Square (1 + sum) while tracking sum = result - 1 to keep the low bits.
  for (int i = 0; i < kSquarings; ++i) sum = sum * sum + ldexp(sum, 1);
  return ldexp(sum + DDReal(1.0), static_cast<int>(m));
}

/// Natural logarithm: binary64 seed refined by one Newton step on exp.
inline DDReal log(DDReal x) noexcept {
  if (x.hi() <= 0.0) return DDReal(std::numeric_limits<double>::quiet_NaN());
  if (x.hi() == 1.0 && x.lo() == 0.0) return DDReal(0.0);
  const DDReal y0(std::log(x.hi()));
  return y0 + x * exp(-y0) - DDReal(1.0);
}

/// log(1 + t). Small |t| goes through 2 atanh(t / (2 + t)) so the result keeps
/// full relative accuracy.
inline DDReal log1p(DDReal t) noexcept {
  if (!(std::abs(t.hi()) < 0.25)) return log(DDReal(1.0) + t);
  const DDReal s = t / (DDReal(2.0) + t);
  const DDReal s2 = s * s;
  DDReal power = s;
  DDReal sum = s;
  for (int k = 3; k < 200; k += 2) {
    power *= s2;
    const DDReal term = power / DDReal(static_cast<double>(k));
    sum += term;
    if (std::abs(term.hi()) < std::abs(sum.hi()) * 0x1.0p-110) break;
  }
  return ldexp(sum, 1);
}

/// Complex number over double-double components.
struct DDComplex {
  DDReal re;
  DDReal im;

  constexpr DDComplex() noexcept = default;
  constexpr DDComplex(DDReal r, DDReal i = DDReal()) noexcept : re(r), im(i) {}  // NOLINT

  friend DDComplex operator+(const DDComplex& a, const DDComplex& b) noexcept {
    return {a.re + b.re, a.im + b.im};
  }
  friend DDComplex operator-(const DDComplex& a, const DDComplex& b) noexcept {
    return {a.re - b.re, a.im - b.im};
  }
  friend DDComplex operator*(const DDComplex& a, const DDComplex& b) noexcept {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  DDComplex& operator+=(const DDComplex& b) noexcept { return *this = *this + b; }

  friend bool operator==(const DDComplex& a, const DDComplex& b) noexcept {
    return a.re == b.re && a.im == b.im;
  }

  std::complex<double> to_complex() const noexcept {
    return {static_cast<double>(re), static_cast<double>(im)};
  }
};

inline DDComplex conj(const DDComplex& z) noexcept { return {z.re, -z.im}; }

}  // namespace qplane
