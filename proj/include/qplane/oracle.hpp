#pragma once

// Independent checks of the matrix entries and of the phase-space picture.
//
// The entry-defining double integrals over a cell pair (y in [j, j+1],
// x in [k, k+1]) have integrands that depend on x - y only, while the
// constraint x + y >= 0 is a half-plane. Integrating along the lines
// x - y = t first leaves a 1D integral of L(t) f(t), where L(t) is the exact
// length of the admissible x-segment. L is piecewise linear with known
// breakpoints, so the 1D integral is split there and the corner
// singularities of 1/(y - x) cancel against L(t) -> 0.
//
// The Wigner distribution of a step function is a finite sum of z-pieces,
// each integrable in closed form in xi (Si and Cin). The rectangle integral
// is then a smooth, oscillatory 1D integral in x handled by composite
// Gauss-Legendre on half-integer panels.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_expint.h>

#include "qplane/errors.hpp"
#include "qplane/phi.hpp"
#include "qplane/qmatrix.hpp"
#include "qplane/quadrature.hpp"

namespace qplane {

/// u = sum_j z_j 1_[j, j+1) over the window indices.
struct StepFunction {
  IndexWindow window{0};
  CVector coeffs;

  StepFunction() : coeffs(1, 0.0) {}
  StepFunction(IndexWindow w, CVector z) : window(w), coeffs(std::move(z)) {
    if (coeffs.size() != static_cast<std::size_t>(w.n())) throw DimensionError("StepFunction: coefficient count");
  }

  std::complex<double> coeff(int j) const {
    return window.contains(j) ? coeffs[window.to_array(j)] : std::complex<double>{0.0, 0.0};
  }
  std::complex<double> operator()(double x) const { return coeff(static_cast<int>(std::floor(x))); }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& c : coeffs) s += std::norm(c);
    return s;
  }

  /// Step function whose quadratic form matches the Rayleigh quotient of a
  /// matrix vector x: sum z_j conj(z_k) a_jk = x^* Q x for z = conj(x).
  static StepFunction from_eigenvector(IndexWindow w, const CVector& x) {
    CVector z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = std::conj(x[i]);
    return {w, std::move(z)};
  }
};

/// sum_{j,k} z_j conj(z_k) a_jk for the step coefficients z.
inline std::complex<double> step_quadratic_form(const QMatrix& q, const StepFunction& u) {
  if (!(q.window() == u.window)) throw DimensionError("step_quadratic_form: window mismatch");
  std::complex<double> s{0.0, 0.0};
  for (int j = q.window().first(); j <= q.window().last(); ++j) {
    for (int k = q.window().first(); k <= q.window().last(); ++k) s += u.coeff(j) * std::conj(u.coeff(k)) * q(j, k);
  }
  return s;
}

namespace oracle_detail {

// Length of {x in [k, k+1] : x - t in [j, j+1], and x + (x - t) >= 0 if half_plane}.
inline double strip_length(double t, int j, int k, bool half_plane) {
  double lo = std::max<double>(k, j + t);
  const double hi = std::min<double>(k + 1, j + 1 + t);
  if (half_plane) lo = std::max(lo, 0.5 * t);
  return std::max(0.0, hi - lo);
}

// Breakpoints of strip_length in t over its support [k-j-1, k-j+1].
inline std::vector<double> strip_breaks(int j, int k, bool half_plane) {
  const double d = k - j;
  std::vector<double> b{d - 1, d, d + 1};
  if (half_plane) {
    for (double c : {2.0 * k, 2.0 * k + 2, -2.0 * j, -2.0 * j - 2}) {
      if (c > d - 1 && c < d + 1) b.push_back(c);
    }
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

template <class F>
quad::QuadResult<std::complex<double>> integrate_strip(F&& f, int j, int k, bool half_plane, double tol,
                                                        std::size_t max_panels) {
  const auto br = strip_breaks(j, k, half_plane);
  quad::QuadResult<std::complex<double>> out;
  out.converged = true;
  const double piece_tol = tol / static_cast<double>(br.size());
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    auto r = quad::integrate(
        [&](double t) { return strip_length(t, j, k, half_plane) * f(t); }, br[i], br[i + 1], piece_tol,
        max_panels);
    out.value += r.value;
    out.error += r.error;
    out.evaluations += r.evaluations;
    out.converged = out.converged && r.converged;
  }
  return out;
}

inline void require(const quad::QuadResult<std::complex<double>>& r, const char* what, double tol) {
  if (!r.converged) {
    throw NumericalError(std::string(what) + ": tolerance " + std::to_string(tol) + " not met (estimate " +
                         std::to_string(r.error) + ")");
  }
}

}  // namespace oracle_detail

/// Entry of the truncated operator A_lambda with kernel
/// H(x+y) e^{i pi (x-y) lambda} sin(pi (x-y) lambda) / (pi (x-y)),
/// integrated over y in [j, j+1] and x in [k, k+1].
inline std::complex<double> entry_via_lambda(int j, int k, double lambda, double tol) {
  if (!(lambda > 0.0)) throw std::invalid_argument("entry_via_lambda: lambda must be positive");
  if (j + k <= -3) return {0.0, 0.0};  // the cells lie strictly below x + y = 0
  auto kernel = [lambda](double t) {
    const double u = M_PI * t * lambda;
    const double sinc = std::abs(u) < 1e-6 ? 1.0 - u * u / 6.0 : std::sin(u) / u;
    return std::polar(lambda * sinc, u);
  };
  const std::size_t panels = 200 + static_cast<std::size_t>(40.0 * lambda);
  const auto r = oracle_detail::integrate_strip(kernel, j, k, true, tol, panels);
  oracle_detail::require(r, "entry_via_lambda", tol);
  return r.value;
}

/// (1 / 2 i pi) * integral of H(x+y) 1[x <= 0] 1[y >= 0] / (y - x) over
/// y in [j, j+1], x in [k, k+1]. Zero unless j >= 0 and k <= -1.
inline std::complex<double> b_integral(int j, int k, double tol) {
  if (j < 0 || k > -1 || j + k <= -2) return {0.0, 0.0};
  auto f = [](double t) { return std::complex<double>(-1.0 / t, 0.0); };  // 1/(y - x) with t = x - y
  const auto r = oracle_detail::integrate_strip(f, j, k, true, tol * 2.0 * M_PI, 4000);
  oracle_detail::require(r, "b_integral", tol);
  return r.value / std::complex<double>(0.0, 2.0 * M_PI);
}

/// Contribution of the bounded part for j, k >= 0: 1/2 on the diagonal,
/// otherwise (1 / 2 i pi) * integral of 1 / (y - x) over the cell pair.
inline std::complex<double> c_integral(int j, int k, double tol) {
  if (j < 0 || k < 0) return {0.0, 0.0};
  if (j == k) return {0.5, 0.0};
  auto f = [](double t) { return std::complex<double>(-1.0 / t, 0.0); };
  const auto r = oracle_detail::integrate_strip(f, j, k, false, tol * 2.0 * M_PI, 4000);
  oracle_detail::require(r, "c_integral", tol);
  return r.value / std::complex<double>(0.0, 2.0 * M_PI);
}

/// Decomposition a_jk = c_jk + b_jk - b_kj evaluated by quadrature.
inline std::complex<double> entry_via_decomposition(int j, int k, double tol) {
  return c_integral(j, k, tol) + b_integral(j, k, tol) - b_integral(k, j, tol);
}

namespace wigner_detail {

struct Piece {
  int j;
  int k;
  double alpha;  // z-interval [alpha, beta] on which u(x + z/2) conj(u(x - z/2)) = z_j conj(z_k)
  double beta;
};

// Nonzero z-pieces at position x. Only cell pairs with j + k in {m - 1, m},
// m = floor(2x), overlap.
inline std::vector<Piece> pieces(const StepFunction& u, double x) {
  std::vector<Piece> out;
  const auto& w = u.window;
  const int m = static_cast<int>(std::floor(2.0 * x));
  for (int s = m - 1; s <= m; ++s) {
    for (int j = w.first(); j <= w.last(); ++j) {
      const int k = s - j;
      if (!w.contains(k)) continue;
      const double a = std::max(2.0 * (j - x), 2.0 * (x - k - 1));
      const double b = std::min(2.0 * (j + 1 - x), 2.0 * (x - k));
      if (b > a) out.push_back({j, k, a, b});
    }
  }
  return out;
}

// Cin(t) = integral_0^t (1 - cos s) / s ds.
inline double cin(double t) {
  t = std::abs(t);
  if (t == 0.0) return 0.0;
  if (t < 1.0) {
    // sum_{k>=1} (-1)^{k+1} t^{2k} / (2k (2k)!)
    const double t2 = t * t;
    double term = t2 / 2.0;  // t^2 / 2!
    double sum = 0.0;
    for (int k = 1; k < 30; ++k) {
      sum += (k % 2 == 1 ? 1.0 : -1.0) * term / (2.0 * k);
      term *= t2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
      if (term < 1e-20 * sum) break;
    }
    return sum;
  }
  gsl_sf_result ci;
  if (gsl_sf_Ci_e(t, &ci) != GSL_SUCCESS) throw NumericalError("Ci evaluation failed");
  return 0.57721566490153286061 + std::log(t) - ci.val;
}

inline double si(double t) {
  gsl_sf_result r;
  if (gsl_sf_Si_e(t, &r) != GSL_SUCCESS) throw NumericalError("Si evaluation failed");
  return r.val;
}

// G(c) with integral_0^a (e^{-2 i pi alpha xi} - e^{-2 i pi beta xi}) / (2 i pi xi) dxi = G(alpha) - G(beta).
inline std::complex<double> g_antiderivative(double c, double a) {
  const double t = 2.0 * M_PI * c * a;
  return {-si(t) / (2.0 * M_PI), cin(t) / (2.0 * M_PI)};
}

// Fixed-size memo of G keyed on the exact endpoint value.
class GCache {
 public:
  explicit GCache(double a) : a_(a) {}
  std::complex<double> operator()(double c) {
    auto it = memo_.find(c);
    if (it != memo_.end()) return it->second;
    const auto v = g_antiderivative(c, a_);
    memo_.emplace(c, v);
    return v;
  }
  void clear() { memo_.clear(); }

 private:
  double a_;
  std::unordered_map<double, std::complex<double>> memo_;
};

}  // namespace wigner_detail

/// W(u,u)(x, xi) = integral e^{-2 i pi z xi} u(x + z/2) conj(u(x - z/2)) dz,
/// complex as computed (the imaginary part is rounding residue).
inline std::complex<double> wigner_step_eval_complex(const StepFunction& u, double x, double xi) {
  std::complex<double> s{0.0, 0.0};
  for (const auto& p : wigner_detail::pieces(u, x)) {
    const auto c = u.coeff(p.j) * std::conj(u.coeff(p.k));
    std::complex<double> piece;
    if (xi == 0.0) {
      piece = p.beta - p.alpha;
    } else {
      piece = std::polar(std::sin(M_PI * (p.beta - p.alpha) * xi) / (M_PI * xi), -M_PI * (p.alpha + p.beta) * xi);
    }
    s += c * piece;
  }
  return s;
}

inline double wigner_step_eval(const StepFunction& u, double x, double xi) {
  return wigner_step_eval_complex(u, x, xi).real();
}

/// integral_{-A}^{A} W(u,u)(x, xi) dxi in closed form. Tends to |u(x)|^2.
inline double wigner_xi_marginal(const StepFunction& u, double x, double big_a) {
  std::complex<double> s{0.0, 0.0};
  for (const auto& p : wigner_detail::pieces(u, x)) {
    const auto c = u.coeff(p.j) * std::conj(u.coeff(p.k));
    s += c * (wigner_detail::si(2.0 * M_PI * p.beta * big_a) - wigner_detail::si(2.0 * M_PI * p.alpha * big_a)) /
         M_PI;
  }
  return s.real();
}

/// x-range outside which W(u,u)(x, .) vanishes.
inline std::pair<double, double> wigner_x_support(const StepFunction& u) {
  return {static_cast<double>(u.window.first()), static_cast<double>(u.window.last() + 1)};
}

/// integral over [0,a]^2 of W(u,u). The xi-integral is exact (Si/Cin), the
/// x-integral is composite Gauss-Legendre on half-integer panels with at
/// least max(grid, 16 a) nodes per unit length (W oscillates in x with
/// period 1/(2a) after the xi-integration).
inline double wigner_rect_integral(const StepFunction& u, double a, int grid = 64) {
  if (!(a > 0.0)) throw std::invalid_argument("wigner_rect_integral: a must be positive");
  if (grid < 64) throw std::invalid_argument("wigner_rect_integral: grid must be >= 64");
  constexpr int kRule = 16;
  static const quad::GaussLegendre gl(kRule);
  const auto [s0, s1] = wigner_x_support(u);
  const double x0 = std::max(0.0, s0);
  const double x1 = std::min(a, s1);
  if (!(x1 > x0)) return 0.0;
  const double per_unit = std::max<double>(grid, 16.0 * a);
  const int sub = static_cast<int>(std::ceil(0.5 * per_unit / kRule));
  wigner_detail::GCache g(a);

  auto integrand = [&](double x) {
    std::complex<double> s{0.0, 0.0};
    for (const auto& p : wigner_detail::pieces(u, x)) {
      s += u.coeff(p.j) * std::conj(u.coeff(p.k)) * (g(p.alpha) - g(p.beta));
    }
    g.clear();
    return s.real();
  };

  double total = 0.0;
  // Panels [h/2, (h+1)/2] clipped to [x0, x1].
  const long h0 = static_cast<long>(std::floor(2.0 * x0));
  const long h1 = static_cast<long>(std::ceil(2.0 * x1));
  for (long h = h0; h < h1; ++h) {
    const double p0 = std::max(x0, 0.5 * h);
    const double p1 = std::min(x1, 0.5 * (h + 1));
    if (!(p1 > p0)) continue;
    const double step = (p1 - p0) / sub;
    for (int s = 0; s < sub; ++s) total += gl.apply(integrand, p0 + s * step, s + 1 == sub ? p1 : p0 + (s + 1) * step);
  }
  return total;
}

/// Brute-force tensor Gauss-Legendre over [0,a]^2 of wigner_step_eval.
/// `grid` is the node count per unit length in both directions and must
/// resolve the fastest oscillation: grid >= 8 max(Z, 2a) with Z the widest
/// z-extent of u.
inline double wigner_rect_integral_tensor(const StepFunction& u, double a, int grid) {
  if (!(a > 0.0)) throw std::invalid_argument("wigner_rect_integral_tensor: a must be positive");
  if (grid < 64) throw std::invalid_argument("wigner_rect_integral_tensor: grid must be >= 64");
  const auto [s0, s1] = wigner_x_support(u);
  const double z_max = s1 - s0;
  const double need = 8.0 * std::max(z_max, 2.0 * a);
  if (grid < need) {
    throw CapacityError("wigner_rect_integral_tensor: grid " + std::to_string(grid) + " below resolution guard " +
                        std::to_string(need));
  }
  constexpr int kRule = 16;
  static const quad::GaussLegendre gl(kRule);
  const double x0 = std::max(0.0, s0);
  const double x1 = std::min(a, s1);
  if (!(x1 > x0)) return 0.0;
  const int sub_x = static_cast<int>(std::ceil(0.5 * grid / kRule));
  const int sub_xi = static_cast<int>(std::ceil(a * grid / kRule));
  auto xi_integral = [&](double x) {
    double s = 0.0;
    const double step = a / sub_xi;
    for (int i = 0; i < sub_xi; ++i) {
      s += gl.apply([&](double xi) { return wigner_step_eval(u, x, xi); }, i * step, (i + 1) * step);
    }
    return s;
  };
  double total = 0.0;
  const long h0 = static_cast<long>(std::floor(2.0 * x0));
  const long h1 = static_cast<long>(std::ceil(2.0 * x1));
  for (long h = h0; h < h1; ++h) {
    const double p0 = std::max(x0, 0.5 * h);
    const double p1 = std::min(x1, 0.5 * (h + 1));
    if (!(p1 > p0)) continue;
    const double step = (p1 - p0) / sub_x;
    for (int s = 0; s < sub_x; ++s) total += gl.apply(xi_integral, p0 + s * step, p0 + (s + 1) * step);
  }
  return total;
}

}  // namespace qplane
