#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace qplane::quad {

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;  // estimated absolute error
  bool converged = false;
  std::size_t evaluations = 0;
};

namespace detail {

template <class T>
double magnitude(const T& v) {
  return std::abs(v);
}

template <class T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// One 15-point Gauss-Kronrod panel with the embedded 7-point Gauss estimate.
template <class F>
auto gk15(F& f, double a, double b) {
  using T = std::decay_t<decltype(f(a))>;
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  const auto& xk = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T kron = fc * wk[0];
  T gauss = fc * wg[0];
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const T fsum = f(c - h * xk[i]) + f(c + h * xk[i]);
    kron += fsum * wk[i];
    if (i % 2 == 0) gauss += fsum * wg[i / 2];
  }
  return Panel<T>{a, b, kron * h, magnitude(T((kron - gauss) * h))};
}

}  // namespace detail

/// Globally adaptive bisection on 15-point Gauss-Kronrod panels.
/// `abs_tol` bounds the summed panel error estimates. Works for real and
/// complex integrands.
template <class F>
auto integrate(F&& f, double a, double b, double abs_tol, std::size_t max_panels = 4000) {
  using T = std::decay_t<decltype(f(a))>;
  QuadResult<T> out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<detail::Panel<T>> heap;
  auto first = detail::gk15(f, a, b);
  double total_err = first.error;
  T total = first.value;
  heap.push(first);
  std::size_t panels = 1;
  while (total_err > abs_tol && panels < max_panels) {
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {  // interval exhausted
      heap.push(worst);
      break;
    }
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum in deterministic panel order to avoid drift from incremental updates.
  std::vector<detail::Panel<T>> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  total = T{};
  total_err = 0.0;
  for (const auto& p : all) {
    total += p.value;
    total_err += p.error;
  }
  out.value = total;
  out.error = total_err;
  out.converged = total_err <= abs_tol;
  out.evaluations = 15 * (2 * panels - 1);
  return out;
}

/// Gauss-Legendre rule on [-1, 1] with `points` nodes (Newton on P_n).
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int points) : nodes(points), weights(points) {
    const int n = points;
    if (n == 1) {
      nodes[0] = 0.0;
      weights[0] = 2.0;
      return;
    }
    // Returns P_n(x) and sets dp = P_n'(x).
    auto legendre = [n](double x, double& dp) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      return p1;
    };
    for (int i = 0; i < n / 2; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        const double dx = legendre(x, dp) / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      legendre(x, dp);
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      weights[i] = w;
      weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
      double dp = 0.0;
      legendre(0.0, dp);
      nodes[n / 2] = 0.0;
      weights[n / 2] = 2.0 / (dp * dp);
    }
  }

  /// Fixed-rule integral of f over [a, b].
  template <class F>
  auto apply(F&& f, double a, double b) const {
    using T = std::decay_t<decltype(f(a))>;
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    T sum{};
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += f(c + h * nodes[i]) * weights[i];
    return sum * h;
  }
};

}  // namespace qplane::quad
