#pragma once

// Extremal eigenpairs of the Hermitian matrix Q_F.
//
// top_eigs: the algebraically largest eigenvalues, by inverse iteration on
// (sigma I - D) where D is Q with every converged pair moved to the bottom of
// the spectrum (shifted Hotelling deflation). The shift sigma always sits
// above the largest eigenvalue of D, so sigma I - D is positive definite and
// its Cholesky factor exists; a failed factorization means the shift was too
// low and the previous one is kept.
//
// min_eig: plain power iteration on sigma I - Q with sigma the analytic upper
// bound of the spectrum.
//
// full_eig: cyclic complex Jacobi, the small-n reference.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qplane/errors.hpp"
#include "qplane/qmatrix.hpp"

namespace qplane {

struct SpectrumResult {
  std::vector<double> eigenvalues;  // descending
  std::vector<CVector> eigenvectors;
  std::vector<double> residuals;
  std::vector<int> iterations;

  std::size_t size() const noexcept { return eigenvalues.size(); }
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, SpectrumResult best)
      : NumericalError(what), best_(std::move(best)) {}
  const SpectrumResult& best() const noexcept { return best_; }

 private:
  SpectrumResult best_;
};

/// Analytic enclosure of the spectrum of the full operator (and of every Q_F).
inline double spectral_upper_bound() { return 0.5 + std::sqrt(M_PI + 1.0) / (2.0 * std::sqrt(M_PI)); }
inline double spectral_lower_bound() { return -1.0 / std::sqrt(M_PI); }

inline double residual_tolerance(double lambda) { return 1e-12 * (1.0 + std::abs(lambda)); }

namespace linalg {

inline double norm2(std::span<const std::complex<double>> x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return std::sqrt(s);
}

inline std::complex<double> dot(std::span<const std::complex<double>> x, std::span<const std::complex<double>> y) {
  std::complex<double> s{0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

inline void normalize(CVector& x) {
  const double nrm = norm2(x);
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("cannot normalize a zero or non-finite vector");
  for (auto& v : x) v /= nrm;
}

/// Rotate x so its largest-modulus component (first one on ties) is real positive.
inline void fix_phase(CVector& x) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (std::abs(x[i]) > std::abs(x[best])) best = i;
  }
  if (x.empty() || x[best] == 0.0) return;
  const std::complex<double> ph = std::conj(x[best]) / std::abs(x[best]);
  for (auto& v : x) v *= ph;
  x[best] = std::abs(x[best]);
}

/// Deterministic complex start vector with components in the unit square.
inline CVector seeded_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto unit = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5; };
  CVector x(n);
  for (auto& v : x) {
    const double re = unit();
    const double im = unit();
    v = {re, im};
  }
  normalize(x);
  return x;
}

/// Dense complex Cholesky A = L L^* (lower factor, row-major). Returns false
/// when a pivot is not positive, i.e. A is not numerically positive definite.
class Cholesky {
 public:
  bool factor(const std::vector<std::complex<double>>& a, std::size_t n) {
    n_ = n;
    l_.assign(n * n, {0.0, 0.0});
    for (std::size_t j = 0; j < n; ++j) {
      double d = a[j * n + j].real();
      for (std::size_t p = 0; p < j; ++p) d -= std::norm(l_[j * n + p]);
      if (!(d > 0.0)) return false;
      const double ljj = std::sqrt(d);
      l_[j * n + j] = ljj;
      for (std::size_t i = j + 1; i < n; ++i) {
        std::complex<double> s = a[i * n + j];
        for (std::size_t p = 0; p < j; ++p) s -= l_[i * n + p] * std::conj(l_[j * n + p]);
        l_[i * n + j] = s / ljj;
      }
    }
    return true;
  }

  /// Solves L L^* x = b in place.
  void solve(CVector& b) const {
    const std::size_t n = n_;
    for (std::size_t i = 0; i < n; ++i) {
      std::complex<double> s = b[i];
      for (std::size_t p = 0; p < i; ++p) s -= l_[i * n + p] * b[p];
      b[i] = s / l_[i * n + i].real();
    }
    for (std::size_t ii = n; ii-- > 0;) {
      std::complex<double> s = b[ii];
      for (std::size_t p = ii + 1; p < n; ++p) s -= std::conj(l_[p * n + ii]) * b[p];
      b[ii] = s / l_[ii * n + ii].real();
    }
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::complex<double>> l_;
};

}  // namespace linalg

struct EigenPair {
  double value = 0.0;
  CVector vector;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

// Rayleigh quotient and residual of a unit vector against the original Q.
inline void rayleigh_and_residual(const QMatrix& q, const CVector& x, double& lambda, double& residual) {
  const CVector qx = matvec(q, x);
  lambda = linalg::dot(x, qx).real();
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r += std::norm(qx[i] - lambda * x[i]);
  residual = std::sqrt(r);
}

inline constexpr std::uint64_t kSeedBase = 0x5eed0f0a11ce5ULL;

}  // namespace detail

/// The m algebraically largest eigenpairs, descending. `tol` bounds the
/// Rayleigh-quotient increment; in addition every residual must satisfy
/// ||Qx - lambda x|| <= 1e-12 (1 + |lambda|).
inline SpectrumResult top_eigs(const QMatrix& q, int m, double tol = 1e-14, int max_iter = 20000) {
  const std::size_t n = q.n();
  if (m < 1 || static_cast<std::size_t>(m) > n) {
    throw std::invalid_argument("top_eigs: m must lie in [1, " + std::to_string(n) + "], got " + std::to_string(m));
  }
  if (!(tol >= 1e-15)) throw std::invalid_argument("top_eigs: tol must be >= 1e-15");

  const double bottom = spectral_lower_bound();
  const double top = spectral_upper_bound();
  std::vector<std::complex<double>> deflated(q.storage().begin(), q.storage().end());
  SpectrumResult out;
  linalg::Cholesky chol;
  std::vector<std::complex<double>> shifted(n * n);

  auto try_shift = [&](double sigma) {
    for (std::size_t i = 0; i < n * n; ++i) shifted[i] = -deflated[i];
    for (std::size_t i = 0; i < n; ++i) shifted[i * n + i] += sigma;
    return chol.factor(shifted, n);
  };

  for (int stage = 0; stage < m; ++stage) {
    double sigma = top;
    if (stage > 0) {
      const double prev = out.eigenvalues.back();
      const double s = prev + 1e-5 + 10.0 * out.residuals.back();
      if (s < top && try_shift(s)) {
        sigma = s;
      } else if (!try_shift(top)) {
        throw NumericalError("top_eigs: shifted matrix is not positive definite");
      }
    } else if (!try_shift(top)) {
      throw NumericalError("top_eigs: shifted matrix is not positive definite");
    }

    CVector x = linalg::seeded_vector(n, detail::kSeedBase + static_cast<std::uint64_t>(stage));
    EigenPair pair;
    double lambda_prev = std::numeric_limits<double>::infinity();
    bool refined = false;
    for (int it = 1; it <= max_iter; ++it) {
      chol.solve(x);
      linalg::normalize(x);
      double lambda = 0.0;
      double res = 0.0;
      detail::rayleigh_and_residual(q, x, lambda, res);
      pair.value = lambda;
      pair.residual = res;
      pair.iterations = it;
      if (std::abs(lambda - lambda_prev) <= tol && res <= residual_tolerance(lambda)) {
        pair.converged = true;
        break;
      }
      // Once the iterate has settled, move the shift next to the eigenvalue.
      if (!refined && std::abs(lambda - lambda_prev) < 1e-9) {
        refined = true;
        const double s = lambda + 4.0 * res + 1e-10;
        if (s < sigma) {
          if (try_shift(s)) {
            sigma = s;
          } else if (!try_shift(sigma)) {
            throw NumericalError("top_eigs: lost positive definiteness while refining the shift");
          }
        }
      }
      lambda_prev = lambda;
    }
    linalg::fix_phase(x);
    pair.vector = x;
    out.eigenvalues.push_back(pair.value);
    out.eigenvectors.push_back(pair.vector);
    out.residuals.push_back(pair.residual);
    out.iterations.push_back(pair.iterations);
    if (!pair.converged) {
      throw ConvergenceError("top_eigs: eigenvalue " + std::to_string(stage + 1) + " did not converge in " +
                                 std::to_string(max_iter) + " iterations (residual " +
                                 std::to_string(pair.residual) + ")",
                             out);
    }
    // D <- D - (lambda - bottom) x x^*: the pair now sits at the bottom of the spectrum.
    const double w = pair.value - bottom;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) deflated[i * n + j] -= w * x[i] * std::conj(x[j]);
    }
  }

  // Deflation order already gives descending values up to rounding; sort anyway.
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return out.eigenvalues[a] > out.eigenvalues[b]; });
  SpectrumResult sorted;
  for (auto i : order) {
    sorted.eigenvalues.push_back(out.eigenvalues[i]);
    sorted.eigenvectors.push_back(std::move(out.eigenvectors[i]));
    sorted.residuals.push_back(out.residuals[i]);
    sorted.iterations.push_back(out.iterations[i]);
  }
  return sorted;
}

/// Smallest eigenpair by power iteration on sigma I - Q.
inline EigenPair min_eig_pair(const QMatrix& q, double tol = 1e-14, int max_iter = 50000) {
  if (!(tol >= 1e-15)) throw std::invalid_argument("min_eig: tol must be >= 1e-15");
  const std::size_t n = q.n();
  const double sigma = spectral_upper_bound();
  CVector x = linalg::seeded_vector(n, detail::kSeedBase ^ 0xffffULL);
  EigenPair pair;
  double lambda_prev = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    const CVector qx = matvec(q, x);
    for (std::size_t i = 0; i < n; ++i) x[i] = sigma * x[i] - qx[i];
    linalg::normalize(x);
    double lambda = 0.0;
    double res = 0.0;
    detail::rayleigh_and_residual(q, x, lambda, res);
    pair.value = lambda;
    pair.residual = res;
    pair.iterations = it;
    if (std::abs(lambda - lambda_prev) <= tol && res <= residual_tolerance(lambda)) {
      pair.converged = true;
      break;
    }
    lambda_prev = lambda;
  }
  linalg::fix_phase(x);
  pair.vector = std::move(x);
  if (!pair.converged) {
    SpectrumResult best{{pair.value}, {pair.vector}, {pair.residual}, {pair.iterations}};
    throw ConvergenceError("min_eig: no convergence in " + std::to_string(max_iter) + " iterations", best);
  }
  return pair;
}

inline double min_eig(const QMatrix& q, double tol = 1e-14, int max_iter = 50000) {
  return min_eig_pair(q, tol, max_iter).value;
}

inline constexpr std::size_t kMaxJacobiSize = 600;

/// Complete eigendecomposition by cyclic complex Jacobi rotations.
inline SpectrumResult full_eig(const QMatrix& q, int max_sweeps = 60) {
  const std::size_t n = q.n();
  if (n > kMaxJacobiSize) {
    throw CapacityError("full_eig: n = " + std::to_string(n) + " exceeds " + std::to_string(kMaxJacobiSize));
  }
  std::vector<std::complex<double>> a(q.storage().begin(), q.storage().end());
  std::vector<std::complex<double>> v(n * n, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a[i * n + j]);
    return std::sqrt(s);
  };
  double frob = 0.0;
  for (const auto& z : a) frob += std::norm(z);
  frob = std::sqrt(frob);

  int sweep = 0;
  for (; sweep < max_sweeps && off_norm() > 1e-15 * frob; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t qq = p + 1; qq < n; ++qq) {
        const std::complex<double> apq = a[p * n + qq];
        const double r = std::abs(apq);
        if (r == 0.0) continue;
        const std::complex<double> e = std::conj(apq) / r;  // e^{-i phi}
        const double app = a[p * n + p].real();
        const double aqq = a[qq * n + qq].real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // U = [[c, s], [-s e, c e]] on (p, q); A <- U^* A U, V <- V U.
        for (std::size_t i = 0; i < n; ++i) {
          const std::complex<double> aip = a[i * n + p];
          const std::complex<double> aiq = a[i * n + qq];
          a[i * n + p] = c * aip - s * e * aiq;
          a[i * n + qq] = s * aip + c * e * aiq;
          const std::complex<double> vip = v[i * n + p];
          const std::complex<double> viq = v[i * n + qq];
          v[i * n + p] = c * vip - s * e * viq;
          v[i * n + qq] = s * vip + c * e * viq;
        }
        const std::complex<double> ec = std::conj(e);
        for (std::size_t j = 0; j < n; ++j) {
          const std::complex<double> apj = a[p * n + j];
          const std::complex<double> aqj = a[qq * n + j];
          a[p * n + j] = c * apj - s * ec * aqj;
          a[qq * n + j] = s * apj + c * ec * aqj;
        }
        a[p * n + qq] = 0.0;
        a[qq * n + p] = 0.0;
        a[p * n + p] = a[p * n + p].real();
        a[qq * n + qq] = a[qq * n + qq].real();
      }
    }
  }
  if (off_norm() > 1e-12 * frob) throw NumericalError("full_eig: Jacobi sweeps did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * n + x].real() > a[y * n + y].real(); });
  SpectrumResult out;
  for (auto col : order) {
    CVector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = v[i * n + col];
    linalg::normalize(x);
    linalg::fix_phase(x);
    double lambda = 0.0;
    double res = 0.0;
    detail::rayleigh_and_residual(q, x, lambda, res);
    out.eigenvalues.push_back(lambda);
    out.eigenvectors.push_back(std::move(x));
    out.residuals.push_back(res);
    out.iterations.push_back(sweep);
  }
  return out;
}

}  // namespace qplane
