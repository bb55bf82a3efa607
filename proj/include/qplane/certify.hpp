#pragma once

// Certified lower bound on the spectral radius of Q_F.
//
// The Rayleigh quotient R^N = |<Q^N x, x>^N| is evaluated in a fixed
// operation order (products P^N, left-to-right sums S^N, modulus last) so the
// rounding model below applies verbatim. With delta a bound on the entrywise
// error |Q^N_ij - a_ij| and n eps <= delta <= 0.1, the true quotient satisfies
// |R - R^N| <= E^N = 14 delta n + 5 delta |R^N|, hence
// rho(Q_F) >= R^N - E^N.
//
// Every bound below is itself computed in binary64 and then multiplied by
// 1 + 2^-30 to absorb the rounding of the bound evaluation.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qplane/errors.hpp"
#include "qplane/qmatrix.hpp"
#include "qplane/spectrum.hpp"

namespace qplane {

inline constexpr double kBoundInflation = 1.0 + 0x1.0p-30;
inline constexpr double kDefaultDelta = 1e-13;

struct MachineConstants {
  double eps_r = 0x1.0p-52;
  double eps = std::sqrt(2.0) * (2.0 + 0x1.0p-52) * 0x1.0p-52 * kBoundInflation;
};

/// (1 + eps)^m - 1 without cancellation: binary powering on u = (1+eps)^j - 1
/// using (1+u)(1+v) - 1 = u + v + uv. Inflated upward.
inline double pow1p_minus_one(double eps, std::uint64_t m) {
  double result = 0.0;
  double base = eps;
  while (m > 0) {
    if (m & 1U) result = result + base + result * base;
    base = base + base + base * base;
    m >>= 1U;
  }
  return result * kBoundInflation;
}

/// Error of a computed sum a + b whose inputs carry errors eta_a, eta_b.
inline double sum2_bound(double abs_a, double abs_b, double eta_a, double eta_b, double eps) {
  if (abs_a < 0 || abs_b < 0 || eta_a < 0 || eta_b < 0 || eps < 0) {
    throw std::invalid_argument("sum2_bound: inputs must be nonnegative");
  }
  return (eps * (abs_a + abs_b) + eta_a * (1.0 + eps) + eta_b * (1.0 + eps)) * kBoundInflation;
}

/// Error of a left-to-right sum of m terms with magnitudes |a_k| and input errors eta_k.
inline double sumn_bound(std::span<const double> magnitudes, std::span<const double> etas, double eps) {
  if (magnitudes.size() != etas.size()) throw DimensionError("sumn_bound: length mismatch");
  if (magnitudes.size() < 2) throw std::invalid_argument("sumn_bound: needs at least two terms");
  double mag = 0.0;
  double eta = 0.0;
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    mag += magnitudes[i];
    eta += etas[i];
  }
  const double g = pow1p_minus_one(eps, magnitudes.size() - 1);
  return (g * mag + (1.0 + g) * eta) * kBoundInflation;
}

/// Error of a computed product a b when b carries an error eta_b.
inline double prod_bound(double abs_a, double abs_b, double eta_b, double eps) {
  if (abs_a < 0 || abs_b < 0 || eta_b < 0 || eps < 0) {
    throw std::invalid_argument("prod_bound: inputs must be nonnegative");
  }
  return (eps * abs_a * abs_b + eta_b * abs_a * (1.0 + eps)) * kBoundInflation;
}

inline double alpha_fn(std::size_t n, double delta, double eps) {
  if (n < 2 || !(delta > 0) || !(eps > 0)) throw std::invalid_argument("alpha_fn: needs n >= 2, delta, eps > 0");
  const double g = pow1p_minus_one(eps, n - 1);
  return (g + (1.0 + g) * (delta * (1.0 + eps) + eps)) * kBoundInflation;
}

inline double beta_fn(std::size_t n, double delta, double eps) {
  if (n < 2 || !(delta > 0) || !(eps > 0)) throw std::invalid_argument("beta_fn: needs n >= 2, delta, eps > 0");
  const double g = pow1p_minus_one(eps, n - 1);
  const double a = alpha_fn(n, delta, eps);
  return (g + (1.0 + g) * (eps + a * (1.0 + eps))) * kBoundInflation;
}

struct AssumptionFlags {
  bool delta_small = false;     // delta <= 0.1
  bool eps_below_delta = false; // eps <= delta
  bool n_eps_below_delta = false;
  bool norm_check = false;      // |(||x||^2)^N - 1| <= eps
  bool entries_below_one = false;

  bool all() const noexcept {
    return delta_small && eps_below_delta && n_eps_below_delta && norm_check && entries_below_one;
  }

  std::vector<std::string> failed() const {
    std::vector<std::string> out;
    if (!delta_small) out.emplace_back("delta <= 0.1");
    if (!eps_below_delta) out.emplace_back("eps <= delta");
    if (!n_eps_below_delta) out.emplace_back("n*eps <= delta");
    if (!norm_check) out.emplace_back("|norm^2 - 1| <= eps");
    if (!entries_below_one) out.emplace_back("|Q_ij| < 1");
    return out;
  }
};

struct ErrorLedger {
  std::size_t n = 0;
  double delta = 0.0;
  double eps = 0.0;
  double eps_r = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double norm_sq_num = 0.0;  // (||x||^2)^N
  double max_abs_entry = 0.0;
  double rayleigh_num = 0.0;  // R^N
  double error_bound = 0.0;   // E^N
  AssumptionFlags assumptions;
};

struct Verdict {
  double certified_lower_bound = 0.0;
  bool exceeded_one = false;
  double lambda_reference = 0.0;  // eigenvalue reported by the solver for x
  ErrorLedger ledger;
};

class AssumptionViolation : public NumericalError {
 public:
  explicit AssumptionViolation(ErrorLedger ledger)
      : NumericalError(message(ledger)), ledger_(std::move(ledger)) {}
  const ErrorLedger& ledger() const noexcept { return ledger_; }

 private:
  static std::string message(const ErrorLedger& l) {
    std::string s = "error-analysis assumption violated:";
    for (const auto& f : l.assumptions.failed()) s += " [" + f + "]";
    return s;
  }
  ErrorLedger ledger_;
};

/// (||x||^2)^N = S^N(P^N(x_1, conj x_1), ..., P^N(x_n, conj x_n)).
inline double norm_sq_certified(std::span<const std::complex<double>> x) {
  std::complex<double> s{0.0, 0.0};
  for (const auto& v : x) s = add_model(s, mul_model(v, std::conj(v)));
  return s.real();
}

/// <Q^N x, x>^N in the certified order; the modulus is taken by the caller.
inline std::complex<double> quadratic_form_certified(const QMatrix& q, std::span<const std::complex<double>> x) {
  const std::size_t n = q.n();
  std::complex<double> total{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = q.row(i);
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) acc = add_model(acc, mul_model(row[j], x[j]));
    total = add_model(total, mul_model(acc, std::conj(x[i])));
  }
  return total;
}

struct CertifiedRayleigh {
  double rayleigh_num = 0.0;
  ErrorLedger ledger;
};

/// R^N together with its fully populated ledger. Throws AssumptionViolation
/// when any hypothesis of the error bound fails.
inline CertifiedRayleigh rayleigh_certified(const QMatrix& q, std::span<const std::complex<double>> x,
                                            double delta = kDefaultDelta) {
  const std::size_t n = q.n();
  if (x.size() != n) throw DimensionError("rayleigh_certified: vector length does not match the matrix");
  const MachineConstants mc;
  ErrorLedger l;
  l.n = n;
  l.delta = delta;
  l.eps = mc.eps;
  l.eps_r = mc.eps_r;
  l.norm_sq_num = norm_sq_certified(x);
  l.max_abs_entry = q.max_abs_entry();
  l.assumptions.delta_small = delta <= 0.1;
  l.assumptions.eps_below_delta = mc.eps <= delta;
  l.assumptions.n_eps_below_delta = static_cast<double>(n) * mc.eps <= delta;
  l.assumptions.norm_check = std::abs(l.norm_sq_num - 1.0) <= mc.eps;
  l.assumptions.entries_below_one = l.max_abs_entry < 1.0;
  if (n >= 2 && delta > 0.0) {
    l.alpha = alpha_fn(n, delta, mc.eps);
    l.beta = beta_fn(n, delta, mc.eps);
  }
  l.rayleigh_num = std::abs(quadratic_form_certified(q, x));
  l.error_bound = (14.0 * delta * static_cast<double>(n) + 5.0 * delta * l.rayleigh_num) * kBoundInflation;
  if (!l.assumptions.all()) throw AssumptionViolation(l);
  return {l.rayleigh_num, l};
}

/// Rescale x until the computed squared norm passes the ledger's norm check.
inline void normalize_for_certification(CVector& x) {
  const MachineConstants mc;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const double s = norm_sq_certified(x);
    if (std::abs(s - 1.0) <= mc.eps) return;
    const double f = 1.0 / std::sqrt(s);
    for (auto& v : x) v *= f;
  }
}

/// Max entrywise |Q^binary64 - Q^dd| for the given phi evaluation mode. The
/// double-double matrix always uses the cancellation-free form.
inline double estimate_delta(int k, PhiMode mode = PhiMode::StableForm) {
  const IndexWindow w(k);
  const auto q = QMatrix::build(w, mode);
  const auto qd = QMatrixDD::build(w, PhiMode::StableForm);
  double worst = 0.0;
  const auto a = q.storage();
  const auto b = qd.storage();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const DDReal dr = b[i].re - DDReal(a[i].real());
    const DDReal di = b[i].im - DDReal(a[i].imag());
    worst = std::max(worst, std::hypot(static_cast<double>(dr), static_cast<double>(di)));
  }
  return worst;
}

/// Spectrum -> certification pipeline for one window.
inline Verdict certify_counterexample(int k, double delta = kDefaultDelta, PhiMode mode = PhiMode::StableForm,
                                      double tol = 1e-14) {
  const auto q = QMatrix::build(IndexWindow(k), mode);
  const auto top = top_eigs(q, 1, tol);
  CVector x = top.eigenvectors.front();
  normalize_for_certification(x);
  const auto cr = rayleigh_certified(q, x, delta);
  Verdict v;
  v.ledger = cr.ledger;
  v.lambda_reference = top.eigenvalues.front();
  // Round the subtraction downward so the reported bound never overstates.
  v.certified_lower_bound =
      std::nextafter(cr.rayleigh_num - cr.ledger.error_bound, -std::numeric_limits<double>::infinity());
  v.exceeded_one = v.certified_lower_bound > 1.0;
  return v;
}

}  // namespace qplane
