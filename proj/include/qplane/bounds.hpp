#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qplane/spectrum.hpp"

namespace qplane {

/// Analytic enclosure of the quarter-plane operator and the tighter published
/// enclosure used as a secondary containment check.
struct SpectralEnclosure {
  double lower = spectral_lower_bound();
  double upper = spectral_upper_bound();
  double wb_lower = -0.155939843;
  double wb_upper = 1.007679970;
};

/// psi(t) = log(1 + t) / t, continuous at 0.
inline double psi(double t) {
  if (!(t > -1.0)) throw std::domain_error("psi requires t > -1");
  if (std::abs(t) < 1e-4) {
    // 1 - t/2 + t^2/3 - t^3/4 + t^4/5, truncation below 2e-21.
    return 1.0 + t * (-0.5 + t * (1.0 / 3.0 + t * (-0.25 + t * 0.2)));
  }
  return std::log1p(t) / t;
}

/// H(x)H(y) psi(|y - x| / (x + y)) / (4 pi^2 (x + y)).
inline double kernel_k(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) return 0.0;
  const double s = x + y;
  return psi(std::abs(y - x) / s) / (4.0 * M_PI * M_PI * s);
}

struct EnclosureViolation {
  std::size_t index;
  double value;
  std::string bound;
};

struct EnclosureReport {
  bool pass = true;
  double margin_lower = 0.0;     // min(lambda) - lower
  double margin_upper = 0.0;     // upper - max(lambda)
  double margin_wb_lower = 0.0;
  double margin_wb_upper = 0.0;
  std::vector<EnclosureViolation> violations;
};

inline EnclosureReport enclosure_check(const std::vector<double>& eigenvalues, const SpectralEnclosure& e = {}) {
  EnclosureReport r;
  if (eigenvalues.empty()) return r;
  double lo = eigenvalues.front();
  double hi = eigenvalues.front();
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const double v = eigenvalues[i];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    if (!(v > e.lower)) r.violations.push_back({i, v, "lower"});
    if (!(v < e.upper)) r.violations.push_back({i, v, "upper"});
    if (!(v > e.wb_lower)) r.violations.push_back({i, v, "wb_lower"});
    if (!(v < e.wb_upper)) r.violations.push_back({i, v, "wb_upper"});
  }
  r.margin_lower = lo - e.lower;
  r.margin_upper = e.upper - hi;
  r.margin_wb_lower = lo - e.wb_lower;
  r.margin_wb_upper = e.wb_upper - hi;
  r.pass = r.violations.empty();
  return r;
}

inline EnclosureReport enclosure_check(const SpectrumResult& s, const SpectralEnclosure& e = {}) {
  return enclosure_check(s.eigenvalues, e);
}

}  // namespace qplane
