#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "qplane/spectrum.hpp"

using namespace qplane;

namespace {

void expect_valid(const SpectrumResult& r) {
  ASSERT_TRUE(std::is_sorted(r.eigenvalues.rbegin(), r.eigenvalues.rend()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_LE(r.residuals[i], residual_tolerance(r.eigenvalues[i])) << i;
    EXPECT_NEAR(linalg::norm2(r.eigenvectors[i]), 1.0, 1e-14) << i;
  }
}

}  // namespace

TEST(TopEigs, OneByOne) {
  const auto r = top_eigs(QMatrix::build(IndexWindow(0)), 1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_DOUBLE_EQ(r.eigenvalues[0], 0.5);
  EXPECT_EQ(r.eigenvectors[0][0], std::complex<double>(1.0, 0.0));
}

TEST(TopEigs, TableRowK3) {
  const auto r = top_eigs(QMatrix::build(IndexWindow(3)), 5);
  expect_valid(r);
  const double want[] = {0.885305, 0.653839, 0.377158, 0.154856, -0.000454};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(r.eigenvalues[i], want[i], 5e-6) << i;
}

TEST(TopEigs, AgreesWithJacobi) {
  for (int k : {1, 2, 5, 12, 30}) {
    const auto q = QMatrix::build(IndexWindow(k));
    const auto full = full_eig(q);
    const int m = std::min<int>(5, static_cast<int>(q.n()));
    const auto top = top_eigs(q, m);
    expect_valid(top);
    for (int i = 0; i < m; ++i) EXPECT_NEAR(top.eigenvalues[i], full.eigenvalues[i], 1e-10) << k << ' ' << i;
    EXPECT_NEAR(min_eig(q), full.eigenvalues.back(), 1e-10) << k;
  }
}

TEST(TopEigs, AllEigenvaluesOfSmallMatrix) {
  const auto q = QMatrix::build(IndexWindow(2));
  const auto top = top_eigs(q, 5);
  const auto full = full_eig(q);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(top.eigenvalues[i], full.eigenvalues[i], 1e-10);
}

TEST(TopEigs, Errors) {
  const auto q = QMatrix::build(IndexWindow(1));
  EXPECT_THROW(top_eigs(q, 0), std::invalid_argument);
  EXPECT_THROW(top_eigs(q, 4), std::invalid_argument);
  EXPECT_THROW(top_eigs(q, 1, 1e-16), std::invalid_argument);
  const auto big = QMatrix::build(IndexWindow(40));
  try {
    top_eigs(big, 2, 1e-15, 2);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.best().size(), 1u);
    EXPECT_GT(e.best().residuals[0], 0.0);
  }
}

TEST(TopEigs, PhaseAndDeterminism) {
  const auto q = QMatrix::build(IndexWindow(8));
  const auto a = top_eigs(q, 3);
  const auto b = top_eigs(q, 3);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(a.eigenvalues[i], b.eigenvalues[i]);
    const auto& x = a.eigenvectors[i];
    const auto big = *std::max_element(x.begin(), x.end(), [](auto l, auto r) { return std::abs(l) < std::abs(r); });
    EXPECT_EQ(big.imag(), 0.0);
    EXPECT_GT(big.real(), 0.0);
  }
}

TEST(MinEig, TableValues) {
  EXPECT_DOUBLE_EQ(min_eig(QMatrix::build(IndexWindow(0))), 0.5);
  EXPECT_NEAR(min_eig(QMatrix::build(IndexWindow(3))), -0.0640857, 5e-6);
  EXPECT_NEAR(min_eig(QMatrix::build(IndexWindow(10))), -0.0866218, 5e-6);
}

TEST(FullEig, TraceAndEnclosure) {
  for (int k : {1, 5, 20, 60}) {
    const auto r = full_eig(QMatrix::build(IndexWindow(k)));
    double sum = 0.0;
    for (double l : r.eigenvalues) {
      sum += l;
      EXPECT_GT(l, spectral_lower_bound());
      EXPECT_LT(l, spectral_upper_bound());
      EXPECT_GT(l, -0.155939843);
      EXPECT_LT(l, 1.007679970);
    }
    EXPECT_NEAR(sum, 0.5 * (k + 1), 1e-10 * r.size()) << k;
    expect_valid(r);
  }
  EXPECT_NEAR(full_eig(QMatrix::build(IndexWindow(5))).eigenvalues[0], 0.936394, 5e-6);
  EXPECT_THROW(full_eig(QMatrix::build(IndexWindow(300))), CapacityError);
}

TEST(TopEigs, LargestGrowsWithWindow) {
  double prev = -1.0;
  for (int k = 0; k <= 40; k += 4) {
    const double l1 = top_eigs(QMatrix::build(IndexWindow(k)), 1).eigenvalues[0];
    EXPECT_GE(l1, prev - 1e-13) << k;
    prev = l1;
  }
}
