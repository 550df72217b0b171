#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "psiapprox/extremal.hpp"

using namespace psiapprox;

namespace {

const ManifoldModel kLine = ManifoldModel::classic(1);

}  // namespace

TEST(ReferenceExtremal, ReferenceValues) {
  EXPECT_NEAR(*reference_extremal(kLine, "disc 1", Point{Complex(3.0)}), std::log(3.0), 1e-15);
  EXPECT_NEAR(*reference_extremal(kLine, "interval -1 1", Point{Complex(2.0)}), std::log(2 + std::sqrt(3.0)), 1e-14);
  EXPECT_NEAR(*reference_extremal(kLine, "interval -1 1", Point{Complex(2.0)}), 1.31696, 5e-6);
  EXPECT_DOUBLE_EQ(*reference_extremal(ManifoldModel::torus(1), "torus-slice", Point{Complex(0.7, 0.25)}), 0.25);
  EXPECT_FALSE(reference_extremal(kLine, "points 0 0 1 0", Point{Complex(2.0)}).has_value());
  EXPECT_EQ(*reference_extremal(kLine, "disc 1", Point{Complex(0.3, 0.2)}), 0.0);
}

TEST(ReferenceExtremal, JoukowskiBranchMatchesFocalOracle) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 500; ++i) {
    const Complex z(u(rng), u(rng));
    EXPECT_NEAR(interval_extremal(z), oracle::joukowski_green(z), 1e-12 * std::max(1.0, oracle::joukowski_green(z)));
    EXPECT_GE(interval_extremal(z), 0.0);
  }
  for (double x : {-1.0, -0.3, 0.0, 0.8, 1.0}) EXPECT_NEAR(interval_extremal(Complex(x)), 0.0, 1e-15);
}

TEST(Christoffel, IntervalConvergesToGreenFunction) {
  const auto K = sample_compact("interval -1 1", kLine, 400);
  const double ref = std::log(2 + std::sqrt(3.0));
  const auto e = christoffel_log_phi(kLine, K, Point{Complex(2.0)}, 40);
  EXPECT_NEAR(e.log_phi_t, ref, 0.02 * ref);
  EXPECT_NEAR(e.bracket, std::log(41.0) / 80.0, 1e-15);
  EXPECT_FALSE(e.rank_deficient);
}

TEST(Christoffel, ErrorDecreasesInTAndStaysBelowBracket) {
  const auto K = sample_compact("interval -1 1", kLine, 800);
  for (const Complex z : {Complex(2.0), Complex(0.0, 1.0), Complex(1.5, 0.5), Complex(-1.2, 0.1)}) {
    const double ref = oracle::joukowski_green(z);
    double prev = INFINITY;
    for (double t : {10.0, 15.0, 20.0, 30.0, 40.0}) {
      const auto e = christoffel_log_phi(kLine, K, Point{z}, t);
      const double err = std::abs(e.log_phi_t - ref);
      EXPECT_LE(err, prev) << "z=" << z << " t=" << t;
      EXPECT_LE(e.log_phi_t, ref + e.bracket + 1e-6);
      prev = err;
    }
  }
}

TEST(Christoffel, OnKBoundedAndAveragesToDimension) {
  const int M = 300;
  const auto K = sample_compact("interval -1 1", kLine, M);
  for (double t : {5.0, 10.0, 20.0}) {
    double mean = 0.0;
    for (std::size_t i = 0; i < K.size(); ++i) {
      const auto e = christoffel_log_phi(kLine, K, K.points[i], t);
      // w_i K(x_i, x_i) <= 1 pointwise, and sum_i w_i K(x_i, x_i) = d.
      EXPECT_LE(e.log_phi_t, std::log(static_cast<double>(M)) / (2 * t) + 1e-12);
      EXPECT_GE(e.log_phi_t, -std::log(static_cast<double>(M)) / (2 * t) - 1e-12);
      mean += K.weights(static_cast<Eigen::Index>(i)) * std::exp(2 * t * e.log_phi_t);
    }
    EXPECT_NEAR(mean, t + 1, 1e-9 * (t + 1));
  }
}

TEST(Christoffel, TorusMatchesCharacterSumOracle) {
  const ManifoldModel t1 = ManifoldModel::torus(1);
  const auto K = sample_compact("torus-slice", t1, 128);
  for (const double y : {0.1, 0.25, -0.4}) {
    for (int n : {5, 20, 40}) {
      const double t = 2 * std::numbers::pi * n;
      const auto e = christoffel_log_phi(t1, K, Point{Complex(0.37, y)}, t);
      // Characters are orthonormal on the slice: K_t(z,z) = sum_{|a| <= n} e^{-4 pi a y}.
      double s = 0.0;
      for (int a = -n; a <= n; ++a) s += std::exp(-4 * std::numbers::pi * a * y);
      EXPECT_NEAR(e.log_phi_t, std::log(s) / (2 * t), 1e-10);
    }
    const auto far = christoffel_log_phi(t1, K, Point{Complex(0.0, y)}, 2 * std::numbers::pi * 40);
    EXPECT_NEAR(far.log_phi_t, std::abs(y), 0.02 * std::abs(y));
  }
}

TEST(Christoffel, MonotoneUnderMeasureDomination) {
  // mu' = (mu + nu) / (1 + s) >= mu / (1 + s), so log_phi' <= log_phi + log(1 + s) / (2t).
  const auto K = sample_compact("interval -1 1", kLine, 100);
  std::vector<Point> pts = K.points;
  std::vector<double> w(100, 1.0 / 100);
  const double extra = 0.01;
  for (int i = 0; i < 20; ++i) {
    pts.push_back(Point{Complex(1.0 + 0.05 * (i + 1), 0.1 * std::sin(i))});
    w.push_back(extra);
  }
  const double s = 20 * extra;
  const auto K2 = make_sample(kLine, pts, Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())), "sup");
  for (double t : {5.0, 10.0, 20.0}) {
    for (const Complex z : {Complex(2.5), Complex(0.0, 1.0), Complex(-3.0, 2.0), Complex(0.2)}) {
      const double a = christoffel_log_phi(kLine, K, Point{z}, t).log_phi_t;
      const double b = christoffel_log_phi(kLine, K2, Point{z}, t).log_phi_t;
      EXPECT_LE(b, a + std::log1p(s) / (2 * t) + 1e-10) << "z=" << z << " t=" << t;
    }
  }
}

TEST(Christoffel, ScalingEquivariance) {
  const auto K = sample_compact("interval -1 1", kLine, 200);
  const double lambda = 3.5;
  std::vector<Point> scaled;
  for (const auto& p : K.points) scaled.push_back(Point{p[0] * lambda});
  const auto Ks = make_sample(kLine, scaled, K.weights, "scaled");
  for (const Complex z : {Complex(2.0), Complex(0.3, 0.9)}) {
    const double a = christoffel_log_phi(kLine, K, Point{z}, 12).log_phi_t;
    const double b = christoffel_log_phi(kLine, Ks, Point{z * lambda}, 12).log_phi_t;
    EXPECT_NEAR(a, b, 1e-10);
  }
}

TEST(Christoffel, DiscConvergesToLogModulus) {
  const auto K = sample_compact("circle 1", kLine, 300);
  for (const Complex z : {Complex(3.0), Complex(1.2, 1.2)}) {
    const auto e = christoffel_log_phi(kLine, K, Point{z}, 40);
    const double ref = std::log(std::abs(z));
    EXPECT_NEAR(e.log_phi_t, ref, 0.02 * ref + e.bracket);
  }
}

TEST(Christoffel, RankDeficientSampleFlagged) {
  const auto K = sample_compact("interval -1 1", kLine, 4);
  const auto e = christoffel_log_phi(kLine, K, Point{Complex(2.0)}, 6);
  EXPECT_TRUE(e.rank_deficient);
  EXPECT_EQ(e.dim, 4);
  EXPECT_TRUE(std::isfinite(e.log_phi_t));
}

TEST(BenchmarkGeometry, Parsing) {
  EXPECT_EQ(benchmark_geometry("interval -1 1"), BenchmarkGeometry::Interval);
  EXPECT_EQ(benchmark_geometry("disc 1"), BenchmarkGeometry::Disc);
  EXPECT_EQ(benchmark_geometry("circle 1"), BenchmarkGeometry::Disc);
  EXPECT_EQ(benchmark_geometry("torus-slice"), BenchmarkGeometry::TorusSlice);
  EXPECT_EQ(benchmark_geometry("interval 0 2"), BenchmarkGeometry::None);
  EXPECT_EQ(benchmark_geometry("disc 2"), BenchmarkGeometry::None);
}
