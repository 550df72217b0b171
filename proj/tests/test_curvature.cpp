#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "psiapprox/curvature.hpp"

using namespace psiapprox;

namespace {

MultiPoly z_(int n, int i) { return MultiPoly::variable(n, i); }

ManifoldModel line_and_square() { return ManifoldModel::mapped_polynomial(1, {z_(1, 0), MultiPoly(1, {{{2}, 1.0}})}); }

ManifoldModel parabola_complement() { return ManifoldModel::graph_complement(2, MultiPoly(1, {{{2}, 1.0}})); }

Point random_point(std::mt19937_64& rng, int n, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  Eigen::VectorXcd c(n);
  for (int i = 0; i < n; ++i) c(i) = Complex(u(rng), u(rng));
  return Point(c);
}

ThetaSpec theta_of(ThetaSpec::Kind kind, int power = 2) {
  ThetaSpec t;
  t.kind = kind;
  t.power = power;
  return t;
}

}  // namespace

TEST(MetricForm, TorusEigenvaluesBothRoutes) {
  const ManifoldModel t2 = ManifoldModel::torus(2);
  const double e2 = std::exp(2.0);
  for (const auto method : {MetricMethod::ClosedForm, MetricMethod::FiniteDifference}) {
    const auto s = metric_form(t2, Point{Complex(0.3, 2.0), Complex(0.8, 0.0)}, kDefaultFdStep, method);
    ASSERT_EQ(s.eigenvalues.size(), 2);
    EXPECT_NEAR(s.eigenvalues(0), e2 / 8, 1e-6);
    EXPECT_NEAR(s.eigenvalues(1), e2 / 4, 1e-6);
    EXPECT_NEAR(s.eigenvalues(0), 0.923632, 1e-6);
    EXPECT_NEAR(s.eigenvalues(1), 1.84726, 1e-5);
    EXPECT_TRUE(s.positive_definite);
    const auto one = metric_form(ManifoldModel::torus(1), Point{Complex(0.1, 0.5)}, kDefaultFdStep, method);
    EXPECT_NEAR(one.eigenvalues(0), std::exp(0.5) / 4, 1e-6);
    EXPECT_NEAR(one.eigenvalues(0), 0.41218, 1e-5);
  }
}

TEST(MetricForm, TorusEigenvectorAlongImaginaryPart) {
  // lambda_1 = e^psi / 4 has eigenvector y; the orthogonal complement carries e^psi / (4 |y|).
  const ManifoldModel t2 = ManifoldModel::torus(2);
  const Eigen::Vector2d y(1.2, -0.9);
  const auto s = metric_form(t2, Point{Complex(0.0, y(0)), Complex(0.5, y(1))});
  const Eigen::VectorXcd v = y.cast<Complex>();
  const Complex rq = v.dot(s.matrix * v) / v.squaredNorm();
  EXPECT_NEAR(rq.real(), std::exp(y.norm()) / 4, 1e-12);
  EXPECT_NEAR(s.eigenvalues(0), std::exp(y.norm()) / (4 * y.norm()), 1e-12);
}

TEST(MetricForm, IdentityMapIsFlat) {
  const ManifoldModel id = ManifoldModel::mapped_polynomial(2, {z_(2, 0), z_(2, 1)});
  for (const auto method : {MetricMethod::ClosedForm, MetricMethod::FiniteDifference}) {
    const auto s = metric_form(id, Point{Complex(1.5, -0.2), Complex(0.3, 0.9)}, kDefaultFdStep, method);
    EXPECT_LE((s.matrix - Eigen::MatrixXcd::Identity(2, 2)).norm(), 1e-7);
    EXPECT_NEAR(s.eigenvalues(0), 1.0, 1e-7);
    EXPECT_NEAR(s.eigenvalues(1), 1.0, 1e-7);
  }
}

TEST(MetricForm, InsideSNeighbourhoodIsRejected) {
  EXPECT_THROW(metric_form(ManifoldModel::classic(1), Point{Complex(0.5)}), DomainError);
  EXPECT_THROW(metric_form(ManifoldModel::torus(1), Point{Complex(0.5, 0.05)}), DomainError);
  EXPECT_THROW(complex_hessian([](const VectorXcl&) { return 0.0L; }, VectorXcl::Zero(1), 0.0), std::invalid_argument);
}

TEST(MetricForm, HermitianPositiveAndRoutesAgreeAtSeededPoints) {
  const std::vector<std::pair<ManifoldModel, double>> models{
      {ManifoldModel::classic(2), 3.0},
      {line_and_square(), 2.0},
      {ManifoldModel::torus(2), 2.0},
      {parabola_complement(), 1.5},
  };
  std::mt19937_64 rng(50);
  for (const auto& [m, R] : models) {
    int checked = 0;
    while (checked < 50) {
      const Point z = random_point(rng, m.dimension(), R);
      if (!(m.psi(z) > kSMargin + 1e-3)) continue;
      const auto closed = metric_form(m, z, kDefaultFdStep, MetricMethod::ClosedForm);
      const auto fd = metric_form(m, z, kDefaultFdStep, MetricMethod::FiniteDifference);
      EXPECT_LE((closed.matrix - closed.matrix.adjoint()).norm(), 1e-10);
      EXPECT_TRUE(closed.positive_definite) << m.describe();
      EXPECT_GT(closed.eigenvalues(0), 0.0);
      EXPECT_LE((closed.matrix - fd.matrix).norm(), 1e-6 * std::max(1.0, closed.matrix.norm())) << m.describe();
      ++checked;
    }
  }
}

TEST(RicciPotential, CauchyBinetMatchesGramDeterminant) {
  // sum_L |det J_L|^2 = det(J^H J) for an m x N Jacobian.
  const ManifoldModel cubic = ManifoldModel::mapped_polynomial(
      2, {z_(2, 0), z_(2, 1), MultiPoly(2, {{{1, 1}, 1.0}}), MultiPoly(2, {{{3, 0}, Complex(0.0, 1.0)}, {{0, 1}, 2.0}})});
  const ManifoldModel graph = parabola_complement();
  std::mt19937_64 rng(11);
  for (const auto* m : {&cubic, &graph}) {
    const auto field = ricci_potential(*m);
    for (int i = 0; i < 20; ++i) {
      const Point z = random_point(rng, 2, 1.5);
      const auto jet = m->jet(z.to_long_double());
      const Eigen::MatrixXcd J = jet.jacobian.cast<Complex>();
      const double gram = (J.adjoint() * J).determinant().real();
      EXPECT_NEAR(static_cast<double>(field(z.to_long_double())), std::log(gram), 1e-10);
    }
  }
}

TEST(RicciPotential, GraphComponentsGiveOnePlusInverseFourthPower) {
  // Rows z1, F, 1/F: the only nonzero minors are 1 and -1/F^2.
  const ManifoldModel g = parabola_complement();
  const auto field = ricci_potential(g);
  std::mt19937_64 rng(12);
  for (int i = 0; i < 20; ++i) {
    const Point z = random_point(rng, 2, 1.5);
    const double F2 = std::norm(z[1] - z[0] * z[0]);
    EXPECT_NEAR(static_cast<double>(field(z.to_long_double())), std::log1p(1.0 / (F2 * F2)), 1e-10);
  }
}

TEST(RicciPotential, MappedExamples) {
  const auto flat = ricci_potential(ManifoldModel::mapped_polynomial(1, {z_(1, 0)}));
  EXPECT_EQ(static_cast<double>(flat(Point{Complex(0.7, -2.0)}.to_long_double())), 0.0);
  const ManifoldModel g = line_and_square();
  const auto field = ricci_potential(g);
  std::mt19937_64 rng(13);
  for (int i = 0; i < 10; ++i) {
    const Point z = random_point(rng, 1, 2.0);
    const double r2 = std::norm(z[0]);
    EXPECT_NEAR(static_cast<double>(field(z.to_long_double())), std::log1p(4 * r2), 1e-12);
    // d^2/dz dzbar log(1 + 4|z|^2) = 4 / (1 + 4|z|^2)^2.
    const Eigen::MatrixXcd ric = ricci_form(g, z);
    EXPECT_NEAR(ric(0, 0).real(), -4 / std::pow(1 + 4 * r2, 2), 1e-6);
    EXPECT_NEAR(ric(0, 0).imag(), 0.0, 1e-10);
  }
}

TEST(RicciPotential, TorusSplitsIntoPsiAndLogPsi) {
  for (int N : {1, 2, 3}) {
    const ManifoldModel t = ManifoldModel::torus(N);
    const ScalarField psi = [N](const VectorXcl& z) {
      long double s = 0;
      for (int i = 0; i < N; ++i) s += z(i).imag() * z(i).imag();
      return std::sqrt(s);
    };
    const ScalarField log_psi = [psi](const VectorXcl& z) { return std::log(psi(z)); };
    std::mt19937_64 rng(static_cast<std::uint64_t>(N));
    for (int i = 0; i < 10; ++i) {
      const Point z = random_point(rng, N, 2.0);
      if (t.psi(z) < 0.5) continue;
      const Eigen::MatrixXcd expected = -N * complex_hessian(psi, z.to_long_double()) +
                                        (N - 1) * complex_hessian(log_psi, z.to_long_double());
      EXPECT_LE((ricci_form(t, z) - expected).norm(), 1e-6) << "N=" << N;
    }
  }
}

TEST(Compensator, ExactCancellationForSquareMap) {
  const ManifoldModel g = line_and_square();
  ThetaSpec th = theta_of(ThetaSpec::Kind::LogSumSquares);
  th.polys = {MultiPoly::constant(1, 1.0), MultiPoly(1, {{{1}, 2.0}})};
  std::vector<Point> pts;
  std::mt19937_64 rng(14);
  while (pts.size() < 20) {
    const Point z = random_point(rng, 1, 2.0);
    if (g.psi(z) > kSMargin + 1e-3) pts.push_back(z);
  }
  const auto a = compensator_check(g, th, pts);
  EXPECT_LE(std::abs(a.min_eig_sum), 1e-6);
  EXPECT_EQ(a.verdict, Verdict::Pass);
  EXPECT_EQ(a.points.size(), pts.size());

  const auto zero = compensator_check(g, theta_of(ThetaSpec::Kind::Zero), pts);
  EXPECT_LT(zero.min_eig_sum, -1e-3);
  EXPECT_EQ(zero.verdict, Verdict::Fail);

  const auto self = compensator_check(g, theta_of(ThetaSpec::Kind::RicciPotential), pts);
  EXPECT_LE(std::abs(self.min_eig_sum), 1e-6);
}

TEST(Compensator, GraphComplementCancelsAtFourthPower) {
  const ManifoldModel g = parabola_complement();
  std::vector<Point> pts;
  std::mt19937_64 rng(15);
  while (pts.size() < 20) pts.push_back(random_point(rng, 2, 1.5));
  const auto four = compensator_check(g, theta_of(ThetaSpec::Kind::LogOnePlusInvF, 4), pts);
  EXPECT_LE(std::abs(four.min_eig_sum), 1e-6);
  EXPECT_EQ(four.verdict, Verdict::Pass);
  // With the square, Hess(theta) + Ricci = [1/(1+s)^2 - 4s/(1+s^2)^2] dF dF^H, s = |F|^2: negative near s = 1.
  const auto two = compensator_check(g, theta_of(ThetaSpec::Kind::LogOnePlusInvF, 2), pts);
  EXPECT_LT(two.min_eig_sum, -0.1);
  EXPECT_EQ(two.verdict, Verdict::Fail);
  const Point on_F1{Complex(0.5), Complex(1.25)};  // F = 1, dF = (-1, 1)
  const auto at1 = compensator_check(g, theta_of(ThetaSpec::Kind::LogOnePlusInvF, 2), {on_F1});
  ASSERT_EQ(at1.points.size(), 1u);
  EXPECT_NEAR(at1.min_eig_sum, -0.75 * 2.0, 1e-5);
}

TEST(Compensator, SkipsPointsWhereThetaIsUndefined) {
  const ManifoldModel g = parabola_complement();
  const auto a = compensator_check(g, theta_of(ThetaSpec::Kind::LogOnePlusInvF, 4),
                                   {Point{Complex(1.0), Complex(1.0)}, Point{Complex(0.3), Complex(2.0)}});
  EXPECT_EQ(a.points.size(), 1u);
  EXPECT_EQ(a.skipped.size(), 1u);
}

TEST(Compensator, InvariantUnderPluriharmonicShift) {
  const ManifoldModel g = line_and_square();
  ThetaSpec th = theta_of(ThetaSpec::Kind::LogSumSquares);
  th.polys = {MultiPoly::constant(1, 1.0), MultiPoly(1, {{{1}, 1.0}})};
  std::vector<Point> pts;
  std::mt19937_64 rng(16);
  while (pts.size() < 15) {
    const Point z = random_point(rng, 1, 2.0);
    if (g.psi(z) > kSMargin + 1e-3) pts.push_back(z);
  }
  const auto base = compensator_check(g, th, pts);
  th.pluriharmonic = MultiPoly(1, {{{3}, Complex(0.5, 1.0)}, {{1}, -2.0}});
  const auto shifted = compensator_check(g, th, pts);
  EXPECT_LT(std::abs(base.min_eig_sum - shifted.min_eig_sum), 1e-8);
}

TEST(Volume, FlatDiscCalibration) {
  const ManifoldModel id = ManifoldModel::mapped_polynomial(1, {z_(1, 0)});
  const auto v = volume_sublevel(id, 4.0, 1000000, 7);
  EXPECT_NEAR(v.value, 4 * std::numbers::pi, 0.02 * 4 * std::numbers::pi);
  EXPECT_LE(v.rel_std_error, 0.01);
  const auto near1 = volume_sublevel(id, 1.0 + 1e-6, 1000000, 7);
  EXPECT_NEAR(near1.value, std::numbers::pi, 0.02 * std::numbers::pi);
  EXPECT_THROW(volume_sublevel(id, 1.0, 1000, 7), std::invalid_argument);
}

TEST(Volume, TorusOneDimensionalClosedForm) {
  const auto v = volume_sublevel(ManifoldModel::torus(1), std::numbers::e, 1000000, 3);
  EXPECT_NEAR(v.value, (std::numbers::e - 1) / 2, 0.02 * (std::numbers::e - 1) / 2);
}

TEST(Volume, NondecreasingInLAndDeterministic) {
  const ManifoldModel g = line_and_square();
  double prev = 0.0, prev_se = 0.0;
  for (double L : {1.5, 2.0, 4.0, 8.0}) {
    const auto v = volume_sublevel(g, L, 200000, 99);
    EXPECT_GE(v.value + 3 * v.std_error, prev - 3 * prev_se) << L;
    prev = v.value;
    prev_se = v.std_error;
  }
  const auto a = volume_sublevel(g, 4.0, 200000, 5, 1);
  const auto b = volume_sublevel(g, 4.0, 200000, 5, 4);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_NE(a.value, volume_sublevel(g, 4.0, 200000, 6, 1).value);
}

TEST(Volume, GrowthFitForFlatMetric) {
  const ManifoldModel id = ManifoldModel::mapped_polynomial(1, {z_(1, 0)});
  const auto fit = fit_volume_growth(id, {2, 4, 8, 16}, 0.5, 200000, 7);
  ASSERT_EQ(fit.table.size(), 4u);
  EXPECT_TRUE(fit.satisfiable);
  for (const auto& row : fit.table) {
    EXPECT_LE(std::log(row.value), fit.A * std::pow(row.L, 0.5) + fit.B + 1e-9);
    EXPECT_NEAR(row.value, std::numbers::pi * row.L, 0.03 * std::numbers::pi * row.L);
  }
}

TEST(Splitmix64, ReferenceSequence) {
  std::uint64_t s = 0;
  EXPECT_EQ(splitmix64(s), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(splitmix64(s), 0x6E789E6AA1B965F4ULL);
}
