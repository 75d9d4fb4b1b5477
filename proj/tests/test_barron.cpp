#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "barronlab/barron.hpp"
#include "barronlab/errors.hpp"
#include "oracles.hpp"

using namespace barronlab;
using Eigen::VectorXd;

namespace {

GridFunctiond gaussian_1d() {
  return GridFunctiond::sample(VectorXd::Zero(1), VectorXd::Constant(1, 10.0), 1024,
                               [](const VectorXd& x) { return std::exp(-0.5 * x.squaredNorm()); });
}

BarronEstimate make_upper(double value, const BoundedSetd& set) {
  BarronEstimate e;
  e.value = value;
  e.set = set;
  e.method = "fixed";
  return e;
}

}  // namespace

TEST(UpperBound, GaussianOneDimension) {
  const BarronEstimate e =
      upper_bound_from_extension(gaussian_1d(), BoundedSetd::ball(1, 1.0), 12.0, 961);
  EXPECT_EQ(e.direction, Direction::upper);
  EXPECT_NEAR(e.value, std::sqrt(2.0 / std::numbers::pi), 0.01);
  EXPECT_LT(e.tail_estimate, 1e-10);
  EXPECT_TRUE(e.warning.empty());
}

TEST(UpperBound, ZeroAndHomogeneity) {
  const GridFunctiond zero(VectorXd::Zero(2), VectorXd::Ones(2), 16, VectorXd::Zero(256));
  EXPECT_EQ(upper_bound_from_extension(zero, BoundedSetd::ball(2, 1.0), 5.0, 11).value, 0.0);
  const GridFunctiond f = gaussian_1d();
  const double a = upper_bound_from_extension(f, BoundedSetd::ball(1, 0.7), 8.0, 201).value;
  const double b = upper_bound_from_extension(f, BoundedSetd::ball(1, 1.4), 8.0, 201).value;
  EXPECT_NEAR(b, 2.0 * a, 1e-14 * b);
}

TEST(UpperBound, TruncatedSpectrumWarns) {
  const BarronEstimate e =
      upper_bound_from_extension(gaussian_1d(), BoundedSetd::ball(1, 1.0), 0.5, 21);
  EXPECT_FALSE(e.warning.empty());
}

TEST(LowerBound, ConstantFunctionGivesZero) {
  const int N = 64;
  const VectorXd c = VectorXd::Zero(2), h = VectorXd::Constant(2, 2.0);
  const Profile1D b = plateau(4, 0.5);
  const GridFunctiond g = GridFunctiond::sample(c, h, N, [&](const VectorXd& x) { return b(x.norm()); });
  const GridFunctiond f(c, h, N, VectorXd::Constant(N * N, 2.5));
  EXPECT_EQ(lower_bound(gradient_grid(f), g, 1.0, 10.0, 21).value, 0.0);
}

TEST(LowerBound, RejectsBadLocaliser) {
  const int N = 32;
  const VectorXd c = VectorXd::Zero(1), h = VectorXd::Constant(1, 3.0);
  const GridFunctiond wide = GridFunctiond::sample(c, h, N, [](const VectorXd& x) {
    return std::exp(-x.squaredNorm());
  });
  const GridFunctiond f = GridFunctiond::sample(c, h, N, [](const VectorXd& x) { return x[0]; });
  EXPECT_THROW(lower_bound(gradient_grid(f), wide, 1.0, 5.0, 11), InvalidInput);
  const GridFunctiond zero(c, h, N, VectorXd::Zero(N));
  EXPECT_THROW(lower_bound(gradient_grid(f), zero, 1.0, 5.0, 11), InvalidInput);
}

TEST(LowerBound, LinearFunctionSandwich) {
  const int N = 128;
  const double r = 1.0;
  const VectorXd a = (VectorXd(2) << 0.6, -0.8).finished();
  const auto linear = [&](const VectorXd& x) { return a.dot(x); };
  const GridFunctiond F = windowed_extension(linear, 2, r, N);
  const BoundedSetd B = BoundedSetd::ball(2, r);
  const BarronEstimate up = upper_bound_from_extension(F, B, 60.0, 121);
  const Profile1D b = plateau(4, r / 2);
  const GridFunctiond g = GridFunctiond::sample(
      F.center(), F.half_width(), N, [&](const VectorXd& x) { return b(x.norm()); });
  const GridFunctiond f = GridFunctiond::sample(F.center(), F.half_width(), N, linear);
  const BarronEstimate low = lower_bound(gradient_grid(f), g, r, 60.0, 121);
  EXPECT_GT(low.value, 0.0);
  EXPECT_LE(low.value, up.value * 1.05);
}

TEST(LowerBound, IndependentOfExtension) {
  // Two extensions agreeing on the ball give the same lower bound.
  const int N = 64;
  const double r = 1.0;
  const VectorXd c = VectorXd::Zero(2), h = VectorXd::Constant(2, 2.0);
  const Profile1D b = plateau(4, r / 2);
  const GridFunctiond g = GridFunctiond::sample(c, h, N, [&](const VectorXd& x) { return b(x.norm()); });
  const auto f1 = [](const VectorXd& x) { return std::sin(x[0]) * std::cos(0.5 * x[1]); };
  const auto f2 = [&](const VectorXd& x) {
    return x.norm() <= r ? f1(x) : f1(x) + std::pow(x.norm() - r, 3);
  };
  const auto l1 = lower_bound(gradient_grid(GridFunctiond::sample(c, h, N, f1)), g, r, 20.0, 41);
  const auto l2 = lower_bound(gradient_grid(GridFunctiond::sample(c, h, N, f2)), g, r, 20.0, 41);
  EXPECT_NEAR(l1.value, l2.value, 1e-12 * l1.value);
}

TEST(L1Bound, GaussianDominatesDirectIntegral) {
  const int L = 4001;
  const double dx = 20.0 / (L - 1);
  std::vector<double> h(L), h1(L), h2(L);
  for (int i = 0; i < L; ++i) {
    const double x = -10.0 + i * dx;
    const double e = std::exp(-0.5 * x * x);
    h[i] = e;
    h1[i] = -x * e;
    h2[i] = (x * x - 1.0) * e;
  }
  const GammaPair p = l1_fourier_bound_1d(h, h1, h2, dx);
  // ∫|ĥ| = 1 and ∫|ω||ĥ| = √(2/π) for the unit Gaussian.
  EXPECT_GE(p.a, 1.0);
  EXPECT_GE(p.c, std::sqrt(2.0 / std::numbers::pi));
  const std::vector<double> zero(L, 0.0);
  EXPECT_EQ(l1_fourier_bound_1d(zero, zero, zero, dx), (GammaPair{0.0, 0.0}));
  std::vector<double> s0(h), s1(h1), s2(h2);
  for (int i = 0; i < L; ++i) s0[i] *= 3.0, s1[i] *= 3.0, s2[i] *= 3.0;
  const GammaPair q = l1_fourier_bound_1d(s0, s1, s2, dx);
  EXPECT_NEAR(q.a, 3.0 * p.a, 1e-12);
  EXPECT_NEAR(q.c, 3.0 * p.c, 1e-12);
}

TEST(Calculus, Subadditivity) {
  const BoundedSetd B = BoundedSetd::ball(2, 1.0);
  const BarronEstimate e = make_upper(1.7, B);
  EXPECT_DOUBLE_EQ(combine_subadditive({{1.0, e}}).value, 1.7);
  EXPECT_DOUBLE_EQ(combine_subadditive({{1.0, e}, {-1.0, e}}).value, 3.4);
  std::vector<std::pair<double, BarronEstimate>> many(5, {1.0, e});
  EXPECT_DOUBLE_EQ(combine_subadditive(many).value, 5 * 1.7);
  BarronEstimate low = e;
  low.direction = Direction::lower;
  EXPECT_THROW(combine_subadditive({{1.0, e}, {1.0, low}}), InvalidInput);
  EXPECT_THROW(combine_subadditive({{1.0, e}, {1.0, make_upper(1.0, BoundedSetd::ball(2, 2.0))}}),
               InvalidInput);
}

TEST(Calculus, RidgeLift) {
  const BarronEstimate h = make_upper(0.9, BoundedSetd::ball(1, 2.0));
  const BarronEstimate same = ridge_lift(h, VectorXd::Ones(1), 1);
  EXPECT_EQ(same.value, 0.9);
  EXPECT_EQ(same.set, h.set);
  const BarronEstimate lifted = ridge_lift(h, (VectorXd(3) << 0.0, 0.6, 0.8).finished(), 3);
  EXPECT_EQ(lifted.value, 0.9);
  EXPECT_EQ(lifted.set, BoundedSetd::ball(3, 2.0));
  EXPECT_THROW(ridge_lift(h, VectorXd::Ones(3), 3), InvalidInput);
}

TEST(Calculus, PowerRule) {
  EXPECT_EQ(power_rule({2.0, 3.0}, 1), (GammaPair{2.0, 3.0}));
  EXPECT_EQ(power_rule({2.0, 3.0}, 2), (GammaPair{4.0, 12.0}));
  EXPECT_EQ(power_rule({1.0, 0.7}, 3), (GammaPair{1.0, 3.0 * 0.7}));
  for (int k = 1; k <= 6; ++k) {
    const GammaPair p = power_rule({1.3, 0.4}, k);
    EXPECT_DOUBLE_EQ(p.a, std::pow(1.3, k));
    EXPECT_DOUBLE_EQ(p.c, k * std::pow(1.3, k - 1) * 0.4);
  }
}

TEST(IdentityExtension, AgreesWithIdentityAndSupport) {
  for (double r : {1.0, 2.0, 4.0, 8.0}) {
    const IdentityExtension id = identity_extension(r);
    for (double x = -r; x <= r; x += r / 64) EXPECT_NEAR(id.extension(x), x, 1e-14 * r);
    EXPECT_EQ(id.extension(2.0 * r + 1e-9), 0.0);
    EXPECT_EQ(id.extension(-2.0 * r - 1e-9), 0.0);
  }
}

TEST(IdentityExtension, ExactTwoTermScaling) {
  // h(x) = r H(x/r) gives ∫h² = A r³, ∫h'² = B r, ∫h''² = D / r, hence
  // 2a² = A r³ + B r and 2c² = B r + D / r. Fit A, B, D at r = 1, 2 and
  // predict larger r.
  const GammaPair p1 = identity_extension(1.0).pair;
  const GammaPair p2 = identity_extension(2.0).pair;
  const double a1 = 2 * p1.a * p1.a, a2 = 2 * p2.a * p2.a;
  const double A = (a2 - 2 * a1) / 6.0, B = a1 - A;
  const double D = 2 * p1.c * p1.c - B;
  for (double r : {4.0, 8.0, 16.0}) {
    const GammaPair p = identity_extension(r).pair;
    EXPECT_NEAR(2 * p.a * p.a, A * r * r * r + B * r, 1e-6 * (A * r * r * r));
    EXPECT_NEAR(2 * p.c * p.c, B * r + D / r, 1e-6 * (B * r + D / r));
  }
}

TEST(IdentityExtension, AsymptoticPowerLaw) {
  // a ~ r^{3/2} once the r³ term dominates; the ratio climbs towards 2^{3/2}.
  double previous = 0.0;
  for (double r : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
    const double ratio = identity_extension(2 * r).pair.a / identity_extension(r).pair.a;
    EXPECT_GT(ratio, previous);
    previous = ratio;
    if (r >= 4.0) EXPECT_NEAR(ratio, std::pow(2.0, 1.5), 0.15 * std::pow(2.0, 1.5)) << r;
  }
}

TEST(SquareNorm, LinearInDimensionAndCubicInRadius) {
  EXPECT_EQ(square_norm_bound(0, 1.0).value, 0.0);
  const double one = square_norm_bound(1, 2.0).value;
  for (int n : {2, 5, 11}) EXPECT_NEAR(square_norm_bound(n, 2.0).value, n * one, 1e-12 * n * one);
  // r³ is the large-r law; lower-order terms dominate below r = 8.
  double previous = 0.0;
  for (double r : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
    const double ratio = square_norm_bound(1, 2 * r).value / square_norm_bound(1, r).value;
    EXPECT_GT(ratio, previous);
    previous = ratio;
    if (r >= 8.0) EXPECT_NEAR(ratio, 8.0, 0.2 * 8.0) << r;
  }
  // Same chain assembled by hand.
  const IdentityExtension id = identity_extension(3.0);
  const GammaPair sq = power_rule(id.pair, 2);
  BarronEstimate y2 = make_upper(3.0 * sq.c, BoundedSetd::ball(1, 3.0));
  std::vector<std::pair<double, BarronEstimate>> terms;
  for (int i = 0; i < 4; ++i) terms.emplace_back(1.0, ridge_lift(y2, VectorXd::Unit(4, i), 4));
  EXPECT_NEAR(combine_subadditive(terms).value, square_norm_bound(4, 3.0).value, 1e-12);
}

TEST(WeakConverse, Diagnostic) {
  Eigen::MatrixXd a(2, 2);
  a << 3, 0, 4, 1;
  EXPECT_DOUBLE_EQ(weak_converse_diagnostic(2.0, VectorXd::Ones(2), a), 2.0 * (5.0 + 1.0));
}
