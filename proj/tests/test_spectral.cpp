#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "barronlab/errors.hpp"
#include "barronlab/spectral.hpp"
#include "oracles.hpp"

using namespace barronlab;
using Eigen::VectorXd;

namespace {

GridFunctiond gaussian_1d(double shift = 0.0, int N = 2048) {
  return GridFunctiond::sample(VectorXd::Constant(1, 0.0), VectorXd::Constant(1, 10.0),
                               N, [&](const VectorXd& x) {
                                 const double t = x[0] - shift;
                                 return std::exp(-0.5 * t * t);
                               });
}

GridFunctiond gaussian_2d(int N, double width = 8.0) {
  return GridFunctiond::sample(VectorXd::Zero(2), VectorXd::Constant(2, width), N,
                               [](const VectorXd& x) {
                                 return std::exp(-0.5 * x.squaredNorm());
                               });
}

}  // namespace

TEST(GridFunction, Invariants) {
  EXPECT_THROW(GridFunctiond(VectorXd::Zero(1), VectorXd::Constant(1, -1.0), 4,
                             VectorXd::Zero(4)),
               InvalidInput);
  EXPECT_THROW(GridFunctiond(VectorXd::Zero(2), VectorXd::Ones(2), 4,
                             VectorXd::Zero(15)),
               InvalidInput);
  VectorXd bad = VectorXd::Zero(4);
  bad[2] = std::nan("");
  EXPECT_THROW(GridFunctiond(VectorXd::Zero(1), VectorXd::Ones(1), 4, bad),
               InvalidInput);
}

TEST(ForwardFT, ZeroFunction) {
  const GridFunctiond f(VectorXd::Zero(2), VectorXd::Ones(2), 16,
                        VectorXd::Zero(256));
  const SpectrumGridd s = forward_ft(f, 5.0, 9);
  EXPECT_EQ(s.amplitudes().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(s.tail_estimate(), 0.0);
}

TEST(ForwardFT, GaussianPair) {
  const SpectrumGridd s = forward_ft(gaussian_1d(), 10.0, 401);
  ASSERT_EQ(s.size(), 401);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    const double w = s.node(k)[0];
    worst = std::max(worst, std::abs(s.amplitudes()[k] - oracle::gaussian_ft(w * w, 1)));
  }
  EXPECT_LT(worst, 1e-6);
  EXPECT_NEAR(s.cell_volume(), 20.0 / 400, 1e-15);
  EXPECT_LE(s.node(0).cwiseAbs().maxCoeff(), s.cutoff());
}

TEST(ForwardFT, TranslationIsPhase) {
  const double x0 = 1.3;
  const SpectrumGridd a = forward_ft(gaussian_1d(), 6.0, 121);
  const SpectrumGridd b = forward_ft(gaussian_1d(x0), 6.0, 121);
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double w = a.node(k)[0];
    EXPECT_NEAR(std::abs(a.amplitudes()[k]), std::abs(b.amplitudes()[k]), 1e-7);
    EXPECT_LT(std::abs(b.amplitudes()[k] -
                       a.amplitudes()[k] * std::polar(1.0, -w * x0)),
              1e-7);
  }
}

TEST(ForwardFT, Linearity) {
  const GridFunctiond f = gaussian_2d(32);
  const GridFunctiond g = GridFunctiond::sample(
      VectorXd::Zero(2), VectorXd::Constant(2, 8.0), 32,
      [](const VectorXd& x) { return std::cos(x[0]) * std::exp(-x.squaredNorm()); });
  const SpectrumGridd s = forward_ft(2.0 * f - 3.0 * g, 3.0, 17);
  const SpectrumGridd sf = forward_ft(f, 3.0, 17);
  const SpectrumGridd sg = forward_ft(g, 3.0, 17);
  const auto expected = (2.0 * sf.amplitudes() - 3.0 * sg.amplitudes()).eval();
  EXPECT_LT((s.amplitudes() - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ForwardFT, AliasingGuard) {
  const GridFunctiond f = gaussian_1d(0.0, 64);  // dx = 20/63
  EXPECT_THROW(forward_ft(f, 20.0, 33), ResolutionError);
  EXPECT_NO_THROW(forward_ft(f, 9.0, 33));
}

TEST(ForwardFT, TwoDimensionalGaussianAndDirectNode) {
  const GridFunctiond f = gaussian_2d(96);
  const SpectrumGridd s = forward_ft(f, 4.0, 21);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    worst = std::max(worst, std::abs(s.amplitudes()[k] -
                                     oracle::gaussian_ft(s.node(k).squaredNorm(), 2)));
  }
  EXPECT_LT(worst, 1e-7);
  const VectorXd w = s.node(37);
  EXPECT_LT(std::abs(fourier_at(f, w) - s.amplitudes()[37]), 1e-14);
}

TEST(InverseFT, RoundTrip) {
  const GridFunctiond f = gaussian_1d();
  const SpectrumGridd s = forward_ft(f, 10.0, 801);
  const auto back = inverse_ft(s, VectorXd::Zero(1), VectorXd::Constant(1, 5.0), 101);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < back.function.size(); ++j) {
    const double x = back.function.point(j)[0];
    worst = std::max(worst, std::abs(back.function.values()[j] - std::exp(-0.5 * x * x)));
  }
  EXPECT_LT(worst, 1e-4);
  EXPECT_LT(back.imaginary_residual, 1e-6);
}

TEST(InverseFT, ZeroAndSingleNode) {
  const SpectrumGridd zero(1, 2.0, SpectrumGridd::axis_nodes(2.0, 5),
                           Eigen::VectorXcd::Zero(5));
  const auto z = inverse_ft(zero, VectorXd::Zero(1), VectorXd::Ones(1), 11);
  EXPECT_EQ(z.function.values().cwiseAbs().maxCoeff(), 0.0);

  Eigen::MatrixXd node(2, 1);
  node << 1.5, -0.5;
  Eigen::VectorXcd amp(1);
  amp << std::complex<double>(2.0, 0.0);
  const SpectrumGridd one(node, amp, 0.25, 2.0);
  const auto r = inverse_ft(one, VectorXd::Zero(2), VectorXd::Ones(2), 7);
  for (Eigen::Index j = 0; j < r.function.size(); ++j) {
    const VectorXd x = r.function.point(j);
    EXPECT_NEAR(r.function.values()[j], 2.0 * 0.25 * std::cos(1.5 * x[0] - 0.5 * x[1]),
                1e-14);
  }
}

TEST(Plancherel, GaussianZeroAndChirp) {
  const GridFunctiond f = gaussian_1d();
  EXPECT_LT(plancherel_residual(f, forward_ft(f, 10.0, 801)), 1e-4);

  const GridFunctiond zero(VectorXd::Zero(1), VectorXd::Ones(1), 8, VectorXd::Zero(8));
  EXPECT_EQ(plancherel_residual(zero, forward_ft(zero, 1.0, 5)), 0.0);

  const GridFunctiond chirp = GridFunctiond::sample(
      VectorXd::Zero(1), VectorXd::Constant(1, 10.0), 2048,
      [](const VectorXd& x) { return std::cos(50.0 * x[0]); });
  EXPECT_GT(plancherel_residual(chirp, forward_ft(chirp, 10.0, 801)), 0.1);
}

TEST(SupportNorm, Examples) {
  const VectorXd w = (VectorXd(2) << 3.0, 4.0).finished();
  EXPECT_DOUBLE_EQ(support_norm(BoundedSetd::ball(2, 1.0), w), 5.0);
  EXPECT_DOUBLE_EQ(support_norm(BoundedSetd::ball(2, 2.0), w), 10.0);
  EXPECT_DOUBLE_EQ(support_norm(BoundedSetd::box((VectorXd(2) << 1.0, 2.0).finished()), w),
                   11.0);
  Eigen::MatrixXd v(2, 3);
  v << 1, 0, -1, 0, 1, 1;
  EXPECT_DOUBLE_EQ(support_norm(BoundedSetd::polytope(v), w), 4.0);
  EXPECT_EQ(support_norm(BoundedSetd::polytope(v), VectorXd::Zero(2)), 0.0);
  EXPECT_THROW(support_norm(BoundedSetd::ball(3, 1.0), w), InvalidInput);
  EXPECT_THROW(BoundedSetd::box(VectorXd::Ones(2), VectorXd::Ones(2)), InvalidInput);
  EXPECT_THROW(BoundedSetd::ball(2, 0.0), InvalidInput);
  EXPECT_THROW(BoundedSetd::polytope(Eigen::MatrixXd(2, 0)), InvalidInput);
}

TEST(SupportNorm, SeminormProperties) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N01;
  Eigen::MatrixXd v(3, 5);
  for (int i = 0; i < v.size(); ++i) v.data()[i] = N01(rng);
  const std::vector<BoundedSetd> sets = {
      BoundedSetd::ball(3, 1.7),
      BoundedSetd::box((VectorXd(3) << 0.5, 1.0, 2.0).finished()),
      BoundedSetd::polytope(v)};
  for (const auto& B : sets) {
    for (int t = 0; t < 200; ++t) {
      VectorXd a(3), b(3);
      for (int i = 0; i < 3; ++i) a[i] = N01(rng), b[i] = N01(rng);
      const double lambda = N01(rng);
      EXPECT_NEAR(support_norm(B, (lambda * a).eval()),
                  std::abs(lambda) * support_norm(B, a), 1e-12);
      EXPECT_LE(support_norm(B, (a + b).eval()),
                support_norm(B, a) + support_norm(B, b) + 1e-12);
    }
  }
}

TEST(Gradient, LinearAndConstant) {
  const VectorXd a = (VectorXd(2) << 0.7, -1.2).finished();
  const GridFunctiond lin = GridFunctiond::sample(
      VectorXd::Zero(2), VectorXd::Ones(2), 8, [&](const VectorXd& x) { return a.dot(x); });
  const auto g = gradient_grid(lin);
  ASSERT_EQ(g.size(), 2u);
  for (int d = 0; d < 2; ++d) {
    EXPECT_LT((g[d].values().array() - a[d]).abs().maxCoeff(), 1e-12);
  }
  const GridFunctiond c(VectorXd::Zero(2), VectorXd::Ones(2), 8, VectorXd::Constant(64, 3.0));
  for (const auto& gd : gradient_grid(c)) EXPECT_EQ(gd.values().cwiseAbs().maxCoeff(), 0.0);
  const GridFunctiond tiny(VectorXd::Zero(1), VectorXd::Ones(1), 3, VectorXd::Zero(3));
  EXPECT_THROW(gradient_grid(tiny), InvalidInput);
}

TEST(Gradient, DerivativeIdentityImprovesWithResolution) {
  double previous = 1.0;
  for (int N : {64, 128, 256}) {
    const GridFunctiond f = gaussian_2d(N);
    const auto grad = gradient_grid(f);
    const SpectrumGridd sf = forward_ft(f, 3.0, 15);
    const SpectrumGridd sd = forward_ft(grad[0], 3.0, 15);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < sf.size(); ++k) {
      const std::complex<double> expected =
          std::complex<double>(0.0, sf.node(k)[0]) * sf.amplitudes()[k];
      worst = std::max(worst, std::abs(sd.amplitudes()[k] - expected));
    }
    if (N >= 128) {
      EXPECT_LT(worst, 1e-3);
    }
    EXPECT_LT(worst, previous);
    previous = worst;
  }
}

TEST(RadialFT, GaussianClosedForm) {
  // exp(-r²/2) truncated at r = 12 in n = 2, 3, 5.
  const RadialProfile p([](int k, double r) {
    const double e = std::exp(-0.5 * r * r);
    switch (k) {
      case 0: return e;
      case 1: return -r * e;
      default: return (r * r - 1) * e;
    }
  }, 0.0, 12.0, 2);
  for (int n : {2, 3, 5}) {
    const std::vector<double> rho = {0.0, 0.3, 1.0, 2.5, 4.0};
    const auto out = radial_ft(p, n, rho);
    for (std::size_t i = 0; i < rho.size(); ++i) {
      EXPECT_NEAR(out.values[i], oracle::gaussian_ft(rho[i] * rho[i], n), 1e-10)
          << n << " " << rho[i];
    }
  }
}

TEST(RadialFT, ZeroAndLinearity) {
  const RadialProfile zero([](int, double) { return 0.0; }, 1.0, 2.0, 4);
  for (double v : radial_ft(zero, 3, {0.5, 4.0}).values) EXPECT_EQ(v, 0.0);
  const RadialProfile bump = bump_density(4, 0.5).translated(2.0);
  const RadialProfile tripled([&](int k, double r) { return 3.0 * bump.derivative(k, r); },
                              bump.lower(), bump.upper(), bump.max_order());
  const auto a = radial_ft(bump, 3, {1.0, 7.0});
  const auto b = radial_ft(tripled, 3, {1.0, 7.0});
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(b.values[i], 3.0 * a.values[i], 1e-14);
}

TEST(RadialFT, AgreesWithTwoDimensionalGrid) {
  const RadialProfile bump = bump_density(4, 1.0).translated(1.0);
  const GridFunctiond f = GridFunctiond::sample(
      VectorXd::Zero(2), VectorXd::Constant(2, 2.2), 256,
      [&](const VectorXd& x) { return bump(x.norm()); });
  std::vector<double> rho;
  for (double w : {0.5, 2.0, 5.0, 9.0}) rho.push_back(w);
  const auto radial = radial_ft(bump, 2, rho);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const VectorXd w = (VectorXd(2) << rho[i] * 0.6, rho[i] * 0.8).finished();
    const double grid = fourier_at(f, w).real();
    EXPECT_NEAR(radial.values[i], grid, 2e-4 * std::abs(radial.values[0]));
  }
}
