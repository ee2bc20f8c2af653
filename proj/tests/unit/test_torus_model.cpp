#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rgg/calibration.hpp"
#include "rgg/errors.hpp"
#include "rgg/rng.hpp"
#include "rgg/torus_model.hpp"

using namespace rgg;

TEST(CircleDistance, Examples) {
  EXPECT_NEAR(circle_distance(0.4, -0.4), 0.2, 1e-15);
  EXPECT_EQ(circle_distance(0.0, 0.0), 0.0);
  EXPECT_NEAR(circle_distance(0.25, -0.25), 0.5, 1e-15);
  EXPECT_NEAR(circle_distance(1.3, 0.2), 0.1, 1e-12);  // wrapped on entry
  EXPECT_THROW(circle_distance(std::nan(""), 0.0), InvalidArgument);
  EXPECT_THROW(circle_distance(INFINITY, 0.0), InvalidArgument);
}

TEST(CircleDistance, SymmetricAndTriangleInequality) {
  Rng rng(7);
  for (int i = 0; i < 100'000; ++i) {
    const double a = rng.torus_coordinate(), b = rng.torus_coordinate(), c = rng.torus_coordinate();
    const double ab = circle_distance(a, b);
    ASSERT_EQ(ab, circle_distance(b, a));
    ASSERT_GE(ab, 0.0);
    ASSERT_LE(ab, 0.5);
    ASSERT_LE(ab, circle_distance(a, c) + circle_distance(c, b) + 1e-15);
  }
}

TEST(PairDistance, Examples) {
  const std::vector<double> o{0.0, 0.0}, v{0.3, 0.4};
  EXPECT_NEAR(pair_distance(o, v, Norm::lq(2)), 0.25, 1e-15);
  const std::vector<double> a{0.45, -0.45}, b{-0.45, 0.45};
  EXPECT_NEAR(pair_distance(a, b, Norm::lq(1)), 0.2, 1e-12);
  EXPECT_NEAR(pair_distance(a, b, Norm::infinity()), 0.1, 1e-12);
  const std::vector<double> three{0.0, 0.0, 0.0};
  EXPECT_THROW(pair_distance(o, three, Norm::lq(2)), InvalidArgument);
}

TEST(PairDistance, LongVectorsMatchSerialSum) {
  Rng rng(11);
  for (std::size_t d : {1u, 7u, 255u, 256u, 257u, 5000u, 100'003u}) {
    std::vector<double> u(d), v(d);
    for (auto& x : u) x = rng.torus_coordinate();
    for (auto& x : v) x = rng.torus_coordinate();
    long double serial = 0.0L;
    double mx = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double c = circle_distance(u[i], v[i]);
      serial += static_cast<long double>(c) * c * c;
      mx = std::max(mx, c);
    }
    EXPECT_NEAR(pair_distance(u, v, Norm::lq(3)), static_cast<double>(serial), 1e-13 * static_cast<double>(d));
    EXPECT_EQ(pair_distance(u, v, Norm::infinity()), mx);
  }
}

TEST(Norm, ParseAndValidate) {
  EXPECT_EQ(Norm::parse("2"), Norm::lq(2));
  EXPECT_TRUE(Norm::parse("inf").is_infinite());
  EXPECT_TRUE(Norm::parse("infinity").is_infinite());
  EXPECT_THROW(Norm::parse("0"), InvalidArgument);
  EXPECT_THROW(Norm::parse("x"), InvalidArgument);
  EXPECT_THROW(Norm::lq(0), InvalidArgument);
  EXPECT_THROW(Norm::infinity().q(), InvalidArgument);
}

TEST(ModelConfig, Invariants) {
  ModelConfig c;
  c.n = 1;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.n = 10;
  c.p = 1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.p = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.p = 0.3;
  c.d = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.d = 3;
  EXPECT_NO_THROW(c.validate());
}

TEST(SamplePositions, DeterministicAndStreamSeparated) {
  ModelConfig c;
  c.n = 2;
  c.d = 3;
  c.master_seed = 99;
  EXPECT_EQ(sample_positions(c, 0), sample_positions(c, 0));
  EXPECT_FALSE(sample_positions(c, 0) == sample_positions(c, 1));
  const auto five = sample_positions(c, 5);
  for (double x : five.data()) {
    EXPECT_GE(x, -0.5);
    EXPECT_LT(x, 0.5);
  }
}

TEST(SamplePositions, UniformMean) {
  ModelConfig c;
  c.n = 1000;
  c.d = 1;
  c.master_seed = 3;
  const auto pos = sample_positions(c, 0);
  double s = 0.0;
  for (double x : pos.data()) s += x;
  EXPECT_LE(std::fabs(s / 1000.0), 3.0 * (1.0 / std::sqrt(12.0)) / std::sqrt(1000.0));
}

TEST(BuildRgg, Examples) {
  Positions pos(3, 1, {0.0, 0.1, 0.3});
  const auto g = build_rgg(pos, 0.15, Norm::lq(1));
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_TRUE(g(0, 1));
  EXPECT_TRUE(g(1, 0));
  EXPECT_FALSE(g(0, 2));
  EXPECT_FALSE(g(1, 2));

  ModelConfig c;
  c.n = 30;
  c.d = 4;
  const auto p = sample_positions(c, 1);
  EXPECT_EQ(build_rgg(p, 0.0, Norm::lq(2)).edge_count(), 0u);
  EXPECT_EQ(build_rgg(p, 4 * 0.25, Norm::lq(2)).edge_count(), 30u * 29u / 2u);
  EXPECT_EQ(build_rgg(p, 0.5, Norm::infinity()).edge_count(), 30u * 29u / 2u);
  EXPECT_THROW(build_rgg(p, -1.0, Norm::lq(2)), InvalidArgument);
}

TEST(BuildRgg, InclusiveThreshold) {
  Positions pos(2, 1, {0.0, 0.25});
  EXPECT_TRUE(build_rgg(pos, 0.25, Norm::lq(1))(0, 1));
  EXPECT_FALSE(build_rgg(pos, std::nextafter(0.25, 0.0), Norm::lq(1))(0, 1));
}

TEST(BuildRgg, TranslationInvariance) {
  ModelConfig c;
  c.n = 60;
  c.d = 5;
  const auto pos = sample_positions(c, 2);
  const std::vector<double> shift{0.31, -0.47, 0.05, 0.49, -0.2};
  std::vector<double> moved(pos.data().begin(), pos.data().end());
  for (std::size_t v = 0; v < c.n; ++v)
    for (std::size_t i = 0; i < c.d; ++i) moved[v * c.d + i] += shift[i];
  const Positions shifted(c.n, c.d, moved);
  for (Norm norm : {Norm::lq(1), Norm::lq(2), Norm::infinity()}) {
    const double tau = norm.is_infinite() ? 0.35 : (norm.q() == 1 ? 1.2 : 0.4);
    const auto a = build_rgg(pos, tau, norm);
    const auto b = build_rgg(shifted, tau, norm);
    std::size_t mismatches = 0;
    for (std::size_t u = 0; u < c.n; ++u)
      for (std::size_t v = u + 1; v < c.n; ++v) mismatches += a(u, v) != b(u, v);
    EXPECT_EQ(mismatches, 0u);
  }
}

TEST(SampleRgg, MatchesMaterializedPositions) {
  for (Norm norm : {Norm::lq(2), Norm::infinity()}) {
    ModelConfig c;
    c.n = 50;
    c.d = 300;
    c.norm = norm;
    c.master_seed = 17;
    const double tau = norm.is_infinite() ? 0.49 : 25.0;
    EXPECT_EQ(sample_rgg(c, tau, 4), build_rgg(sample_positions(c, 4), tau, norm));
  }
}

TEST(DistanceLaw, OneDimensionKolmogorovSmirnov) {
  for (int q : {1, 2, 3}) {
    ModelConfig c;
    c.n = 200'000;
    c.d = 1;
    c.master_seed = 1234 + q;
    const auto pos = sample_positions(c, 0);
    std::vector<double> delta;
    delta.reserve(100'000);
    for (std::size_t i = 0; i < 100'000; ++i) delta.push_back(pair_distance(pos.row(2 * i), pos.row(2 * i + 1), Norm::lq(q)));
    std::sort(delta.begin(), delta.end());
    // P(U^q <= x) = 2 x^{1/q} for U ~ Uniform(0, 1/2).
    double ks = 0.0;
    const double n = static_cast<double>(delta.size());
    for (std::size_t i = 0; i < delta.size(); ++i) {
      const double f = std::min(1.0, 2.0 * std::pow(delta[i], 1.0 / q));
      ks = std::max({ks, std::fabs(f - i / n), std::fabs(f - (i + 1) / n)});
    }
    EXPECT_LT(ks, 0.01) << "q=" << q;
  }
}

TEST(LinfCalibration, EdgeDensityMatchesP) {
  ModelConfig c;
  c.n = 300;
  c.d = 20;
  c.p = 0.3;
  c.norm = Norm::infinity();
  c.master_seed = 8;
  const auto th = calibrate_threshold_linf(c.d, c.p);
  const auto g = sample_rgg(c, th.tau, 0);
  const double pairs = 300.0 * 299.0 / 2.0;
  const double density = static_cast<double>(g.edge_count()) / pairs;
  // Edge indicators are pairwise independent on the torus, so the binomial
  // standard error is exact.
  EXPECT_LE(std::fabs(density - 0.3), 3.0 * std::sqrt(0.3 * 0.7 / pairs));
}

TEST(SampleGnp, Examples) {
  EXPECT_EQ(sample_gnp(20, 0.0, 1, 0).edge_count(), 0u);
  EXPECT_EQ(sample_gnp(20, 1.0, 1, 0).edge_count(), 190u);
  EXPECT_EQ(sample_gnp(20, 0.4, 1, 3), sample_gnp(20, 0.4, 1, 3));
  double total = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) total += static_cast<double>(sample_gnp(200, 0.5, 5, s).edge_count());
  const double pairs = 200.0 * 199.0 / 2.0;
  EXPECT_LE(std::fabs(total / 50.0 - 0.5 * pairs), 4.0 * std::sqrt(pairs * 0.25 / 50.0));
}

TEST(EdgeList, RoundTrip) {
  const auto g = sample_gnp(15, 0.4, 2, 0);
  std::stringstream ss;
  g.write_edge_list(ss);
  EXPECT_EQ(AdjacencyMatrix::read_edge_list(ss, 15), g);
}
