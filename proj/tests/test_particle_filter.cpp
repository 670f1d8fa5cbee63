#include "dogm/particle_filter.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

using namespace dogm;

namespace
{

Particle with_weights(double wp, double wv)
{
  Particle p;
  p.w_position = wp;
  p.w_velocity = wv;
  return p;
}

std::optional<Neighbor> brute_nearest(const std::vector<Vec2> & pts, const Vec2 & q, double radius)
{
  std::optional<Neighbor> best;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = (pts[i] - q).norm();
    if (d <= radius && (!best || d < best->distance)) {
      best = Neighbor{i, d};
    }
  }
  return best;
}

}  // namespace

TEST(PositionWeight, Examples)
{
  const MeasurementModel m;
  EXPECT_DOUBLE_EQ(update_weight_position(0.8, 0.0, m, 0.0), 0.8);
  EXPECT_NEAR(update_weight_position(1.0, 0.5, m, 0.1), std::exp(-0.5) * 0.9, 1e-15);
  EXPECT_NEAR(update_weight_position(1.0, 0.5, m, 0.1), 0.54588, 1e-5);
  EXPECT_DOUBLE_EQ(update_weight_position(0.5, std::nullopt, m, 0.1), 0.45);
}

TEST(VelocityWeight, Examples)
{
  const MeasurementModel m;
  const PeakGaussian<double, 2> kernel;
  const NearestMeasurement exact{0, 0.0, {3.0, -1.0}};
  EXPECT_DOUBLE_EQ(update_weight_velocity(0.123, {3.0, -1.0}, exact, kernel, m, 0.1), 1.0);
  EXPECT_DOUBLE_EQ(update_weight_velocity(0.7, {3.0, -1.0}, std::nullopt, kernel, m, 0.0), 0.7);
  const double f_d = std::exp(-0.5);
  EXPECT_NEAR(velocity_weight_law(f_d, 0.8, 0.1, 0.5), 0.66229, 1e-5);
  EXPECT_NEAR(velocity_weight_law(f_d, 0.8, 0.1, 0.5), f_d * 0.8 + (1.0 - f_d) * 0.9 * 0.5, 1e-15);
}

TEST(VelocityWeight, BoundedByUpdateAndPriorTerms)
{
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double f_d = u(rng), f_v = u(rng), eps = 0.5 * u(rng), w = u(rng);
    const double out = velocity_weight_law(f_d, f_v, eps, w);
    EXPECT_GE(out, 0.0);
    EXPECT_LE(out, std::max(f_v, (1.0 - eps) * w) + 1e-15);
  }
}

TEST(VelocityWeight, ContinuousInDistance)
{
  const MeasurementModel m;
  const PeakGaussian<double, 2> kernel;
  double prev = update_weight_velocity(0.4, {1.0, 0.0}, NearestMeasurement{0, 0.0, {0.5, 0.0}}, kernel, m, 0.1);
  for (double d = 1e-4; d < 3.0; d += 1e-4) {
    const double w = update_weight_velocity(0.4, {1.0, 0.0}, NearestMeasurement{0, d, {0.5, 0.0}}, kernel, m, 0.1);
    ASSERT_LT(std::abs(w - prev), 1e-3);
    prev = w;
  }
}

TEST(ResampleWeight, ModeSelection)
{
  EXPECT_EQ(resample_weight(with_weights(0.3, 0.7), WeightMode::dual), 0.7);
  EXPECT_EQ(resample_weight(with_weights(0.5, 0.5), WeightMode::dual), 0.5);
  EXPECT_EQ(resample_weight(with_weights(0.2, 0.9), WeightMode::position), 0.2);
  EXPECT_EQ(resample_weight(with_weights(0.2, 0.9), WeightMode::velocity), 0.9);
}

TEST(WeightMode, ParseAndPrint)
{
  for (auto m : {WeightMode::position, WeightMode::velocity, WeightMode::dual}) {
    EXPECT_EQ(parse_weight_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_weight_mode("both"), UsageError);
}

TEST(Predict, ConstantVelocityWithoutNoise)
{
  FilterParams params;
  params.process_noise_pos = 0.0;
  params.process_noise_vel = 0.0;
  std::vector<Particle> ps(2);
  ps[0].velocity = {10.0, 0.0};
  ps[1].position = {1.0, 2.0};
  predict(ps, 0.1, params, CounterStream(1));
  EXPECT_NEAR(ps[0].position.x(), 1.0, 1e-15);
  EXPECT_EQ(ps[0].position.y(), 0.0);
  EXPECT_EQ(ps[1].position, Vec2(1.0, 2.0));
  EXPECT_EQ(ps[1].velocity, Vec2::Zero());
  EXPECT_THROW(predict(ps, 0.0, params, CounterStream(1)), UsageError);
}

TEST(Predict, NoiseMeanWithinThreeSigma)
{
  FilterParams params;
  params.process_noise_pos = 0.1;
  const std::size_t n = 100000;
  std::vector<Particle> ps(n);
  for (auto & p : ps) {
    p.velocity = {2.0, -1.0};
  }
  predict(ps, 0.5, params, CounterStream(99));
  Vec2 mean = Vec2::Zero();
  for (const auto & p : ps) {
    mean += p.position;
  }
  mean /= static_cast<double>(n);
  const double bound = 3.0 * 0.1 / std::sqrt(static_cast<double>(n));
  EXPECT_NEAR(mean.x(), 1.0, bound);
  EXPECT_NEAR(mean.y(), -0.5, bound);
}

TEST(Predict, NoiseDependsOnlyOnParticleIndex)
{
  FilterParams params;
  std::vector<Particle> all(100);
  for (std::size_t i = 0; i < all.size(); ++i) {
    all[i].velocity = {static_cast<double>(i), 1.0};
  }
  auto whole = all;
  predict(whole, 0.05, params, CounterStream(5));
  for (std::size_t i = 0; i < all.size(); ++i) {
    const Particle & p = all[i];
    double a, b, c, d;
    CounterStream(5).normal_pair(2 * i, a, b);
    CounterStream(5).normal_pair(2 * i + 1, c, d);
    EXPECT_EQ(whole[i].position, Vec2(p.position + (p.velocity * 0.05 + 0.1 * Vec2(a, b))));
    EXPECT_EQ(whole[i].velocity, Vec2(p.velocity + 0.4 * Vec2(c, d)));
  }
}

TEST(Resample, EqualWeightsKeepEachParticleOnce)
{
  FilterParams params;
  params.particle_count = 50;
  params.birth_fraction = 0.0;
  std::vector<Particle> ps(50);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    ps[i] = with_weights(0.02, 0.02);
    ps[i].position = {static_cast<double>(i), 0.0};
  }
  std::mt19937_64 rng(1);
  const auto stats = resample(ps, params, {}, rng);
  ASSERT_EQ(ps.size(), 50u);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    EXPECT_EQ(ps[i].position.x(), static_cast<double>(i));
    EXPECT_DOUBLE_EQ(ps[i].w_position, 0.02);
    EXPECT_DOUBLE_EQ(ps[i].w_velocity, 0.02);
  }
  EXPECT_EQ(stats.survivors, 50u);
  EXPECT_FALSE(stats.full_rebirth);
}

TEST(Resample, SingleHeavyParticleFillsAllSlots)
{
  FilterParams params;
  params.particle_count = 20;
  params.birth_fraction = 0.25;
  std::vector<Particle> ps(10, with_weights(0.0, 0.0));
  ps[3] = with_weights(0.0, 0.8);
  ps[3].position = {7.0, 7.0};
  const std::vector<BirthRegion> regions{{{100.0, 100.0}, 0.5}};
  std::mt19937_64 rng(2);
  params.weight_mode = WeightMode::velocity;
  const auto stats = resample(ps, params, regions, rng);
  ASSERT_EQ(ps.size(), 20u);
  EXPECT_EQ(stats.survivors, 15u);
  EXPECT_EQ(stats.births, 5u);
  for (std::size_t i = 0; i < 15; ++i) {
    EXPECT_EQ(ps[i].position, Vec2(7.0, 7.0));
  }
  for (std::size_t i = 15; i < 20; ++i) {
    EXPECT_GE(ps[i].position.x(), 100.0);
    EXPECT_LE(ps[i].position.x(), 100.5);
    EXPECT_LE(ps[i].velocity.lpNorm<Eigen::Infinity>(), params.v_init_max);
  }
  for (const auto & p : ps) {
    EXPECT_DOUBLE_EQ(p.w_position, 0.8 / 20.0);
    EXPECT_DOUBLE_EQ(p.w_velocity, 0.8 / 20.0);
  }
}

TEST(Resample, AllZeroWeightsTriggersFullRebirth)
{
  FilterParams params;
  params.particle_count = 30;
  std::vector<Particle> ps(30, with_weights(0.0, 0.0));
  const std::vector<BirthRegion> regions{{{0.0, 0.0}, 1.0}, {{5.0, 5.0}, 1.0}};
  std::mt19937_64 rng(3);
  const auto stats = resample(ps, params, regions, rng);
  EXPECT_TRUE(stats.full_rebirth);
  EXPECT_EQ(stats.births, 30u);
  EXPECT_EQ(ps.size(), 30u);
  for (const auto & p : ps) {
    EXPECT_DOUBLE_EQ(p.w_position, 1.0 / 30.0);
  }
  // Nothing usable and nowhere to place births: population empties.
  std::vector<Particle> none(5, with_weights(0.0, 0.0));
  resample(none, params, {}, rng);
  EXPECT_TRUE(none.empty());
}

TEST(Resample, ConservesParticleCount)
{
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    FilterParams params;
    params.particle_count = 1 + static_cast<std::size_t>(u(rng) * 300);
    params.birth_fraction = u(rng);
    std::vector<Particle> ps(static_cast<std::size_t>(u(rng) * 400) + 1);
    for (auto & p : ps) {
      p = with_weights(u(rng), u(rng));
    }
    const std::vector<BirthRegion> regions{{{0.0, 0.0}, 0.5}};
    resample(ps, params, regions, rng);
    EXPECT_EQ(ps.size(), params.particle_count);
  }
}

TEST(Resample, MonteCarloFrequenciesAreProportional)
{
  FilterParams params;
  params.particle_count = 4;
  params.birth_fraction = 0.0;
  params.weight_mode = WeightMode::position;
  const std::vector<double> w{0.1, 0.2, 0.3, 0.4};
  std::vector<double> counts(4, 0.0);
  std::mt19937_64 rng(8);
  const int runs = 100000;
  for (int r = 0; r < runs; ++r) {
    std::vector<Particle> ps(4);
    for (std::size_t i = 0; i < 4; ++i) {
      ps[i] = with_weights(w[i], 0.0);
      ps[i].position = {static_cast<double>(i), 0.0};
    }
    resample(ps, params, {}, rng);
    for (const auto & p : ps) {
      counts[static_cast<std::size_t>(p.position.x())] += 1.0;
    }
  }
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(counts[i] / (4.0 * runs), w[i], 0.01);
  }
}

TEST(NearestMeasurement, Examples)
{
  const std::vector<Vec2> pts{{2.0, 0.0}};
  const std::vector<GlobalMeasurement> ms{{{2.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}}};
  const SpatialIndex index(pts, 5.0);
  Particle p;
  const auto nn = nearest_measurement(p, index, ms, 5.0);
  ASSERT_TRUE(nn);
  EXPECT_EQ(nn->index, 0u);
  EXPECT_DOUBLE_EQ(nn->distance, 2.0);
  EXPECT_EQ(nn->velocity, Vec2(1.0, 0.0));
  EXPECT_FALSE(nearest_measurement(p, SpatialIndex({}, 5.0), {}, 5.0));
  EXPECT_FALSE(nearest_measurement(p, index, ms, 1.5));
}

TEST(NearestMeasurement, MatchesBruteForce)
{
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ux(-100.0, 100.0), uy(-12.5, 12.5);
  std::vector<Vec2> pts;
  for (int k = 0; k < 1000; ++k) {
    pts.push_back({ux(rng), uy(rng)});
  }
  pts.push_back(pts[10]);  // exact duplicate: lowest index must win
  for (double bucket : {0.7, 5.0}) {
    const SpatialIndex index(pts, bucket);
    for (int q = 0; q < 2000; ++q) {
      const Vec2 query = q == 0 ? pts[10] : Vec2(ux(rng), uy(rng));
      const auto got = index.nearest(query, 5.0);
      const auto want = brute_nearest(pts, query, 5.0);
      ASSERT_EQ(got.has_value(), want.has_value());
      if (got) {
        ASSERT_EQ(got->index, want->index);
        ASSERT_EQ(got->distance, want->distance);
      }
    }
  }
}

TEST(FilterParams, Validation)
{
  FilterParams p;
  EXPECT_NO_THROW(p.validate());
  p.epsilon = 1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = FilterParams{};
  p.sigma_v(0, 0) = -1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = FilterParams{};
  p.particle_count = 0;
  EXPECT_THROW(p.validate(), ConfigError);
}
