#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "subwayps/signal.hpp"

using namespace subwayps;

namespace {

// Independent windowed mean: re-sums every window from scratch.
std::vector<double> brute_force_means(const std::vector<double>& a, std::size_t n) {
  std::vector<double> out;
  for (std::size_t k = n - 1; k < a.size(); ++k) {
    long double sum = 0;
    for (std::size_t i = k + 1 - n; i <= k; ++i) sum += a[i];
    out.push_back(static_cast<double>(sum / n));
  }
  return out;
}

std::vector<magnitude_sample> as_stream(const std::vector<double>& a) {
  std::vector<magnitude_sample> out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back({20.0 * i, a[i]});
  return out;
}

}  // namespace

TEST(Synthesize, ExamplesAndTimestamp) {
  EXPECT_EQ(synthesize({0, 0, 0, 0}), (magnitude_sample{0, 0}));
  EXPECT_EQ(synthesize({10, 3, 4, 0}), (magnitude_sample{10, 5}));
  EXPECT_EQ(synthesize({20, 1, 2, 2}), (magnitude_sample{20, 3}));
}

TEST(Synthesize, RejectsNonFiniteComponentsByField) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  try {
    synthesize({0, 1, nan, 0});
    FAIL() << "expected rejection";
  } catch (const rejected_sample& e) {
    EXPECT_EQ(e.field(), "ay");
  }
  EXPECT_THROW(synthesize({0, inf, 0, 0}), rejected_sample);
  EXPECT_THROW(synthesize({0, 0, 0, -inf}), rejected_sample);
  EXPECT_THROW(synthesize({nan, 0, 0, 0}), rejected_sample);
  EXPECT_THROW(synthesize({-1, 0, 0, 0}), rejected_sample);
}

TEST(Synthesize, InvariantUnderPermutationAndSignFlip) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 500; ++trial) {
    double v[3] = {u(rng), u(rng), u(rng)};
    const double a = synthesize({0, v[0], v[1], v[2]}).a;
    std::sort(v, v + 3);
    do {
      for (int signs = 0; signs < 8; ++signs) {
        const double x = (signs & 1) ? -v[0] : v[0];
        const double y = (signs & 2) ? -v[1] : v[1];
        const double z = (signs & 4) ? -v[2] : v[2];
        EXPECT_NEAR(synthesize({0, x, y, z}).a, a, 1e-12);
      }
    } while (std::next_permutation(v, v + 3));
  }
}

TEST(Synthesize, ZeroOnlyForZeroVector) {
  EXPECT_EQ(synthesize({0, 0, 0, 0}).a, 0.0);
  EXPECT_GT(synthesize({0, 1e-300, 0, 0}).a, 0.0);
  EXPECT_GT(synthesize({0, 0, -1e-9, 0}).a, 0.0);
}

TEST(Bias, SubtractedPerAxis) {
  const auto s = subtract_bias({5, 1.5, 2.0, 0.5}, {0.5, -2.0, 0.5});
  EXPECT_EQ(s, (accel_sample{5, 1.0, 4.0, 0.0}));
}

TEST(Smooth, ConstantInputIsFixedPoint) {
  const auto out = smooth(as_stream(std::vector<double>(500, 0.5)), 100);
  ASSERT_EQ(out.size(), 401u);
  for (const auto& s : out) EXPECT_DOUBLE_EQ(s.a, 0.5);
}

TEST(Smooth, TwoPointMeanAtSecondTimestamp) {
  const auto out = smooth(std::vector<magnitude_sample>{{0, 0}, {20, 1}}, 2);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], (magnitude_sample{20, 0.5}));
}

TEST(Smooth, WarmUpEmitsNothing) {
  rolling_mean w(3);
  EXPECT_FALSE(w.push({0, 1}));
  EXPECT_FALSE(w.push({1, 1}));
  EXPECT_TRUE(w.push({2, 1}));
  EXPECT_TRUE(smooth(as_stream({1, 2}), 3).empty());
  EXPECT_THROW(rolling_mean(0), config_error);
}

TEST(Smooth, MatchesBruteForceOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::vector<double> a(1000);
  for (auto& v : a) v = u(rng);
  const auto expected = brute_force_means(a, 100);
  const auto got = smooth(as_stream(a), 100);
  ASSERT_EQ(got.size(), expected.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_NEAR(got[i].a, expected[i], 1e-9);
    EXPECT_EQ(got[i].t_ms, 20.0 * (i + 99));
  }
}

TEST(Smooth, BoundedByWindowExtremesAndDeterministic) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::uniform_int_distribution<std::size_t> len(1, 60);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = len(rng);
    std::vector<double> a(200);
    for (auto& v : a) v = u(rng);
    const auto out = smooth(as_stream(a), n);
    ASSERT_EQ(out, smooth(as_stream(a), n));
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto first = a.begin() + static_cast<std::ptrdiff_t>(i);
      const auto [lo, hi] = std::minmax_element(first, first + static_cast<std::ptrdiff_t>(n));
      EXPECT_GE(out[i].a, *lo - 1e-12);
      EXPECT_LE(out[i].a, *hi + 1e-12);
    }
  }
}

TEST(ResampleParams, ScalesSampleCounts) {
  EXPECT_EQ(resample_params(presets::worldwide, 50.0), presets::worldwide);
  const auto half = resample_params(presets::worldwide, 25.0);
  EXPECT_EQ(half.window_n, 50u);
  EXPECT_EQ(half.delta_below, 125u);
  EXPECT_EQ(half.delta_above, 175u);
  EXPECT_DOUBLE_EQ(half.gamma_ms2, 0.2);
  const auto twice = resample_params(presets::worldwide, 100.0);
  EXPECT_EQ(twice.window_n, 200u);
  EXPECT_EQ(twice.delta_below, 500u);
  EXPECT_EQ(twice.delta_above, 700u);
  EXPECT_EQ(resample_params(presets::worldwide, 0.01).window_n, 1u);
  EXPECT_THROW(resample_params(presets::worldwide, 0.0), config_error);
  EXPECT_THROW(resample_params(presets::worldwide, -5.0), config_error);
}
