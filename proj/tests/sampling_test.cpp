#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "pinn/sampling.hpp"

using namespace pinn;

namespace {

const std::vector<Interval> kDomain = {{0.0, 2.0}, {0.0, 4.0}};

/// Two-sample Kolmogorov-Smirnov statistic on one coordinate.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

std::vector<double> coordinate(const SampleBatch& b, int axis) {
  std::vector<double> out;
  out.reserve(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out.push_back(b.point(i)[axis]);
  return out;
}

TEST(UniformSample, AllPointsInBounds) {
  SampleBatch b = uniform_sample(kDomain, 1000, 7);
  ASSERT_EQ(b.size(), 1000u);
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_TRUE(kDomain[0].contains(b.point(i)[0]));
    EXPECT_TRUE(kDomain[1].contains(b.point(i)[1]));
  }
}

TEST(UniformSample, DeterministicUnderSeed) {
  SampleBatch a = uniform_sample(kDomain, 500, 99);
  SampleBatch b = uniform_sample(kDomain, 500, 99);
  EXPECT_EQ(a.coords, b.coords);
  SampleBatch c = uniform_sample(kDomain, 500, 100);
  EXPECT_NE(a.coords, c.coords);
}

TEST(UniformSample, CoordinateMeansNearMidpoint) {
  const std::size_t n = 100000;
  SampleBatch b = uniform_sample(kDomain, n, 3);
  for (int axis = 0; axis < 2; ++axis) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += b.point(i)[axis];
    mean /= static_cast<double>(n);
    const double mid = 0.5 * (kDomain[axis].lo + kDomain[axis].hi);
    const double sigma = kDomain[axis].length() / std::sqrt(12.0 * n);
    EXPECT_NEAR(mean, mid, 3.0 * sigma);
  }
}

TEST(Progressive, Stage0StaysInSeedStrip) {
  // seeded at the initial-data strip t in [0, 0.4]
  std::vector<Box> seeds = {{{0.0, 2.0}, {0.0, 0.4}}};
  PartitionSchedule sched = make_progressive_schedule(kDomain, seeds, 0.5, 4, 100);
  SampleBatch b = progressive_sample(sched, 0, 2000, 11);
  for (std::size_t i = 0; i < b.size(); ++i) ASSERT_LE(b.point(i)[1], 0.4);
}

TEST(Progressive, FinalStageMatchesUniform) {
  std::vector<Box> seeds = {{{0.0, 0.5}, {0.0, 0.5}}};
  PartitionSchedule sched = make_progressive_schedule(kDomain, seeds, 0.5, 5, 100);
  const std::size_t n = 10000;
  SampleBatch prog = progressive_sample(sched, sched.stages - 1, n, 42);
  SampleBatch uni = uniform_sample(kDomain, n, 43);
  // 1% critical value for the two-sample KS statistic
  const double crit = 1.628 * std::sqrt(2.0 / static_cast<double>(n));
  for (int axis = 0; axis < 2; ++axis)
    EXPECT_LT(ks_statistic(coordinate(prog, axis), coordinate(uni, axis)), crit);
}

TEST(Progressive, NestingHoldsOnRandomSchedules) {
  SplitMix64 rng(2718);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<Interval> domain = {{0.0, rng.uniform(1.0, 3.0)}, {0.0, rng.uniform(2.0, 5.0)}};
    // two disjoint seed boxes separated along the time axis
    const double split = rng.uniform(0.3, 0.7) * domain[1].hi;
    std::vector<Box> seeds = {
        {{0.0, rng.uniform(0.5, domain[0].hi)}, {0.0, split * rng.uniform(0.3, 0.9)}},
        {{0.0, rng.uniform(0.5, domain[0].hi)},
         {split * 1.05, domain[1].hi}}};
    const int stages = 3 + static_cast<int>(rng.below(4));
    PartitionSchedule sched =
        make_progressive_schedule(domain, seeds, rng.uniform(0.2, 0.8), stages, 50);

    ASSERT_EQ(static_cast<int>(sched.stage_boxes.size()), stages);
    for (int s = 1; s < stages; ++s) {
      const auto& prev = sched.boxes_at(s - 1);
      const auto& cur = sched.boxes_at(s);
      for (std::size_t b = 0; b < prev.size(); ++b) {
        bool contained = false;
        for (const Box& big : cur) contained |= box_contains(big, prev[b]);
        ASSERT_TRUE(contained) << "stage " << s << " box " << b << " rep " << rep;
      }
    }
    // within a stage, boxes stay pairwise disjoint
    for (int s = 0; s < stages - 1; ++s) {
      const auto& boxes = sched.boxes_at(s);
      for (std::size_t p = 0; p < boxes.size(); ++p)
        for (std::size_t q = p + 1; q < boxes.size(); ++q) {
          bool overlap = true;
          for (std::size_t a = 0; a < boxes[p].size(); ++a)
            overlap &= boxes[p][a].lo < boxes[q][a].hi && boxes[q][a].lo < boxes[p][a].hi;
          ASSERT_FALSE(overlap) << "stage " << s << " rep " << rep;
        }
    }
    // final stage covers the whole domain
    ASSERT_EQ(sched.boxes_at(stages - 1).size(), 1u);
    EXPECT_TRUE(box_contains(sched.boxes_at(stages - 1)[0], domain));
    // stage samples stay inside their stage region
    for (int s = 0; s < stages; ++s) {
      SampleBatch b = progressive_sample(sched, s, 200, 1000 + rep);
      for (std::size_t i = 0; i < b.size(); ++i) {
        bool inside = false;
        for (const Box& box : sched.boxes_at(s)) inside |= box_contains_point(box, b.point(i));
        ASSERT_TRUE(inside);
      }
    }
  }
}

TEST(Progressive, StageOutOfRangeRejected) {
  std::vector<Box> seeds = {{{0.0, 1.0}, {0.0, 1.0}}};
  PartitionSchedule sched = make_progressive_schedule(kDomain, seeds, 0.5, 3, 100);
  EXPECT_THROW(progressive_sample(sched, 3, 10, 1), ArgumentError);
}

TEST(Progressive, OverlappingSeedsRejected) {
  std::vector<Box> seeds = {{{0.0, 1.0}, {0.0, 1.0}}, {{0.5, 1.5}, {0.5, 1.5}}};
  EXPECT_THROW(make_progressive_schedule(kDomain, seeds, 0.5, 3, 100), ArgumentError);
}

TEST(GradientWeighted, ConstantNormBehavesUniformly) {
  auto norm_fn = [](std::span<const double>) { return 1.0; };
  const std::size_t n = 10000;
  SampleBatch b = gradient_weighted_sample(norm_fn, kDomain, n, 5, 256);
  EXPECT_FALSE(b.flat_field_fallback);
  SampleBatch uni = uniform_sample(kDomain, n, 6);
  const double crit = 1.628 * std::sqrt(2.0 / static_cast<double>(n));
  for (int axis = 0; axis < 2; ++axis)
    EXPECT_LT(ks_statistic(coordinate(b, axis), coordinate(uni, axis)), crit);
}

TEST(GradientWeighted, FlatFieldFallsBackToUniform) {
  auto norm_fn = [](std::span<const double>) { return 0.0; };
  SampleBatch b = gradient_weighted_sample(norm_fn, kDomain, 100, 5, 256);
  EXPECT_TRUE(b.flat_field_fallback);
  EXPECT_EQ(b.size(), 100u);
}

TEST(GradientWeighted, TwoToOneRegionRatio) {
  // gradient norm 2 on the left half, 1 on the right; equal areas ->
  // accepted counts in ratio 2:1 within +-5% over 1e5 points
  auto norm_fn = [](std::span<const double> x) { return x[0] < 1.0 ? 2.0 : 1.0; };
  const std::size_t n = 100000;
  SampleBatch b = gradient_weighted_sample(norm_fn, kDomain, n, 12, 400);
  std::size_t left = 0;
  for (std::size_t i = 0; i < b.size(); ++i) left += b.point(i)[0] < 1.0 ? 1 : 0;
  const double ratio =
      static_cast<double>(left) / static_cast<double>(b.size() - left);
  EXPECT_NEAR(ratio, 2.0, 0.1);
}

TEST(GradientWeighted, AcceptanceMonotoneInNormDeciles) {
  auto norm_fn = [](std::span<const double> x) {
    return std::abs(std::sin(x[0] * 2.0) * std::cos(x[1])) + 0.05;
  };
  AcceptanceStats stats;
  gradient_weighted_sample(norm_fn, kDomain, 20000, 8, 256, &stats);
  std::vector<double> sorted = stats.norms;
  std::sort(sorted.begin(), sorted.end());
  double prev_rate = -1.0;
  for (int d = 0; d < 10; ++d) {
    const double lo = sorted[sorted.size() * d / 10];
    const double hi = d == 9 ? sorted.back() + 1.0 : sorted[sorted.size() * (d + 1) / 10];
    std::size_t total = 0, taken = 0;
    for (std::size_t i = 0; i < stats.norms.size(); ++i) {
      if (stats.norms[i] < lo || stats.norms[i] >= hi) continue;
      ++total;
      taken += stats.accepted[i] ? 1 : 0;
    }
    if (total < 200) continue;
    const double rate = static_cast<double>(taken) / static_cast<double>(total);
    EXPECT_GE(rate, prev_rate - 0.03) << "decile " << d;  // statistical slack
    prev_rate = rate;
  }
}

TEST(GradientWeighted, RequestedCountAndDeterminism) {
  auto norm_fn = [](std::span<const double> x) { return x[0] + 0.1; };
  SampleBatch a = gradient_weighted_sample(norm_fn, kDomain, 777, 9, 256);
  SampleBatch b = gradient_weighted_sample(norm_fn, kDomain, 777, 9, 256);
  EXPECT_EQ(a.size(), 777u);
  EXPECT_EQ(a.coords, b.coords);
  for (std::size_t i = 0; i < a.size(); ++i)
    ASSERT_TRUE(kDomain[0].contains(a.point(i)[0]) && kDomain[1].contains(a.point(i)[1]));
}

}  // namespace
