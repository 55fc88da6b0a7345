#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "esrb/events.hpp"
#include "test_support.hpp"

using namespace esrb;

namespace {

EventStream single_pixel(double t0, double t1, std::vector<Event> ev) {
  return EventStream(1, 1, t0, t1, std::move(ev));
}

EventStream three_events() {
  return single_pixel(0.0, 1.0, {{0.2, 0, 0, 1}, {0.5, 0, 0, -1}, {0.7, 0, 0, 1}});
}

}  // namespace

TEST(EventStreamTest, RejectsInvalidEvents) {
  EXPECT_THROW(single_pixel(0, 1, {{0.5, 0, 0, 0}}), std::domain_error);
  EXPECT_THROW(single_pixel(0, 1, {{1.0, 0, 0, 1}}), std::domain_error);
  EXPECT_THROW(single_pixel(0, 1, {{-0.1, 0, 0, 1}}), std::domain_error);
  EXPECT_THROW(single_pixel(0, 1, {{0.5, 1, 0, 1}}), std::domain_error);
  EXPECT_THROW(single_pixel(0, 1, {{0.6, 0, 0, 1}, {0.5, 0, 0, 1}}), std::domain_error);
  EXPECT_THROW(EventStream(1, 1, 1.0, 0.5), std::domain_error);
}

TEST(EventStreamTest, FromUnsortedAppliesTieBreak) {
  auto s = EventStream::from_unsorted(
      3, 3, 0, 1, {{0.5, 2, 1, 1}, {0.5, 0, 2, -1}, {0.5, 1, 1, 1}, {0.1, 2, 2, 1}});
  std::vector<Event> want{{0.1, 2, 2, 1}, {0.5, 1, 1, 1}, {0.5, 2, 1, 1}, {0.5, 0, 2, -1}};
  EXPECT_TRUE(std::ranges::equal(s.events(), want));
}

TEST(SignedCountTest, Examples) {
  const auto s = three_events();
  EXPECT_EQ(signed_count(s, 0, 0, 0.0, 1.0), 1);
  EXPECT_EQ(signed_count(s, 0, 0, 0.5, 0.2), -1);
  EXPECT_EQ(signed_count(s, 0, 0, 0.5, 0.5), 0);
  EXPECT_EQ(signed_count(s, 0, 0, 0.2, 0.5), 1);  // 0.2 in, 0.5 out
  EXPECT_THROW(signed_count(s, 1, 0, 0, 1), std::domain_error);
  EXPECT_THROW(signed_count(s, 0, -1, 0, 1), std::domain_error);
}

TEST(SignedCountTest, AdditiveOverRandomTriples) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = oracle::random_stream(rng, 4, 3, 0.0, 1.0, 60);
    const double a = u(rng), b = u(rng), c = u(rng);
    const int x = trial % 4, y = trial % 3;
    EXPECT_EQ(signed_count(s, x, y, a, c), signed_count(s, x, y, a, b) + signed_count(s, x, y, b, c));
  }
}

TEST(SignedCountTest, MapMatchesPerPixel) {
  std::mt19937_64 rng(8);
  const auto s = oracle::random_stream(rng, 5, 4, 0.0, 2.0, 100);
  const auto map = signed_count_map(s, 1.3, 0.4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x) EXPECT_EQ(map[y * 5 + x], signed_count(s, x, y, 1.3, 0.4));
}

TEST(SliceTest, Examples) {
  const auto s = single_pixel(0, 1, {{0.0, 0, 0, 1}, {0.5, 0, 0, 1}, {0.999, 0, 0, -1}});
  const auto tail = slice(s, 0.5, 1.0);
  ASSERT_EQ(tail.size(), 2u);
  EXPECT_EQ(tail.events()[0].t, 0.5);
  EXPECT_EQ(tail.events()[1].t, 0.999);
  EXPECT_EQ(tail.t_start(), 0.5);

  const auto whole = slice(s, 0.0, 1.0);
  EXPECT_TRUE(std::ranges::equal(whole.events(), s.events()));
  EXPECT_EQ(whole.t_end(), 1.0);

  const auto empty = slice(s, 0.3, 0.3);
  EXPECT_TRUE(empty.empty());
  EXPECT_EQ(empty.t_start(), 0.3);
  EXPECT_EQ(empty.t_end(), 0.3);

  EXPECT_THROW(slice(s, 0.6, 0.5), std::domain_error);
}

TEST(SliceTest, AdjacentSlicesPartition) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = oracle::random_stream(rng, 3, 3, 0.0, 1.0, 50);
    double p[3] = {u(rng), u(rng), u(rng)};
    std::sort(p, p + 3);
    const auto ab = slice(s, p[0], p[1]);
    const auto bc = slice(s, p[1], p[2]);
    std::vector<Event> joined(ab.events().begin(), ab.events().end());
    joined.insert(joined.end(), bc.events().begin(), bc.events().end());
    const auto ac = slice(s, p[0], p[2]);
    EXPECT_TRUE(std::ranges::equal(joined, ac.events()));
  }
}

TEST(ReverseShuffleTest, Examples) {
  const auto one = reverse_shuffle(single_pixel(0, 1, {{0.2, 0, 0, 1}}));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_DOUBLE_EQ(one.events()[0].t, 0.8);
  EXPECT_EQ(one.events()[0].polarity, -1);

  EXPECT_TRUE(reverse_shuffle(single_pixel(0, 1, {})).empty());

  // f = 0.6: (0.1,+1) -> (0.5,-1) and (0.5,-1) -> (0.1,+1).
  const auto two = reverse_shuffle(single_pixel(0, 0.6, {{0.1, 0, 0, 1}, {0.5, 0, 0, -1}}));
  ASSERT_EQ(two.size(), 2u);
  EXPECT_NEAR(two.events()[0].t, 0.1, 1e-15);
  EXPECT_EQ(two.events()[0].polarity, 1);
  EXPECT_NEAR(two.events()[1].t, 0.5, 1e-15);
  EXPECT_EQ(two.events()[1].polarity, -1);
}

TEST(ReverseShuffleTest, EventAtZeroIsClampedInsideWindow) {
  const auto r = reverse_shuffle(single_pixel(0, 1, {{0.0, 0, 0, 1}}));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_DOUBLE_EQ(r.events()[0].t, 1.0 - kTimeQuantum);
  EXPECT_THROW(reverse_shuffle(single_pixel(0.5, 1, {})), std::domain_error);
}

TEST(ReverseShuffleTest, InvolutionInsideOpenWindow) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = oracle::random_stream(rng, 4, 4, 0.0, 0.75, 80);
    const auto twice = reverse_shuffle(reverse_shuffle(s));
    ASSERT_EQ(twice.size(), s.size());
    // Float subtraction f - (f - t) is exact only to an ulp or so, and ties
    // can reorder, so match per pixel.
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Event& a = s.events()[i];
      auto hit = std::ranges::find_if(twice.events(), [&](const Event& b) {
        return b.x == a.x && b.y == a.y && b.polarity == a.polarity && std::abs(b.t - a.t) < 1e-12;
      });
      EXPECT_NE(hit, twice.events().end());
    }
  }
}

TEST(ShiftShuffleTest, Examples) {
  const auto s = shift_shuffle(single_pixel(0.5, 1.0, {{0.5, 0, 0, 1}, {0.9, 0, 0, -1}}));
  EXPECT_EQ(s.t_start(), 0.0);
  EXPECT_DOUBLE_EQ(s.t_end(), 0.5);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.events()[0].t, 0.0);
  EXPECT_EQ(s.events()[0].polarity, 1);
  EXPECT_DOUBLE_EQ(s.events()[1].t, 0.4);
  EXPECT_EQ(s.events()[1].polarity, -1);

  const auto empty = shift_shuffle(single_pixel(0.25, 1.0, {}));
  EXPECT_TRUE(empty.empty());
  EXPECT_DOUBLE_EQ(empty.t_end(), 0.75);

  const auto orig = three_events();
  const auto same = shift_shuffle(orig);
  EXPECT_TRUE(std::ranges::equal(same.events(), orig.events()));
}
