#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "esrb/io.hpp"
#include "test_support.hpp"

using namespace esrb;

TEST(EventFileTest, CanonicalRoundTripIsByteIdentical) {
  const std::string text =
      "4 3 0 1000000\n"
      "100 0 0 1\n"
      "250000 3 2 -1\n"
      "999999 1 1 1\n";
  std::istringstream in(text);
  const EventStream s = read_events(in);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.width(), 4);
  EXPECT_DOUBLE_EQ(s.events()[1].t, 0.25);
  EXPECT_EQ(s.events()[1].polarity, -1);
  std::ostringstream out;
  write_events(s, out);
  EXPECT_EQ(out.str(), text);
}

TEST(EventFileTest, PolarityZeroNamesTheLine) {
  std::istringstream in("4 3 0 1000\n10 0 0 1\n20 1 1 0\n");
  try {
    read_events(in);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(EventFileTest, Errors) {
  auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_events(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  EXPECT_EQ(line_of("4 3 0 1000\n10 4 0 1\n"), 2);        // x out of bounds
  EXPECT_EQ(line_of("4 3 0 1000\n10 0 0 1\n5 0 0 1\n"), 3);  // unsorted
  EXPECT_EQ(line_of("4 3 0 1000\n1000 0 0 1\n"), 2);      // at window end
  EXPECT_EQ(line_of("4 3 0 1000\n10 0 0\n"), 2);          // short line
  EXPECT_EQ(line_of("4 3 0 1000\n1x 0 0 1\n"), 2);        // junk
  EXPECT_EQ(line_of("4 3 5 5\n"), 1);                     // empty window
  EXPECT_EQ(line_of(""), 1);
}

TEST(EventFileTest, EmptySectionAndTies) {
  std::istringstream in("8 8 500 900\n");
  const EventStream s = read_events(in);
  EXPECT_TRUE(s.empty());
  EXPECT_DOUBLE_EQ(s.t_start(), 500e-6);

  // Equal timestamps in file order are put in canonical order.
  std::istringstream ties("3 3 0 100\n7 2 1 1\n7 0 0 -1\n");
  const EventStream t = read_events(ties);
  EXPECT_EQ(t.events()[0].x, 0);
  EXPECT_EQ(t.events()[1].x, 2);
}

TEST(EventFileTest, RandomStreamSurvivesRoundTrip) {
  std::mt19937_64 rng(80);
  std::vector<Event> ev;
  std::uniform_int_distribution<int> us(0, 999999), xs(0, 9), ys(0, 6);
  for (int i = 0; i < 300; ++i) ev.push_back({us(rng) * 1e-6, xs(rng), ys(rng), i % 3 ? 1 : -1});
  const auto s = EventStream::from_unsorted(10, 7, 0.0, 1.0, ev);
  std::stringstream buf;
  write_events(s, buf);
  const auto back = read_events(buf);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(std::llround(back.events()[i].t * 1e6), std::llround(s.events()[i].t * 1e6));
    EXPECT_EQ(back.events()[i].x, s.events()[i].x);
    EXPECT_EQ(back.events()[i].y, s.events()[i].y);
    EXPECT_EQ(back.events()[i].polarity, s.events()[i].polarity);
  }
}

TEST(FrameFileTest, EightBitRoundTrip) {
  std::mt19937_64 rng(81);
  Frame f = oracle::random_frame(rng, 7, 5, 0, 255);
  for (double& v : f.pixels) v = std::round(v);
  std::stringstream buf;
  write_frame(f, buf, 255);
  const Frame back = read_frame(buf);
  EXPECT_EQ(back.width, 7);
  EXPECT_EQ(back.pixels, f.pixels);
}

TEST(FrameFileTest, SixteenBitQuantizationBound) {
  std::mt19937_64 rng(82);
  const Frame f = oracle::random_frame(rng, 9, 6, 0, 60000);
  std::stringstream buf;
  write_frame(f, buf);
  const Frame back = read_frame(buf);
  EXPECT_LE(oracle::max_abs_diff(back.pixels, f.pixels), 0.5);
}

TEST(FrameFileTest, RoundsHalfToEvenAndClamps) {
  Frame f(5, 1);
  f.pixels = {0.5, 1.5, 2.5, -3.0, 300.0};
  std::stringstream buf;
  write_frame(f, buf, 255);
  EXPECT_EQ(read_frame(buf).pixels, (std::vector<double>{0, 2, 2, 0, 255}));
}

TEST(FrameFileTest, HeaderCommentsAreSkipped) {
  std::string bytes = "P5\n# made by hand\n2 1\n# max\n255\n";
  bytes.push_back(static_cast<char>(7));
  bytes.push_back(static_cast<char>(200));
  std::istringstream in(bytes);
  EXPECT_EQ(read_frame(in).pixels, (std::vector<double>{7, 200}));
}

TEST(FrameFileTest, RejectsAsciiTruncatedAndForeign) {
  std::istringstream ascii("P2\n2 1\n255\n1 2\n");
  try {
    read_frame(ascii);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("P2"), std::string::npos);
  }
  std::istringstream truncated(std::string("P5\n4 4\n255\n") + std::string(10, 'x'));
  EXPECT_THROW(read_frame(truncated), ParseError);
  std::istringstream png("\x89PNG....");
  EXPECT_THROW(read_frame(png), ParseError);
}

TEST(DictionaryFileTest, RoundTripIsExact) {
  const auto d = make_dictionary(DictionaryKind::seeded_gaussian, {4, 3, 5, 3}, 17);
  std::stringstream buf;
  write_dictionary(d, buf);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.size(), 4 + 16 + 8 * d.weights.size());
  EXPECT_EQ(bytes.substr(0, 4), "DSLD");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 4);  // little-endian out_channels
  EXPECT_EQ(bytes[5], 0);
  const auto back = read_dictionary(buf, DictionaryRole::high_res);
  EXPECT_EQ(back.weights, d.weights);
  EXPECT_EQ(back.shape.kernel_h, 5);
  EXPECT_EQ(back.role, DictionaryRole::high_res);

  std::istringstream bad("DSLX0000");
  EXPECT_THROW(read_dictionary(bad), ParseError);
  std::istringstream cut(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_dictionary(cut), ParseError);
}

TEST(KeyValueTest, Parsing) {
  std::istringstream in("# run\nthreshold = 0.25\n\n  scale=4  \nout = a b.pgm\n");
  const auto kv = read_key_values(in);
  ASSERT_EQ(kv.size(), 3u);
  EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"threshold", "0.25"}));
  EXPECT_EQ(kv[1].second, "4");
  EXPECT_EQ(kv[2].second, "a b.pgm");

  std::istringstream dup("a = 1\na = 2\n");
  try {
    read_key_values(dup);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  std::istringstream junk("novalue\n");
  EXPECT_THROW(read_key_values(junk), ParseError);
}
