#include <gtest/gtest.h>

#include <sstream>

#include "jpr/gridio.hpp"

using namespace jpr;

TEST(Csv, RealRoundTrip) {
  auto g = RealGrid::tabulate({Axis("X", -1, 1, 5), Axis("theta", 0, 3, 4)}, [](auto c) { return c[0] * 0.1 + c[1] / 3; });
  std::stringstream ss;
  write_csv(ss, g, {{"kind", "test"}});
  auto back = read_csv(ss);
  EXPECT_FALSE(back.is_complex);
  EXPECT_EQ(back.header["kind"], "test");
  ASSERT_EQ(back.real.axes(), g.axes());
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(back.real[i], g[i]);
}

TEST(Csv, ComplexRoundTripAndLayout) {
  auto g = ComplexGrid::tabulate({Axis("q", 0, 1, 3)}, [](auto c) { return cplx(c[0], -1 / 3.0); });
  std::stringstream ss;
  write_csv(ss, g);
  std::string header, cols, first;
  std::getline(ss, header);
  std::getline(ss, cols);
  std::getline(ss, first);
  EXPECT_EQ(cols, "q,re,im");
  EXPECT_EQ(first, "0,0,-0.3333333333333333");
  ss.seekg(0);
  auto back = read_csv(ss);
  ASSERT_TRUE(back.is_complex);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(back.complex[i], g[i]);
}

TEST(Csv, RejectsTruncatedInput) {
  RealGrid g({Axis("X", 0, 1, 4)}, 1.0);
  std::stringstream ss;
  write_csv(ss, g);
  auto text = ss.str();
  std::stringstream cut(text.substr(0, text.rfind('\n', text.size() - 2) + 1));
  EXPECT_THROW(read_csv(cut), Error);
  std::stringstream bad("X,value\n0,1\n");
  EXPECT_THROW(read_csv(bad), Error);
}

TEST(Slice, FixesOtherAxesAtNearestNode) {
  auto g = RealGrid::tabulate({Axis("X", 0, 2, 3), Axis("mu", -1, 1, 5), Axis("nu", -1, 1, 5)},
                              [](auto c) { return c[0] + 10 * c[1] + 100 * c[2]; });
  auto s = slice2d(g, 0, 1, {0, 0, 0.4});
  ASSERT_EQ(s.rank(), 2u);
  EXPECT_DOUBLE_EQ(s.at({2, 4}), 2 + 10 + 50);
}

TEST(Svg, OneRectPerCell) {
  RealGrid g = RealGrid::tabulate({Axis("X", 0, 1, 4), Axis("theta", 0, 1, 3)}, [](auto c) { return c[0] * c[1]; });
  std::stringstream ss;
  write_svg_heatmap(ss, g, "t");
  const auto s = ss.str();
  std::size_t rects = 0;
  for (auto p = s.find("<rect"); p != std::string::npos; p = s.find("<rect", p + 1)) ++rects;
  EXPECT_EQ(rects, 12u + 11u);
  EXPECT_EQ(s.rfind("</svg>\n"), s.size() - 7);
}
