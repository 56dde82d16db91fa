#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <limits>

#include "mbloch/io.hpp"
#include "test_support.hpp"

using namespace mbloch;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mbloch_test_io";
  fs::create_directories(dir);
  return dir / name;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(FormatDouble, RoundTripsEveryDouble) {
  for (int i = 0; i < 10000; ++i) {
    const double v = mbloch::testing::uniform(-1, 1) *
                     std::pow(10.0, mbloch::testing::uniform(-300, 300));
    EXPECT_TRUE(same_bits(io::parse_double(io::format_double(v)), v)) << io::format_double(v);
  }
  for (double v : {0.0, -0.0, 1.0 / 3.0, std::numeric_limits<double>::denorm_min(),
                   std::numeric_limits<double>::max()}) {
    EXPECT_TRUE(same_bits(io::parse_double(io::format_double(v)), v));
  }
  EXPECT_THROW(io::parse_double("1.5x"), Error);
  EXPECT_THROW(io::parse_double("abc"), Error);
}

TEST(Csv, TrajectoryRoundTripIsBitExact) {
  const SystemParams p(-1);
  const Trajectory3 tr = integrate(p, {0.1, 0.2, 0.9}, {0.0, 10.0}, 1e-9);
  const io::CsvTable table = io::trajectory_table(p, tr);
  const fs::path path = scratch("traj.csv");
  io::write_file_atomic(path, io::to_csv(table));
  const io::CsvTable back = io::read_csv(path);
  ASSERT_EQ(back.header, (std::vector<std::string>{"t", "x", "y", "z", "dH", "dC"}));
  ASSERT_EQ(back.rows.size(), tr.size());
  const auto t = back.numeric_column("t");
  const auto x = back.numeric_column("x");
  const auto y = back.numeric_column("y");
  const auto z = back.numeric_column("z");
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_TRUE(same_bits(t[i], tr.time(i)));
    EXPECT_TRUE(same_bits(x[i], tr.state(i).x()));
    EXPECT_TRUE(same_bits(y[i], tr.state(i).y()));
    EXPECT_TRUE(same_bits(z[i], tr.state(i).z()));
  }
  EXPECT_EQ(back.numeric_column("dH")[0], 0.0);
}

TEST(Csv, MixedColumnsAndErrors) {
  const io::CsvTable t{{"t", "kind"}, {{"1", "UnboundedCurve"}, {"2", "PeriodicOrbit"}}};
  const io::CsvTable back = io::parse_csv(io::to_csv(t));
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_THROW(back.column("nope"), Error);
  EXPECT_THROW(io::parse_csv("a,b\n1\n"), Error);
}

TEST(AtomicWrite, ReplacesWholeFile) {
  const fs::path path = scratch("atomic.txt");
  io::write_file_atomic(path, "first version, rather long\n");
  io::write_file_atomic(path, "second\n");
  std::ifstream in(path);
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(s, "second\n");
  for (const auto& e : fs::directory_iterator(path.parent_path())) {
    EXPECT_EQ(e.path().string().find(".tmp."), std::string::npos);
  }
  io::write_file_atomic(scratch("nested/dir/file.txt"), "x");
  EXPECT_TRUE(fs::exists(scratch("nested/dir/file.txt")));
}

TEST(Svg, TwoPanelsWithAllSeries) {
  const std::string svg = io::phase_portrait_svg(
      "demo", {{"curve", {{0, 0, 0}, {1, 1, 1}, {2, 0, -1}}, false}, {"point", {{0, 0, 1}}, true}});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  std::size_t polylines = 0, circles = 0;
  for (std::size_t pos = 0; (pos = svg.find("<polyline", pos)) != std::string::npos; ++pos) ++polylines;
  for (std::size_t pos = 0; (pos = svg.find("<circle", pos)) != std::string::npos; ++pos) ++circles;
  EXPECT_EQ(polylines, 2u);
  EXPECT_EQ(circles, 2u);
}
