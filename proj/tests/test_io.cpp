#include <sstream>

#include <gtest/gtest.h>

#include "gravpano/errors.hpp"
#include "gravpano/io.hpp"

using namespace gravpano;

namespace {

CorrespondenceFile parse(const std::string& text) {
  std::istringstream is(text);
  return read_correspondence_file(is);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(CorrespondenceFile, ParsesHeadersRowsAndComments) {
  const auto f = parse(
      "# gravity: 0,-1,0, 0.1,-1,0\n"
      "# norm_scale: 800\n"
      "# truth: whatever\n"
      "\n"
      "1, 2, 3, 4\n"
      "-5.5,6e2,7,8\n");
  EXPECT_EQ(f.gravity2, Vec3(0.1, -1, 0));
  EXPECT_EQ(f.norm_scale, 800.0);
  ASSERT_EQ(f.rows.size(), 2u);
  EXPECT_EQ(f.rows[1][1], 600.0);
  ASSERT_EQ(f.comments.size(), 1u);
  EXPECT_EQ(f.comments[0], "truth: whatever");
  const auto cs = f.correspondences();
  EXPECT_EQ(cs[0].p1.norm_scale, 800.0);
  EXPECT_EQ(cs[0].g1.rotation, Mat3::Identity());
  EXPECT_LT((cs[0].g2.rotation * Vec3(0.1, -1, 0).normalized() - Vec3(0, -1, 0)).norm(), 1e-12);
}

TEST(CorrespondenceFile, RoundTrip) {
  CorrespondenceFile f;
  f.gravity1 = {0.01, -0.99, 0.02};
  f.gravity2 = {-0.03, -0.98, 0.1};
  f.norm_scale = 1234.5;
  f.comments = {"note"};
  f.rows = {{0.1, 1.0 / 3.0, -2e-17, 1e5}};
  std::ostringstream os;
  write_correspondence_file(os, f);
  const auto g = parse(os.str());
  EXPECT_EQ(g.gravity1, f.gravity1);
  EXPECT_EQ(g.gravity2, f.gravity2);
  EXPECT_EQ(g.norm_scale, f.norm_scale);
  EXPECT_EQ(g.rows, f.rows);
  EXPECT_EQ(g.comments, f.comments);
}

TEST(CorrespondenceFile, Errors) {
  const std::string head = "# gravity: 0,-1,0,0,-1,0\n# norm_scale: 1000\n";
  EXPECT_EQ(error_line(head), 3u);
  EXPECT_EQ(error_line(head + "1,2,3\n"), 3u);
  EXPECT_EQ(error_line(head + "1,2,3,4\n1,x,3,4\n"), 4u);
  EXPECT_EQ(error_line(head + "1,,3,4\n"), 3u);
  EXPECT_EQ(error_line("# norm_scale: 1000\n1,2,3,4\n"), 3u);
  EXPECT_EQ(error_line("# gravity: 0,-1,0,0,-1,0\n1,2,3,4\n"), 3u);
  EXPECT_EQ(error_line("# gravity: 0,0,0,0,-1,0\n# norm_scale: 1\n1,2,3,4\n"), 1u);
  EXPECT_EQ(error_line("# gravity: 0,-1,0\n"), 1u);
  EXPECT_EQ(error_line("# gravity: 0,-1,0,0,-1,0\n# norm_scale: -2\n"), 2u);
  EXPECT_EQ(error_line(head + "1,2,3,inf\n"), 3u);
  EXPECT_THROW(read_correspondence_file(std::string("/nonexistent/file.csv")), InvalidInput);
}

TEST(CorrespondenceFile, FixturesParse) {
  for (const char* name : {"noise_free.csv", "noise_free_h1f.csv", "contaminated.csv"}) {
    const auto f = read_correspondence_file(std::string(GRAVPANO_TEST_DATA) + "/" + name);
    EXPECT_FALSE(f.rows.empty()) << name;
    EXPECT_EQ(f.norm_scale, 1000.0) << name;
  }
}
