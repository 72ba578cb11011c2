#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "ctlp/example1.hpp"
#include "ctlp/io.hpp"
#include "support.hpp"

using namespace ctlp;

namespace {

std::string load_error_path(const std::string& text) {
  try {
    load_instance_text(text);
  } catch (const LoadError& e) {
    return e.path();
  }
  return "<no error>";
}

const char* kScalar = R"({"T": 1, "m": 1, "n": 1, "breakpoints": ["0", "1"],
  "A": [[[["1"]]]], "b": [[["1"]]], "c": [[["1"]]]})";

bool same_bits(const CTLPInstance& a, const CTLPInstance& b) {
  return save_instance(a) == save_instance(b);
}

}  // namespace

TEST(LoadInstance, BundledExample1) {
  const CTLPInstance inst = load_instance(read_json_file(test::data("example1.json")));
  EXPECT_EQ(inst.m(), 5u);
  EXPECT_EQ(inst.n(), 2u);
  EXPECT_EQ(inst.horizon(), 2.0);
  EXPECT_EQ(inst.breakpoints().points(), (std::vector<double>{0.0, 1.0, 2.0}));
  EXPECT_TRUE(same_bits(inst, example1::instance()));
}

TEST(LoadInstance, ScalarConstant) {
  const CTLPInstance inst = load_instance_text(kScalar);
  EXPECT_EQ(inst.m(), 1u);
  EXPECT_DOUBLE_EQ(inst.data_bound(), 1.0);
}

TEST(LoadInstance, ErrorsCarryFieldPath) {
  EXPECT_EQ(load_error_path(R"({"T": 1, "m": 1, "n": 1, "breakpoints": ["0", "1"],
    "A": [[[["1"]]]], "b": [[["1"], ["2"]]], "c": [[["1"]]]})"),
            "b[0]");
  EXPECT_EQ(load_error_path(R"({"T": 1, "m": 1, "n": 1, "breakpoints": ["0", "1"],
    "A": [[[["1", "x"]]]], "b": [[["1"]]], "c": [[["1"]]]})"),
            "A[0][0][0][1]");
  EXPECT_EQ(load_error_path(R"({"T": 1, "m": 1, "n": 1, "breakpoints": ["0", "0.5", "0.2", "1"],
    "A": [[[["1"]]]], "b": [[["1"]]], "c": [[["1"]]]})"),
            "breakpoints");
  EXPECT_EQ(load_error_path(R"({"T": 1, "m": 2, "n": 1, "breakpoints": ["0", "1"],
    "A": [[[["1"]]]], "b": [[["1"]]], "c": [[["1"]]]})"),
            "A");
  EXPECT_EQ(load_error_path(R"({"T": 1, "m": 1, "n": 1, "breakpoints": ["0", "1"],
    "A": [[[["1", "0", "0", "0", "1"]]]], "b": [[["1"]]], "c": [[["1"]]]})"),
            "A[0][0][0]");
  EXPECT_EQ(load_error_path(R"({"T": 1, "m": 1, "n": 1, "breakpoints": ["0", "1"],
    "A": [[[["1"]]]], "b": [[["inf"]]], "c": [[["1"]]]})"),
            "b[0][0][0]");
  EXPECT_EQ(load_error_path(R"({"m": 1})"), "T");
  EXPECT_EQ(load_error_path("{\"T\": 1"), "");
}

TEST(LoadInstance, EntryWithOwnBreakpointsIsMerged) {
  const CTLPInstance inst = load_instance_text(R"({"T": 1, "m": 1, "n": 1, "breakpoints": ["0", "1"],
    "A": [[[["1"]]]],
    "b": [{"breakpoints": ["0", "0.5", "1"], "pieces": [["1"], ["2"]]}],
    "c": [[["1"]]]})");
  EXPECT_EQ(inst.breakpoints().points(), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(inst.b(0).eval(0.75), 2.0);
}

TEST(LoadInstance, SenseMarker) {
  json doc = json::parse(kScalar);
  EXPECT_EQ(read_sense(doc), Sense::Primal);
  doc["sense"] = "dual";
  EXPECT_EQ(read_sense(doc), Sense::Dual);
  doc["sense"] = "other";
  EXPECT_THROW(read_sense(doc), LoadError);
}

TEST(SaveInstance, RoundTripIsBitExact) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    const CTLPInstance inst = test::random_instance(rng, 2, 3, 3);
    const json doc = save_instance(inst);
    const CTLPInstance back = load_instance(json::parse(doc.dump()));
    EXPECT_EQ(save_instance(back), doc);
    for (std::size_t i = 0; i < inst.m(); ++i)
      for (std::size_t p = 0; p < inst.b(i).pieces().size(); ++p)
        EXPECT_EQ(inst.b(i).piece(p).coeffs(), back.b(i).piece(p).coeffs());
  }
}

TEST(SaveInstance, ShortestDecimalStrings) {
  EXPECT_EQ(format_decimal(0.625), "0.625");
  EXPECT_EQ(format_decimal(0.1), "0.1");
  EXPECT_EQ(format_decimal(-3.0), "-3");
  const json doc = save_instance(example1::instance());
  EXPECT_EQ(doc["b"][4][0], json::parse(R"(["0.25", "0.625"])"));
}

TEST(TrajectoryCsv, RoundTripWithJump) {
  const TimeGrid g = example1::grid(3);
  const Trajectory z = example1::zbar_on(g);
  std::stringstream ss;
  write_trajectory_csv(ss, z);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,v1,v2");
  const Trajectory back = read_trajectory_csv(ss, example1::breakpoints());
  ASSERT_EQ(back.size(), z.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    EXPECT_EQ(back.grid()[k], z.grid()[k]);
    EXPECT_EQ(back[k], z[k]);
  }
}

TEST(TrajectoryCsv, Errors) {
  const Breakpoints& bp = example1::breakpoints();
  std::stringstream bad_header("x,v1\n0,1\n");
  EXPECT_THROW(read_trajectory_csv(bad_header, bp), LoadError);
  std::stringstream ragged("t,v1\n0,1\n1,2,3\n");
  EXPECT_THROW(read_trajectory_csv(ragged, bp), LoadError);
  std::stringstream outside("t,v1\n0,1\n3,2\n");
  EXPECT_THROW(read_trajectory_csv(outside, bp), LoadError);
  std::stringstream repeated("t,v1\n0,1\n0.5,2\n0.5,3\n");
  EXPECT_THROW(read_trajectory_csv(repeated, bp), LoadError);
}

TEST(TrajectoryCsv, BundledReferenceFiles) {
  const Trajectory z = read_trajectory_file(test::data("example1_zbar.csv"), example1::breakpoints());
  const Trajectory u = read_trajectory_file(test::data("example1_u.csv"), example1::breakpoints());
  for (std::size_t k = 0; k < z.size(); ++k) {
    EXPECT_EQ(z[k], example1::zbar(z.grid()[k]));
    EXPECT_EQ(u[k], example1::ubar(u.grid()[k]));
  }
}
