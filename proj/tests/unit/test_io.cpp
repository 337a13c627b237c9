#include <gtest/gtest.h>

#include <filesystem>

#include "divlab/divlab.hpp"
#include "support/generators.hpp"

namespace divlab {
namespace {

const std::filesystem::path kData = DIVLAB_DATA_DIR;

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kInvalidArgument;
}

TEST(DiversityJson, FixtureLoadsAndValidates) {
  const FiniteDiversity d = io::parse_diversity(io::read_file(kData / "triple2.json"));
  EXPECT_EQ(d, testing::unit_triangle(Rat{2}));
  EXPECT_TRUE(validate(d).ok());
}

TEST(DiversityJson, CanonicalRoundTrip) {
  const std::string text = io::read_file(kData / "triple2.json");
  const FiniteDiversity d = io::parse_diversity(text);
  EXPECT_EQ(io::serialize(d), text);
  Rng rng(1);
  for (int i = 0; i < 30; ++i) {
    const FiniteDiversity r = testing::random_diversity(1 + i % 5, rng);
    const std::string s = io::serialize(r);
    EXPECT_EQ(io::parse_diversity(s), r);
    EXPECT_EQ(io::serialize(io::parse_diversity(s)), s);
  }
}

TEST(DiversityJson, ValuesAreNormalised) {
  const FiniteDiversity d = io::parse_diversity(
      R"({"points": ["a", "b"], "values": {"b a": "2/4", "a": "0", "": "0"}})");
  EXPECT_EQ(d(SubsetKey::of({0, 1})), Rat(1, 2));
  EXPECT_EQ(io::serialize(d), "{\n  \"points\": [\n    \"a\",\n    \"b\"\n  ],\n  \"values\": {\n    \"a b\": \"1/2\"\n  }\n}\n");
}

TEST(DiversityJson, MissingSubsetIsNamed) {
  try {
    io::parse_diversity(R"({"points": ["a","b","c"], "values": {"a b": "1", "a c": "1", "b c": "1"}})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kStructural);
    EXPECT_NE(std::string(e.what()).find("\"a b c\""), std::string::npos) << e.what();
  }
}

TEST(DiversityJson, StructuralProblems) {
  EXPECT_EQ(kind_of([] { io::parse_diversity(R"({"points": ["a","b"], "values": {"a b": "1", "a": "1"}})"); }),
            ErrorKind::kStructural);
  EXPECT_EQ(kind_of([] { io::parse_diversity(R"({"points": ["a","b"], "values": {"a b": "1", "b a": "1"}})"); }),
            ErrorKind::kStructural);
  EXPECT_EQ(kind_of([] { io::parse_diversity(R"({"points": ["a","b"], "values": {"a q": "1"}})"); }),
            ErrorKind::kStructural);
  EXPECT_EQ(kind_of([] { io::parse_diversity(R"({"points": ["a","b"], "values": {"a b": "-1"}})"); }),
            ErrorKind::kStructural);
  EXPECT_EQ(kind_of([] { io::parse_diversity(R"({"points": ["a","a"], "values": {"a b": "1"}})"); }),
            ErrorKind::kDuplicateLabel);
  EXPECT_EQ(kind_of([] { io::parse_diversity(R"({"points": [], "values": {}})"); }), ErrorKind::kStructural);
}

TEST(DiversityJson, ParseErrorsCarryPosition) {
  try {
    io::parse_diversity("{\n  \"points\": [\"a\",\n  ]\n}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_EQ(kind_of([] { io::parse_diversity(R"({"points": ["a","b"], "values": {"a b": 1}})"); }),
            ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { io::parse_diversity(R"({"points": ["a","b"], "values": {"a b": "x"}})"); }),
            ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { io::parse_diversity(R"([1, 2])"); }), ErrorKind::kParse);
}

TEST(FunctionJson, KappaFixtureWithPathBase) {
  const auto ff = io::read_function(io::read_file(kData / "kappa_a.json"), kData);
  const AdmissibleFunction f(ff.base, ff.values, ff.support);
  const AdmissibleFunction k = kappa(ff.base, 0);
  EXPECT_TRUE(f.same_values(k));
  EXPECT_EQ(f.support(), SubsetKey::singleton(0));
  const io::Json j = io::to_json(f);
  EXPECT_EQ(j["support"], "a");
  EXPECT_EQ(j["values"][""], "0");
  EXPECT_EQ(j["values"]["b c"], "2");
}

TEST(PolicyJson, RoundTripAndUnknownField) {
  GrowthPolicy p;
  p.rounds = 4;
  p.value_granularity = Rat{1, 4};
  const GrowthPolicy q = io::policy_from_json(io::to_json(p));
  EXPECT_EQ(io::to_json(q), io::to_json(p));
  EXPECT_EQ(kind_of([] { io::policy_from_json(io::Json{{"bogus", 1}}); }), ErrorKind::kParse);
}

TEST(TowerJson, RoundTripAndTamperDetection) {
  GrowthPolicy p;
  p.rounds = 4;
  Rng rng(7);
  TowerState s;
  s.seed = 7;
  s = grow(s, p, rng);
  const io::Json j = io::to_json(TowerState{}.current, s, p);
  const io::TowerFile back = io::tower_from_json(io::parse_json(io::dump(j)));
  EXPECT_EQ(back.state, s);
  EXPECT_EQ(io::dump(io::to_json(back.initial, back.state, back.policy)), io::dump(j));
  io::Json bad = j;
  bad["current"]["values"]["x0 z1"] = "99";
  EXPECT_EQ(kind_of([&] { io::tower_from_json(bad); }), ErrorKind::kStructural);
}

}  // namespace
}  // namespace divlab
