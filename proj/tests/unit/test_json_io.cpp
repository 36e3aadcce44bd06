#include <gtest/gtest.h>

#include "opshift/errors.hpp"
#include "opshift/factory.hpp"
#include "opshift/json_io.hpp"

using namespace opshift;

namespace {

void expect_identical(const Family& a, const Family& b) {
  ASSERT_EQ(a.box(), b.box());
  ASSERT_EQ(a.fibers(), b.fibers());
  for (std::size_t j = 0; j < a.dim(); ++j) {
    for (std::size_t r = 0; r < a.stored_count(); ++r) {
      EXPECT_EQ(a.weight(j, r), b.weight(j, r)) << "j=" << j << " r=" << r;
    }
  }
}

}  // namespace

TEST(JsonIO, MinimalScalarRoundTrip) {
  const char* text = R"({"d":1,"degree_cap":1,"fiber_dims":{"default":1,"overrides":[]},
    "weights":[{"j":1,"alpha":[0],"matrix":[[[2.0,0.0]]]}]})";
  const auto fam = from_json(text);
  EXPECT_EQ(fam.weight(0, MultiIndex{0})(0, 0), cd(2.0));
  expect_identical(fam, from_json(to_json(fam)));
}

TEST(JsonIO, Example33RoundTripIsBitExact) {
  const auto fam = example33(2, 4);
  const auto text = to_json(fam);
  const auto back = from_json(text);
  expect_identical(fam, back);
  EXPECT_EQ(to_json(back), text);
}

TEST(JsonIO, RandomValuesSurviveSeventeenDigits) {
  const auto fam = random_unilateral({1, 3, 2}, 99);
  expect_identical(fam, from_json(to_json(fam)));
}

TEST(JsonIO, MissingWeight) {
  const char* text = R"({"d":1,"degree_cap":2,"fiber_dims":{"default":1},
    "weights":[{"j":1,"alpha":[1],"matrix":[[[1,0]]]}]})";
  try {
    from_json(text);
    FAIL();
  } catch (const MissingWeightError& e) {
    EXPECT_NE(std::string(e.what()).find("(j=1, alpha=(0))"), std::string::npos) << e.what();
  }
}

TEST(JsonIO, SchemaErrorsArePathQualified) {
  auto message = [](const char* text) {
    try {
      from_json(text);
    } catch (const SchemaError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message(R"({"degree_cap":1})").find("$: missing key \"d\""), std::string::npos);
  EXPECT_NE(message(R"({"d":1,"degree_cap":1,"fiber_dims":{"default":1},
      "weights":[{"j":1,"alpha":[0],"matrix":[[[1]]]}]})")
                .find("$.weights[0].matrix[0][0]"),
            std::string::npos);
  EXPECT_NE(message(R"({"d":1,"degree_cap":1,"fiber_dims":{"default":1},
      "weights":[{"j":3,"alpha":[0],"matrix":[[[1,0]]]}]})")
                .find("$.weights[0].j"),
            std::string::npos);
  EXPECT_NE(message("{not json").find("invalid JSON"), std::string::npos);
}

TEST(JsonIO, ShapeMismatchIsReported) {
  const char* text = R"({"d":1,"degree_cap":1,"fiber_dims":{"default":2},
    "weights":[{"j":1,"alpha":[0],"matrix":[[[1,0]]]}]})";
  EXPECT_THROW(from_json(text), ShapeError);
}

TEST(JsonIO, FiberOverridesRoundTrip) {
  const auto fam = random_unilateral({2, 1, 3}, 5);
  const auto doc = family_to_json_value(fam);
  EXPECT_EQ(doc["fiber_dims"]["overrides"].size(), 2u);
  expect_identical(fam, family_from_json_value(doc));
}

TEST(CanonicalDump, SortedKeysAndDigits) {
  json v = {{"b", 0.1}, {"a", 1}, {"c", json::array({1.5, -2.0})}};
  const auto s = dump_canonical(v);
  EXPECT_LT(s.find("\"a\""), s.find("\"b\""));
  EXPECT_NE(s.find("0.10000000000000001"), std::string::npos);
  EXPECT_NE(s.find("[1.5, -2]"), std::string::npos);
  EXPECT_EQ(dump_canonical(json::parse(s)), s);
}
