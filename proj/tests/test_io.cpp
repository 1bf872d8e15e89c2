#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>

#include "qet/io.hpp"

using namespace qet;

namespace {

std::string data_file(const std::string& name) { return std::string(QET_DATA_DIR) + "/povm/" + name; }

std::string error_of(const std::string& text) {
  try {
    parse_povm_json(text);
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(PovmJson, WeightsAndOutcomesForms) {
  const auto a = parse_povm_json(R"({"weights": [{"p": 0.5, "q": 0.5}, {"p": 0.5, "q": -0.5}]})");
  EXPECT_EQ(a.size(), 2u);
  EXPECT_NEAR(a[1].coeffs.l, -0.5, 1e-15);
  const auto b = parse_povm_json(R"({"outcomes": [{"m": 1, "l": 0}]})");
  EXPECT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].coeffs.alpha, 0.0);
}

TEST(PovmJson, RoundTripThroughSerializer) {
  const auto m = parse_povm_json(read_file(data_file("weak_0.3.json")));
  const auto again = parse_povm_json(povm_to_json(m).dump());
  EXPECT_EQ(povm_hash(m), povm_hash(again));
}

TEST(PovmJson, ParseErrorsCarryPosition) {
  const auto msg = error_of(R"({"weights": [{"p": 0.5,, }]})");
  EXPECT_NE(msg.find("at byte"), std::string::npos) << msg;
}

TEST(PovmJson, StructuralErrors) {
  EXPECT_NE(error_of("[1, 2]").find("top level"), std::string::npos);
  EXPECT_NE(error_of("{}").find("exactly one"), std::string::npos);
  EXPECT_NE(error_of(R"({"weights": [], "outcomes": []})").find("exactly one"), std::string::npos);
  EXPECT_NE(error_of(R"({"weights": []})").find("nonempty"), std::string::npos);
  EXPECT_NE(error_of(R"({"weights": [{"p": 1}]})").find("missing key \"q\""), std::string::npos);
  EXPECT_NE(error_of(R"({"outcomes": [{"m": "1", "l": 0}]})").find("must be a number"), std::string::npos);
  EXPECT_NE(error_of(R"({"outcomes": [3]})").find("entry 0"), std::string::npos);
}

TEST(PovmJson, ConstraintViolationsPropagate) {
  EXPECT_THROW(parse_povm_json(read_file(data_file("bad_normalization.json"))), ConstraintViolation);
}

TEST(Sources, BuiltinsAndFiles) {
  EXPECT_EQ(load_measurement("builtin:identity").model.size(), 1u);
  EXPECT_NEAR(load_measurement("builtin:projective").model[0].weights.q, 0.5, 1e-15);
  EXPECT_NEAR(load_measurement("builtin:weak(0.25)").model[0].weights.q, 0.125, 1e-15);
  EXPECT_EQ(load_measurement(data_file("three_outcome.json")).model.size(), 3u);
  EXPECT_EQ(povm_hash(load_measurement(data_file("projective.json")).model),
            povm_hash(load_measurement("builtin:projective").model));
  EXPECT_THROW(load_measurement("builtin:nope"), InputError);
  EXPECT_THROW(load_measurement("builtin:weak(2)"), InputError);
  EXPECT_THROW(load_measurement("builtin:weak(x)"), InputError);
  EXPECT_THROW(load_measurement(data_file("does_not_exist.json")), InputError);
}

TEST(Format, SeventeenDigitRoundTrip) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double x = std::ldexp(std::uniform_real_distribution<double>(-1.0, 1.0)(rng), static_cast<int>(rng() % 200) - 100);
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
  for (double x : {0.0, 1.0, -2.5, std::numeric_limits<double>::denorm_min(), std::numeric_limits<double>::max()})
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  EXPECT_EQ(format_double(0.5), "5.0000000000000000e-01");
}

TEST(Hash, DistinguishesModels) {
  EXPECT_NE(povm_hash(weak_measurement(0.3)), povm_hash(weak_measurement(0.31)));
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Range, ParsesLinearAndLog) {
  const auto lin = parse_range("1:3:3");
  EXPECT_EQ(lin.values(), (std::vector<double>{1.0, 2.0, 3.0}));
  const auto lg = parse_range("0.1:10:3:log");
  const auto v = lg.values();
  EXPECT_NEAR(v[1], 1.0, 1e-15);
  EXPECT_EQ(v[2], 10.0);
  EXPECT_EQ(parse_range("2:2:1").values(), std::vector<double>{2.0});
}

TEST(Range, RejectsMalformed) {
  for (const char* bad : {"1:2", "1:2:3:4:5", "a:2:3", "1:2:0", "1:2:1.5", "0:1:3", "2:1:3", "1:2:3:cubic"})
    EXPECT_THROW(parse_range(bad), InputError) << bad;
}
