#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "subdiar/feature_store.hpp"

using namespace subdiar;

namespace {

FeatureMap features(const std::string &jsonl) {
  std::istringstream in(jsonl);
  return load_features(in);
}

TurnScoreMap scores(const std::string &jsonl) {
  std::istringstream in(jsonl);
  return load_turn_scores(in);
}

}  // namespace

TEST_CASE("features: complete map over a 10-line program") {
  std::string text;
  Program p{"p", {}};
  for (int i = 0; i < 10; ++i) {
    p.lines.push_back(Line{i, i * 1000, i * 1000 + 500, "x"});
    if (i % 2 == 0) {
      text += "{\"line_id\":" + std::to_string(i) +
              ",\"active\":true,\"face\":[1,0,0],\"timbre\":[0,3,4]}\n";
    } else {
      text += "{\"line_id\":" + std::to_string(i) +
              ",\"active\":false,\"timbre\":[1,1,0]}\n";
    }
  }
  const FeatureMap f = features(text);
  CHECK(f.size() == 10);
  CHECK_NOTHROW(check_feature_coverage(f, p));
  CHECK(f.at(0).active);
  REQUIRE(f.at(0).face);
  CHECK(f.at(0).timbre[1] == doctest::Approx(0.6));
  CHECK(f.at(0).timbre[2] == doctest::Approx(0.8));
  CHECK_FALSE(f.at(1).face);
  CHECK(f.at(1).timbre[0] == doctest::Approx(1.0 / std::sqrt(2.0)));

  p.lines.push_back(Line{10, 20000, 21000, "extra"});
  CHECK_THROWS_AS(check_feature_coverage(f, p), FeatureError);
}

TEST_CASE("features: contract violations") {
  CHECK_THROWS_AS(features("{\"line_id\":0,\"active\":true,\"timbre\":[1,0]}\n"),
                  FeatureError);
  CHECK_THROWS_AS(
      features("{\"line_id\":0,\"active\":false,\"face\":[1,0],\"timbre\":[1,0]}\n"),
      FeatureError);
  std::string d128 = "[", d256 = "[";
  for (int i = 0; i < 128; ++i) d128 += (i ? ",1" : "1");
  for (int i = 0; i < 256; ++i) d256 += (i ? ",1" : "1");
  d128 += "]";
  d256 += "]";
  CHECK_THROWS_AS(features("{\"line_id\":0,\"active\":false,\"timbre\":" + d128 +
                           "}\n{\"line_id\":1,\"active\":false,\"timbre\":" + d256 +
                           "}\n"),
                  FeatureError);
  CHECK_THROWS_AS(features("{\"line_id\":0,\"active\":false,\"timbre\":[1,0]}\n"
                           "{\"line_id\":0,\"active\":false,\"timbre\":[0,1]}\n"),
                  FeatureError);
  CHECK_THROWS_AS(features("{\"line_id\":0,\"active\":false,\"timbre\":[0,0]}\n"),
                  FeatureError);
  CHECK_THROWS_AS(features("{\"line_id\":0,\"active\":false,\"timbre\":[]}\n"),
                  FeatureError);
  CHECK_THROWS_AS(features("{\"line_id\":0,\"active\":false}\n"), FeatureError);
  CHECK_THROWS_AS(features("{\"line_id\":0,\"active\":false,\"timbre\":[1,\"a\"]}\n"),
                  FeatureError);
  CHECK_THROWS_AS(features("not json\n"), FeatureError);
}

TEST_CASE("features: face and timbre dims are independent") {
  const FeatureMap f = features(
      "{\"line_id\":0,\"active\":true,\"face\":[1,0,0,0],\"timbre\":[1,0]}\n"
      "{\"line_id\":1,\"active\":false,\"timbre\":[0,1]}\n");
  CHECK(f.at(0).face->dim() == 4);
  CHECK(f.at(1).timbre.dim() == 2);
}

TEST_CASE("features: save then load is the identity on normalized data") {
  const FeatureMap f = features(
      "{\"line_id\":0,\"active\":true,\"face\":[0.3,0.4],\"timbre\":[1,2,2]}\n"
      "\n"
      "{\"line_id\":1,\"active\":false,\"timbre\":[0.1,0.7,-0.2]}\n");
  std::ostringstream os;
  save_features(f, os);
  const FeatureMap back = features(os.str());
  REQUIRE(back.size() == f.size());
  for (const auto &[id, lf] : f) {
    const LineFeatures &b = back.at(id);
    CHECK(b.active == lf.active);
    CHECK(b.face.has_value() == lf.face.has_value());
    REQUIRE(b.timbre.dim() == lf.timbre.dim());
    for (std::size_t i = 0; i < lf.timbre.dim(); ++i) {
      CHECK(b.timbre[i] == doctest::Approx(lf.timbre[i]).epsilon(1e-14));
    }
    if (lf.face) {
      for (std::size_t i = 0; i < lf.face->dim(); ++i) {
        CHECK((*b.face)[i] == doctest::Approx((*lf.face)[i]).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("turn scores: stored, echoed and validated") {
  const TurnScoreMap s = scores(
      "{\"left_line_id\":0,\"right_line_id\":1,\"p0\":0.2,\"p1\":0.6}\n");
  REQUIRE(s.size() == 1);
  const TurnScoreRecord &r = s.at({0, 1});
  CHECK(r.p0 == 0.2);
  CHECK(r.p1 == 0.6);

  std::ostringstream os;
  save_turn_scores(s, os);
  CHECK(scores(os.str()) == s);

  CHECK_THROWS_AS(
      scores("{\"left_line_id\":0,\"right_line_id\":2,\"p0\":0.2,\"p1\":0.6}\n"),
      FeatureError);
  CHECK_THROWS_AS(
      scores("{\"left_line_id\":0,\"right_line_id\":1,\"p0\":0,\"p1\":0}\n"),
      FeatureError);
  CHECK_THROWS_AS(
      scores("{\"left_line_id\":0,\"right_line_id\":1,\"p0\":-0.1,\"p1\":0.6}\n"),
      FeatureError);
  CHECK_THROWS_AS(
      scores("{\"left_line_id\":0,\"right_line_id\":1,\"p0\":0.1,\"p1\":0.6}\n"
             "{\"left_line_id\":0,\"right_line_id\":1,\"p0\":0.1,\"p1\":0.6}\n"),
      FeatureError);
  CHECK_THROWS_AS(scores("{\"left_line_id\":0}\n"), FeatureError);
}

TEST_CASE("turn scores: partial coverage is allowed") {
  const TurnScoreMap s = scores(
      "{\"left_line_id\":3,\"right_line_id\":4,\"p0\":0.1,\"p1\":0.9}\n"
      "{\"left_line_id\":7,\"right_line_id\":8,\"p0\":1,\"p1\":0}\n");
  CHECK(s.size() == 2);
  CHECK(s.count({3, 4}) == 1);
  CHECK(s.count({4, 5}) == 0);
}

TEST_CASE("missing files are reported") {
  CHECK_THROWS(load_features(std::string("/nonexistent/features.jsonl")));
  CHECK_THROWS(load_turn_scores(std::string("/nonexistent/scores.jsonl")));
}
