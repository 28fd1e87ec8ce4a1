#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "subdiar/core.hpp"
#include "support.hpp"

using namespace subdiar;

TEST_CASE("cosine similarity hand values") {
  CHECK(cosine_similarity({1, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(cosine_similarity({1, 0}, {0, 1}) == doctest::Approx(0.0));
  CHECK(std::abs(cosine_similarity({1, 0}, {1, 1}) - 0.70710678118654752) < 1e-9);
  CHECK(cosine_similarity({1, 0}, {-1, 0}) == doctest::Approx(-1.0));
}

TEST_CASE("cosine similarity rejects bad input") {
  CHECK_THROWS_AS(cosine_similarity({1, 0}, {1, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(cosine_similarity({0, 0}, {1, 0}), std::invalid_argument);
}

TEST_CASE("cosine similarity is symmetric and scale invariant") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  std::normal_distribution<double> g;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(8), b(8);
    for (auto &x : a) x = g(rng);
    for (auto &x : b) x = g(rng);
    const Embedding ea(a), eb(b);
    const double c = cosine_similarity(ea, eb);
    CHECK(c == doctest::Approx(cosine_similarity(eb, ea)).epsilon(1e-12));
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);
    const double s = scale(rng);
    std::vector<double> as = a;
    for (auto &x : as) x *= s;
    CHECK(cosine_similarity(Embedding(as), eb) == doctest::Approx(c).epsilon(1e-12));
  }
}

TEST_CASE("unit_normalize") {
  const Embedding n = unit_normalize({3, 4});
  CHECK(n[0] == doctest::Approx(0.6));
  CHECK(n[1] == doctest::Approx(0.8));
  const Embedding again = unit_normalize(n);
  CHECK(again[0] == doctest::Approx(0.6));
  CHECK(again[1] == doctest::Approx(0.8));
  CHECK_THROWS_AS(unit_normalize({0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(unit_normalize({NAN, 1}), std::invalid_argument);
}

TEST_CASE("mean_embedding") {
  const std::vector<Embedding> one{{1, 0}};
  CHECK(mean_embedding(one) == Embedding{1, 0});
  const std::vector<Embedding> two{{1, 0}, {0, 1}};
  const Embedding m = mean_embedding(two);
  CHECK(m[0] == doctest::Approx(0.5));
  CHECK(m[1] == doctest::Approx(0.5));
  const Embedding v{0.3, -0.2, 0.9};
  const std::vector<Embedding> same{v, v, v};
  const Embedding mv = mean_embedding(same);
  for (std::size_t i = 0; i < v.dim(); ++i) CHECK(mv[i] == doctest::Approx(v[i]));

  const std::vector<const Embedding *> ptrs{&two[0], &two[1]};
  CHECK(mean_embedding(std::span<const Embedding *const>(ptrs)) == m);

  CHECK_THROWS_AS(mean_embedding(std::vector<Embedding>{}), std::invalid_argument);
  const std::vector<Embedding> ragged{{1, 0}, {1, 0, 0}};
  CHECK_THROWS_AS(mean_embedding(ragged), std::invalid_argument);
}

TEST_CASE("enum string round trips") {
  for (Origin o : {Origin::visual_anchor, Origin::supplemented, Origin::audio_cluster}) {
    CHECK(origin_from_string(to_string(o)) == o);
  }
  for (Stage s : {Stage::active_visual, Stage::prototype_nearest,
                  Stage::group_standardized, Stage::supplemented, Stage::audio_cluster}) {
    CHECK(stage_from_string(to_string(s)) == s);
  }
  CHECK_THROWS(origin_from_string("nope"));
  CHECK_THROWS(stage_from_string("nope"));
}
