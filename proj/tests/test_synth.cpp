#include <set>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "subdiar/synth.hpp"

using namespace subdiar;

TEST_CASE("single speaker, no noise: identical timbres, all active") {
  SynthConfig cfg;
  cfg.n_speakers = 1;
  cfg.n_lines = 20;
  const SynthProgram sp = synth_program(cfg);
  REQUIRE(sp.features.size() == 20);
  for (const auto &[id, f] : sp.features) {
    CHECK(f.active);
    CHECK(f.timbre == sp.features.at(0).timbre);
    CHECK(sp.truth.labels[id] == "S0");
  }
}

TEST_CASE("same seed twice gives bit-identical programs") {
  SynthConfig cfg;
  cfg.timbre_noise_std = 0.1;
  cfg.face_noise_std = 0.1;
  cfg.offscreen_rate = 0.3;
  cfg.turn_score_accuracy = 0.8;
  cfg.rng_seed = 42;
  const SynthProgram a = synth_program(cfg);
  const SynthProgram b = synth_program(cfg);
  CHECK(a.program.lines == b.program.lines);
  CHECK(a.features == b.features);
  CHECK(a.turn_scores == b.turn_scores);
  CHECK(a.truth == b.truth);
  cfg.rng_seed = 43;
  const SynthProgram c = synth_program(cfg);
  CHECK_FALSE(c.features == a.features);
}

TEST_CASE("nearest prototype recovers the truth at low noise") {
  SynthConfig cfg;
  cfg.n_speakers = 5;
  cfg.embedding_dim = 32;
  cfg.timbre_noise_std = 0.05;
  cfg.n_lines = 200;
  cfg.rng_seed = 3;
  const SynthProgram sp = synth_program(cfg);
  for (const auto &[id, f] : sp.features) {
    int best = -1;
    double best_cos = -2.0;
    for (std::size_t k = 0; k < sp.timbre_prototypes.size(); ++k) {
      const double c = cosine_similarity(f.timbre, sp.timbre_prototypes[k]);
      if (c > best_cos) {
        best_cos = c;
        best = static_cast<int>(k);
      }
    }
    CHECK(best == sp.speaker_of_line[id]);
  }
}

TEST_CASE("structural properties of generated programs") {
  SynthConfig cfg;
  cfg.n_speakers = 6;
  cfg.n_lines = 300;
  cfg.offscreen_rate = 0.25;
  cfg.unregistered_offscreen_speakers = 2;
  cfg.rng_seed = 11;
  const SynthProgram sp = synth_program(cfg);

  for (std::size_t a = 0; a < sp.timbre_prototypes.size(); ++a) {
    for (std::size_t b = a + 1; b < sp.timbre_prototypes.size(); ++b) {
      CHECK(cosine_similarity(sp.timbre_prototypes[a], sp.timbre_prototypes[b]) <=
            kMaxPrototypeCosine);
      CHECK(cosine_similarity(sp.face_prototypes[a], sp.face_prototypes[b]) <=
            kMaxPrototypeCosine);
    }
  }
  for (std::size_t i = 0; i < sp.program.lines.size(); ++i) {
    const Line &l = sp.program.lines[i];
    CHECK(l.line_id == static_cast<int>(i));
    CHECK(l.end_ms > l.start_ms);
    if (i > 0) CHECK(l.start_ms > sp.program.lines[i - 1].end_ms);
  }
  std::set<int> seen;
  int active = 0;
  for (const auto &[id, f] : sp.features) {
    seen.insert(sp.speaker_of_line[id]);
    CHECK(f.face.has_value() == f.active);
    if (sp.speaker_of_line[id] >= 4) CHECK_FALSE(f.active);
    active += f.active;
  }
  CHECK(seen.size() == 6);
  CHECK(active > 0);
  CHECK(sp.turn_scores.size() == 299);
}

TEST_CASE("synthetic scorer follows its accuracy") {
  SynthConfig cfg;
  cfg.n_lines = 2001;
  cfg.turn_score_accuracy = 0.8;
  cfg.rng_seed = 5;
  const SynthProgram sp = synth_program(cfg);
  int right = 0;
  for (const auto &[key, r] : sp.turn_scores) {
    const bool same = sp.speaker_of_line[key.first] == sp.speaker_of_line[key.second];
    CHECK(r.p0 + r.p1 == doctest::Approx(1.0));
    CHECK(r.p0 >= 0.0);
    CHECK(r.p1 >= 0.0);
    right += ((r.p1 >= r.p0) == same);
  }
  const double acc = right / 2000.0;
  CHECK(acc > 0.76);
  CHECK(acc < 0.84);
}

TEST_CASE("perfect turn scores are hard labels") {
  const TurnScoreMap s = perfect_turn_scores({0, 0, 1, 1, 0});
  REQUIRE(s.size() == 4);
  CHECK(s.at({0, 1}).p1 == 1.0);
  CHECK(s.at({1, 2}).p0 == 1.0);
  CHECK(s.at({2, 3}).p1 == 1.0);
  CHECK(s.at({3, 4}).p0 == 1.0);
  CHECK(perfect_turn_scores({}).empty());
}

TEST_CASE("invalid configs are rejected") {
  SynthConfig cfg;
  cfg.n_speakers = 0;
  CHECK_THROWS_AS(synth_program(cfg), std::invalid_argument);
  cfg = {};
  cfg.offscreen_rate = 1.5;
  CHECK_THROWS_AS(synth_program(cfg), std::invalid_argument);
  cfg = {};
  cfg.unregistered_offscreen_speakers = 6;
  CHECK_THROWS_AS(synth_program(cfg), std::invalid_argument);
  cfg = {};
  cfg.timbre_noise_std = -1.0;
  CHECK_THROWS_AS(synth_program(cfg), std::invalid_argument);
  cfg = {};
  cfg.n_speakers = 10;
  cfg.embedding_dim = 1;
  CHECK_THROWS_AS(synth_program(cfg), std::runtime_error);
}
