// subdiar/synth.cpp

#include "subdiar/synth.hpp"

#include <random>
#include <stdexcept>
#include <string>

namespace subdiar {

namespace {

constexpr int kPrototypeAttempts = 20000;

Embedding gaussian_direction(std::mt19937_64 &rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    std::vector<double> v(dim);
    for (double &x : v) x = g(rng);
    Embedding e(std::move(v));
    if (norm(e) > 1e-12) return unit_normalize(e);
  }
}

std::vector<Embedding> draw_prototypes(std::mt19937_64 &rng, int n, int dim) {
  std::vector<Embedding> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kPrototypeAttempts && !placed; ++attempt) {
      Embedding cand = gaussian_direction(rng, dim);
      bool ok = true;
      for (const Embedding &p : out) {
        if (cosine_similarity(cand, p) > kMaxPrototypeCosine) {
          ok = false;
          break;
        }
      }
      if (ok) {
        out.push_back(std::move(cand));
        placed = true;
      }
    }
    if (!placed) {
      throw std::runtime_error("cannot place " + std::to_string(n) +
                               " prototypes with pairwise cosine <= 0.5 in " +
                               std::to_string(dim) + " dimensions");
    }
  }
  return out;
}

Embedding perturb(std::mt19937_64 &rng, const Embedding &proto, double std) {
  if (std == 0.0) return proto;
  std::normal_distribution<double> g(0.0, std);
  std::vector<double> v(proto.values);
  for (double &x : v) x += g(rng);
  Embedding e(std::move(v));
  // a draw that cancels the prototype exactly is vanishingly unlikely
  if (norm(e) == 0.0) return proto;
  return unit_normalize(e);
}

void validate(const SynthConfig &cfg) {
  if (cfg.n_speakers < 1) throw std::invalid_argument("n_speakers must be >= 1");
  if (cfg.n_lines < 0) throw std::invalid_argument("n_lines must be >= 0");
  if (cfg.embedding_dim < 1) throw std::invalid_argument("embedding_dim must be >= 1");
  if (!(cfg.face_noise_std >= 0.0) || !(cfg.timbre_noise_std >= 0.0)) {
    throw std::invalid_argument("noise stds must be >= 0");
  }
  if (!(cfg.offscreen_rate >= 0.0 && cfg.offscreen_rate <= 1.0)) {
    throw std::invalid_argument("offscreen_rate must lie in [0, 1]");
  }
  if (cfg.unregistered_offscreen_speakers < 0 ||
      cfg.unregistered_offscreen_speakers > cfg.n_speakers) {
    throw std::invalid_argument(
        "unregistered_offscreen_speakers must lie in [0, n_speakers]");
  }
  if (!(cfg.turn_score_accuracy >= 0.0 && cfg.turn_score_accuracy <= 1.0)) {
    throw std::invalid_argument("turn_score_accuracy must lie in [0, 1]");
  }
}

}  // namespace

SynthProgram synth_program(const SynthConfig &cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SynthProgram out;
  out.timbre_prototypes = draw_prototypes(rng, cfg.n_speakers, cfg.embedding_dim);
  out.face_prototypes = draw_prototypes(rng, cfg.n_speakers, cfg.embedding_dim);

  const int n = cfg.n_speakers;
  const int first_hidden = n - cfg.unregistered_offscreen_speakers;
  std::uniform_int_distribution<int> any_speaker(0, n - 1);
  std::uniform_int_distribution<int> other_speaker(0, std::max(0, n - 2));
  std::uniform_int_distribution<std::int64_t> gap_ms(100, 600);
  std::uniform_int_distribution<std::int64_t> dur_ms(800, 4000);

  out.program.program_id = "synth" + std::to_string(cfg.rng_seed);
  std::int64_t cursor = 0;
  int speaker = any_speaker(rng);
  for (int i = 0; i < cfg.n_lines; ++i) {
    if (i > 0 && n > 1 && unit(rng) >= kMarkovStayProbability) {
      const int pick = other_speaker(rng);
      speaker = pick >= speaker ? pick + 1 : pick;
    }
    cursor += gap_ms(rng);
    Line line;
    line.line_id = i;
    line.start_ms = cursor;
    line.end_ms = cursor + dur_ms(rng);
    line.text = "line " + std::to_string(i);
    cursor = line.end_ms;
    out.program.lines.push_back(line);

    LineFeatures f;
    f.line_id = i;
    f.active = speaker < first_hidden && unit(rng) >= cfg.offscreen_rate;
    if (f.active) {
      f.face = perturb(rng, out.face_prototypes[speaker], cfg.face_noise_std);
    }
    f.timbre = perturb(rng, out.timbre_prototypes[speaker], cfg.timbre_noise_std);
    out.features.emplace(i, std::move(f));

    out.speaker_of_line.push_back(speaker);
    out.truth.labels.push_back("S" + std::to_string(speaker));
  }

  std::uniform_real_distribution<double> confidence(0.5, 1.0);
  for (int i = 0; i + 1 < cfg.n_lines; ++i) {
    const bool same = out.speaker_of_line[i] == out.speaker_of_line[i + 1];
    const bool says_same = unit(rng) < cfg.turn_score_accuracy ? same : !same;
    const double c = confidence(rng);
    TurnScoreRecord r{i, i + 1, says_same ? 1.0 - c : c, says_same ? c : 1.0 - c};
    out.turn_scores.emplace(std::make_pair(i, i + 1), r);
  }
  return out;
}

TurnScoreMap perfect_turn_scores(const std::vector<int> &speaker_of_line) {
  TurnScoreMap out;
  for (std::size_t i = 0; i + 1 < speaker_of_line.size(); ++i) {
    const bool same = speaker_of_line[i] == speaker_of_line[i + 1];
    const int l = static_cast<int>(i);
    out.emplace(std::make_pair(l, l + 1),
                TurnScoreRecord{l, l + 1, same ? 0.0 : 1.0, same ? 1.0 : 0.0});
  }
  return out;
}

}  // namespace subdiar
