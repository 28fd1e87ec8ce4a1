// subdiar/synth.hpp
//
// Synthetic labeled programs for desk-scale verification. Every stream the
// real pipeline consumes (subtitles, features, turn scores) is produced
// together with the ground truth that generated it.

#pragma once

#include <cstdint>
#include <vector>

#include "subdiar/core.hpp"
#include "subdiar/feature_store.hpp"
#include "subdiar/subtitle_io.hpp"

namespace subdiar {

struct SynthConfig {
  int n_speakers = 5;
  int n_lines = 100;
  int embedding_dim = 32;
  /// Per-component std of the gaussian noise added to a prototype before
  /// normalization.
  double face_noise_std = 0.0;
  double timbre_noise_std = 0.0;
  /// Probability that a line of an on-screen speaker has no active speaker.
  double offscreen_rate = 0.0;
  /// The last `unregistered_offscreen_speakers` speakers are never active.
  int unregistered_offscreen_speakers = 0;
  /// Probability that the synthetic scorer's preferred label is correct.
  double turn_score_accuracy = 1.0;
  std::uint64_t rng_seed = 0;
};

struct SynthProgram {
  Program program;
  FeatureMap features;
  TurnScoreMap turn_scores;
  GroundTruth truth;
  /// Speaker index per line (0-based), the integer form of `truth`.
  std::vector<int> speaker_of_line;
  std::vector<Embedding> timbre_prototypes;
  std::vector<Embedding> face_prototypes;
};

/// Prototypes are accepted by rejection sampling with pairwise cosine <= 0.5.
/// Speakers follow a Markov chain with stay probability 0.6. Throws
/// std::invalid_argument on an invalid config and std::runtime_error when the
/// prototype constraint cannot be met (dimension too small).
SynthProgram synth_program(const SynthConfig &cfg);

/// Hard label probabilities taken from the truth: (p0, p1) = (0, 1) for a
/// same-speaker pair and (1, 0) for a turn.
TurnScoreMap perfect_turn_scores(const std::vector<int> &speaker_of_line);

inline constexpr double kMarkovStayProbability = 0.6;
inline constexpr double kMaxPrototypeCosine = 0.5;

}  // namespace subdiar
