// subdiar/config.hpp
//
// Pipeline configuration. Files hold one `dotted.key = value` per line;
// `#` starts a comment.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "subdiar/metrics.hpp"

namespace subdiar {

enum class Modality { A, AV, AVT };
enum class ClusterMethod { ahc, spectral };

std::string_view to_string(Modality m);
std::string_view to_string(ClusterMethod m);

struct PipelineConfig {
  Modality modality = Modality::AVT;
  ClusterMethod cluster_method = ClusterMethod::spectral;
  int k_max_visual = 50;
  int k_max_audio = 60;
  double ahc_threshold = 0.55;
  double turn_w = 0.45;
  int turn_window = 10;
  double eta = 0.45;
  double epsilon = 0.6;
  ScoringMode metrics_mode = ScoringMode::line;
  double collar = 0.0;
  std::uint64_t rng_seed = 0;

  std::string subtitles;
  std::string features;
  std::string turn_scores;
  std::string ground_truth;
  std::string output_dir;
};

/// Throws std::invalid_argument on an unknown key or unparsable value.
void set_config_value(PipelineConfig &cfg, const std::string &key,
                      const std::string &value);

/// Applies every `key = value` line of the stream on top of `cfg`.
void apply_config(PipelineConfig &cfg, std::istream &in);
void apply_config_file(PipelineConfig &cfg, const std::string &path);

/// Throws std::invalid_argument when a threshold or size is out of range.
void validate(const PipelineConfig &cfg);

/// Every key with its current value, in a fixed order.
std::vector<std::pair<std::string, std::string>> config_entries(
    const PipelineConfig &cfg);

}  // namespace subdiar
