// subdiar/config.cpp

#include "subdiar/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <stdexcept>

namespace subdiar {

namespace {

std::string trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(const std::string &key, const std::string &s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("invalid value '" + s + "' for " + key);
  }
  return v;
}

std::string format(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::A: return "A";
    case Modality::AV: return "AV";
    case Modality::AVT: return "AVT";
  }
  return "?";
}

std::string_view to_string(ClusterMethod m) {
  return m == ClusterMethod::ahc ? "ahc" : "spectral";
}

void set_config_value(PipelineConfig &cfg, const std::string &key,
                      const std::string &raw) {
  const std::string value = trim(raw);
  if (key == "modality") {
    if (value == "A") cfg.modality = Modality::A;
    else if (value == "AV") cfg.modality = Modality::AV;
    else if (value == "AVT") cfg.modality = Modality::AVT;
    else throw std::invalid_argument("modality must be A, AV or AVT");
  } else if (key == "clustering.method") {
    if (value == "ahc") cfg.cluster_method = ClusterMethod::ahc;
    else if (value == "spectral") cfg.cluster_method = ClusterMethod::spectral;
    else throw std::invalid_argument("clustering.method must be ahc or spectral");
  } else if (key == "clustering.k_max_visual") {
    cfg.k_max_visual = parse_value<int>(key, value);
  } else if (key == "clustering.k_max_audio") {
    cfg.k_max_audio = parse_value<int>(key, value);
  } else if (key == "ahc.threshold") {
    cfg.ahc_threshold = parse_value<double>(key, value);
  } else if (key == "turn.w") {
    cfg.turn_w = parse_value<double>(key, value);
  } else if (key == "turn.window") {
    cfg.turn_window = parse_value<int>(key, value);
  } else if (key == "supplement.eta") {
    cfg.eta = parse_value<double>(key, value);
  } else if (key == "supplement.epsilon") {
    cfg.epsilon = parse_value<double>(key, value);
  } else if (key == "metrics.mode") {
    cfg.metrics_mode = scoring_mode_from_string(value);
  } else if (key == "metrics.collar") {
    cfg.collar = parse_value<double>(key, value);
  } else if (key == "rng_seed") {
    cfg.rng_seed = parse_value<std::uint64_t>(key, value);
  } else if (key == "paths.subtitles") {
    cfg.subtitles = value;
  } else if (key == "paths.features") {
    cfg.features = value;
  } else if (key == "paths.turn_scores") {
    cfg.turn_scores = value;
  } else if (key == "paths.ground_truth") {
    cfg.ground_truth = value;
  } else if (key == "paths.output_dir") {
    cfg.output_dir = value;
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

void apply_config(PipelineConfig &cfg, std::istream &in) {
  std::string row;
  int line_no = 0;
  while (std::getline(in, row)) {
    ++line_no;
    if (auto hash = row.find('#'); hash != std::string::npos) row.erase(hash);
    row = trim(row);
    if (row.empty()) continue;
    const auto eq = row.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    set_config_value(cfg, trim(row.substr(0, eq)), row.substr(eq + 1));
  }
}

void apply_config_file(PipelineConfig &cfg, const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  apply_config(cfg, in);
}

void validate(const PipelineConfig &cfg) {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (cfg.k_max_visual < 1 || cfg.k_max_audio < 1) {
    throw std::invalid_argument("clustering k_max values must be >= 1");
  }
  if (!(cfg.ahc_threshold >= -1.0 && cfg.ahc_threshold <= 1.0)) {
    throw std::invalid_argument("ahc.threshold must lie in [-1, 1]");
  }
  if (!unit(cfg.turn_w)) throw std::invalid_argument("turn.w must lie in [0, 1]");
  if (cfg.turn_window < 2 || cfg.turn_window > 10) {
    throw std::invalid_argument("turn.window must lie in [2, 10]");
  }
  if (!unit(cfg.eta)) throw std::invalid_argument("supplement.eta must lie in [0, 1]");
  if (!unit(cfg.epsilon)) {
    throw std::invalid_argument("supplement.epsilon must lie in [0, 1]");
  }
  if (!(cfg.collar >= 0.0)) throw std::invalid_argument("metrics.collar must be >= 0");
}

std::vector<std::pair<std::string, std::string>> config_entries(
    const PipelineConfig &cfg) {
  return {
      {"modality", std::string(to_string(cfg.modality))},
      {"clustering.method", std::string(to_string(cfg.cluster_method))},
      {"clustering.k_max_visual", std::to_string(cfg.k_max_visual)},
      {"clustering.k_max_audio", std::to_string(cfg.k_max_audio)},
      {"ahc.threshold", format(cfg.ahc_threshold)},
      {"turn.w", format(cfg.turn_w)},
      {"turn.window", std::to_string(cfg.turn_window)},
      {"supplement.eta", format(cfg.eta)},
      {"supplement.epsilon", format(cfg.epsilon)},
      {"metrics.mode", std::string(to_string(cfg.metrics_mode))},
      {"metrics.collar", format(cfg.collar)},
      {"rng_seed", std::to_string(cfg.rng_seed)},
  };
}

}  // namespace subdiar
