// subdiar/core.cpp

#include "subdiar/core.hpp"

#include <cmath>
#include <stdexcept>

namespace subdiar {

namespace {

void check_same_dim(const Embedding &a, const Embedding &b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("embedding dimension mismatch: " +
                                std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()));
  }
}

}  // namespace

double dot(const Embedding &a, const Embedding &b) {
  check_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a.values[i] * b.values[i];
  return s;
}

double norm(const Embedding &e) {
  double s = 0.0;
  for (double v : e.values) s += v * v;
  return std::sqrt(s);
}

double cosine_similarity(const Embedding &a, const Embedding &b) {
  check_same_dim(a, b);
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("cosine similarity of a zero-norm vector");
  }
  const double c = dot(a, b) / (na * nb);
  // rounding can push |c| a hair past 1
  if (c > 1.0) return 1.0;
  if (c < -1.0) return -1.0;
  return c;
}

Embedding unit_normalize(const Embedding &e) {
  const double n = norm(e);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("cannot normalize a zero-norm embedding");
  }
  std::vector<double> out(e.values);
  for (double &v : out) v /= n;
  return Embedding(std::move(out));
}

namespace {

template <typename Get>
Embedding mean_impl(std::size_t count, Get get) {
  if (count == 0) throw std::invalid_argument("mean of an empty embedding set");
  const std::size_t dim = get(0).dim();
  std::vector<double> acc(dim, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    const Embedding &e = get(k);
    if (e.dim() != dim) {
      throw std::invalid_argument("embedding dimension mismatch in mean");
    }
    for (std::size_t i = 0; i < dim; ++i) acc[i] += e.values[i];
  }
  if (count == 1) return get(0);
  for (double &v : acc) v /= static_cast<double>(count);
  return Embedding(std::move(acc));
}

}  // namespace

Embedding mean_embedding(std::span<const Embedding> set) {
  return mean_impl(set.size(),
                   [&](std::size_t k) -> const Embedding & { return set[k]; });
}

Embedding mean_embedding(std::span<const Embedding *const> set) {
  return mean_impl(set.size(),
                   [&](std::size_t k) -> const Embedding & { return *set[k]; });
}

std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::visual_anchor: return "visual_anchor";
    case Origin::supplemented: return "supplemented";
    case Origin::audio_cluster: return "audio_cluster";
  }
  return "?";
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::active_visual: return "active_visual";
    case Stage::prototype_nearest: return "prototype_nearest";
    case Stage::group_standardized: return "group_standardized";
    case Stage::supplemented: return "supplemented";
    case Stage::audio_cluster: return "audio_cluster";
  }
  return "?";
}

Origin origin_from_string(std::string_view s) {
  if (s == "visual_anchor") return Origin::visual_anchor;
  if (s == "supplemented") return Origin::supplemented;
  if (s == "audio_cluster") return Origin::audio_cluster;
  throw std::invalid_argument("unknown speaker origin: " + std::string(s));
}

Stage stage_from_string(std::string_view s) {
  if (s == "active_visual") return Stage::active_visual;
  if (s == "prototype_nearest") return Stage::prototype_nearest;
  if (s == "group_standardized") return Stage::group_standardized;
  if (s == "supplemented") return Stage::supplemented;
  if (s == "audio_cluster") return Stage::audio_cluster;
  throw std::invalid_argument("unknown assignment stage: " + std::string(s));
}

}  // namespace subdiar
