// subdiar/registration.hpp
//
// Visual-anchor speaker registration. Each visual cluster becomes a speaker;
// the audio cluster that wins a vote among its lines supplies the lines whose
// mean timbre is the speaker's prototype.

#pragma once

#include <map>
#include <vector>

#include "subdiar/clustering.hpp"
#include "subdiar/core.hpp"
#include "subdiar/feature_store.hpp"

namespace subdiar {

/// line_id -> cluster label (1..n).
using LineLabels = std::map<int, int>;

/// Pairs positional cluster labels with the line ids that were clustered.
LineLabels labels_by_line(const ClusterLabels &labels,
                          const std::vector<int> &line_ids);

struct RegisteredSpeaker {
  SpeakerId id;
  Embedding prototype;
  std::vector<int> support;  ///< line ids whose timbre forms the prototype
  int audio_cluster = 0;     ///< voted audio cluster; 0 when not voted
};

struct SpeakerRegistry {
  std::vector<RegisteredSpeaker> speakers;  ///< ordered by id

  bool empty() const { return speakers.empty(); }
  std::size_t size() const { return speakers.size(); }
  const RegisteredSpeaker *find(int id) const;
  int next_id() const;
  std::size_t count(Origin origin) const;
};

/// Audio cluster with the most lines in `lines`; smallest cluster id on ties.
int vote_audio_cluster(const std::vector<int> &lines, const LineLabels &audio);

/// One visual_anchor speaker per visual cluster, id == cluster label.
/// `visual` must label exactly the active lines and `audio` every line.
SpeakerRegistry build_registry(const FeatureMap &features,
                               const LineLabels &visual,
                               const LineLabels &audio);

/// Active lines take their own visual cluster (confidence 1). Other lines
/// take the registered speaker with the most similar prototype, confidence
/// being that similarity; the smallest id wins ties.
std::vector<Assignment> assign_initial(const Program &program,
                                       const FeatureMap &features,
                                       const LineLabels &visual,
                                       const SpeakerRegistry &registry);

}  // namespace subdiar
