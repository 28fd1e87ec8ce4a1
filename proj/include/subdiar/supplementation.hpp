// subdiar/supplementation.hpp
//
// Off-screen speaker supplementation. Each same-speaker group is standardized
// to a main speaker; groups whose lines look unlike every registered
// prototype become (or merge into) new supplemented speakers.

#pragma once

#include <span>
#include <vector>

#include "subdiar/core.hpp"
#include "subdiar/feature_store.hpp"
#include "subdiar/registration.hpp"
#include "subdiar/turn_detect.hpp"

namespace subdiar {

inline constexpr double kDefaultEta = 0.45;
inline constexpr double kDefaultEpsilon = 0.6;

/// 1 for an active line, else the best cosine between the line's timbre and
/// the visual-anchor prototypes.
double line_novelty_score(const LineFeatures &line, const SpeakerRegistry &registry);

/// Mean of the per-line scores.
double group_novelty_score(std::span<const double> line_scores);

/// Plurality vote over the group's current speakers; active lines count twice.
/// Ties go to the higher summed cosine between the group's timbres and the
/// candidate prototype, then to the smaller id.
SpeakerId group_main_speaker(const Group &group,
                             std::span<const Assignment> assignments,
                             const FeatureMap &features,
                             const SpeakerRegistry &registry);

enum class GroupAction { keep, new_speaker, merged };

struct GroupVerdict {
  Group group;
  SpeakerId main_speaker;
  double sigma = 1.0;
  GroupAction action = GroupAction::keep;
  int target_speaker = 0;  ///< supplemented id for new_speaker / merged
};

std::string_view to_string(GroupAction a);

struct SupplementResult {
  SpeakerRegistry registry;
  std::vector<Assignment> assignments;  ///< ordered by line
  std::vector<GroupVerdict> verdicts;
};

/// Groups are processed in time order. Active lines keep their visual
/// anchor; other lines follow the group's main speaker, or the supplemented
/// speaker when sigma(G) < eta. A novel group merges into the most similar
/// existing supplemented speaker when that similarity reaches epsilon. eta = 0
/// disables supplementation.
SupplementResult supplement(const Program &program, std::span<const Group> groups,
                            std::span<const Assignment> initial,
                            const FeatureMap &features,
                            const SpeakerRegistry &registry, double eta,
                            double epsilon);

}  // namespace subdiar
