// subdiar/pipeline.hpp
//
// End-to-end diarization of one program:
//   ingest -> cluster -> register -> turn-detect -> supplement -> score.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subdiar/config.hpp"
#include "subdiar/core.hpp"
#include "subdiar/feature_store.hpp"
#include "subdiar/metrics.hpp"
#include "subdiar/registration.hpp"
#include "subdiar/subtitle_io.hpp"
#include "subdiar/supplementation.hpp"
#include "subdiar/turn_detect.hpp"

namespace subdiar {

struct ProgramInputs {
  Program program;
  FeatureMap features;
  TurnScoreMap turn_scores;
  std::optional<GroundTruth> truth;
};

struct MetricReport {
  DerBreakdown breakdown;
  double der = 0.0;
  double jer = 0.0;
  double spke = 0.0;
  std::optional<double> turn_auc;
  std::optional<double> turn_f1;
  std::size_t ref_speakers = 0;
  std::size_t hyp_speakers = 0;
  std::size_t supplemented_speakers = 0;
};

struct DiarizationResult {
  std::string program_id;
  std::vector<Assignment> assignments;  ///< one per line, ordered by line_id
  SpeakerRegistry registry;
  std::vector<GroupVerdict> verdicts;
  std::vector<TurnDecision> decisions;
  int visual_clusters = 0;
  int audio_clusters = 0;
  std::optional<MetricReport> metrics;
};

/// Clusters with the configured method; spectral uses `k_max` and the seed.
ClusterLabels cluster_embeddings(std::span<const Embedding> embs,
                                 const PipelineConfig &cfg, int k_max);

/// Pure in-memory run. Evaluates when `inputs.truth` is present.
DiarizationResult diarize(const ProgramInputs &inputs, const PipelineConfig &cfg);

/// Loads every input named in `cfg`, checking they agree on the line set.
ProgramInputs load_inputs(const PipelineConfig &cfg);

/// load_inputs + diarize, then writes outputs when cfg.output_dir is set.
DiarizationResult run_pipeline(const PipelineConfig &cfg);

LabeledTimeline truth_timeline(const Program &program, const GroundTruth &truth);
LabeledTimeline assignment_timeline(const Program &program,
                                    std::span<const Assignment> assignments);

/// Throws std::invalid_argument when the truth does not cover every line.
MetricReport evaluate(const Program &program, const DiarizationResult &result,
                      const GroundTruth &truth, ScoringMode mode,
                      double collar_seconds);

void write_report_csv(const MetricReport &report, const PipelineConfig &cfg,
                      std::ostream &out);
void write_summary(const Program &program, const DiarizationResult &result,
                   const PipelineConfig &cfg, std::ostream &out);
void write_groups_csv(const DiarizationResult &result, std::ostream &out);
void write_turns_csv(const DiarizationResult &result, std::ostream &out);

/// Writes <id>.annotation.csv, <id>.rttm, <id>.groups.csv, <id>.turns.csv,
/// <id>.summary.txt and, with metrics, <id>.report.csv. Each file is written
/// to a temporary name first and renamed into place.
void write_outputs(const std::string &dir, const Program &program,
                   const DiarizationResult &result, const PipelineConfig &cfg);

enum class SweepParam { w, eta };

SweepParam sweep_param_from_string(const std::string &s);

struct SweepRow {
  double value = 0.0;
  MetricReport report;
};

/// One full run per grid value with everything else (seed included) fixed.
/// Requires ground truth.
std::vector<SweepRow> sweep(const ProgramInputs &inputs, const PipelineConfig &cfg,
                            SweepParam param, std::span<const double> grid);

void write_sweep_csv(SweepParam param, std::span<const SweepRow> rows,
                     std::ostream &out);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string &path, const std::string &content);

}  // namespace subdiar
