// subdiar/pipeline.cpp

#include "subdiar/pipeline.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "subdiar/clustering.hpp"
#include "subdiar/log.hpp"

namespace subdiar {

namespace {

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

DiarizationResult diarize_audio_only(const ProgramInputs &in,
                                     const PipelineConfig &cfg) {
  DiarizationResult out;
  out.program_id = in.program.program_id;
  std::vector<Embedding> timbres;
  std::vector<int> ids;
  for (const Line &l : in.program.lines) {
    timbres.push_back(in.features.at(l.line_id).timbre);
    ids.push_back(l.line_id);
  }
  const ClusterLabels labels = cluster_embeddings(timbres, cfg, cfg.k_max_audio);
  out.audio_clusters = labels.n;

  std::vector<std::vector<const Embedding *>> members(labels.n);
  for (std::size_t k = 0; k < ids.size(); ++k) {
    members[labels.labels[k] - 1].push_back(&timbres[k]);
  }
  for (int c = 1; c <= labels.n; ++c) {
    RegisteredSpeaker s;
    s.id = SpeakerId{c, Origin::audio_cluster};
    s.audio_cluster = c;
    s.prototype = mean_embedding(std::span<const Embedding *const>(members[c - 1]));
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (labels.labels[k] == c) s.support.push_back(ids[k]);
    }
    out.registry.speakers.push_back(std::move(s));
  }
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const RegisteredSpeaker &s = out.registry.speakers[labels.labels[k] - 1];
    out.assignments.push_back(Assignment{ids[k], s.id,
                                         cosine_similarity(timbres[k], s.prototype),
                                         Stage::audio_cluster});
  }
  return out;
}

}  // namespace

ClusterLabels cluster_embeddings(std::span<const Embedding> embs,
                                 const PipelineConfig &cfg, int k_max) {
  if (cfg.cluster_method == ClusterMethod::ahc) return ahc(embs, cfg.ahc_threshold);
  SpectralOptions opts;
  opts.k_max = k_max;
  opts.kmeans.seed = cfg.rng_seed;
  return spectral_cluster(embs, opts);
}

DiarizationResult diarize(const ProgramInputs &in, const PipelineConfig &cfg) {
  validate(cfg);
  check_feature_coverage(in.features, in.program);
  for (std::size_t k = 0; k < in.program.lines.size(); ++k) {
    if (in.program.lines[k].line_id != static_cast<int>(k)) {
      throw std::invalid_argument("program line ids must be 0..n-1 in order");
    }
  }

  DiarizationResult out;
  out.program_id = in.program.program_id;
  if (in.program.lines.empty()) {
    if (in.truth) out.metrics = MetricReport{};
    return out;
  }

  std::vector<int> active_ids;
  for (const Line &l : in.program.lines) {
    if (in.features.at(l.line_id).active) active_ids.push_back(l.line_id);
  }

  if (cfg.modality == Modality::A) {
    out = diarize_audio_only(in, cfg);
  } else if (active_ids.empty()) {
    log_warning("program " + in.program.program_id +
                " has no active-speaker lines; falling back to audio-only clustering");
    out = diarize_audio_only(in, cfg);
  } else {
    std::vector<Embedding> faces;
    for (int id : active_ids) faces.push_back(*in.features.at(id).face);
    std::vector<Embedding> timbres;
    std::vector<int> all_ids;
    for (const Line &l : in.program.lines) {
      timbres.push_back(in.features.at(l.line_id).timbre);
      all_ids.push_back(l.line_id);
    }
    const ClusterLabels cv = cluster_embeddings(faces, cfg, cfg.k_max_visual);
    const ClusterLabels ca = cluster_embeddings(timbres, cfg, cfg.k_max_audio);
    out.visual_clusters = cv.n;
    out.audio_clusters = ca.n;
    const LineLabels visual = labels_by_line(cv, active_ids);
    const LineLabels audio = labels_by_line(ca, all_ids);

    const SpeakerRegistry registry = build_registry(in.features, visual, audio);
    const std::vector<Assignment> initial =
        assign_initial(in.program, in.features, visual, registry);

    std::vector<PairScore> scores;
    double w = cfg.turn_w;
    if (cfg.modality == Modality::AV) {
      NeutralScorer neutral;
      scores = score_program(neutral, in.program, cfg.turn_window);
      w = 0.0;
    } else {
      ReplayScorer replay(in.turn_scores);
      scores = score_program(replay, in.program, cfg.turn_window);
    }
    out.decisions = decide_turns(in.program, in.features, scores, w);
    const std::vector<Group> groups = segment_groups(in.program, out.decisions);
    SupplementResult sup = supplement(in.program, groups, initial, in.features,
                                      registry, cfg.eta, cfg.epsilon);
    out.assignments = std::move(sup.assignments);
    out.registry = std::move(sup.registry);
    out.verdicts = std::move(sup.verdicts);
  }
  out.program_id = in.program.program_id;
  if (in.truth) {
    out.metrics = evaluate(in.program, out, *in.truth, cfg.metrics_mode, cfg.collar);
  }
  return out;
}

ProgramInputs load_inputs(const PipelineConfig &cfg) {
  if (cfg.subtitles.empty()) throw std::invalid_argument("paths.subtitles is required");
  if (cfg.features.empty()) throw std::invalid_argument("paths.features is required");
  ProgramInputs in;
  in.program = parse_srt_file(cfg.subtitles);
  in.features = load_features(cfg.features);
  check_feature_coverage(in.features, in.program);
  if (!cfg.turn_scores.empty()) {
    in.turn_scores = load_turn_scores(cfg.turn_scores);
    for (const auto &[key, r] : in.turn_scores) {
      if (r.right_line_id >= static_cast<int>(in.program.lines.size()) ||
          r.left_line_id < 0) {
        throw std::invalid_argument("turn score pair (" + std::to_string(key.first) +
                                    "," + std::to_string(key.second) +
                                    ") is outside the program");
      }
    }
  } else if (cfg.modality == Modality::AVT) {
    log_warning("no turn scores given; every pair scores neutral");
  }
  if (!cfg.ground_truth.empty()) {
    in.truth = parse_ground_truth_file(cfg.ground_truth);
    if (in.truth->labels.size() != in.program.lines.size()) {
      throw std::invalid_argument("ground truth covers " +
                                  std::to_string(in.truth->labels.size()) +
                                  " lines but the program has " +
                                  std::to_string(in.program.lines.size()));
    }
  }
  return in;
}

DiarizationResult run_pipeline(const PipelineConfig &cfg) {
  validate(cfg);
  const ProgramInputs in = load_inputs(cfg);
  DiarizationResult result = diarize(in, cfg);
  if (!cfg.output_dir.empty()) write_outputs(cfg.output_dir, in.program, result, cfg);
  return result;
}

LabeledTimeline truth_timeline(const Program &program, const GroundTruth &truth) {
  if (truth.labels.size() != program.lines.size()) {
    throw std::invalid_argument("ground truth does not cover every line");
  }
  LabeledTimeline t;
  for (const Line &l : program.lines) {
    t.segments.push_back(Segment{l.start_ms, l.end_ms, truth.labels.at(l.line_id)});
  }
  return t;
}

LabeledTimeline assignment_timeline(const Program &program,
                                    std::span<const Assignment> assignments) {
  if (assignments.size() != program.lines.size()) {
    throw std::invalid_argument("assignments do not cover every line");
  }
  LabeledTimeline t;
  for (const Line &l : program.lines) {
    const Assignment &a = assignments[l.line_id];
    if (a.line_id != l.line_id) throw std::invalid_argument("assignments out of order");
    t.segments.push_back(Segment{l.start_ms, l.end_ms, speaker_label(a.speaker)});
  }
  return t;
}

MetricReport evaluate(const Program &program, const DiarizationResult &result,
                      const GroundTruth &truth, ScoringMode mode,
                      double collar_seconds) {
  MetricReport r;
  const LabeledTimeline ref = truth_timeline(program, truth);
  const LabeledTimeline hyp = assignment_timeline(program, result.assignments);
  r.breakdown = der_breakdown(ref, hyp, mode, collar_seconds);
  r.der = r.breakdown.der();
  r.spke = r.breakdown.spke();
  r.jer = jer(ref, hyp, mode);

  std::set<std::string> refs(truth.labels.begin(), truth.labels.end());
  std::set<int> hyps;
  for (const Assignment &a : result.assignments) hyps.insert(a.speaker.id);
  r.ref_speakers = refs.size();
  r.hyp_speakers = hyps.size();
  r.supplemented_speakers = result.registry.count(Origin::supplemented);

  if (!result.decisions.empty()) {
    std::vector<std::pair<double, bool>> scored;
    for (const TurnDecision &d : result.decisions) {
      scored.emplace_back(d.p_std, truth.labels.at(d.left_line_id) ==
                                       truth.labels.at(d.left_line_id + 1));
    }
    const TurnMetrics tm = turn_metrics(scored);
    r.turn_auc = tm.auc;
    r.turn_f1 = tm.f1;
  }
  return r;
}

void write_report_csv(const MetricReport &r, const PipelineConfig &cfg,
                      std::ostream &out) {
  out << "metric,value\n";
  out << "der," << num(r.der) << '\n';
  out << "jer," << num(r.jer) << '\n';
  out << "spke," << num(r.spke) << '\n';
  out << "missed_seconds," << num(r.breakdown.missed) << '\n';
  out << "false_alarm_seconds," << num(r.breakdown.false_alarm) << '\n';
  out << "confusion_seconds," << num(r.breakdown.confusion) << '\n';
  out << "scored_seconds," << num(r.breakdown.total) << '\n';
  out << "turn_auc," << (r.turn_auc ? num(*r.turn_auc) : "") << '\n';
  out << "turn_f1," << (r.turn_f1 ? num(*r.turn_f1) : "") << '\n';
  out << "ref_speakers," << r.ref_speakers << '\n';
  out << "hyp_speakers," << r.hyp_speakers << '\n';
  out << "supplemented_speakers," << r.supplemented_speakers << '\n';
  for (const auto &[k, v] : config_entries(cfg)) {
    out << "config." << k << ',' << v << '\n';
  }
}

void write_summary(const Program &program, const DiarizationResult &result,
                   const PipelineConfig &cfg, std::ostream &out) {
  out << "program " << program.program_id << ": " << program.lines.size()
      << " lines, modality " << to_string(cfg.modality) << ", clustering "
      << to_string(cfg.cluster_method) << ", seed " << cfg.rng_seed << '\n';
  out << "visual clusters " << result.visual_clusters << ", audio clusters "
      << result.audio_clusters << ", speakers " << result.registry.size() << " ("
      << result.registry.count(Origin::visual_anchor) << " visual-anchor, "
      << result.registry.count(Origin::supplemented) << " supplemented)\n";
  std::size_t turns = 0;
  for (const TurnDecision &d : result.decisions) turns += d.same_speaker ? 0 : 1;
  out << "turn decisions " << result.decisions.size() << " (" << turns
      << " turns), groups " << result.verdicts.size() << '\n';
  if (result.metrics) {
    const MetricReport &m = *result.metrics;
    out << "DER " << fixed(m.der, 5) << "  JER " << fixed(m.jer, 5) << "  SPKE "
        << fixed(m.spke, 5) << " (" << to_string(cfg.metrics_mode) << " mode)\n";
    out << "turn AUC " << (m.turn_auc ? fixed(*m.turn_auc, 5) : "n/a") << "  F1 "
        << (m.turn_f1 ? fixed(*m.turn_f1, 5) : "n/a") << '\n';
    out << "speakers: reference " << m.ref_speakers << ", hypothesis "
        << m.hyp_speakers << '\n';
  }
}

void write_groups_csv(const DiarizationResult &result, std::ostream &out) {
  out << "first_line,last_line,main_speaker,sigma,action,target_speaker\n";
  for (const GroupVerdict &v : result.verdicts) {
    out << v.group.first_line << ',' << v.group.last_line << ','
        << v.main_speaker.id << ',' << num(v.sigma) << ',' << to_string(v.action)
        << ',';
    if (v.action != GroupAction::keep) out << v.target_speaker;
    out << '\n';
  }
}

void write_turns_csv(const DiarizationResult &result, std::ostream &out) {
  out << "left_line_id,right_line_id,p_alm,s_tim,p_std,same_speaker\n";
  for (const TurnDecision &d : result.decisions) {
    out << d.left_line_id << ',' << d.left_line_id + 1 << ',' << num(d.p_alm) << ','
        << num(d.s_tim) << ',' << num(d.p_std) << ',' << (d.same_speaker ? 1 : 0)
        << '\n';
  }
}

void write_file_atomic(const std::string &path, const std::string &content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp);
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot move " + tmp + " into place: " + ec.message());
}

void write_outputs(const std::string &dir, const Program &program,
                   const DiarizationResult &result, const PipelineConfig &cfg) {
  std::filesystem::create_directories(dir);
  const std::string base =
      (std::filesystem::path(dir) /
       (program.program_id.empty() ? std::string("program") : program.program_id))
          .string();
  auto emit = [&](const std::string &suffix, auto writer) {
    std::ostringstream os;
    writer(os);
    write_file_atomic(base + suffix, os.str());
  };
  emit(".annotation.csv",
       [&](std::ostream &os) { write_annotation(program, result.assignments, os); });
  emit(".rttm", [&](std::ostream &os) {
    os << write_rttm(program, result.assignments,
                     program.program_id.empty() ? "program" : program.program_id);
  });
  emit(".groups.csv", [&](std::ostream &os) { write_groups_csv(result, os); });
  emit(".turns.csv", [&](std::ostream &os) { write_turns_csv(result, os); });
  emit(".summary.txt",
       [&](std::ostream &os) { write_summary(program, result, cfg, os); });
  if (result.metrics) {
    emit(".report.csv",
         [&](std::ostream &os) { write_report_csv(*result.metrics, cfg, os); });
  }
}

SweepParam sweep_param_from_string(const std::string &s) {
  if (s == "w" || s == "turn.w") return SweepParam::w;
  if (s == "eta" || s == "supplement.eta") return SweepParam::eta;
  throw std::invalid_argument("sweep parameter must be w or eta");
}

std::vector<SweepRow> sweep(const ProgramInputs &inputs, const PipelineConfig &cfg,
                            SweepParam param, std::span<const double> grid) {
  if (!inputs.truth) throw std::invalid_argument("sweep needs ground truth");
  std::vector<SweepRow> rows;
  for (double value : grid) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw std::invalid_argument("sweep value " + num(value) + " outside [0, 1]");
    }
    PipelineConfig c = cfg;
    if (param == SweepParam::w) c.turn_w = value;
    else c.eta = value;
    const DiarizationResult r = diarize(inputs, c);
    rows.push_back(SweepRow{value, *r.metrics});
  }
  return rows;
}

void write_sweep_csv(SweepParam param, std::span<const SweepRow> rows,
                     std::ostream &out) {
  out << (param == SweepParam::w ? "w" : "eta")
      << ",der,jer,spke,turn_f1,turn_auc,supplemented_speakers\n";
  for (const SweepRow &row : rows) {
    const MetricReport &m = row.report;
    out << num(row.value) << ',' << num(m.der) << ',' << num(m.jer) << ','
        << num(m.spke) << ',' << (m.turn_f1 ? num(*m.turn_f1) : "") << ','
        << (m.turn_auc ? num(*m.turn_auc) : "") << ',' << m.supplemented_speakers
        << '\n';
  }
}

}  // namespace subdiar
