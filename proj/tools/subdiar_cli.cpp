// tools/subdiar_cli.cpp
//
// subdiar run | sweep | evaluate | synth

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "subdiar/config.hpp"
#include "subdiar/metrics.hpp"
#include "subdiar/pipeline.hpp"
#include "subdiar/subtitle_io.hpp"
#include "subdiar/synth.hpp"

namespace {

using namespace subdiar;

struct CommonArgs {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string subtitles, features, turn_scores, truth, out;
  std::string modality, method;
  std::string seed;
};

void add_common(CLI::App *cmd, CommonArgs &a) {
  cmd->add_option("-c,--config", a.config_file, "config file of dotted key = value lines");
  cmd->add_option("--set", a.overrides, "override a config key (key=value)");
  cmd->add_option("--subtitles", a.subtitles, "SRT file (paths.subtitles)");
  cmd->add_option("--features", a.features, "features JSONL (paths.features)");
  cmd->add_option("--turn-scores", a.turn_scores, "turn scores JSONL (paths.turn_scores)");
  cmd->add_option("--truth", a.truth, "ground truth CSV (paths.ground_truth)");
  cmd->add_option("--modality", a.modality, "A, AV or AVT");
  cmd->add_option("--method", a.method, "ahc or spectral");
  cmd->add_option("--seed", a.seed, "rng_seed");
}

PipelineConfig build_config(const CommonArgs &a) {
  PipelineConfig cfg;
  if (!a.config_file.empty()) apply_config_file(cfg, a.config_file);
  for (const std::string &kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--set expects key=value, got " + kv);
    }
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  auto set_if = [&](const char *key, const std::string &v) {
    if (!v.empty()) set_config_value(cfg, key, v);
  };
  set_if("paths.subtitles", a.subtitles);
  set_if("paths.features", a.features);
  set_if("paths.turn_scores", a.turn_scores);
  set_if("paths.ground_truth", a.truth);
  set_if("paths.output_dir", a.out);
  set_if("modality", a.modality);
  set_if("clustering.method", a.method);
  set_if("rng_seed", a.seed);
  validate(cfg);
  return cfg;
}

std::vector<double> parse_grid(const std::string &s) {
  std::vector<double> grid;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad grid value: " + item);
    grid.push_back(v);
  }
  if (grid.empty()) throw std::invalid_argument("empty grid");
  return grid;
}

void write_text(const std::string &path, const std::string &content) {
  write_file_atomic(path, content);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Subtitle-timed speaker diarization"};
  app.require_subcommand(1);

  CommonArgs run_args;
  auto *run = app.add_subcommand("run", "diarize one program");
  add_common(run, run_args);
  run->add_option("-o,--out", run_args.out, "output directory (paths.output_dir)");

  CommonArgs sweep_args;
  std::string sweep_param = "w";
  std::string sweep_grid;
  std::string sweep_out;
  auto *sw = app.add_subcommand("sweep", "rerun the pipeline over a parameter grid");
  add_common(sw, sweep_args);
  sw->add_option("--param", sweep_param, "w or eta")->required();
  sw->add_option("--grid", sweep_grid, "comma-separated values in [0,1]")->required();
  sw->add_option("-o,--out", sweep_out, "CSV output file (default stdout)");

  std::string ev_subtitles, ev_annotation, ev_truth, ev_ref_rttm, ev_hyp_rttm;
  std::string ev_mode = "line";
  double ev_collar = 0.0;
  auto *ev = app.add_subcommand("evaluate", "score an annotation or RTTM against a reference");
  ev->add_option("--subtitles", ev_subtitles, "SRT file the annotation refers to");
  ev->add_option("--annotation", ev_annotation, "annotation CSV written by run");
  ev->add_option("--truth", ev_truth, "ground truth CSV");
  ev->add_option("--ref-rttm", ev_ref_rttm, "reference RTTM");
  ev->add_option("--hyp-rttm", ev_hyp_rttm, "hypothesis RTTM");
  ev->add_option("--mode", ev_mode, "line or timeline");
  ev->add_option("--collar", ev_collar, "collar in seconds (timeline mode)");

  SynthConfig synth_cfg;
  std::string synth_out;
  bool synth_perfect = false;
  auto *sy = app.add_subcommand("synth", "write a synthetic labeled program");
  sy->add_option("--n-speakers", synth_cfg.n_speakers);
  sy->add_option("--n-lines", synth_cfg.n_lines);
  sy->add_option("--dim", synth_cfg.embedding_dim);
  sy->add_option("--face-noise", synth_cfg.face_noise_std);
  sy->add_option("--timbre-noise", synth_cfg.timbre_noise_std);
  sy->add_option("--offscreen-rate", synth_cfg.offscreen_rate);
  sy->add_option("--unregistered", synth_cfg.unregistered_offscreen_speakers);
  sy->add_option("--scorer-accuracy", synth_cfg.turn_score_accuracy);
  sy->add_option("--seed", synth_cfg.rng_seed);
  sy->add_flag("--perfect-scorer", synth_perfect, "emit hard 0/1 scores from the truth");
  sy->add_option("-o,--out", synth_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  try {
    if (*run) {
      const PipelineConfig cfg = build_config(run_args);
      const ProgramInputs in = load_inputs(cfg);
      const DiarizationResult result = diarize(in, cfg);
      if (!cfg.output_dir.empty()) {
        write_outputs(cfg.output_dir, in.program, result, cfg);
      } else {
        write_annotation(in.program, result.assignments, std::cout);
      }
      write_summary(in.program, result, cfg, std::cerr);
    } else if (*sw) {
      const PipelineConfig cfg = build_config(sweep_args);
      const ProgramInputs in = load_inputs(cfg);
      const SweepParam param = sweep_param_from_string(sweep_param);
      const std::vector<double> grid = parse_grid(sweep_grid);
      const auto rows = sweep(in, cfg, param, grid);
      std::ostringstream os;
      write_sweep_csv(param, rows, os);
      if (sweep_out.empty()) std::cout << os.str();
      else write_text(sweep_out, os.str());
    } else if (*ev) {
      const ScoringMode mode = scoring_mode_from_string(ev_mode);
      LabeledTimeline ref, hyp;
      if (!ev_ref_rttm.empty() || !ev_hyp_rttm.empty()) {
        if (ev_ref_rttm.empty() || ev_hyp_rttm.empty()) {
          throw std::invalid_argument("--ref-rttm and --hyp-rttm go together");
        }
        std::ifstream rf(ev_ref_rttm), hf(ev_hyp_rttm);
        if (!rf || !hf) throw std::runtime_error("cannot open RTTM input");
        ref = timeline_from_rttm(parse_rttm(rf));
        hyp = timeline_from_rttm(parse_rttm(hf));
      } else {
        if (ev_subtitles.empty() || ev_annotation.empty() || ev_truth.empty()) {
          throw std::invalid_argument(
              "evaluate needs --subtitles, --annotation and --truth (or two RTTMs)");
        }
        const Program program = parse_srt_file(ev_subtitles);
        std::ifstream af(ev_annotation);
        if (!af) throw std::runtime_error("cannot open " + ev_annotation);
        const auto records = parse_annotation(af);
        if (records.size() != program.lines.size()) {
          throw std::invalid_argument("annotation covers " +
                                      std::to_string(records.size()) +
                                      " lines, subtitles have " +
                                      std::to_string(program.lines.size()));
        }
        DiarizationResult result;
        for (const auto &r : records) result.assignments.push_back(r.assignment);
        std::sort(result.assignments.begin(), result.assignments.end(),
                  [](const Assignment &a, const Assignment &b) {
                    return a.line_id < b.line_id;
                  });
        const GroundTruth gt = parse_ground_truth_file(ev_truth);
        PipelineConfig cfg;
        cfg.metrics_mode = mode;
        cfg.collar = ev_collar;
        const MetricReport report = evaluate(program, result, gt, mode, ev_collar);
        write_report_csv(report, cfg, std::cout);
        return 0;
      }
      const DerBreakdown b = der_breakdown(ref, hyp, mode, ev_collar);
      std::cout << "metric,value\n"
                << "der," << b.der() << '\n'
                << "jer," << jer(ref, hyp, mode) << '\n'
                << "spke," << b.spke() << '\n';
    } else if (*sy) {
      const SynthProgram sp = synth_program(synth_cfg);
      std::filesystem::create_directories(synth_out);
      const std::filesystem::path dir(synth_out);
      std::ostringstream srt, feats, turns, truth;
      write_srt(sp.program, srt);
      save_features(sp.features, feats);
      save_turn_scores(synth_perfect ? perfect_turn_scores(sp.speaker_of_line)
                                     : sp.turn_scores,
                       turns);
      write_ground_truth(sp.truth, truth);
      write_text((dir / (sp.program.program_id + ".srt")).string(), srt.str());
      write_text((dir / "features.jsonl").string(), feats.str());
      write_text((dir / "turn_scores.jsonl").string(), turns.str());
      write_text((dir / "truth.csv").string(), truth.str());
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
