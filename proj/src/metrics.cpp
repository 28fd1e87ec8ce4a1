// subdiar/metrics.cpp

#include "subdiar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace subdiar {

LabeledTimeline timeline_from_rttm(std::span<const RttmRecord> records) {
  LabeledTimeline t;
  for (const RttmRecord &r : records) {
    t.segments.push_back(Segment{r.onset_ms, r.onset_ms + r.duration_ms, r.speaker_label});
  }
  return t;
}

ScoringMode scoring_mode_from_string(const std::string &s) {
  if (s == "line") return ScoringMode::line;
  if (s == "timeline") return ScoringMode::timeline;
  throw std::invalid_argument("unknown scoring mode: " + s);
}

std::string_view to_string(ScoringMode m) {
  return m == ScoringMode::line ? "line" : "timeline";
}

namespace {

using Matrix = std::vector<std::vector<double>>;

// Maximum total weight of an injective row->column matching (Kuhn-Munkres
// with potentials on the square padding, minimizing max_w - w).
double max_matching_total(const Matrix &w) {
  const std::size_t rows = w.size();
  const std::size_t cols = rows ? w[0].size() : 0;
  if (rows == 0 || cols == 0) return 0.0;
  double max_w = 0.0;
  for (const auto &r : w) {
    for (double x : r) max_w = std::max(max_w, x);
  }
  const std::size_t n = std::max(rows, cols);
  auto cost = [&](std::size_t i, std::size_t j) {
    const double x = (i < rows && j < cols) ? w[i][j] : 0.0;
    return max_w - x;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = p[j] - 1;
    if (i < rows && j - 1 < cols) total += w[i][j - 1];
  }
  return total;
}

// Rows after `row` against the columns not yet taken.
Matrix residual(const Matrix &w, std::size_t row, const std::vector<char> &taken) {
  Matrix out;
  for (std::size_t i = row + 1; i < w.size(); ++i) {
    std::vector<double> r;
    for (std::size_t j = 0; j < taken.size(); ++j) {
      if (!taken[j]) r.push_back(w[i][j]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<std::optional<std::size_t>> optimal_mapping(
    const std::vector<std::vector<double>> &overlap) {
  const std::size_t rows = overlap.size();
  const std::size_t cols = rows ? overlap[0].size() : 0;
  std::vector<std::optional<std::size_t>> out(rows);
  if (rows == 0 || cols == 0) return out;
  for (const auto &r : overlap) {
    if (r.size() != cols) throw std::invalid_argument("ragged overlap matrix");
    for (double v : r) {
      if (!(v >= 0.0)) throw std::invalid_argument("negative overlap entry");
    }
  }
  const double best = max_matching_total(overlap);
  const double tol = 1e-9 * std::max(1.0, best);

  // Fix rows in order, each to the smallest column that still allows an
  // optimal completion. This picks the lexicographically first optimum.
  std::vector<char> taken(cols, 0);
  double fixed = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    bool placed = false;
    for (std::size_t h = 0; h < cols && !placed; ++h) {
      if (taken[h] || !(overlap[r][h] > 0.0)) continue;
      taken[h] = 1;
      const double rest = max_matching_total(residual(overlap, r, taken));
      if (fixed + overlap[r][h] + rest >= best - tol) {
        out[r] = h;
        fixed += overlap[r][h];
        placed = true;
      } else {
        taken[h] = 0;
      }
    }
  }
  return out;
}

namespace {

struct Interval {
  double seconds = 0.0;
  std::vector<std::size_t> ref;
  std::vector<std::size_t> hyp;
};

struct Tally {
  std::vector<std::vector<double>> overlap;  // seconds
  std::vector<double> ref_time;
  std::vector<double> hyp_time;
  std::vector<Interval> intervals;  // scored units
};

std::map<std::string, std::size_t> index_labels(const LabeledTimeline &t) {
  std::map<std::string, std::size_t> idx;
  for (const Segment &s : t.segments) {
    if (s.end_ms <= s.start_ms) {
      throw std::invalid_argument("segment with non-positive duration");
    }
    idx.emplace(s.label, 0);
  }
  std::size_t k = 0;
  for (auto &[label, i] : idx) i = k++;
  return idx;
}

Tally tally_lines(const LabeledTimeline &ref, const LabeledTimeline &hyp,
                  std::size_t n_ref, std::size_t n_hyp,
                  const std::map<std::string, std::size_t> &ri,
                  const std::map<std::string, std::size_t> &hi) {
  if (ref.segments.size() != hyp.segments.size()) {
    throw std::invalid_argument("line mode needs identical segmentation");
  }
  Tally t;
  t.overlap.assign(n_ref, std::vector<double>(n_hyp, 0.0));
  t.ref_time.assign(n_ref, 0.0);
  t.hyp_time.assign(n_hyp, 0.0);
  for (std::size_t k = 0; k < ref.segments.size(); ++k) {
    const Segment &r = ref.segments[k];
    const Segment &h = hyp.segments[k];
    if (r.start_ms != h.start_ms || r.end_ms != h.end_ms) {
      throw std::invalid_argument("line mode boundary mismatch at segment " +
                                  std::to_string(k));
    }
    Interval in;
    in.seconds = static_cast<double>(r.end_ms - r.start_ms) / 1000.0;
    in.ref = {ri.at(r.label)};
    in.hyp = {hi.at(h.label)};
    t.overlap[in.ref[0]][in.hyp[0]] += in.seconds;
    t.ref_time[in.ref[0]] += in.seconds;
    t.hyp_time[in.hyp[0]] += in.seconds;
    t.intervals.push_back(std::move(in));
  }
  return t;
}

Tally tally_timeline(const LabeledTimeline &ref, const LabeledTimeline &hyp,
                     std::size_t n_ref, std::size_t n_hyp,
                     const std::map<std::string, std::size_t> &ri,
                     const std::map<std::string, std::size_t> &hi,
                     std::int64_t collar_ms) {
  std::vector<std::pair<std::int64_t, std::int64_t>> excluded;
  std::vector<std::int64_t> cuts;
  for (const Segment &s : ref.segments) {
    cuts.push_back(s.start_ms);
    cuts.push_back(s.end_ms);
    if (collar_ms > 0) {
      for (std::int64_t b : {s.start_ms, s.end_ms}) {
        excluded.emplace_back(b - collar_ms, b + collar_ms);
        cuts.push_back(b - collar_ms);
        cuts.push_back(b + collar_ms);
      }
    }
  }
  for (const Segment &s : hyp.segments) {
    cuts.push_back(s.start_ms);
    cuts.push_back(s.end_ms);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Tally t;
  t.overlap.assign(n_ref, std::vector<double>(n_hyp, 0.0));
  t.ref_time.assign(n_ref, 0.0);
  t.hyp_time.assign(n_hyp, 0.0);
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const std::int64_t a = cuts[c];
    const std::int64_t b = cuts[c + 1];
    const bool skip = std::any_of(excluded.begin(), excluded.end(), [&](auto &z) {
      return a >= z.first && b <= z.second;
    });
    if (skip) continue;
    Interval in;
    in.seconds = static_cast<double>(b - a) / 1000.0;
    for (const Segment &s : ref.segments) {
      if (s.start_ms <= a && s.end_ms >= b) in.ref.push_back(ri.at(s.label));
    }
    for (const Segment &s : hyp.segments) {
      if (s.start_ms <= a && s.end_ms >= b) in.hyp.push_back(hi.at(s.label));
    }
    for (auto *v : {&in.ref, &in.hyp}) {
      std::sort(v->begin(), v->end());
      v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    if (in.ref.empty() && in.hyp.empty()) continue;
    for (std::size_t r : in.ref) {
      t.ref_time[r] += in.seconds;
      for (std::size_t h : in.hyp) t.overlap[r][h] += in.seconds;
    }
    for (std::size_t h : in.hyp) t.hyp_time[h] += in.seconds;
    t.intervals.push_back(std::move(in));
  }
  return t;
}

Tally tally(const LabeledTimeline &ref, const LabeledTimeline &hyp,
            ScoringMode mode, std::int64_t collar_ms) {
  const auto ri = index_labels(ref);
  const auto hi = index_labels(hyp);
  if (ref.segments.empty()) throw std::invalid_argument("empty reference");
  if (mode == ScoringMode::line) {
    return tally_lines(ref, hyp, ri.size(), hi.size(), ri, hi);
  }
  return tally_timeline(ref, hyp, ri.size(), hi.size(), ri, hi, collar_ms);
}

}  // namespace

DerBreakdown der_breakdown(const LabeledTimeline &ref, const LabeledTimeline &hyp,
                           ScoringMode mode, double collar_seconds) {
  if (!(collar_seconds >= 0.0)) throw std::invalid_argument("collar must be >= 0");
  const std::int64_t collar_ms = std::llround(collar_seconds * 1000.0);
  const Tally t = tally(ref, hyp, mode, mode == ScoringMode::line ? 0 : collar_ms);
  const auto mapping = optimal_mapping(t.overlap);

  DerBreakdown out;
  for (const Interval &in : t.intervals) {
    const double nr = static_cast<double>(in.ref.size());
    const double nh = static_cast<double>(in.hyp.size());
    double correct = 0.0;
    for (std::size_t r : in.ref) {
      if (mapping[r] && std::binary_search(in.hyp.begin(), in.hyp.end(), *mapping[r])) {
        correct += 1.0;
      }
    }
    out.total += in.seconds * nr;
    out.missed += in.seconds * std::max(0.0, nr - nh);
    out.false_alarm += in.seconds * std::max(0.0, nh - nr);
    out.confusion += in.seconds * (std::min(nr, nh) - correct);
  }
  if (!(out.total > 0.0)) throw std::invalid_argument("no scored reference speech");
  return out;
}

double der(const LabeledTimeline &ref, const LabeledTimeline &hyp, ScoringMode mode,
           double collar_seconds) {
  return der_breakdown(ref, hyp, mode, collar_seconds).der();
}

double spke(const LabeledTimeline &ref, const LabeledTimeline &hyp, ScoringMode mode,
            double collar_seconds) {
  return der_breakdown(ref, hyp, mode, collar_seconds).spke();
}

double jer(const LabeledTimeline &ref, const LabeledTimeline &hyp, ScoringMode mode) {
  const Tally t = tally(ref, hyp, mode, 0);
  const auto mapping = optimal_mapping(t.overlap);
  double sum = 0.0;
  for (std::size_t r = 0; r < t.ref_time.size(); ++r) {
    if (!mapping[r]) {
      sum += 1.0;
      continue;
    }
    const std::size_t h = *mapping[r];
    const double inter = t.overlap[r][h];
    const double uni = t.ref_time[r] + t.hyp_time[h] - inter;
    sum += 1.0 - inter / uni;
  }
  return sum / static_cast<double>(t.ref_time.size());
}

TurnMetrics turn_metrics(std::span<const std::pair<double, bool>> decisions) {
  if (decisions.empty()) throw std::invalid_argument("no turn decisions to score");
  TurnMetrics out;
  std::size_t tp = 0, fp = 0, fn = 0, pos = 0;
  for (const auto &[score, same] : decisions) {
    const bool predicted = score >= 0.5;
    if (same) ++pos;
    if (predicted && same) ++tp;
    if (predicted && !same) ++fp;
    if (!predicted && same) ++fn;
  }
  const std::size_t denom = 2 * tp + fp + fn;
  out.f1 = denom ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : 0.0;

  const std::size_t neg = decisions.size() - pos;
  if (pos == 0 || neg == 0) return out;
  std::vector<std::size_t> order(decisions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return decisions[a].first < decisions[b].first;
  });
  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && decisions[order[j]].first == decisions[order[i]].first) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (decisions[order[k]].second) pos_rank_sum += midrank;
    }
    i = j;
  }
  const double p = static_cast<double>(pos);
  const double q = static_cast<double>(neg);
  out.auc = (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * q);
  return out;
}

}  // namespace subdiar
