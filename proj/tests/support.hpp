// Shared helpers for the test executables.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "subdiar/pipeline.hpp"
#include "subdiar/synth.hpp"

namespace subdiar::testing {

inline ProgramInputs inputs_from(const SynthProgram &sp, bool perfect_scorer) {
  ProgramInputs in;
  in.program = sp.program;
  in.features = sp.features;
  in.turn_scores = perfect_scorer ? perfect_turn_scores(sp.speaker_of_line)
                                  : sp.turn_scores;
  in.truth = sp.truth;
  return in;
}

inline std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string &name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("subdiar_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Random unit vector.
inline Embedding random_unit(std::mt19937_64 &rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(dim);
  for (double &x : v) x = g(rng);
  return unit_normalize(Embedding(std::move(v)));
}

/// True when a and b induce the same partition (labels may differ).
inline bool same_partition(const std::vector<int> &a, const std::vector<int> &b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    }
  }
  return true;
}

struct Bundles {
  std::vector<Embedding> points;
  std::vector<int> truth;  ///< bundle index per point
  int k = 0;
};

/// `k` bundles around mutually orthogonal centers; resampled until every
/// intra-bundle cosine is >= 0.95 and every inter-bundle cosine <= 0.05.
inline Bundles well_separated_bundles(std::mt19937_64 &rng, int k, int n_points,
                                      int dim = 16) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    // Gram-Schmidt on gaussian draws gives random orthonormal centers.
    std::vector<std::vector<double>> centers;
    while (static_cast<int>(centers.size()) < k) {
      std::vector<double> v(dim);
      for (double &x : v) x = g(rng);
      for (const auto &c : centers) {
        double d = 0.0;
        for (int i = 0; i < dim; ++i) d += v[i] * c[i];
        for (int i = 0; i < dim; ++i) v[i] -= d * c[i];
      }
      double len = 0.0;
      for (double x : v) len += x * x;
      len = std::sqrt(len);
      if (len < 1e-6) continue;
      for (double &x : v) x /= len;
      centers.push_back(std::move(v));
    }
    Bundles b;
    b.k = k;
    std::uniform_int_distribution<int> pick(0, k - 1);
    for (int p = 0; p < n_points; ++p) {
      // every bundle gets at least one point
      const int c = p < k ? p : pick(rng);
      std::vector<double> v = centers[c];
      for (double &x : v) x += 0.01 * g(rng);
      b.points.push_back(unit_normalize(Embedding(std::move(v))));
      b.truth.push_back(c);
    }
    std::vector<std::size_t> order(b.points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    Bundles shuffled;
    shuffled.k = k;
    for (std::size_t i : order) {
      shuffled.points.push_back(b.points[i]);
      shuffled.truth.push_back(b.truth[i]);
    }
    bool ok = true;
    for (std::size_t i = 0; i < shuffled.points.size() && ok; ++i) {
      for (std::size_t j = i + 1; j < shuffled.points.size() && ok; ++j) {
        const double c = cosine_similarity(shuffled.points[i], shuffled.points[j]);
        ok = shuffled.truth[i] == shuffled.truth[j] ? c >= 0.95 : c <= 0.05;
      }
    }
    if (ok) return shuffled;
  }
}

}  // namespace subdiar::testing

namespace subdiar::testing {

/// Exhaustive search over injective partial maps ref -> hyp. Zero-overlap
/// pairs count as unmapped. Among maximal totals, the lexicographically
/// first assignment wins, comparing rows in order with "unmapped" last.
inline std::vector<std::optional<std::size_t>> exhaustive_mapping(
    const std::vector<std::vector<double>> &w) {
  const std::size_t rows = w.size();
  const std::size_t cols = rows ? w[0].size() : 0;
  std::vector<std::optional<std::size_t>> best(rows), cur(rows);
  double best_total = -1.0;
  std::vector<char> used(cols, 0);
  auto key = [&](const std::vector<std::optional<std::size_t>> &m) {
    std::vector<std::size_t> k;
    for (const auto &x : m) k.push_back(x ? *x : cols);
    return k;
  };
  std::function<void(std::size_t, double)> rec = [&](std::size_t r, double total) {
    if (r == rows) {
      if (total > best_total || (total == best_total && key(cur) < key(best))) {
        best_total = total;
        best = cur;
      }
      return;
    }
    for (std::size_t h = 0; h < cols; ++h) {
      if (used[h] || !(w[r][h] > 0.0)) continue;
      used[h] = 1;
      cur[r] = h;
      rec(r + 1, total + w[r][h]);
      used[h] = 0;
    }
    cur[r].reset();
    rec(r + 1, total);
  };
  rec(0, 0.0);
  return best;
}

}  // namespace subdiar::testing
