// subdiar/clustering.cpp

#include "subdiar/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include <Eigen/Eigenvalues>

namespace subdiar {

namespace {

void require_nonempty(std::span<const Embedding> embs) {
  if (embs.empty()) throw std::invalid_argument("cannot cluster an empty set");
  for (const Embedding &e : embs) {
    if (e.dim() != embs[0].dim()) {
      throw std::invalid_argument("embedding dimension mismatch in clustering");
    }
  }
}

Eigen::MatrixXd cosine_matrix(std::span<const Embedding> embs) {
  const Eigen::Index n = static_cast<Eigen::Index>(embs.size());
  Eigen::MatrixXd s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double c = cosine_similarity(embs[i], embs[j]);
      s(i, j) = c;
      s(j, i) = c;
    }
  }
  return s;
}

}  // namespace

ClusterLabels canonical_labels(std::span<const int> raw) {
  ClusterLabels out;
  out.labels.reserve(raw.size());
  std::unordered_map<int, int> remap;
  for (int r : raw) {
    auto [it, inserted] = remap.emplace(r, out.n + 1);
    if (inserted) ++out.n;
    out.labels.push_back(it->second);
  }
  return out;
}

Eigen::MatrixXd affinity_matrix(std::span<const Embedding> embs) {
  require_nonempty(embs);
  Eigen::MatrixXd a = cosine_matrix(embs);
  return a.cwiseMax(0.0);
}

ClusterLabels ahc(std::span<const Embedding> embs, double stop_threshold) {
  require_nonempty(embs);
  if (!(stop_threshold >= -1.0 && stop_threshold <= 1.0)) {
    throw std::invalid_argument("AHC stop threshold must lie in [-1, 1]");
  }
  const std::size_t n = embs.size();
  Eigen::MatrixXd sim = cosine_matrix(embs);
  std::vector<std::size_t> size(n, 1);
  std::vector<std::size_t> owner(n);
  for (std::size_t i = 0; i < n; ++i) owner[i] = i;
  std::vector<std::size_t> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = i;

  while (active.size() > 1) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    std::size_t bj = 0;
    for (std::size_t x = 0; x < active.size(); ++x) {
      const std::size_t i = active[x];
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const std::size_t j = active[y];
        if (sim(i, j) > best) {
          best = sim(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    if (best < stop_threshold) break;

    // slot bi absorbs bj; average-linkage (Lance-Williams) update
    const double wi = static_cast<double>(size[bi]);
    const double wj = static_cast<double>(size[bj]);
    for (std::size_t k : active) {
      if (k == bi || k == bj) continue;
      const double v = (wi * sim(bi, k) + wj * sim(bj, k)) / (wi + wj);
      sim(bi, k) = v;
      sim(k, bi) = v;
    }
    size[bi] += size[bj];
    for (std::size_t &o : owner) {
      if (o == bj) o = bi;
    }
    active.erase(std::find(active.begin(), active.end(), bj));
  }

  std::vector<int> raw(owner.begin(), owner.end());
  return canonical_labels(raw);
}

int estimate_k_eigengap(std::span<const double> eig, int k_max) {
  if (eig.size() < 2 || k_max <= 1) return 1;
  const std::size_t last =
      std::min(static_cast<std::size_t>(k_max), eig.size() - 1);
  int best_k = 1;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j <= last; ++j) {
    const double gap = eig[j] - eig[j - 1];
    if (gap > best_gap) {
      best_gap = gap;
      best_k = static_cast<int>(j);
    }
  }
  return best_k;
}

namespace {

std::size_t nearest_center(const Eigen::MatrixXd &points, Eigen::Index row,
                           const Eigen::MatrixXd &centers, double *dist2) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    const double d = (points.row(row) - centers.row(c)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(c);
    }
  }
  if (dist2) *dist2 = best_d;
  return best;
}

Eigen::MatrixXd kmeans_pp_init(const Eigen::MatrixXd &points, int k,
                               std::mt19937_64 &rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centers(k, points.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.row(0) = points.row(pick(rng));
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (points.row(i) - centers.row(c - 1)).squaredNorm());
      total += d2[i];
    }
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    centers.row(c) = points.row(chosen);
  }
  return centers;
}

}  // namespace

std::vector<int> kmeans(const Eigen::MatrixXd &points, int k,
                        const KMeansOptions &opts) {
  const Eigen::Index n = points.rows();
  if (n == 0) throw std::invalid_argument("k-means on an empty point set");
  if (k < 1 || k > n) {
    throw std::invalid_argument("k-means needs 1 <= k <= n, got k=" +
                                std::to_string(k));
  }
  std::mt19937_64 rng(opts.seed);
  std::vector<int> best_labels;
  double best_inertia = std::numeric_limits<double>::infinity();
  std::vector<int> labels(n);

  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    Eigen::MatrixXd centers = kmeans_pp_init(points, k, rng);
    for (int it = 0; it < opts.max_iterations; ++it) {
      for (Eigen::Index i = 0; i < n; ++i) {
        labels[i] = static_cast<int>(nearest_center(points, i, centers, nullptr));
      }
      Eigen::MatrixXd next = Eigen::MatrixXd::Zero(k, points.cols());
      std::vector<int> count(k, 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        next.row(labels[i]) += points.row(i);
        ++count[labels[i]];
      }
      double shift = 0.0;
      for (int c = 0; c < k; ++c) {
        if (count[c] == 0) {
          next.row(c) = centers.row(c);
        } else {
          next.row(c) /= static_cast<double>(count[c]);
        }
        shift = std::max(shift, (next.row(c) - centers.row(c)).norm());
      }
      centers = std::move(next);
      if (shift < opts.tolerance) break;
    }
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double d = 0.0;
      labels[i] = static_cast<int>(nearest_center(points, i, centers, &d));
      inertia += d;
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_labels = labels;
    }
  }
  return best_labels;
}

ClusterLabels spectral_cluster(std::span<const Embedding> embs,
                               const SpectralOptions &opts) {
  require_nonempty(embs);
  const Eigen::Index n = static_cast<Eigen::Index>(embs.size());
  if (opts.k && (*opts.k < 1 || *opts.k > n)) {
    throw std::invalid_argument("spectral clustering needs 1 <= k <= n");
  }
  if (opts.k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  if (n == 1) return ClusterLabels{{1}, 1};

  const Eigen::MatrixXd a = affinity_matrix(embs);
  const Eigen::VectorXd inv_sqrt_deg = a.rowwise().sum().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd lap = -(inv_sqrt_deg.asDiagonal() * a * inv_sqrt_deg.asDiagonal());
  lap.diagonal().array() += 1.0;
  lap = 0.5 * (lap + lap.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Laplacian eigendecomposition failed");
  }
  const Eigen::VectorXd &eig = solver.eigenvalues();
  const int k = opts.k ? *opts.k
                       : estimate_k_eigengap(
                             std::span<const double>(eig.data(), eig.size()),
                             opts.k_max);
  if (k == 1) return ClusterLabels{std::vector<int>(n, 1), 1};

  Eigen::MatrixXd u = solver.eigenvectors().leftCols(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double len = u.row(i).norm();
    if (len > 0.0) u.row(i) /= len;
  }
  const std::vector<int> raw = kmeans(u, k, opts.kmeans);
  return canonical_labels(raw);
}

}  // namespace subdiar
