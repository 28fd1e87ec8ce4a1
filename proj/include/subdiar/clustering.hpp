// subdiar/clustering.hpp
//
// Unsupervised clustering of face and timbre embeddings.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "subdiar/core.hpp"

namespace subdiar {

/// labels[k] is the cluster (1..n) of the k-th input embedding. Clusters are
/// numbered in order of their first member, so labels have no gaps.
struct ClusterLabels {
  std::vector<int> labels;
  int n = 0;
};

/// A[i][j] = max(0, cos(e_i, e_j)), unit diagonal.
Eigen::MatrixXd affinity_matrix(std::span<const Embedding> embs);

/// Average-linkage agglomeration on cosine similarity. Merging stops once the
/// best inter-cluster similarity drops below `stop_threshold`; equal
/// similarities merge the pair with the smallest cluster indices first.
ClusterLabels ahc(std::span<const Embedding> embs, double stop_threshold);

/// k = argmax_j (lambda_{j+1} - lambda_j) for 1 <= j <= min(k_max, n - 1),
/// smallest j on ties. Returns 1 for fewer than two eigenvalues.
int estimate_k_eigengap(std::span<const double> eigenvalues_ascending, int k_max);

struct KMeansOptions {
  int restarts = 50;
  int max_iterations = 300;
  double tolerance = 1e-8;
  std::uint64_t seed = 0;
};

/// Lloyd's algorithm with k-means++ seeding; the restart with the lowest
/// inertia wins (earliest on ties). Returns 0-based labels, one per row.
std::vector<int> kmeans(const Eigen::MatrixXd &points, int k,
                        const KMeansOptions &opts);

struct SpectralOptions {
  std::optional<int> k;  ///< estimated by eigengap when absent
  int k_max = 50;
  KMeansOptions kmeans;
};

/// Symmetric-normalized Laplacian of the affinity matrix, row-normalized
/// spectral embedding from its first k eigenvectors, then k-means.
ClusterLabels spectral_cluster(std::span<const Embedding> embs,
                               const SpectralOptions &opts);

/// Renumbers arbitrary labels to 1..n by first appearance.
ClusterLabels canonical_labels(std::span<const int> raw);

}  // namespace subdiar
