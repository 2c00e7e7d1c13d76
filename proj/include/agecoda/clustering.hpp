#pragma once

// Ward hierarchical agglomerative clustering over a precomputed distance
// matrix, tree cutting, and cluster centroid pyramids.
//
// The linkage squares the input distances, runs the Lance-Williams
// recurrence with Ward coefficients,
//   d2(i+j, q) = ((n_i+n_q) d2(i,q) + (n_j+n_q) d2(j,q) - n_q d2(i,j))
//                / (n_i+n_j+n_q),
// and reports the square root of the merge dissimilarity as the height.
// With Euclidean input (the Aitchison distance is Euclidean in clr space)
// the merge heights equal sqrt(2 * increase in within-cluster sum of squared
// deviations), so merges are chosen by Ward's criterion and heights are
// monotone non-decreasing.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "agecoda/coda.hpp"
#include "agecoda/errors.hpp"

namespace agecoda::cluster {

/// Symmetric pairwise distances with a zero diagonal, labeled by entity id.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::vector<int> labels)
      : labels_(std::move(labels)), values_(labels_.size() * labels_.size(), 0.0) {}

  std::size_t size() const { return labels_.size(); }
  const std::vector<int>& labels() const { return labels_; }

  double at(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }

  /// Sets both (i,j) and (j,i); the diagonal stays zero.
  void set(std::size_t i, std::size_t j, double value) {
    if (i == j) return;
    values_[i * size() + j] = value;
    values_[j * size() + i] = value;
  }

 private:
  std::vector<int> labels_;
  std::vector<double> values_;
};

using LabeledComposition = std::pair<int, Composition>;

/// Aitchison distances between every pair. Computed once per pair and
/// mirrored, so the matrix is symmetric by construction.
inline DistanceMatrix pairwise_distance_matrix(std::span<const LabeledComposition> items) {
  if (items.empty()) throw EmptyVector("no compositions given");
  std::vector<int> labels;
  labels.reserve(items.size());
  for (const auto& [id, comp] : items) {
    if (comp.dimension() != items.front().second.dimension()) {
      throw DimensionMismatch("composition for entity " + std::to_string(id) +
                              " has dimension " + std::to_string(comp.dimension()) +
                              ", expected " + std::to_string(items.front().second.dimension()));
    }
    labels.push_back(id);
  }
  DistanceMatrix matrix(std::move(labels));
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      matrix.set(i, j, aitchison_distance(items[i].second, items[j].second));
    }
  }
  return matrix;
}

/// One agglomerative merge. Cluster ids follow the usual convention: leaves
/// are 0..N-1 in matrix order, merge m creates cluster N+m. left < right.
struct Merge {
  int left = 0;
  int right = 0;
  double height = 0.0;
  int size = 0;  // leaves in the merged cluster
};

struct Dendrogram {
  std::vector<int> leaf_labels;  // entity ids in matrix order
  std::vector<Merge> merges;     // exactly N-1 entries
};

/// Ward linkage from a distance matrix. Ties are broken by the smallest
/// (left, right) pair of current cluster ids, compared lexicographically.
inline Dendrogram ward_linkage(const DistanceMatrix& matrix) {
  const std::size_t n = matrix.size();
  if (n < 2) {
    throw DegenerateMatrix("linkage needs at least 2 points, got " + std::to_string(n));
  }

  // working copy of squared distances between active slots
  std::vector<double> d2(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = matrix.at(i, j);
      d2[i * n + j] = d * d;
    }
  }
  std::vector<int> id(n);
  std::vector<double> size(n, 1.0);
  std::vector<bool> alive(n, true);
  for (std::size_t i = 0; i < n; ++i) id[i] = static_cast<int>(i);

  Dendrogram dendrogram;
  dendrogram.leaf_labels = matrix.labels();
  dendrogram.merges.reserve(n - 1);

  for (std::size_t m = 0; m + 1 < n; ++m) {
    std::size_t best_i = 0, best_j = 0;
    double best = -1.0;
    int best_lo = 0, best_hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!alive[j]) continue;
        const double v = d2[i * n + j];
        const int lo = std::min(id[i], id[j]);
        const int hi = std::max(id[i], id[j]);
        const bool better =
            best < 0.0 || v < best ||
            (v == best && (lo < best_lo || (lo == best_lo && hi < best_hi)));
        if (better) {
          best = v;
          best_i = i;
          best_j = j;
          best_lo = lo;
          best_hi = hi;
        }
      }
    }

    const double ni = size[best_i];
    const double nj = size[best_j];
    const double dij = d2[best_i * n + best_j];
    for (std::size_t q = 0; q < n; ++q) {
      if (!alive[q] || q == best_i || q == best_j) continue;
      const double nq = size[q];
      const double updated = ((ni + nq) * d2[best_i * n + q] + (nj + nq) * d2[best_j * n + q] -
                              nq * dij) /
                             (ni + nj + nq);
      d2[best_i * n + q] = updated;
      d2[q * n + best_i] = updated;
    }

    dendrogram.merges.push_back(
        {best_lo, best_hi, std::sqrt(dij), static_cast<int>(ni + nj)});
    size[best_i] = ni + nj;
    id[best_i] = static_cast<int>(n + m);
    alive[best_j] = false;
  }
  return dendrogram;
}

/// Leaf groups after removing the k-1 highest merges, i.e. after applying
/// only the first N-k merges. Groups hold entity ids; they are ordered by
/// their first leaf's position in the matrix, members in matrix order.
inline std::vector<std::vector<int>> cut_tree_components(const Dendrogram& dendrogram,
                                                         std::size_t k) {
  const std::size_t n = dendrogram.leaf_labels.size();
  if (k < 1 || k > n) {
    throw InvalidK("k must be between 1 and " + std::to_string(n) + ", got " +
                   std::to_string(k));
  }
  // union-find over cluster ids 0..2N-2
  std::vector<int> parent(2 * n - 1);
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&parent](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t m = 0; m + k < n; ++m) {
    const Merge& merge = dendrogram.merges[m];
    const int root = static_cast<int>(n + m);
    parent[find(merge.left)] = root;
    parent[find(merge.right)] = root;
  }

  std::map<int, std::vector<int>> groups;  // root -> leaf positions
  std::vector<int> order;
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    const int root = find(static_cast<int>(leaf));
    auto [it, inserted] = groups.try_emplace(root);
    if (inserted) order.push_back(root);
    it->second.push_back(static_cast<int>(leaf));
  }

  std::vector<std::vector<int>> components;
  components.reserve(order.size());
  // order roots by their first leaf position
  std::sort(order.begin(), order.end(), [&groups](int a, int b) {
    return groups[a].front() < groups[b].front();
  });
  for (int root : order) {
    std::vector<int> members;
    members.reserve(groups[root].size());
    for (int leaf : groups[root]) members.push_back(dendrogram.leaf_labels[leaf]);
    components.push_back(std::move(members));
  }
  return components;
}

enum class CentroidMode { Arithmetic, Geometric };

/// Center of a group of compositions, closed to k = 100. Arithmetic: per-bin
/// mean of percent shares. Geometric: clr_inverse of the mean clr vector
/// (the compositional center).
inline Composition centroid(std::span<const Composition> members, CentroidMode mode) {
  if (members.empty()) throw EmptyCluster("cannot take the centroid of an empty cluster");
  const std::size_t dim = members.front().dimension();
  std::vector<double> acc(dim, 0.0);
  if (mode == CentroidMode::Arithmetic) {
    for (const Composition& c : members) {
      const Composition shares = c.reclosed(100.0);
      for (std::size_t d = 0; d < dim; ++d) acc[d] += shares[d];
    }
    for (double& v : acc) v /= static_cast<double>(members.size());
    return closure(acc, 100.0);
  }
  for (const Composition& c : members) {
    const ClrVector z = clr(c);
    for (std::size_t d = 0; d < dim; ++d) acc[d] += z[d];
  }
  for (double& v : acc) v /= static_cast<double>(members.size());
  return clr_inverse(ClrVector(std::move(acc)), 100.0);
}

/// Entity id -> cluster label 1..k. Labels are ordered so that Cluster 1 has
/// the centroid with the largest first part (the youngest age structure for
/// pyramids, where part 0 is the 0-4 bin).
struct ClusterAssignment {
  std::map<int, int> cluster_of;
  std::size_t k = 0;
};

namespace detail {

inline const Composition& composition_for(std::span<const LabeledComposition> items, int id) {
  for (const auto& [label, comp] : items) {
    if (label == id) return comp;
  }
  throw Error("no composition for entity " + std::to_string(id));
}

}  // namespace detail

/// Cuts the dendrogram into k clusters and relabels them by descending first
/// part of the centroid (mode-consistent with the centroids that will be
/// reported), so label 1 is the youngest-structure cluster.
inline ClusterAssignment cut_tree(const Dendrogram& dendrogram, std::size_t k,
                                  std::span<const LabeledComposition> items,
                                  CentroidMode mode = CentroidMode::Geometric) {
  const auto components = cut_tree_components(dendrogram, k);

  struct Keyed {
    std::size_t component;
    double first_part;
    int smallest_id;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(components.size());
  for (std::size_t c = 0; c < components.size(); ++c) {
    std::vector<Composition> members;
    members.reserve(components[c].size());
    int smallest_id = components[c].front();
    for (int id : components[c]) {
      members.push_back(detail::composition_for(items, id));
      smallest_id = std::min(smallest_id, id);
    }
    keyed.push_back({c, centroid(members, mode)[0], smallest_id});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.first_part != b.first_part) return a.first_part > b.first_part;
    return a.smallest_id < b.smallest_id;
  });

  ClusterAssignment assignment;
  assignment.k = k;
  for (std::size_t rank = 0; rank < keyed.size(); ++rank) {
    for (int id : components[keyed[rank].component]) {
      assignment.cluster_of[id] = static_cast<int>(rank) + 1;
    }
  }
  return assignment;
}

/// Centroid compositions for clusters 1..k, in label order.
inline std::vector<Composition> cluster_centroids(const ClusterAssignment& assignment,
                                                  std::span<const LabeledComposition> items,
                                                  CentroidMode mode) {
  std::vector<Composition> centroids;
  centroids.reserve(assignment.k);
  for (std::size_t label = 1; label <= assignment.k; ++label) {
    std::vector<Composition> members;
    for (const auto& [id, cluster] : assignment.cluster_of) {
      if (cluster == static_cast<int>(label)) {
        members.push_back(detail::composition_for(items, id));
      }
    }
    if (members.empty()) {
      throw EmptyCluster("cluster " + std::to_string(label) + " has no members");
    }
    centroids.push_back(centroid(members, mode));
  }
  return centroids;
}

}  // namespace agecoda::cluster
