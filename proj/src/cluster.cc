#include "cure/cluster.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cure/error.h"

namespace cure {

double EuclideanDistance(const std::vector<double> &a,
                         const std::vector<double> &b) {
  if (a.size() != b.size()) {
    throw ValidationError("distance: dimension mismatch");
  }
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Dendrogram Hac(const std::vector<std::vector<double>> &vectors) {
  const int n = static_cast<int>(vectors.size());
  if (n < 2) throw ValidationError("hac: need at least 2 vectors");
  for (const auto &v : vectors) {
    if (v.size() != vectors[0].size()) {
      throw ValidationError("hac: dimension mismatch");
    }
  }

  // Slot i holds active cluster ids[i]. link[i][j] is the sum of pairwise
  // member distances between slots i and j, so the average linkage is
  // link / (size_i * size_j).
  std::vector<int> ids(n), sizes(n, 1);
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<std::vector<double>> link(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      link[i][j] = link[j][i] = EuclideanDistance(vectors[i], vectors[j]);
    }
  }
  std::vector<bool> active(n, true);

  Dendrogram d;
  d.leaves = n;
  for (int step = 0; step < n - 1; ++step) {
    int best_i = -1, best_j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        const double dist =
            link[i][j] / (static_cast<double>(sizes[i]) * sizes[j]);
        const auto key = std::minmax(ids[i], ids[j]);
        const bool better =
            dist < best ||
            (dist == best && key < std::minmax(ids[best_i], ids[best_j]));
        if (better) {
          best = dist;
          best_i = i;
          best_j = j;
        }
      }
    }
    const auto [lo, hi] = std::minmax(ids[best_i], ids[best_j]);
    d.merges.push_back(Merge{lo, hi, best, sizes[best_i] + sizes[best_j]});

    // The merged cluster lives in slot best_i.
    for (int k = 0; k < n; ++k) {
      if (!active[k] || k == best_i || k == best_j) continue;
      link[best_i][k] = link[k][best_i] = link[best_i][k] + link[best_j][k];
    }
    sizes[best_i] += sizes[best_j];
    ids[best_i] = n + step;
    active[best_j] = false;
  }
  return d;
}

std::vector<Cluster> Cut(const Dendrogram &dendrogram,
                         const std::vector<std::vector<double>> &vectors,
                         int k) {
  const int n = dendrogram.leaves;
  if (static_cast<int>(vectors.size()) != n) {
    throw ValidationError("cut: vector count does not match the dendrogram");
  }
  if (k < 1 || k > n) {
    throw ValidationError("cut: k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(n) + "]");
  }
  std::vector<std::vector<int>> members(2 * n - 1);
  for (int i = 0; i < n; ++i) members[i] = {i};
  std::vector<bool> alive(2 * n - 1, false);
  std::fill(alive.begin(), alive.begin() + n, true);
  for (int step = 0; step < n - k; ++step) {
    const Merge &m = dendrogram.merges[step];
    auto &merged = members[n + step];
    merged = members[m.first];
    merged.insert(merged.end(), members[m.second].begin(),
                  members[m.second].end());
    std::sort(merged.begin(), merged.end());
    alive[m.first] = alive[m.second] = false;
    alive[n + step] = true;
  }

  std::vector<Cluster> clusters;
  for (int id = 0; id < 2 * n - 1; ++id) {
    if (!alive[id]) continue;
    Cluster c;
    c.members = members[id];
    c.centroid.assign(vectors[0].size(), 0.0);
    for (int m : c.members) {
      for (size_t i = 0; i < c.centroid.size(); ++i) {
        c.centroid[i] += vectors[m][i];
      }
    }
    for (double &v : c.centroid) v /= static_cast<double>(c.members.size());
    clusters.push_back(std::move(c));
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster &a, const Cluster &b) {
              if (a.members.size() != b.members.size()) {
                return a.members.size() > b.members.size();
              }
              return a.members.front() < b.members.front();
            });
  for (size_t i = 0; i < clusters.size(); ++i) {
    clusters[i].id = static_cast<int>(i);
  }
  return clusters;
}

int Assign(const std::vector<double> &v, const std::vector<Cluster> &clusters) {
  if (clusters.empty()) throw ValidationError("assign: no clusters");
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const Cluster &c : clusters) {
    const double d = EuclideanDistance(v, c.centroid);
    if (d < best_dist || (d == best_dist && c.id < best)) {
      best_dist = d;
      best = c.id;
    }
  }
  return best;
}

}  // namespace cure
