#ifndef CURE_CLUSTER_H_
#define CURE_CLUSTER_H_

#include <vector>

namespace cure {

// One agglomeration step. Inputs are clusters 0..n-1; the cluster created by
// merge k gets id n + k. first < second always.
struct Merge {
  int first = 0;
  int second = 0;
  double distance = 0.0;
  int size = 0;  // members in the merged cluster
};

struct Dendrogram {
  int leaves = 0;
  std::vector<Merge> merges;  // leaves - 1 entries
};

struct Cluster {
  int id = 0;
  std::vector<int> members;  // input indices, ascending
  std::vector<double> centroid;
};

double EuclideanDistance(const std::vector<double> &a,
                         const std::vector<double> &b);

// Average-linkage agglomerative clustering under Euclidean distance. Each
// step merges the two active clusters with the smallest mean pairwise
// member distance; ties go to the lexicographically smallest (id, id) pair.
Dendrogram Hac(const std::vector<std::vector<double>> &vectors);

// Replays the first n - k merges. Clusters come back ordered by size
// (largest first), then by smallest member, and are numbered 0..k-1 in that
// order.
std::vector<Cluster> Cut(const Dendrogram &dendrogram,
                         const std::vector<std::vector<double>> &vectors,
                         int k);

// Id of the nearest centroid; ties go to the lowest id.
int Assign(const std::vector<double> &v, const std::vector<Cluster> &clusters);

}  // namespace cure

#endif  // CURE_CLUSTER_H_
