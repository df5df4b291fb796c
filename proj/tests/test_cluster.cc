#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "cure/cluster.h"
#include "cure/error.h"
#include "doctest.h"
#include "support.h"

using namespace cure;

namespace {

using Points = std::vector<std::vector<double>>;

Points RandomPoints(std::mt19937_64 &rng, int n, int dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Points p(n, std::vector<double>(dim));
  for (auto &v : p) {
    for (double &x : v) x = u(rng);
  }
  return p;
}

void CheckSameMerges(const Dendrogram &got, const Dendrogram &want) {
  REQUIRE(got.leaves == want.leaves);
  REQUIRE(got.merges.size() == want.merges.size());
  for (size_t s = 0; s < want.merges.size(); ++s) {
    CHECK(got.merges[s].first == want.merges[s].first);
    CHECK(got.merges[s].second == want.merges[s].second);
    CHECK(got.merges[s].size == want.merges[s].size);
    CHECK(got.merges[s].distance ==
          doctest::Approx(want.merges[s].distance).epsilon(1e-12));
  }
}

// Groups after applying the first n-k merges, by union of member lists.
std::set<std::vector<int>> GroupsAfter(const Dendrogram &d, int k) {
  std::map<int, std::vector<int>> active;
  for (int i = 0; i < d.leaves; ++i) active[i] = {i};
  for (int s = 0; s < d.leaves - k; ++s) {
    std::vector<int> merged = active[d.merges[s].first];
    const auto &other = active[d.merges[s].second];
    merged.insert(merged.end(), other.begin(), other.end());
    std::sort(merged.begin(), merged.end());
    active.erase(d.merges[s].first);
    active.erase(d.merges[s].second);
    active[d.leaves + s] = merged;
  }
  std::set<std::vector<int>> out;
  for (const auto &[id, members] : active) out.insert(members);
  return out;
}

}  // namespace

TEST_CASE("three collinear points") {
  const Points p = {{0.0}, {1.0}, {10.0}};
  const Dendrogram d = Hac(p);
  REQUIRE(d.merges.size() == 2);
  CHECK(d.merges[0].first == 0);
  CHECK(d.merges[0].second == 1);
  CHECK(d.merges[0].distance == doctest::Approx(1.0));
  CHECK(d.merges[1].first == 2);
  CHECK(d.merges[1].second == 3);
  CHECK(d.merges[1].distance == doctest::Approx(9.5));  // mean of 10 and 9
  CHECK(d.merges[1].size == 3);
}

TEST_CASE("equal distances merge the lexicographically smallest pair") {
  const Points p = {{0.0}, {1.0}, {2.0}, {3.0}};
  const Dendrogram d = Hac(p);
  CHECK(d.merges[0].first == 0);
  CHECK(d.merges[0].second == 1);
  CHECK(d.merges[1].first == 2);
  CHECK(d.merges[1].second == 3);
}

TEST_CASE("duplicated points merge first at distance zero") {
  std::mt19937_64 rng(2);
  Points p = RandomPoints(rng, 4, 3);
  const Points copy = p;
  p.insert(p.end(), copy.begin(), copy.end());
  const Dendrogram d = Hac(p);
  for (int s = 0; s < 4; ++s) CHECK(d.merges[s].distance == 0.0);
  CHECK(d.merges[4].distance > 0.0);
}

TEST_CASE("merge order equals brute-force agglomeration") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const int dim = 1 + static_cast<int>(rng() % 4);
    const Points p = RandomPoints(rng, n, dim);
    CheckSameMerges(Hac(p), testing::BruteForceHac(p));
  }
}

TEST_CASE("hac input checks") {
  CHECK_THROWS_AS(Hac({{1.0}}), ValidationError);
  CHECK_THROWS_AS(Hac({{1.0}, {1.0, 2.0}}), ValidationError);
}

TEST_CASE("cut") {
  std::mt19937_64 rng(5);
  const Points p = RandomPoints(rng, 8, 2);
  const Dendrogram d = Hac(p);

  SUBCASE("k = n gives singletons") {
    const auto clusters = Cut(d, p, 8);
    REQUIRE(clusters.size() == 8);
    for (int c = 0; c < 8; ++c) {
      CHECK(clusters[c].id == c);
      REQUIRE(clusters[c].members.size() == 1);
      CHECK(clusters[c].members[0] == c);  // equal sizes: by smallest member
      CHECK(clusters[c].centroid == p[c]);
    }
  }
  SUBCASE("k = 1 gives the global mean") {
    const auto clusters = Cut(d, p, 1);
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0].members.size() == 8);
    for (int k = 0; k < 2; ++k) {
      double mean = 0.0;
      for (const auto &v : p) mean += v[k] / 8.0;
      CHECK(clusters[0].centroid[k] == doctest::Approx(mean).epsilon(1e-12));
    }
  }
  SUBCASE("every k matches replayed merges") {
    for (int k = 1; k <= 8; ++k) {
      const auto clusters = Cut(d, p, k);
      REQUIRE(static_cast<int>(clusters.size()) == k);
      std::set<std::vector<int>> got;
      for (size_t c = 0; c < clusters.size(); ++c) {
        got.insert(clusters[c].members);
        CHECK(clusters[c].id == static_cast<int>(c));
        if (c > 0) {
          const auto &prev = clusters[c - 1].members;
          const auto &cur = clusters[c].members;
          CHECK((prev.size() > cur.size() ||
                 (prev.size() == cur.size() && prev[0] < cur[0])));
        }
      }
      CHECK(got == GroupsAfter(d, k));
    }
  }
  SUBCASE("k out of range") {
    CHECK_THROWS_AS(Cut(d, p, 0), ValidationError);
    CHECK_THROWS_AS(Cut(d, p, 9), ValidationError);
  }
}

TEST_CASE("assign") {
  std::vector<Cluster> clusters = {{0, {0}, {0.0, 0.0}},
                                   {1, {1}, {2.0, 0.0}},
                                   {2, {2}, {0.0, 5.0}}};
  CHECK(Assign({2.0, 0.0}, clusters) == 1);
  CHECK(Assign({1.0, 0.0}, clusters) == 0);  // equidistant from 0 and 1
  CHECK_THROWS_AS(Assign({1.0, 0.0}, {}), ValidationError);

  std::mt19937_64 rng(13);
  std::vector<Cluster> random;
  for (int c = 0; c < 5; ++c) random.push_back({c, {c}, RandomPoints(rng, 1, 3)[0]});
  for (int q = 0; q < 100; ++q) {
    const auto v = RandomPoints(rng, 1, 3)[0];
    int best = 0;
    double best_d = INFINITY;
    for (const Cluster &c : random) {
      double sq = 0.0;
      for (int k = 0; k < 3; ++k) sq += (v[k] - c.centroid[k]) * (v[k] - c.centroid[k]);
      if (sq < best_d) {
        best_d = sq;
        best = c.id;
      }
    }
    CHECK(Assign(v, random) == best);
  }
}
