#include "cure/evaluation.h"

#include <map>

#include "cure/error.h"

namespace cure {

double RandIndex(const Partition &predicted, const Partition &gold) {
  if (predicted.size() != gold.size()) {
    throw ValidationError("rand index: partitions cover different items");
  }
  for (auto p = predicted.begin(), g = gold.begin(); p != predicted.end();
       ++p, ++g) {
    if (p->first != g->first) {
      throw ValidationError("rand index: item '" + p->first +
                            "' missing from the gold partition");
    }
  }
  const double n = static_cast<double>(predicted.size());
  if (n < 2) throw ValidationError("rand index: need at least 2 items");

  // Agreements = C(n,2) - (together in one, apart in the other), counted via
  // the contingency table: sum_ij C(n_ij,2) is together-in-both.
  std::map<std::pair<std::string, std::string>, double> cells;
  std::map<std::string, double> rows, cols;
  for (auto p = predicted.begin(), g = gold.begin(); p != predicted.end();
       ++p, ++g) {
    ++cells[{p->second, g->second}];
    ++rows[p->second];
    ++cols[g->second];
  }
  auto pairs = [](double k) { return k * (k - 1) / 2; };
  double both = 0, pred_together = 0, gold_together = 0;
  for (const auto &[key, count] : cells) both += pairs(count);
  for (const auto &[key, count] : rows) pred_together += pairs(count);
  for (const auto &[key, count] : cols) gold_together += pairs(count);
  const double total = pairs(n);
  const double apart_both = total - pred_together - gold_together + both;
  return (both + apart_both) / total;
}

double F1Score(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

Prf1Result Prf1(const Partition &predicted_relation,
                const GoldAssignment &gold) {
  std::map<std::string, int> gold_count, predicted_count, correct;
  for (const auto &[item, relations] : gold) {
    for (const std::string &r : relations) ++gold_count[r];
  }
  for (const auto &[item, relation] : predicted_relation) {
    auto it = gold.find(item);
    if (it == gold.end()) {
      throw ValidationError("prf1: item '" + item + "' has no gold entry");
    }
    ++predicted_count[relation];
    if (it->second.count(relation)) ++correct[relation];
  }

  Prf1Result result;
  for (const auto &[relation, count] : predicted_count) {
    if (!gold_count.count(relation)) {
      result.warnings.push_back("relation '" + relation +
                                "' has no gold items; excluded");
    }
  }
  for (const auto &[relation, in_gold] : gold_count) {
    RelationScore s;
    s.relation = relation;
    const int predicted = predicted_count[relation];
    const int hits = correct[relation];
    s.precision = predicted > 0 ? static_cast<double>(hits) / predicted : 0.0;
    s.recall = static_cast<double>(hits) / in_gold;
    s.f1 = F1Score(s.precision, s.recall);
    result.scores.push_back(s);
  }
  return result;
}

}  // namespace cure
