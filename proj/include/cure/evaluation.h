#ifndef CURE_EVALUATION_H_
#define CURE_EVALUATION_H_

#include <map>
#include <set>
#include <string>
#include <vector>

namespace cure {

// Item key -> block name. Two items are together when their names match.
using Partition = std::map<std::string, std::string>;

// Item key -> every gold relation that holds for it.
using GoldAssignment = std::map<std::string, std::set<std::string>>;

struct RelationScore {
  std::string relation;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

struct Prf1Result {
  std::vector<RelationScore> scores;  // sorted by relation name
  std::vector<std::string> warnings;
};

// Fraction of the n(n-1)/2 item pairs on which the partitions agree.
// Throws ValidationError if the item sets differ or n < 2.
double RandIndex(const Partition &predicted, const Partition &gold);

// Per-relation precision/recall/F1 for the relations that occur in the gold
// data. An item counts as correct for its predicted relation when that
// relation is among its gold relations. Predicted relations with no gold
// items are reported in `warnings` and left out.
Prf1Result Prf1(const Partition &predicted_relation, const GoldAssignment &gold);

// Harmonic mean, 0 when both are 0.
double F1Score(double precision, double recall);

}  // namespace cure

#endif  // CURE_EVALUATION_H_
