#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taxlogic/prediction.hpp"

namespace taxlogic::eval {

/// Penalty model: 20% of substantial understatements (beyond the larger of
/// $5,000 and 10% of the true liability), full overstatements, and a flat
/// $270 per refusal.
struct CostModelParams {
  double understatement_rate = 0.2;
  double substantial_floor = 5000.0;
  double substantial_fraction = 0.1;
  double refusal_cost = 270.0;
};

enum class CaseStatus { Correct, Incorrect, Abstain };

struct CaseOutcome {
  std::string case_id;
  double gold = 0.0;        // y_i
  Prediction predicted;     // carries ŷ_i or the abstention reason
  double delta = 0.0;       // y_i − ŷ_i, meaningful when answered
  CaseStatus status = CaseStatus::Abstain;
  double cost = 0.0;
};

/// Nearest-dollar exact match; halves round away from zero.
bool exact_match(double predicted, double gold);

/// The piecewise per-case cost, evaluated on unrounded values:
/// overstatement pays itself back; substantial understatement pays 20% of the
/// shortfall; refusal pays the flat filing cost; anything else is free.
double case_cost(double gold, const Prediction& predicted, const CostModelParams& params);

CaseOutcome score_case(const std::string& case_id, double gold, const Prediction& predicted,
                       const CostModelParams& params);

struct Tally {
  int correct = 0;
  int incorrect = 0;
  int abstain = 0;
  int n() const { return correct + incorrect + abstain; }
};

Tally tally(const std::vector<CaseOutcome>& outcomes);

/// Mean per-case cost: the minimum sustainable per-filing price.
double break_even_price(const std::vector<CaseOutcome>& outcomes);

struct ConfidenceInterval {
  double low = 0.0;
  double high = 0.0;
};

/// Percentile bootstrap over per-case costs: resample N cases with
/// replacement, take the mean, and report the (1±level)/2 quantiles.
/// Deterministic for a fixed seed.
ConfidenceInterval bootstrap_ci(const std::vector<double>& costs, double level = 0.90,
                                int resamples = 10000, uint64_t seed = 17);

struct CostReport {
  std::string model;
  std::string method;
  Tally tallies;
  double break_even = 0.0;
  ConfidenceInterval ci90;
  std::vector<CaseOutcome> per_case;
};

CostReport make_report(const std::string& model, const std::string& method,
                       std::vector<CaseOutcome> outcomes, int resamples = 10000,
                       uint64_t seed = 17);

/// Pairwise self-consistency grid over methods covering identical case sets.
/// successes[i][j]: cases where methods i and j agree on the correct rounded
/// answer; failures[i][j]: cases where they agree on a wrong one. Diagonal
/// cells pair a method with itself.
struct OverlapMatrix {
  std::vector<std::string> methods;
  std::vector<std::vector<int>> successes;
  std::vector<std::vector<int>> failures;
};

OverlapMatrix overlap_matrix(
    const std::vector<std::pair<std::string, std::map<std::string, Prediction>>>& methods,
    const std::map<std::string, double>& golds);

/// Pearson correlation of (word count, failure count); nullopt when either
/// variable has zero variance or fewer than 3 points are given.
std::optional<double> length_failure_correlation(
    const std::vector<std::pair<uint64_t, int>>& points);

struct HardestCases {
  std::vector<std::pair<std::string, int>> most_failed;   // count desc, id asc
  std::vector<std::pair<std::string, int>> least_failed;  // count asc, id asc
};

HardestCases hardest_cases(const std::map<std::string, int>& failure_counts, size_t k);

/// Natural-order comparison (digit runs compare numerically); shared with the
/// corpus loader's case ordering.
bool natural_id_less(const std::string& a, const std::string& b);

}  // namespace taxlogic::eval
