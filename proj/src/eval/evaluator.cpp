#include "taxlogic/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace taxlogic {

const char* abstain_reason_name(AbstainReason reason) {
  switch (reason) {
    case AbstainReason::NoProgram: return "no_program";
    case AbstainReason::EngineError: return "engine_error";
    case AbstainReason::Timeout: return "timeout";
    case AbstainReason::NoMarker: return "no_marker";
    case AbstainReason::NoConsensus: return "no_consensus";
    case AbstainReason::TransportFailure: return "transport_failure";
  }
  return "?";
}

std::optional<AbstainReason> parse_abstain_reason(const std::string& name) {
  for (AbstainReason r : {AbstainReason::NoProgram, AbstainReason::EngineError,
                          AbstainReason::Timeout, AbstainReason::NoMarker,
                          AbstainReason::NoConsensus, AbstainReason::TransportFailure}) {
    if (name == abstain_reason_name(r)) return r;
  }
  return std::nullopt;
}

}  // namespace taxlogic

namespace taxlogic::eval {

namespace {

int64_t round_half_away(double v) { return std::llround(v); }

}  // namespace

bool exact_match(double predicted, double gold) {
  return round_half_away(predicted) == round_half_away(gold);
}

double case_cost(double gold, const Prediction& predicted, const CostModelParams& params) {
  if (!predicted.answered) return params.refusal_cost;
  double delta = gold - predicted.value;  // positive = understatement
  if (delta < 0) return -delta;
  if (delta > std::max(params.substantial_floor, params.substantial_fraction * gold)) {
    return params.understatement_rate * delta;
  }
  return 0.0;
}

CaseOutcome score_case(const std::string& case_id, double gold, const Prediction& predicted,
                       const CostModelParams& params) {
  CaseOutcome out;
  out.case_id = case_id;
  out.gold = gold;
  out.predicted = predicted;
  if (predicted.answered) {
    out.delta = gold - predicted.value;
    out.status = exact_match(predicted.value, gold) ? CaseStatus::Correct
                                                    : CaseStatus::Incorrect;
  } else {
    out.status = CaseStatus::Abstain;
  }
  out.cost = case_cost(gold, predicted, params);
  return out;
}

Tally tally(const std::vector<CaseOutcome>& outcomes) {
  Tally t;
  for (const auto& o : outcomes) {
    switch (o.status) {
      case CaseStatus::Correct: ++t.correct; break;
      case CaseStatus::Incorrect: ++t.incorrect; break;
      case CaseStatus::Abstain: ++t.abstain; break;
    }
  }
  return t;
}

double break_even_price(const std::vector<CaseOutcome>& outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("break_even_price over zero cases");
  double sum = 0.0;
  for (const auto& o : outcomes) sum += o.cost;
  return sum / static_cast<double>(outcomes.size());
}

ConfidenceInterval bootstrap_ci(const std::vector<double>& costs, double level, int resamples,
                                uint64_t seed) {
  if (costs.empty()) throw std::invalid_argument("bootstrap_ci over zero cases");
  if (resamples < 1000) throw std::invalid_argument("bootstrap_ci needs >= 1000 resamples");
  // Index draws use a plain modulo over the raw engine output: a
  // uniform_int_distribution is implementation-defined, and the interval must
  // reproduce bit-for-bit across standard libraries.
  std::mt19937_64 rng(seed);
  std::vector<double> means(static_cast<size_t>(resamples));
  for (auto& m : means) {
    double sum = 0.0;
    for (size_t i = 0; i < costs.size(); ++i) sum += costs[rng() % costs.size()];
    m = sum / static_cast<double>(costs.size());
  }
  std::sort(means.begin(), means.end());
  double alpha = (1.0 - level) / 2.0;
  auto quantile = [&](double q) {
    // Nearest-rank: the smallest mean with cumulative frequency >= q.
    auto idx = static_cast<size_t>(std::ceil(q * means.size()));
    if (idx > 0) --idx;
    if (idx >= means.size()) idx = means.size() - 1;
    return means[idx];
  };
  return ConfidenceInterval{quantile(alpha), quantile(1.0 - alpha)};
}

CostReport make_report(const std::string& model, const std::string& method,
                       std::vector<CaseOutcome> outcomes, int resamples, uint64_t seed) {
  CostReport report;
  report.model = model;
  report.method = method;
  report.tallies = tally(outcomes);
  report.break_even = break_even_price(outcomes);
  std::vector<double> costs;
  costs.reserve(outcomes.size());
  for (const auto& o : outcomes) costs.push_back(o.cost);
  report.ci90 = bootstrap_ci(costs, 0.90, resamples, seed);
  report.per_case = std::move(outcomes);
  return report;
}

OverlapMatrix overlap_matrix(
    const std::vector<std::pair<std::string, std::map<std::string, Prediction>>>& methods,
    const std::map<std::string, double>& golds) {
  OverlapMatrix m;
  for (const auto& [name, by_case] : methods) {
    m.methods.push_back(name);
    if (by_case.size() != golds.size()) {
      throw std::invalid_argument("overlap_matrix: method '" + name +
                                  "' covers " + std::to_string(by_case.size()) +
                                  " cases, golds cover " + std::to_string(golds.size()));
    }
    for (const auto& [case_id, gold] : golds) {
      if (by_case.find(case_id) == by_case.end()) {
        throw std::invalid_argument("overlap_matrix: method '" + name +
                                    "' is missing case " + case_id);
      }
    }
  }
  size_t n = methods.size();
  m.successes.assign(n, std::vector<int>(n, 0));
  m.failures.assign(n, std::vector<int>(n, 0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      for (const auto& [case_id, gold] : golds) {
        const Prediction& a = methods[i].second.at(case_id);
        const Prediction& b = methods[j].second.at(case_id);
        // Consensus: both answered and agree at rounded-dollar granularity.
        if (!a.answered || !b.answered) continue;
        if (round_half_away(a.value) != round_half_away(b.value)) continue;
        if (exact_match(a.value, gold)) {
          ++m.successes[i][j];
        } else {
          ++m.failures[i][j];
        }
      }
    }
  }
  return m;
}

std::optional<double> length_failure_correlation(
    const std::vector<std::pair<uint64_t, int>>& points) {
  if (points.size() < 3) return std::nullopt;
  double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    sx += static_cast<double>(x);
    sy += static_cast<double>(y);
  }
  double mx = sx / n, my = sy / n;
  double sxx = 0, syy = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    double dx = static_cast<double>(x) - mx;
    double dy = static_cast<double>(y) - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

bool natural_id_less(const std::string& a, const std::string& b) {
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (isdigit(static_cast<unsigned char>(a[i])) &&
        isdigit(static_cast<unsigned char>(b[j]))) {
      size_t i2 = i, j2 = j;
      while (i2 < a.size() && isdigit(static_cast<unsigned char>(a[i2]))) ++i2;
      while (j2 < b.size() && isdigit(static_cast<unsigned char>(b[j2]))) ++j2;
      long long na = std::stoll(a.substr(i, i2 - i));
      long long nb = std::stoll(b.substr(j, j2 - j));
      if (na != nb) return na < nb;
      i = i2;
      j = j2;
      continue;
    }
    if (a[i] != b[j]) return a[i] < b[j];
    ++i;
    ++j;
  }
  return a.size() < b.size();
}

HardestCases hardest_cases(const std::map<std::string, int>& failure_counts, size_t k) {
  std::vector<std::pair<std::string, int>> rows(failure_counts.begin(), failure_counts.end());
  k = std::min(k, rows.size());
  HardestCases out;
  auto by_most = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return natural_id_less(a.first, b.first);
  };
  auto by_least = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return natural_id_less(a.first, b.first);
  };
  std::sort(rows.begin(), rows.end(), by_most);
  out.most_failed.assign(rows.begin(), rows.begin() + static_cast<long>(k));
  std::sort(rows.begin(), rows.end(), by_least);
  out.least_failed.assign(rows.begin(), rows.begin() + static_cast<long>(k));
  return out;
}

}  // namespace taxlogic::eval
