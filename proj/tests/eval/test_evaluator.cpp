#include <stdexcept>
#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "taxlogic/evaluator.hpp"

using namespace taxlogic;
using namespace taxlogic::eval;

namespace {

// Independent straight-line oracle for the piecewise cost formula. Kept
// deliberately separate from the implementation it checks.
double cost_oracle(double y, bool refused, double y_hat) {
  if (refused) return 270.0;
  double delta = y - y_hat;
  double threshold = 5000.0 > 0.1 * y ? 5000.0 : 0.1 * y;
  if (delta < 0) return -delta;
  if (delta > threshold) return 0.2 * delta;
  return 0.0;
}

CostModelParams params;

}  // namespace

TEST_CASE("exact match rounds half away from zero") {
  CHECK(exact_match(12345.49, 12345));
  CHECK(exact_match(12345.50, 12346));
  CHECK(exact_match(0, 0));
  CHECK_FALSE(exact_match(12345.49, 12346));
  CHECK(exact_match(-2.5, -3));  // away from zero on the negative side too
}

TEST_CASE("cost formula: worked branches") {
  CHECK(case_cost(1000, Prediction::answer(1500), params) == doctest::Approx(500));
  CHECK(case_cost(100000, Prediction::answer(80000), params) == doctest::Approx(4000));
  CHECK(case_cost(0, Prediction::abstain(AbstainReason::Timeout), params)
        == doctest::Approx(270));
  CHECK(case_cost(20000, Prediction::answer(18000), params) == doctest::Approx(0));
  CHECK(case_cost(4000, Prediction::answer(0), params) == doctest::Approx(0));
}

TEST_CASE("cost formula boundary: exactly at the substantial threshold") {
  // y = 100,000: threshold = max(5000, 10,000) = 10,000.
  CHECK(case_cost(100000, Prediction::answer(90001), params) == doctest::Approx(0));   // Δ 9999
  CHECK(case_cost(100000, Prediction::answer(90000), params) == doctest::Approx(0));   // Δ = thr
  CHECK(case_cost(100000, Prediction::answer(89999), params)
        == doctest::Approx(0.2 * 10001));                                              // Δ thr+1
  // y = 20,000: threshold = 5000 (the floor dominates).
  CHECK(case_cost(20000, Prediction::answer(15001), params) == doctest::Approx(0));
  CHECK(case_cost(20000, Prediction::answer(15000), params) == doctest::Approx(0));
  CHECK(case_cost(20000, Prediction::answer(14999), params) == doctest::Approx(0.2 * 5001));
}

TEST_CASE("cost formula: 10k randomized triples match the oracle exactly") {
  std::mt19937_64 rng(20250501);
  std::uniform_real_distribution<double> gold_dist(0.0, 400000.0);
  std::uniform_real_distribution<double> pred_dist(-50000.0, 450000.0);
  for (int i = 0; i < 10000; ++i) {
    double y = gold_dist(rng);
    bool refused = rng() % 5 == 0;
    double y_hat = pred_dist(rng);
    Prediction p = refused ? Prediction::abstain(AbstainReason::NoConsensus)
                           : Prediction::answer(y_hat);
    CHECK(case_cost(y, p, params) == cost_oracle(y, refused, y_hat));
  }
}

TEST_CASE("cost is never negative and zero exactly when the formula says so") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 200000.0);
  for (int i = 0; i < 2000; ++i) {
    double y = dist(rng);
    double y_hat = dist(rng);
    double c = case_cost(y, Prediction::answer(y_hat), params);
    CHECK(c >= 0.0);
    double delta = y - y_hat;
    bool expected_zero =
        delta == 0 || (delta > 0 && delta <= std::max(5000.0, 0.1 * y));
    CHECK((c == 0.0) == expected_zero);
  }
}

TEST_CASE("monotonicity in overstatement and substantial understatement") {
  double y = 80000;
  double prev = case_cost(y, Prediction::answer(y + 1000), params);
  for (double extra = 2000; extra <= 50000; extra += 1000) {
    double c = case_cost(y, Prediction::answer(y + extra), params);
    CHECK(c > prev);
    prev = c;
  }
  prev = case_cost(y, Prediction::answer(y - 9000), params);  // past max(5000, 8000)
  for (double shortfall = 10000; shortfall <= 70000; shortfall += 1000) {
    double c = case_cost(y, Prediction::answer(y - shortfall), params);
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("tally and break-even") {
  std::vector<CaseOutcome> outcomes;
  for (int i = 0; i < 100; ++i) {
    outcomes.push_back(
        score_case("c" + std::to_string(i), 1000, Prediction::abstain(AbstainReason::NoMarker),
                   params));
  }
  Tally t = tally(outcomes);
  CHECK(t.correct == 0);
  CHECK(t.incorrect == 0);
  CHECK(t.abstain == 100);
  CHECK(break_even_price(outcomes) == 270.0);  // exact, for any params

  outcomes.clear();
  CHECK(tally(outcomes).n() == 0);
  for (int i = 0; i < 10; ++i) {
    outcomes.push_back(score_case("c", 500, Prediction::answer(500), params));
  }
  CHECK(break_even_price(outcomes) == 0.0);
  CHECK(tally(outcomes).correct == 10);
}

TEST_CASE("bootstrap: zero variance collapses the interval") {
  std::vector<double> costs(100, 270.0);
  ConfidenceInterval ci = bootstrap_ci(costs, 0.90, 2000, 1);
  CHECK(ci.low == 270.0);
  CHECK(ci.high == 270.0);
}

TEST_CASE("bootstrap: deterministic for a fixed seed") {
  std::vector<double> costs;
  for (int i = 0; i < 50; ++i) costs.push_back(i * 13.5);
  ConfidenceInterval a = bootstrap_ci(costs, 0.90, 5000, 42);
  ConfidenceInterval b = bootstrap_ci(costs, 0.90, 5000, 42);
  CHECK(a.low == b.low);
  CHECK(a.high == b.high);
  ConfidenceInterval c = bootstrap_ci(costs, 0.90, 5000, 43);
  CHECK((c.low != a.low || c.high != a.high));
}

TEST_CASE("bootstrap vs exhaustive enumeration at N=5") {
  // All 5^5 resamples enumerated; percentile from the exact distribution.
  std::vector<double> costs = {0, 100, 200, 300, 400};
  std::vector<double> exact_means;
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      for (int c = 0; c < 5; ++c)
        for (int d = 0; d < 5; ++d)
          for (int e = 0; e < 5; ++e) {
            exact_means.push_back((costs[a] + costs[b] + costs[c] + costs[d] + costs[e]) / 5.0);
          }
  std::sort(exact_means.begin(), exact_means.end());
  auto exact_q = [&](double q) {
    size_t idx = static_cast<size_t>(std::ceil(q * exact_means.size()));
    if (idx > 0) --idx;
    return exact_means[idx];
  };
  double exact_low = exact_q(0.05), exact_high = exact_q(0.95);
  ConfidenceInterval ci = bootstrap_ci(costs, 0.90, 20000, 11);
  // Support points step by 20; allow one step of sampling slack.
  CHECK(std::fabs(ci.low - exact_low) <= 20.0);
  CHECK(std::fabs(ci.high - exact_high) <= 20.0);
  // The heavy-tail example: mean must sit inside the interval.
  std::vector<double> skewed(99, 0.0);
  skewed.push_back(27000.0);
  ConfidenceInterval s = bootstrap_ci(skewed, 0.90, 10000, 5);
  CHECK(s.low <= 270.0);
  CHECK(s.high >= 270.0);
}

TEST_CASE("bootstrap interval contains the sample mean on random fixtures") {
  std::mt19937_64 rng(2024);
  int contained = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> costs;
    size_t n = 20 + rng() % 60;
    std::uniform_real_distribution<double> dist(0.0, 5000.0);
    for (size_t i = 0; i < n; ++i) costs.push_back(dist(rng));
    double mean = 0;
    for (double c : costs) mean += c;
    mean /= static_cast<double>(n);
    ConfidenceInterval ci = bootstrap_ci(costs, 0.90, 2000, rng());
    if (ci.low <= mean && mean <= ci.high) ++contained;
  }
  CHECK(contained >= trials * 99 / 100);
}

TEST_CASE("overlap matrix: self-pairing reproduces the method's own tallies") {
  std::map<std::string, double> golds = {{"a", 100}, {"b", 200}, {"c", 300}};
  std::map<std::string, Prediction> m1 = {
      {"a", Prediction::answer(100)},
      {"b", Prediction::answer(999)},
      {"c", Prediction::abstain(AbstainReason::Timeout)},
  };
  OverlapMatrix m = overlap_matrix({{"m1", m1}}, golds);
  CHECK(m.successes[0][0] == 1);
  CHECK(m.failures[0][0] == 1);  // the abstention drops out entirely
}

TEST_CASE("overlap matrix: disjoint correct sets combine to zero successes") {
  std::map<std::string, double> golds = {{"a", 100}, {"b", 200}, {"c", 300}};
  std::map<std::string, Prediction> m1 = {{"a", Prediction::answer(100)},
                                          {"b", Prediction::answer(7)},
                                          {"c", Prediction::answer(5)}};
  std::map<std::string, Prediction> m2 = {{"a", Prediction::answer(7)},
                                          {"b", Prediction::answer(200)},
                                          {"c", Prediction::answer(5)}};
  OverlapMatrix m = overlap_matrix({{"m1", m1}, {"m2", m2}}, golds);
  CHECK(m.successes[0][1] == 0);  // correct sets are disjoint
  CHECK(m.successes[1][0] == 0);
  CHECK(m.failures[0][1] == 1);  // agreement on the wrong 5 for case c
}

TEST_CASE("overlap matrix: combined failures never exceed min of constituents") {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 50; ++trial) {
    std::map<std::string, double> golds;
    std::map<std::string, Prediction> m1, m2;
    for (int i = 0; i < 40; ++i) {
      std::string id = "case" + std::to_string(i);
      golds[id] = static_cast<double>(rng() % 5000);
      auto draw = [&](std::map<std::string, Prediction>& m) {
        int what = static_cast<int>(rng() % 4);
        if (what == 0) m[id] = Prediction::abstain(AbstainReason::NoConsensus);
        else if (what == 1) m[id] = Prediction::answer(golds[id]);
        else m[id] = Prediction::answer(static_cast<double>(rng() % 3));
      };
      draw(m1);
      draw(m2);
    }
    OverlapMatrix m = overlap_matrix({{"m1", m1}, {"m2", m2}}, golds);
    CHECK(m.failures[0][1] <= std::min(m.failures[0][0], m.failures[1][1]));
    CHECK(m.failures[1][0] == m.failures[0][1]);  // symmetric semantics
    CHECK(m.successes[0][1] <= std::min(m.successes[0][0], m.successes[1][1]));
  }
}

TEST_CASE("overlap matrix rejects mismatched coverage") {
  std::map<std::string, double> golds = {{"a", 1}, {"b", 2}};
  std::map<std::string, Prediction> partial = {{"a", Prediction::answer(1)}};
  CHECK_THROWS_AS(overlap_matrix({{"m", partial}}, golds), std::invalid_argument);
}

TEST_CASE("length-failure correlation") {
  // Perfectly proportional -> r = 1.
  std::vector<std::pair<uint64_t, int>> points;
  for (int i = 1; i <= 50; ++i) points.emplace_back(10 * i, 2 * i);
  auto r = length_failure_correlation(points);
  REQUIRE(r.has_value());
  CHECK(std::fabs(*r - 1.0) <= 1e-9);

  // Constant failures -> zero variance -> undefined.
  points.clear();
  for (int i = 1; i <= 50; ++i) points.emplace_back(10 * i, 3);
  CHECK_FALSE(length_failure_correlation(points).has_value());

  CHECK_FALSE(length_failure_correlation({{1, 1}, {2, 2}}).has_value());
}

TEST_CASE("hardest cases: ordering, ties, and clipping") {
  std::map<std::string, int> counts;
  for (int i = 1; i <= 100; ++i) counts["tax_case_" + std::to_string(i)] = i % 7;
  counts["tax_case_26"] = 12;
  HardestCases h = hardest_cases(counts, 5);
  REQUIRE(h.most_failed.size() == 5);
  CHECK(h.most_failed[0].first == "tax_case_26");
  CHECK(h.most_failed[0].second == 12);
  // Ties break by case id ascending (natural order).
  CHECK(h.least_failed[0].second <= h.least_failed[4].second);

  HardestCases clipped = hardest_cases(counts, 1000);
  CHECK(clipped.most_failed.size() == counts.size());

  std::map<std::string, int> zeros;
  for (int i = 1; i <= 10; ++i) zeros["c" + std::to_string(i)] = 0;
  HardestCases degenerate = hardest_cases(zeros, 3);
  CHECK(degenerate.most_failed[0].first == "c1");
  CHECK(degenerate.least_failed[0].first == "c1");
}

TEST_CASE("natural id ordering") {
  CHECK(natural_id_less("tax_case_2", "tax_case_10"));
  CHECK_FALSE(natural_id_less("tax_case_10", "tax_case_2"));
  CHECK(natural_id_less("s2_1_pos", "s2_2_neg"));
}

TEST_CASE("make_report assembles tallies, price, and interval") {
  std::vector<CaseOutcome> outcomes;
  for (int i = 0; i < 100; ++i) {
    outcomes.push_back(score_case("c" + std::to_string(i), 1000,
                                  Prediction::abstain(AbstainReason::NoMarker), params));
  }
  CostReport report = make_report("stub", "AlwaysAbstain", std::move(outcomes), 2000, 3);
  CHECK(report.tallies.abstain == 100);
  CHECK(report.break_even == 270.0);
  CHECK(report.ci90.low == 270.0);
  CHECK(report.ci90.high == 270.0);
}
