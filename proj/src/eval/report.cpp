#include "taxlogic/report.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace taxlogic::eval {

namespace {

std::string money(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

}  // namespace

std::string format_dollars(double value) {
  bool negative = value < 0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", std::fabs(value));
  std::string digits(buf);
  size_t dot = digits.find('.');
  std::string whole = digits.substr(0, dot), frac = digits.substr(dot);
  std::string grouped;
  int count = 0;
  for (auto it = whole.rbegin(); it != whole.rend(); ++it) {
    if (count && count % 3 == 0) grouped.push_back(',');
    grouped.push_back(*it);
    ++count;
  }
  std::reverse(grouped.begin(), grouped.end());
  return (negative ? "-$" : "$") + grouped + frac;
}

std::string render_report_table(const std::vector<CostReport>& reports) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Model", "Method", "Correct", "Incorrect", "Abstentions",
                  "Break-Even Price"});
  for (const auto& r : reports) {
    double half = (r.ci90.high - r.ci90.low) / 2.0;
    rows.push_back({r.model, r.method, std::to_string(r.tallies.correct),
                    std::to_string(r.tallies.incorrect), std::to_string(r.tallies.abstain),
                    format_dollars(r.break_even) + " ± " + money(half)});
  }
  std::vector<size_t> widths(rows[0].size(), 0);
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  }
  std::string out;
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t i = 0; i < rows[r].size(); ++i) {
      std::string cell = rows[r][i];
      bool right = i >= 2;
      if (right) {
        out += std::string(widths[i] - cell.size(), ' ') + cell;
      } else {
        out += cell + std::string(widths[i] - cell.size(), ' ');
      }
      out += i + 1 == rows[r].size() ? "" : "  ";
    }
    out += "\n";
    if (r == 0) {
      size_t total = 0;
      for (size_t w : widths) total += w;
      out += std::string(total + 2 * (widths.size() - 1), '-') + "\n";
    }
  }
  return out;
}

std::string reports_to_jsonl(const std::vector<CostReport>& reports) {
  std::string out;
  for (const auto& r : reports) {
    nlohmann::json per_case = nlohmann::json::array();
    for (const auto& o : r.per_case) {
      nlohmann::json row;
      row["case_id"] = o.case_id;
      row["gold"] = o.gold;
      if (o.predicted.answered) {
        row["predicted"] = o.predicted.value;
        row["delta"] = o.delta;
      } else {
        row["abstain_reason"] = abstain_reason_name(o.predicted.reason);
      }
      row["status"] = o.status == CaseStatus::Correct     ? "correct"
                      : o.status == CaseStatus::Incorrect ? "incorrect"
                                                          : "abstain";
      row["cost"] = o.cost;
      per_case.push_back(std::move(row));
    }
    nlohmann::json j;
    j["model"] = r.model;
    j["method"] = r.method;
    j["n"] = r.tallies.n();
    j["correct"] = r.tallies.correct;
    j["incorrect"] = r.tallies.incorrect;
    j["abstain"] = r.tallies.abstain;
    j["break_even"] = r.break_even;
    j["ci90"] = {r.ci90.low, r.ci90.high};
    j["per_case"] = std::move(per_case);
    out += j.dump();
    out += "\n";
  }
  return out;
}

std::string overlap_matrix_tsv(const OverlapMatrix& matrix) {
  // Upper triangle (and diagonal): combined successes; lower: combined
  // failures of the row/column method pairing.
  std::string out = "pair";
  for (const auto& m : matrix.methods) out += "\t" + m;
  out += "\n";
  for (size_t i = 0; i < matrix.methods.size(); ++i) {
    out += matrix.methods[i];
    for (size_t j = 0; j < matrix.methods.size(); ++j) {
      int value = j >= i ? matrix.successes[i][j] : matrix.failures[i][j];
      out += "\t" + std::to_string(value);
    }
    out += "\n";
  }
  return out;
}

std::string scatter_tsv(const std::vector<std::tuple<std::string, uint64_t, int>>& rows) {
  std::string out = "case_id\tword_count\tfailures\n";
  for (const auto& [id, words, failures] : rows) {
    out += id + "\t" + std::to_string(words) + "\t" + std::to_string(failures) + "\n";
  }
  return out;
}

std::string hardest_cases_text(const HardestCases& hardest) {
  std::string out = "Most frequently failed:\n";
  for (const auto& [id, count] : hardest.most_failed) {
    out += "  " + id + "  " + std::to_string(count) + "\n";
  }
  out += "Least frequently failed:\n";
  for (const auto& [id, count] : hardest.least_failed) {
    out += "  " + id + "  " + std::to_string(count) + "\n";
  }
  return out;
}

}  // namespace taxlogic::eval
