#pragma once

#include <string>
#include <vector>

#include "taxlogic/evaluator.hpp"

namespace taxlogic::eval {

/// Fixed-width table: Model, Method, Correct, Incorrect, Abstentions,
/// Break-Even Price (± half the interval width).
std::string render_report_table(const std::vector<CostReport>& reports);

/// One machine-readable record per line, per-case outcomes included.
std::string reports_to_jsonl(const std::vector<CostReport>& reports);

std::string format_dollars(double value);  // "$12,345.67", deterministic

std::string overlap_matrix_tsv(const OverlapMatrix& matrix);

/// Word-count vs failure-count points, one row per case, for any plotter.
std::string scatter_tsv(const std::vector<std::tuple<std::string, uint64_t, int>>& rows);

std::string hardest_cases_text(const HardestCases& hardest);

}  // namespace taxlogic::eval
