#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "taxlogic/bindings.hpp"
#include "taxlogic/errors.hpp"
#include "taxlogic/kb.hpp"
#include "taxlogic/parser.hpp"

namespace taxlogic::logic {

enum class OutcomeKind { Solved, NoSolution, Timeout, EngineError };

/// One (name, value) pair per named query variable, fully resolved.
using AnswerBindings = std::vector<std::pair<std::string, TermPtr>>;

struct ExecutionOutcome {
  OutcomeKind kind = OutcomeKind::NoSolution;
  AnswerBindings answers;
  std::chrono::milliseconds elapsed{0};
  uint64_t inference_count = 0;
  EngineErrorKind error_kind = EngineErrorKind::Internal;
  std::string error_message;

  bool solved() const { return kind == OutcomeKind::Solved; }
  const TermPtr* answer(const std::string& var_name) const {
    for (const auto& [name, term] : answers) {
      if (name == var_name) return &term;
    }
    return nullptr;
  }
};

const char* outcome_kind_name(OutcomeKind kind);

struct TraceEvent {
  enum class Kind { Call, ClauseTry, Redo, Fail, Solution };
  Kind kind;
  int depth = 0;
  TermPtr goal;                    // Call/Redo/Fail
  const Clause* clause = nullptr;  // ClauseTry
  const Bindings* bindings = nullptr;  // valid only during the callback
};

using TraceFn = std::function<void(const TraceEvent&)>;

struct SolveOptions {
  std::chrono::milliseconds budget{10000};  // the 10 s execution wall
  std::atomic<bool>* cancel = nullptr;      // external watchdog hook
  bool occurs_check = false;
  uint64_t max_inferences = 0;              // 0 = unlimited
  TraceFn trace;
};

/// SLD resolution over an immutable KnowledgeBase: leftmost goal selection,
/// clauses in source order, chronological backtracking. The budget deadline
/// is checked at every inference step, so a divergent program returns
/// Timeout instead of hanging the host. One Solver instance runs one query
/// at a time; share the KB, not the Solver, across threads.
class Solver {
 public:
  Solver(const KnowledgeBase& kb, SolveOptions opts = {});

  /// First solution (deterministic given kb/goal).
  ExecutionOutcome solve(const ParsedQuery& query);

  /// Enumerates solutions in order; stops when on_solution returns false.
  ExecutionOutcome solve_all(const ParsedQuery& query,
                             const std::function<bool(const AnswerBindings&)>& on_solution);

 private:
  const KnowledgeBase& kb_;
  SolveOptions opts_;
};

/// Wraps solve for the pipeline: the answer variable must resolve to a
/// number. The engine never rounds; comparison-time rounding happens in the
/// evaluator.
struct DollarOutcome {
  ExecutionOutcome outcome;
  double dollars = 0.0;  // meaningful only when outcome.solved()
};

DollarOutcome run_query_for_dollars(const KnowledgeBase& kb, const ParsedQuery& query,
                                    const std::string& answer_var, const SolveOptions& opts);

/// Arms `flag` after `delay` unless destroyed first. Backstops the in-loop
/// deadline checks from outside the resolution thread.
class CancelWatchdog {
 public:
  CancelWatchdog(std::atomic<bool>& flag, std::chrono::milliseconds delay);
  ~CancelWatchdog();
  CancelWatchdog(const CancelWatchdog&) = delete;
  CancelWatchdog& operator=(const CancelWatchdog&) = delete;

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  bool stop_ = false;
  std::thread thread_;
};

/// Names that the prelude library defines in Prolog (member/2, append/3...).
/// Exposed so the corpus builtin scan can classify references.
const KnowledgeBase& prelude_kb();
bool is_control_or_builtin(const PredKey& key);

}  // namespace taxlogic::logic
