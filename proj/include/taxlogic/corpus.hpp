#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "taxlogic/kb.hpp"
#include "taxlogic/parser.hpp"
#include "taxlogic/solver.hpp"

namespace taxlogic::corpus {

/// Loader errors always carry the offending path.
class CorpusError : public std::runtime_error {
 public:
  CorpusError(std::filesystem::path path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), path_(std::move(path)) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct StatuteSection {
  std::string section_id;    // "1", "63", "7703", ...
  std::string plain_text;
  logic::KnowledgeBase gold_program;
};

enum class CaseKind { NumericTax, BinaryEntailment };

struct CaseRecord {
  std::string case_id;
  std::string facts_text;      // the case description (% Text block)
  std::string question_text;   // the question (% Question block)
  std::string gold_program_text;  // verbatim gold facts source (few-shot exemplars)
  logic::KnowledgeBase gold_facts;
  logic::TermPtr test_goal;    // the raw test directive goal (binary may be \+ wrapped)
  logic::ParsedQuery gold_query;  // numeric: test goal with the amount replaced by a variable
  std::string answer_var;         // variable name in gold_query (numeric cases)
  CaseKind kind = CaseKind::BinaryEntailment;
  int64_t gold_answer_dollars = 0;  // numeric cases; rounded to integer dollars at load
  bool gold_answer_bool = false;    // binary cases
  uint64_t word_count = 0;          // whitespace tokens of facts_text + question_text
};

struct Corpus {
  std::filesystem::path root;
  std::string version;
  std::vector<StatuteSection> sections;  // source order: numeric by section id
  std::vector<CaseRecord> cases;         // all cases, ordered by case id
  logic::KnowledgeBase statutes_kb;      // init library + every section program
  std::string statute_programs_text;     // verbatim gold statute Prolog (few-shot prompt)
  std::vector<std::string> warnings;     // non-fatal validation findings
};

/// Loads a corpus tree:
///   VERSION                     -- must contain "v2"
///   statutes/text/section_N.txt
///   statutes/prolog/section_N.pl  (+ optional init.pl, loaded first)
///   cases/<case_id>.pl          -- % Text / % Question blocks, facts, one test
/// Validates the 376/100 counts and that every numeric gold answer is a
/// non-negative dollar amount.
Corpus load_corpus(const std::filesystem::path& root);

/// The 100 numeric cases, stable order by case id.
std::vector<const CaseRecord*> tax_cases(const Corpus& corpus);

/// All statute texts in section order, separated by blank lines. Idempotent.
std::string statutes_concatenated(const Corpus& corpus);

uint64_t count_words(const std::string& text);

struct ValidationRow {
  std::string case_id;
  std::string status;  // match | mismatch | timeout | error
  int64_t expected = 0;
  double actual = 0.0;
  bool has_actual = false;
  std::chrono::milliseconds elapsed{0};
  uint64_t inferences = 0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  int matched = 0;
  int mismatched = 0;
  int timeouts = 0;
  int errors = 0;
  bool all_matched() const { return mismatched == 0 && timeouts == 0 && errors == 0; }
};

/// Executes every numeric case's gold program (statutes + case facts + gold
/// query) and compares against the gold answer at integer-dollar precision.
/// Failures are report rows, never exceptions. `jobs` > 1 runs cases on a
/// worker pool; each case gets its own solver context and deadline.
ValidationReport validate_gold(const Corpus& corpus, std::chrono::milliseconds budget,
                               unsigned jobs = 1);

/// Builds the executable KB for one case: statute programs + gold case facts.
logic::KnowledgeBase case_execution_kb(const Corpus& corpus, const CaseRecord& record);

/// Round to integer dollars, half away from zero (shared with the evaluator).
int64_t round_dollars(double value);

}  // namespace taxlogic::corpus
