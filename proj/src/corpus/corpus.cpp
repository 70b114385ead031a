#include "taxlogic/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "taxlogic/writer.hpp"

namespace taxlogic::corpus {

namespace fs = std::filesystem;
using namespace taxlogic::logic;

int64_t round_dollars(double value) { return std::llround(value); }

uint64_t count_words(const std::string& text) {
  std::istringstream in(text);
  std::string word;
  uint64_t n = 0;
  while (in >> word) ++n;
  return n;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError(path, "cannot open file");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Natural sort: digit runs compare numerically, so tax_case_2 < tax_case_10.
bool natural_less(const std::string& a, const std::string& b) {
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (isdigit(static_cast<unsigned char>(a[i])) && isdigit(static_cast<unsigned char>(b[j]))) {
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

// Extracts the "% Text" and "% Question" comment blocks from a case file.
void parse_comment_blocks(const fs::path& path, const std::string& source,
                          std::string& facts_text, std::string& question_text) {
  std::istringstream in(source);
  std::string line;
  enum class Block { None, Text, Question } block = Block::None;
  std::vector<std::string> text_lines, question_lines;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t == "% Text") {
      block = Block::Text;
      continue;
    }
    if (t == "% Question") {
      block = Block::Question;
      continue;
    }
    if (t.rfind("%", 0) != 0) {
      block = Block::None;  // left the comment header region
      continue;
    }
    std::string content = trim(t.substr(1));
    if (block == Block::Text) {
      if (!content.empty()) text_lines.push_back(content);
    } else if (block == Block::Question) {
      if (!content.empty()) question_lines.push_back(content);
    }
  }
  if (text_lines.empty()) throw CorpusError(path, "missing '% Text' block");
  if (question_lines.empty()) throw CorpusError(path, "missing '% Question' block");
  std::string facts;
  for (const auto& l : text_lines) {
    if (!facts.empty()) facts += " ";
    facts += l;
  }
  std::string question;
  for (const auto& l : question_lines) {
    if (!question.empty()) question += " ";
    question += l;
  }
  facts_text = facts;
  question_text = question;
}

// The numeric test goal is tax(Person, Year, <amount>); the gold query
// replaces the amount with a fresh variable named Answer.
void derive_case_semantics(const fs::path& path, CaseRecord& record) {
  TermPtr goal = record.test_goal;
  bool negated = false;
  if (goal->is_compound() && goal->text == "\\+" && goal->args.size() == 1) {
    negated = true;
    goal = goal->args[0];
  }
  if (!goal->is_callable()) throw CorpusError(path, "test goal must be callable");

  const TermPtr* amount = nullptr;
  if (goal->is_compound() && goal->text == "tax" && goal->args.size() == 3 &&
      goal->args[2]->is_number()) {
    amount = &goal->args[2];
  }
  if (amount != nullptr) {
    if (negated) throw CorpusError(path, "numeric test goal cannot be negated");
    record.kind = CaseKind::NumericTax;
    double raw = (*amount)->tag == TermTag::Int ? static_cast<double>((*amount)->ival)
                                                : (*amount)->fval;
    record.gold_answer_dollars = round_dollars(raw);
    record.answer_var = "Answer";
    // Rebuild the goal with a variable in the amount position. The test goal
    // carries no variables of its own, so the query has exactly one.
    std::vector<TermPtr> args(goal->args);
    args[2] = make_var("Answer", 0);
    ParsedQuery q;
    q.goal = make_compound(goal->text, std::move(args));
    q.num_vars = 1;
    q.var_names = {{"Answer", 0}};
    record.gold_query = std::move(q);
  } else {
    record.kind = CaseKind::BinaryEntailment;
    record.gold_answer_bool = !negated;
    ParsedQuery q;
    q.goal = goal;
    q.num_vars = 0;  // binary test goals are ground in this corpus
    record.gold_query = std::move(q);
  }
}

// Verbatim facts source: the region between the "% Facts" and "% Test"
// markers when present, otherwise everything but comments and directives.
std::string extract_facts_source(const std::string& source) {
  size_t facts = source.find("% Facts");
  size_t test = source.find("% Test");
  std::string region;
  if (facts != std::string::npos && test != std::string::npos && test > facts) {
    size_t start = source.find('\n', facts);
    if (start == std::string::npos) return "";
    region = source.substr(start + 1, test - start - 1);
  } else {
    std::istringstream in(source);
    std::string line;
    while (std::getline(in, line)) {
      std::string t = trim(line);
      if (t.rfind("%", 0) == 0 || t.rfind(":-", 0) == 0) continue;
      region += line;
      region += "\n";
    }
  }
  size_t a = region.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = region.find_last_not_of(" \t\r\n");
  return region.substr(a, b - a + 1) + "\n";
}

CaseRecord load_case(const fs::path& path) {
  CaseRecord record;
  record.case_id = path.stem().string();
  std::string source = read_file(path);
  parse_comment_blocks(path, source, record.facts_text, record.question_text);
  record.gold_program_text = extract_facts_source(source);
  record.word_count = count_words(record.facts_text) + count_words(record.question_text);

  ParseOptions opts;
  opts.file = path.string();
  opts.collect_directives = true;
  record.gold_facts = parse_program(source, opts);
  const auto& directives = record.gold_facts.directives();
  if (directives.size() != 1) {
    throw CorpusError(path, "expected exactly one test directive, found " +
                                std::to_string(directives.size()));
  }
  record.test_goal = directives[0].goal;
  derive_case_semantics(path, record);
  return record;
}

std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& extension) {
  if (!fs::is_directory(dir)) throw CorpusError(dir, "missing directory");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
    return natural_less(a.filename().string(), b.filename().string());
  });
  return out;
}

}  // namespace

Corpus load_corpus(const fs::path& root) {
  Corpus corpus;
  corpus.root = root;
  if (!fs::is_directory(root)) throw CorpusError(root, "corpus root is not a directory");

  fs::path version_file = root / "VERSION";
  corpus.version = trim(read_file(version_file));
  if (corpus.version != "v2") {
    throw CorpusError(version_file, "expected dataset version marker 'v2', found '" +
                                        corpus.version + "'");
  }

  // Shared statute library first, then sections in numeric order.
  fs::path prolog_dir = root / "statutes" / "prolog";
  fs::path init = prolog_dir / "init.pl";
  if (fs::exists(init)) {
    ParseOptions opts;
    opts.file = init.string();
    std::string source = read_file(init);
    parse_program_into(corpus.statutes_kb, source, opts);
    corpus.statute_programs_text += source;
    corpus.statute_programs_text += "\n";
  }

  for (const fs::path& text_path : sorted_files(root / "statutes" / "text", ".txt")) {
    StatuteSection section;
    std::string stem = text_path.stem().string();  // section_<id>
    const std::string prefix = "section_";
    if (stem.rfind(prefix, 0) != 0) throw CorpusError(text_path, "unexpected statute file name");
    section.section_id = stem.substr(prefix.size());
    section.plain_text = read_file(text_path);

    fs::path pl = prolog_dir / (stem + ".pl");
    std::string pl_source = read_file(pl);
    ParseOptions opts;
    opts.file = pl.string();
    section.gold_program = parse_program(pl_source, opts);
    parse_program_into(corpus.statutes_kb, pl_source, opts);
    corpus.statute_programs_text += pl_source;
    corpus.statute_programs_text += "\n";
    corpus.sections.push_back(std::move(section));
  }
  if (corpus.sections.size() != 9) {
    throw CorpusError(root / "statutes", "expected 9 statute sections, found " +
                                             std::to_string(corpus.sections.size()));
  }

  for (const fs::path& case_path : sorted_files(root / "cases", ".pl")) {
    corpus.cases.push_back(load_case(case_path));
  }

  size_t numeric = 0;
  for (const auto& c : corpus.cases) {
    if (c.kind == CaseKind::NumericTax) {
      ++numeric;
      if (c.gold_answer_dollars < 0) {
        corpus.warnings.push_back(c.case_id + ": negative gold dollar amount " +
                                  std::to_string(c.gold_answer_dollars));
      }
    }
  }
  if (corpus.cases.size() != 376 || numeric != 100) {
    throw CorpusError(root / "cases",
                      "expected 376 cases with 100 numeric tax cases, found " +
                          std::to_string(corpus.cases.size()) + " with " +
                          std::to_string(numeric) + " numeric");
  }
  return corpus;
}

std::vector<const CaseRecord*> tax_cases(const Corpus& corpus) {
  std::vector<const CaseRecord*> out;
  for (const auto& c : corpus.cases) {
    if (c.kind == CaseKind::NumericTax) out.push_back(&c);
  }
  return out;  // corpus.cases is already ordered by case id
}

std::string statutes_concatenated(const Corpus& corpus) {
  std::string out;
  for (const auto& section : corpus.sections) {
    if (!out.empty()) out += "\n\n";
    out += section.plain_text;
  }
  return out;
}

logic::KnowledgeBase case_execution_kb(const Corpus& corpus, const CaseRecord& record) {
  KnowledgeBase kb;
  kb.append(corpus.statutes_kb);
  kb.append(record.gold_facts);
  return kb;
}

ValidationReport validate_gold(const Corpus& corpus, std::chrono::milliseconds budget,
                               unsigned jobs) {
  std::vector<const CaseRecord*> cases = tax_cases(corpus);
  ValidationReport report;
  report.rows.resize(cases.size());

  auto run_case = [&](size_t i) {
    const CaseRecord& record = *cases[i];
    ValidationRow row;
    row.case_id = record.case_id;
    row.expected = record.gold_answer_dollars;

    KnowledgeBase kb = case_execution_kb(corpus, record);
    SolveOptions opts;
    opts.budget = budget;
    std::atomic<bool> cancel{false};
    opts.cancel = &cancel;
    CancelWatchdog watchdog(cancel, budget + std::chrono::milliseconds(500));
    DollarOutcome out = run_query_for_dollars(kb, record.gold_query, record.answer_var, opts);
    row.elapsed = out.outcome.elapsed;
    row.inferences = out.outcome.inference_count;
    switch (out.outcome.kind) {
      case OutcomeKind::Solved:
        row.actual = out.dollars;
        row.has_actual = true;
        row.status = round_dollars(out.dollars) == record.gold_answer_dollars ? "match"
                                                                              : "mismatch";
        break;
      case OutcomeKind::NoSolution:
        row.status = "mismatch";
        row.detail = "gold query has no solution";
        break;
      case OutcomeKind::Timeout:
        row.status = "timeout";
        break;
      case OutcomeKind::EngineError:
        row.status = "error";
        row.detail = out.outcome.error_message;
        break;
    }
    report.rows[i] = std::move(row);
  };

  if (jobs <= 1) {
    for (size_t i = 0; i < cases.size(); ++i) run_case(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          size_t i = next.fetch_add(1);
          if (i >= cases.size()) return;
          run_case(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  for (const auto& row : report.rows) {
    if (row.status == "match") ++report.matched;
    else if (row.status == "mismatch") ++report.mismatched;
    else if (row.status == "timeout") ++report.timeouts;
    else ++report.errors;
  }
  return report;
}

}  // namespace taxlogic::corpus
