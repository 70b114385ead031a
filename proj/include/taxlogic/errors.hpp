#pragma once

#include <stdexcept>
#include <string>

namespace taxlogic {

struct SourcePos {
  int line = 0;  // 1-based; 0 = unknown
  int column = 0;
};

/// Syntax or lexical error in Prolog source. Carries file/line/column.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, SourcePos pos, const std::string& what)
      : std::runtime_error(format(file, pos, what)), file_(std::move(file)), pos_(pos) {}

  const std::string& file() const { return file_; }
  SourcePos pos() const { return pos_; }

 private:
  static std::string format(const std::string& file, SourcePos pos, const std::string& what) {
    std::string s = file.empty() ? std::string("<input>") : file;
    s += ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + what;
    return s;
  }
  std::string file_;
  SourcePos pos_;
};

enum class EngineErrorKind {
  UnknownPredicate,
  UnsupportedBuiltin,
  TypeError,
  InstantiationError,
  EvaluationError,   // e.g. division by zero
  Overflow,          // checked integer arithmetic tripped
  ResourceLimit,
  NonNumericAnswer,
  CyclicAnswer,
  Internal,
};

const char* engine_error_kind_name(EngineErrorKind kind);

/// Runtime error raised inside resolution. solve() catches these and turns
/// them into ExecutionOutcome::EngineError; they never escape the engine API.
class EngineException : public std::runtime_error {
 public:
  EngineException(EngineErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  EngineErrorKind kind() const { return kind_; }

 private:
  EngineErrorKind kind_;
};

}  // namespace taxlogic
