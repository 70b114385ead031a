#include <cctype>
#include <cstdlib>

#include "taxlogic/gateway.hpp"

namespace taxlogic::llm {

std::optional<std::string> extract_program(const std::string& text) {
  // Last complete fenced block wins; earlier ones may be drafts.
  std::optional<std::string> best;
  size_t pos = 0;
  while (true) {
    size_t open = text.find("```", pos);
    if (open == std::string::npos) break;
    size_t lang_end = text.find('\n', open + 3);
    if (lang_end == std::string::npos) break;
    size_t close = text.find("```", lang_end + 1);
    if (close == std::string::npos) break;
    std::string body = text.substr(lang_end + 1, close - lang_end - 1);
    best = std::move(body);
    pos = close + 3;
  }
  return best;
}

namespace {

bool imatch_at(const std::string& text, size_t pos, const char* word) {
  for (const char* p = word; *p != '\0'; ++p, ++pos) {
    if (pos >= text.size()) return false;
    if (tolower(static_cast<unsigned char>(text[pos])) != *p) return false;
  }
  return true;
}

std::optional<double> parse_amount(const std::string& text, size_t pos) {
  while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  if (pos < text.size() && text[pos] == '$') ++pos;
  while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  std::string digits;
  if (pos < text.size() && text[pos] == '-') {
    digits.push_back('-');
    ++pos;
  }
  bool any = false;
  bool seen_dot = false;
  while (pos < text.size()) {
    char c = text[pos];
    if (isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any = true;
      ++pos;
    } else if (c == ',' && !seen_dot) {
      ++pos;  // thousands separator
    } else if (c == '.' && !seen_dot && pos + 1 < text.size() &&
               isdigit(static_cast<unsigned char>(text[pos + 1]))) {
      digits.push_back('.');
      seen_dot = true;
      ++pos;
    } else {
      break;
    }
  }
  if (!any) return std::nullopt;
  return std::strtod(digits.c_str(), nullptr);
}

}  // namespace

std::optional<double> extract_dollar_answer(const std::string& text) {
  std::optional<double> best;
  for (size_t pos = 0; pos + 7 <= text.size(); ++pos) {
    if (!imatch_at(text, pos, "answer")) continue;
    size_t after = pos + 6;
    while (after < text.size() && (text[after] == ' ' || text[after] == '\t')) ++after;
    if (after >= text.size() || text[after] != ':') continue;
    if (auto amount = parse_amount(text, after + 1)) best = amount;
  }
  return best;
}

}  // namespace taxlogic::llm
