#include <fstream>
#include <sstream>

#include "taxlogic/gateway.hpp"

namespace taxlogic::llm {

namespace {

// Prompt templates, versioned by id. The wording is part of the experiment:
// run manifests record a hash of the exact text used.

const char* kDirectV1 = R"(@@system
You are a careful tax calculation assistant. Apply the statutes supplied by the user to the facts of the case and compute the exact dollar amount asked for. Reason step by step and name the section you apply at each step. Your final line must have exactly this form:
ANSWER: $<amount>
@@user
Statutes:

{{statutes}}

Case:

{{case_text}}

Question: {{question}}

Compute the exact amount in whole dollars where possible. End your reply with the final line "ANSWER: $<amount>".
)";

const char* kZeroShotParseV1 = R"(@@system
You translate tax statutes and case facts into one executable Prolog program. Encode the relevant rules from the statutes and the facts of the case. The program must define answer/1 so that the query answer(T) binds T to the dollar amount asked for. Use only predicates you define yourself plus standard built-ins (arithmetic via is/2, comparison operators, findall/3, aggregate_all/3, member/2, between/3, length/2). Do not use assert, retract, or input/output predicates. Output exactly one fenced code block containing the complete program and nothing else after it.
@@user
Statutes:

{{statutes}}

Case:

{{case_text}}

Question: {{question}}

Emit one complete Prolog program in a single ```prolog code block. It must define answer/1 such that answer(T) computes the amount asked for.
)";

const char* kFewShotV1 = R"(@@system
You convert the facts of a tax case into Prolog facts, imitating the event representation used by the worked examples. The statutes are already translated into Prolog and will be loaded together with your output, so translate ONLY the case facts; do not restate any rules. Output exactly one fenced code block containing the facts for the new case and nothing else after it.
@@user
Prolog translation of the statutes (loaded for you; do not repeat it):

```prolog
{{statute_programs}}
```

Worked examples of fact translation:

{{exemplars}}

Now translate the following case. Output only its Prolog facts in one ```prolog code block.

Case:

{{case_text}}

Question: {{question}}
)";

const char* kRerankV1 = R"(@@system
You rank candidate precedent cases by how similar the logical structure of their facts is to a target case: the same kinds of events, relationships among people, and computations required, regardless of the particular names, years, or amounts. Respond with the candidate case ids only, one id per line, most similar first, every candidate exactly once.
@@user
Target case:

{{case_text}}

Candidates:

{{candidates}}

Rank every candidate id from most to least structurally similar to the target. One id per line, no commentary.
)";

const std::map<std::string, const char*>& builtin_templates() {
  static const std::map<std::string, const char*> kTemplates = {
      {"direct_v1", kDirectV1},
      {"zero_shot_parse_v1", kZeroShotParseV1},
      {"few_shot_v1", kFewShotV1},
      {"rerank_v1", kRerankV1},
  };
  return kTemplates;
}

}  // namespace

std::vector<std::string> known_template_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, text] : builtin_templates()) ids.push_back(id);
  return ids;
}

std::string template_text(const std::string& template_id,
                          const std::filesystem::path& override_dir) {
  if (!override_dir.empty()) {
    std::filesystem::path file = override_dir / (template_id + ".txt");
    if (std::filesystem::exists(file)) {
      std::ifstream in(file, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      return buf.str();
    }
  }
  auto it = builtin_templates().find(template_id);
  if (it == builtin_templates().end()) {
    std::string known;
    for (const auto& id : known_template_ids()) known += " " + id;
    throw TemplateError("unknown template '" + template_id + "'; known:" + known);
  }
  return it->second;
}

std::vector<Message> render_prompt(const std::string& template_id,
                                   const std::map<std::string, std::string>& slots,
                                   const std::filesystem::path& override_dir) {
  std::string text = template_text(template_id, override_dir);

  // Substitute {{slot}} placeholders; a placeholder without a slot is an error.
  std::string rendered;
  rendered.reserve(text.size());
  size_t pos = 0;
  while (pos < text.size()) {
    size_t open = text.find("{{", pos);
    if (open == std::string::npos) {
      rendered.append(text, pos, std::string::npos);
      break;
    }
    size_t close = text.find("}}", open + 2);
    if (close == std::string::npos) {
      throw TemplateError("template '" + template_id + "': unterminated placeholder");
    }
    rendered.append(text, pos, open - pos);
    std::string slot = text.substr(open + 2, close - open - 2);
    auto it = slots.find(slot);
    if (it == slots.end()) {
      throw TemplateError("template '" + template_id + "': missing slot '" + slot + "'");
    }
    rendered += it->second;
    pos = close + 2;
  }

  // Split on @@role lines.
  std::vector<Message> messages;
  std::istringstream in(rendered);
  std::string line;
  Message current;
  bool have_current = false;
  auto flush = [&] {
    if (have_current) {
      // trim one trailing newline block
      while (!current.content.empty() && current.content.back() == '\n') {
        current.content.pop_back();
      }
      messages.push_back(current);
    }
  };
  while (std::getline(in, line)) {
    if (line.rfind("@@", 0) == 0) {
      flush();
      current = Message{line.substr(2), ""};
      have_current = true;
      continue;
    }
    if (!have_current) {
      throw TemplateError("template '" + template_id + "': content before first @@role");
    }
    current.content += line;
    current.content += "\n";
  }
  flush();
  if (messages.empty()) {
    throw TemplateError("template '" + template_id + "': no messages");
  }
  return messages;
}

}  // namespace taxlogic::llm
