#pragma once

#include <optional>
#include <string>

namespace taxlogic {

enum class AbstainReason {
  NoProgram,         // model output contained no extractable program
  EngineError,       // program failed to parse/execute into the format
  Timeout,           // execution exceeded the 10 s budget
  NoMarker,          // direct answer had no final answer marker
  NoConsensus,       // self-consistency legs disagreed
  TransportFailure,  // retries exhausted; infrastructure fault, not model error
};

const char* abstain_reason_name(AbstainReason reason);
std::optional<AbstainReason> parse_abstain_reason(const std::string& name);

/// A dollar answer or an abstention. Values are kept unrounded; rounding
/// happens only at comparison time.
struct Prediction {
  bool answered = false;
  double value = 0.0;
  AbstainReason reason = AbstainReason::NoConsensus;

  static Prediction answer(double v) {
    Prediction p;
    p.answered = true;
    p.value = v;
    return p;
  }
  static Prediction abstain(AbstainReason r) {
    Prediction p;
    p.answered = false;
    p.reason = r;
    return p;
  }
};

}  // namespace taxlogic
