#pragma once

#include <filesystem>

#include "taxlogic/corpus.hpp"
#include "taxlogic/gateway.hpp"

namespace taxlogic::fixture {

/// Writes a complete, deterministic corpus tree in the SARA v2 layout the
/// loader expects: 9 statute sections (text + gold Prolog), 376 cases, of
/// which 100 are numeric tax cases (tax_case_1..tax_case_100). Gold dollar
/// answers are computed by a straight-line C++ oracle, independent of the
/// logic engine that must later reproduce them; their marginals pin the two
/// baseline rows (5 gold-zero cases; substantial gold answers summing to
/// $8,113,555, so an always-$0 predictor costs $16,227.11 per case).
void write_corpus(const std::filesystem::path& root);

/// The model spec replayed experiments must use with the synthetic store
/// (the digest covers these sampling parameters).
llm::ModelSpec fixture_model_spec();

/// Synthesizes a deterministic transcript store covering every numeric case
/// for Direct, Parsed, and FewShot at sample indices 0 and 1 (lexical
/// exemplar ranking, k = 5). Prompts are built through the same message
/// builders the runtime uses, so replay digests match exactly.
void write_transcripts(const corpus::Corpus& corpus, const std::filesystem::path& store_path);

}  // namespace taxlogic::fixture
