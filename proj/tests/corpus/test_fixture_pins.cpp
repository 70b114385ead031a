// Pins the committed fixtures: regenerating the corpus and the transcript
// store must reproduce the repository copies byte for byte. A change to the
// generator is fine, but it must be deliberate — regenerate and recommit.

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "taxlogic/fixture.hpp"
#include "taxlogic/gateway.hpp"

using namespace taxlogic;
namespace fs = std::filesystem;

#ifndef TAXLOGIC_SOURCE_DIR
#define TAXLOGIC_SOURCE_DIR "."
#endif

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(bool(in), "cannot open ", p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("committed corpus fixture matches a fresh regeneration") {
  fs::path committed = fs::path(TAXLOGIC_SOURCE_DIR) / "tests" / "fixtures" / "corpus";
  REQUIRE(fs::is_directory(committed));

  fs::path fresh = fs::temp_directory_path() / "taxlogic_pin_corpus";
  fs::remove_all(fresh);
  fixture::write_corpus(fresh);

  size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(committed)) {
    if (!entry.is_regular_file()) continue;
    fs::path rel = fs::relative(entry.path(), committed);
    CHECK_MESSAGE(slurp(entry.path()) == slurp(fresh / rel), rel.string());
    ++compared;
  }
  CHECK(compared == 376 + 9 * 2 + 1 + 1);  // cases + section texts/programs + init + VERSION

  // And nothing extra in the regenerated tree.
  size_t fresh_count = 0;
  for (const auto& entry : fs::recursive_directory_iterator(fresh)) {
    if (entry.is_regular_file()) ++fresh_count;
  }
  CHECK(fresh_count == compared);
}

TEST_CASE("committed transcript store matches a fresh regeneration") {
  fs::path committed =
      fs::path(TAXLOGIC_SOURCE_DIR) / "tests" / "fixtures" / "transcripts.jsonl";
  REQUIRE(fs::exists(committed));

  fs::path corpus_root = fs::path(TAXLOGIC_SOURCE_DIR) / "tests" / "fixtures" / "corpus";
  corpus::Corpus corpus = corpus::load_corpus(corpus_root);
  fs::path fresh = fs::temp_directory_path() / "taxlogic_pin_transcripts.jsonl";
  fixture::write_transcripts(corpus, fresh);

  CHECK(llm::TranscriptStore(committed).file_sha256() ==
        llm::TranscriptStore(fresh).file_sha256());
}
