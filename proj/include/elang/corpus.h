// The shipped domains: bulb, the Zoo in three representations, scenarios and
// the golden conclusions regression suite.

#ifndef ELANG_CORPUS_H_
#define ELANG_CORPUS_H_

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "elang/model.h"
#include "elang/parser.h"
#include "elang/query.h"

namespace elang {

// Directory holding the corpus files: $ELANG_CORPUS_DIR if set, else the
// source tree's corpus/.
std::string corpus_dir();
std::string read_file(const std::string& path);
// Reads a file by corpus-relative name.
std::string read_corpus_file(const std::string& name);

// Parses the named corpus files as one domain.
ParsedUnit load_files(const std::vector<std::string>& names);

struct ZooOptions {
  // 3..15 positions. Positions p1..p(n-1) are split into cages of three
  // consecutive positions, fully connected inside; p(n) is the exterior.
  std::size_t positions = 6;
  // When nonzero, a hub p1 with this many leaf neighbours, two animals and
  // no gates.
  std::size_t star_leaves = 0;
};

// The generated landscape file: sorts, constant facts and the terrain
// dependent constraint.
std::string zoo_world(const ZooOptions& options = {});

enum class ZooVariant { kDirect, kIndirect, kDual };

std::string to_string(ZooVariant v);
std::optional<ZooVariant> parse_variant(const std::string& text);

// File names making up one Zoo representation, world first.
std::vector<std::string> zoo_files(ZooVariant v);

// Zoo domain over a generated world plus extra statement texts.
DomainDescription zoo_domain(ZooVariant v, const ZooOptions& options, const std::vector<std::string>& extra = {});

// Bracketed sections of `key = value` lines; `#` starts a comment line.
struct KeyValueBlock {
  std::string name;
  std::size_t line = 0;
  std::map<std::string, std::string> values;

  const std::string& at(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback = "") const;
};

std::vector<KeyValueBlock> parse_key_values(const std::string& text);

struct GoldenCase {
  std::string name;
  std::vector<std::string> files;
  std::string query;
  Answer expected = Answer::kTrue;
  // "stated" for conclusions given with the domain, "derived" for values
  // computed by the brute-force oracles.
  std::string origin;
  std::string note;
};

std::vector<GoldenCase> parse_golden(const std::string& text);

struct CorpusEntry {
  std::string name;
  std::vector<std::string> files;
  DomainDescription domain;
  std::vector<GoldenCase> cases;
};

// Every golden case grouped by its file list. Throws on any parse, validation
// or grounding failure.
std::vector<CorpusEntry> load_corpus();

struct GoldenOutcome {
  GoldenCase golden;
  EntailmentResult result;
  bool passed = false;
};

std::vector<GoldenOutcome> run_golden(const QueryOptions& options = {});

// One line per case; failures add the expected and actual answers and the
// witness trajectory.
void write_report(std::ostream& out, const std::vector<GoldenOutcome>& outcomes);

}  // namespace elang

#endif  // ELANG_CORPUS_H_
