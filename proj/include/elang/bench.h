// Experiment harness: timing tables over scenario completeness, irrelevant
// occurrences, effect-law representation and terrain size.

#ifndef ELANG_BENCH_H_
#define ELANG_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "elang/corpus.h"
#include "elang/grounder.h"
#include "elang/model.h"
#include "elang/query.h"

namespace elang {

enum class Family { kCompleteness, kIrrelevance, kRepresentation, kScaling };
enum class Backend { kEngine, kSat };

std::string to_string(Family f);
std::string to_string(Backend b);

struct ExperimentSpec {
  std::string id;
  Family family = Family::kCompleteness;
  // Domain and scenario files; relative names are looked up next to the spec
  // file first, then in the corpus.
  std::vector<std::string> domain;
  std::vector<std::string> scenario;
  std::vector<std::string> queries;
  // Enrichment levels (completeness) or irrelevant occurrence counts
  // (irrelevance).
  std::vector<std::size_t> levels{0};
  // Representation family: Zoo variants compared. Scaling: the one variant.
  std::vector<ZooVariant> variants{ZooVariant::kDual};
  std::vector<std::size_t> positions{6};
  // Enrichment probes as `literal holds-at T` goals; empty means every open
  // fluent at time 0.
  std::vector<TProp> probes;
  std::uint32_t horizon = 0;
  std::size_t repetitions = 5;
  Backend backend = Backend::kEngine;
  std::size_t budget = 0;
  bool slice = false;
  std::string base_dir;
};

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bracketed `[id]` sections of `key = value` lines. Queries are separated by
// `;`, list values by whitespace.
std::vector<ExperimentSpec> parse_experiments(const std::string& text, const std::string& base_dir = "");

struct ResultRow {
  std::string experiment;
  Family family = Family::kCompleteness;
  std::string knob;
  std::string value;
  std::string query;
  std::string answer;
  double median = 0;
  double min = 0;
  double max = 0;
  std::size_t nodes = 0;
  std::size_t initial_states = 0;
  std::size_t slice_fluents = 0;
  std::size_t fluents = 0;
  std::size_t clauses_per_time = 0;
  double ground_seconds = 0;
  // "budget" for budget-exceeded rows, "unstable" when repetitions disagree.
  std::string flag;

  bool operator==(const ResultRow&) const = default;
};

struct ResultTable {
  std::string fingerprint;
  std::vector<ResultRow> rows;
};

// Machine, compiler and artifact version.
std::string environment_fingerprint();

ResultTable run_experiment(const ExperimentSpec& spec, std::ostream* records = nullptr);

// Adds k occurrences of actions whose relevance slice is disjoint from the
// query's, at times within the horizon, keeping the theory consistent.
// Throws std::invalid_argument when no such action exists.
DomainDescription inject_irrelevant(const DomainDescription& scenario, const GroundTheory& theory, const Query& query,
                                    std::size_t k);

// Adds as observations the first `level` probes (earliest time first) whose
// value is a skeptical conclusion. Throws std::invalid_argument on an
// inconsistent theory.
DomainDescription enrich_scenario(const DomainDescription& scenario, const GroundTheory& theory, std::size_t level,
                                  const std::vector<TProp>& probes = {});

void write_tsv(std::ostream& out, const ResultTable& table);
ResultTable read_tsv(std::istream& in);

// Sum over queries of the median seconds of rows whose knob value matches.
double total_median(const ResultTable& table, const std::string& value);

}  // namespace elang

#endif  // ELANG_BENCH_H_
