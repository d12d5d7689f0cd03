// Models and entailment over a ground theory.
//
// A model (trajectory) assigns a state to every time point 0..horizon such
// that consecutive states form a transition under the occurrences of that
// time, every observation holds, and every action occurrence finds the
// conditions of its p-propositions true.

#ifndef ELANG_QUERY_H_
#define ELANG_QUERY_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "elang/grounder.h"
#include "elang/model.h"
#include "elang/transition.h"

namespace elang {

enum class Answer { kTrue, kFalse, kInconsistent, kBudgetExceeded };

std::string to_string(Answer a);
std::optional<Answer> parse_answer(const std::string& text);

struct Trajectory {
  std::vector<State> states;
  // steps[t] is the transition taken from time t to t + 1.
  std::vector<EffectSet> steps;
  bool operator==(const Trajectory&) const = default;
};

struct QueryStats {
  std::size_t nodes = 0;
  std::size_t initial_states = 0;
  std::size_t models = 0;
  std::size_t pruned = 0;
  std::size_t components = 0;
  std::size_t slice_fluents = 0;
  SearchCounters search;
  double seconds = 0;
};

struct EntailmentResult {
  Answer answer = Answer::kFalse;
  // A model satisfying the goals (credulous true) or violating one
  // (skeptical false). Fluents are those of the theory that was searched.
  std::optional<Trajectory> witness;
  // Names of the fluents of the searched theory, indexing witness states.
  std::vector<std::string> fluent_names;
  QueryStats stats;
};

struct QueryOptions {
  // Upper bound on search nodes; 0 means unlimited.
  std::size_t budget = 0;
  bool slice = false;
};

// A goal resolved against a ground theory.
struct GroundGoal {
  enum class Kind { kDynamic, kConstantTrue, kConstantFalse, kUnknown };
  Kind kind = Kind::kDynamic;
  GroundLiteral literal;
  TimePoint time;
  std::string atom;
};

// Throws std::invalid_argument when a goal lies beyond the theory's horizon.
std::vector<GroundGoal> resolve_goals(const GroundTheory& theory, const Query& query);

// (max time in domain and query) + 1, or the query's own horizon.
TimePoint default_horizon(const DomainDescription& domain, const Query& query);

// Streams every model; the callback returns false to stop. Returns the number
// of models delivered.
std::size_t enumerate_models(const GroundTheory& theory, const std::function<bool(const Trajectory&)>& sink);

EntailmentResult answer(const GroundTheory& theory, const Query& query, const QueryOptions& options = {});

// The sub-theory over the dependency component(s) of the query fluents.
// Fluents are joined when they share an r-proposition or when one is the
// effect of a c-proposition whose condition mentions the other.
GroundTheory relevance_slice(const GroundTheory& theory, const Query& query);

// Splits the theory into its independent components.
std::vector<GroundTheory> components(const GroundTheory& theory);

// answer is kTrue iff some model exists, kFalse otherwise.
EntailmentResult check_consistency(const GroundTheory& theory, const QueryOptions& options = {});

// Structured text record of a result; see docs/records.md.
void write_record(std::ostream& out, const Query& query, TimePoint horizon, const EntailmentResult& result);

}  // namespace elang

#endif  // ELANG_QUERY_H_
