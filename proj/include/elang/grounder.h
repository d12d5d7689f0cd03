// Sort expansion of a domain into a propositional theory.
//
// Constant fluents are resolved once: their time-0 facts are closed under the
// constant-only r-propositions (closed world assumption) and every literal on
// them is evaluated away. What remains mentions only the dynamic ground fluents,
// numbered densely from 0 in declaration order.

#ifndef ELANG_GROUNDER_H_
#define ELANG_GROUNDER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "elang/model.h"

namespace elang {

using FluentId = std::uint32_t;
using ActionId = std::uint32_t;

struct GroundLiteral {
  FluentId fluent = 0;
  bool positive = true;

  GroundLiteral operator~() const { return {fluent, !positive}; }
  auto operator<=>(const GroundLiteral&) const = default;
};

using GroundCondition = std::vector<GroundLiteral>;

struct GroundCProp {
  ActionId action = 0;
  GroundLiteral effect;
  GroundCondition condition;
  auto operator<=>(const GroundCProp&) const = default;
};

// head == nullopt is a denial.
struct GroundRProp {
  std::optional<GroundLiteral> head;
  GroundCondition condition;
  auto operator<=>(const GroundRProp&) const = default;
};

// An impossible p-proposition (a constant condition literal is false, or the
// condition is contradictory) forbids every occurrence of its action.
struct GroundPProp {
  ActionId action = 0;
  GroundCondition condition;
  bool impossible = false;
  auto operator<=>(const GroundPProp&) const = default;
};

struct Observation {
  GroundLiteral literal;
  TimePoint time;
  auto operator<=>(const Observation&) const = default;
};

struct GroundStats {
  std::size_t fluents = 0;
  std::size_t constant_atoms = 0;
  std::size_t constant_true = 0;
  std::size_t actions = 0;
  std::size_t cprops = 0;
  std::size_t rprops = 0;
  std::size_t denials = 0;
  std::size_t pprops = 0;
  std::size_t occurrences = 0;
  std::size_t observations = 0;
  std::size_t condition_literals = 0;
  // One clause per ground law plus two explanation-closure axioms per fluent.
  std::size_t clauses_per_time = 0;

  bool operator==(const GroundStats&) const = default;
};

class GroundingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GroundTheory {
  std::vector<std::string> fluent_names;
  std::vector<std::string> action_names;
  std::vector<std::string> constant_names;
  std::vector<bool> constant_values;

  std::vector<GroundCProp> cprops;
  std::vector<GroundRProp> rprops;
  std::vector<GroundPProp> pprops;
  // Sorted, duplicate-free action ids per time point.
  std::map<std::uint32_t, std::vector<ActionId>> occurrences;
  std::vector<Observation> observations;
  TimePoint horizon;

  // Derived indices; call reindex() after editing the fields above.
  std::vector<std::vector<std::size_t>> cprops_by_action;
  std::vector<std::vector<std::size_t>> pprops_by_action;
  std::unordered_map<std::string, FluentId> fluent_index;
  std::unordered_map<std::string, ActionId> action_index;
  std::unordered_map<std::string, std::size_t> constant_index;

  void reindex();

  std::size_t num_fluents() const { return fluent_names.size(); }
  std::optional<FluentId> find_fluent(const std::string& name) const;
  std::optional<ActionId> find_action(const std::string& name) const;
  std::optional<bool> constant_value(const std::string& name) const;

  const std::vector<ActionId>& actions_at(std::uint32_t t) const;

  // Dynamic fluents without a time-0 observation; their initial value is
  // assumed during model search.
  std::vector<FluentId> open_fluents() const;

  std::string name(GroundLiteral l) const;
  GroundStats stats() const;
};

// Instantiates every proposition over the sort extensions. Requires horizon to
// be at least every time point the domain mentions.
GroundTheory ground(const DomainDescription& domain, TimePoint horizon);

// Largest time point mentioned by a t- or h-proposition.
std::uint32_t max_time(const DomainDescription& domain);

std::vector<std::pair<std::string, std::size_t>> report_stats(const GroundTheory& theory);

// One ground statement per line in the surface syntax.
void dump(const GroundTheory& theory, std::ostream& out);

}  // namespace elang

#endif  // ELANG_GROUNDER_H_
