// Successor states of a ground state under a set of concurrent actions.
//
// A target s' is a successor of s under actions A when some applied subset of
// the direct candidates (c-proposition effects whose condition holds in s)
// satisfies all of:
//   (a) the ramification closure of applied, evaluated in s', is consistent;
//   (b) every changed literal is true in s';
//   (c) every fluent that differs between s and s' has its s' value changed;
//   (d) s' satisfies every r-proposition, denials included;
//   (e) every candidate left out of applied has its complement changed.

#ifndef ELANG_TRANSITION_H_
#define ELANG_TRANSITION_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "elang/grounder.h"

namespace elang {

class State {
 public:
  State() = default;
  explicit State(std::size_t num_fluents, bool value = false) : values_(num_fluents, value) {}
  explicit State(std::vector<bool> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  bool operator[](FluentId f) const { return values_[f]; }
  void set(FluentId f, bool value) { values_[f] = value; }
  void apply(GroundLiteral l) { values_[l.fluent] = l.positive; }

  bool holds(GroundLiteral l) const { return values_[l.fluent] == l.positive; }
  bool holds(const GroundCondition& c) const {
    for (const auto& l : c) {
      if (!holds(l)) return false;
    }
    return true;
  }

  // The literal of f that is true here.
  GroundLiteral literal(FluentId f) const { return {f, values_[f]}; }

  const std::vector<bool>& values() const { return values_; }
  std::size_t hash() const { return std::hash<std::vector<bool>>()(values_); }

  auto operator<=>(const State&) const = default;

 private:
  std::vector<bool> values_;
};

struct StateHash {
  std::size_t operator()(const State& s) const { return s.hash(); }
};

// Both sets sorted.
struct EffectSet {
  std::vector<GroundLiteral> applied;
  std::vector<GroundLiteral> changed;
  bool operator==(const EffectSet&) const = default;
};

struct Transition {
  State source;
  std::vector<ActionId> actions;
  State target;
  EffectSet effects;
  bool operator==(const Transition&) const = default;
};

struct SearchCounters {
  std::size_t calls = 0;
  std::size_t applied_sets = 0;
  std::size_t nodes = 0;
  std::size_t leaves = 0;
  std::size_t closures_failed = 0;

  SearchCounters& operator+=(const SearchCounters& o) {
    calls += o.calls;
    applied_sets += o.applied_sets;
    nodes += o.nodes;
    leaves += o.leaves;
    closures_failed += o.closures_failed;
    return *this;
  }
};

bool satisfies_constraints(const GroundTheory& theory, const State& s);

// Sorted, duplicate-free effects of the laws of `actions` whose conditions
// hold in s.
std::vector<GroundLiteral> direct_candidates(const GroundTheory& theory, const State& s,
                                             const std::vector<ActionId>& actions);

// Least set containing applied and the head of every non-denial r-proposition
// whose body is true in target and meets the set. nullopt if it acquires a
// complementary pair.
std::optional<EffectSet> ramification_closure(const GroundTheory& theory, const std::vector<GroundLiteral>& applied,
                                              const State& target);

// Reusable successor search over one theory (the theory must outlive it).
class SuccessorEngine {
 public:
  explicit SuccessorEngine(const GroundTheory& theory);
  ~SuccessorEngine();
  SuccessorEngine(const SuccessorEngine&) = delete;
  SuccessorEngine& operator=(const SuccessorEngine&) = delete;

  // Sorted by target. For a target reachable from several applied sets the
  // least one is reported. trace, when given, gets one line per branch.
  std::vector<Transition> successors(const State& s, const std::vector<ActionId>& actions,
                                     SearchCounters* counters = nullptr, std::ostream* trace = nullptr) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<Transition> successor_states(const GroundTheory& theory, const State& s,
                                         const std::vector<ActionId>& actions, std::ostream* trace = nullptr);

class OracleBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checks the definition against every one of the 2^n targets and every
// applied subset. Throws OracleBoundError when n exceeds max_fluents.
std::vector<Transition> brute_force_successors(const GroundTheory& theory, const State& s,
                                               const std::vector<ActionId>& actions, std::size_t max_fluents = 16);

std::string to_string(const GroundTheory& theory, const State& s);
std::string to_string(const GroundTheory& theory, const std::vector<GroundLiteral>& literals);

}  // namespace elang

#endif  // ELANG_TRANSITION_H_
