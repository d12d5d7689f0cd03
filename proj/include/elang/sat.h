// Propositional satisfiability backend for the deterministic fragment: no
// action with conflicting effects, no conflicting concurrent occurrences and
// acyclic ramifications. Within it every state has at most one successor and
// a bounded narrative compiles to CNF.

#ifndef ELANG_SAT_H_
#define ELANG_SAT_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "elang/grounder.h"
#include "elang/model.h"
#include "elang/query.h"

namespace elang {

struct FragmentViolation {
  enum class Kind { kNondeterministicAction, kConflictingConcurrency, kCyclicRamifications };
  Kind kind = Kind::kNondeterministicAction;
  std::string location;
};

std::string to_string(FragmentViolation::Kind kind);

struct FragmentReport {
  bool accepted = true;
  std::vector<FragmentViolation> violations;
};

// Conservative: effects conflict when one can reach the complement of the
// other through the ramification graph, ignoring the other body literals.
// Only actions that occur in the narrative are examined.
FragmentReport check_fragment(const GroundTheory& theory);

class FragmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// DIMACS style literals: variable v >= 1 as v or -v.
using Clause = std::vector<int>;

struct CnfInstance {
  int num_vars = 0;
  // fluent_var[t][f] is the variable of fluent f at time t.
  std::vector<std::vector<int>> fluent_var;
  // Descriptions of variables that are not fluent values, by variable id.
  std::vector<std::pair<int, std::string>> auxiliary;
  std::vector<Clause> clauses;
  // provenance[i] names the statement and time clause i comes from.
  std::vector<std::string> provenance;

  int var(FluentId f, std::uint32_t t) const { return fluent_var[t][f]; }
  int lit(GroundLiteral l, std::uint32_t t) const { return l.positive ? var(l.fluent, t) : -var(l.fluent, t); }
};

// Throws FragmentError when check_fragment rejects the theory.
CnfInstance compile(const GroundTheory& theory);

void write_dimacs(std::ostream& out, const CnfInstance& cnf);
void write_provenance(std::ostream& out, const CnfInstance& cnf);

struct SolveResult {
  enum class Status { kSat, kUnsat, kBudgetExceeded };
  Status status = Status::kUnsat;
  // model[v] for v in 1..num_vars; index 0 unused.
  std::vector<bool> model;
  std::size_t decisions = 0;
  std::size_t propagations = 0;
};

// Backtracking search with two-watched-literal unit propagation. Clauses may
// be added between solves; each solve takes its own assumptions.
class Solver {
 public:
  explicit Solver(int num_vars = 0);
  explicit Solver(const CnfInstance& cnf);

  int new_var();
  int num_vars() const { return num_vars_; }
  void add_clause(Clause c);

  // budget bounds decisions; 0 means unlimited.
  SolveResult solve(const std::vector<int>& assumptions = {}, std::size_t budget = 0);

 private:
  bool propagate();
  bool enqueue(int lit);
  int value(int lit) const;

  int num_vars_ = 0;
  std::vector<Clause> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<std::int8_t> assigns_{0};
  std::vector<int> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  bool empty_clause_ = false;
  std::vector<int> units_;
};

// Reads a model back as a trajectory over the theory's fluents.
Trajectory decode(const CnfInstance& cnf, const std::vector<bool>& model);

// The query answered by satisfiability. Stats count solver decisions as
// nodes. Throws FragmentError outside the fragment.
EntailmentResult sat_answer(const GroundTheory& theory, const Query& query, const QueryOptions& options = {});

}  // namespace elang

#endif  // ELANG_SAT_H_
