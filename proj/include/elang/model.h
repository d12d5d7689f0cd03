// Abstract syntax and semantic vocabulary of Language E domain descriptions.

#ifndef ELANG_MODEL_H_
#define ELANG_MODEL_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace elang {

// A time point; only the natural numbers are supported.
struct TimePoint {
  std::uint32_t value = 0;

  auto operator<=>(const TimePoint&) const = default;
};

// An argument term: either a sorted variable (uppercase identifier) or an
// object constant.
struct Term {
  enum class Kind { kConstant, kVariable };

  Kind kind = Kind::kConstant;
  std::string name;

  static Term Constant(std::string n) { return {Kind::kConstant, std::move(n)}; }
  static Term Variable(std::string n) { return {Kind::kVariable, std::move(n)}; }

  bool is_variable() const { return kind == Kind::kVariable; }

  auto operator<=>(const Term&) const = default;
};

// A fluent or action symbol applied to argument terms.
struct Atom {
  std::string name;
  std::vector<Term> args;

  bool is_ground() const;

  auto operator<=>(const Atom&) const = default;
};

struct FluentLiteral {
  Atom atom;
  bool positive = true;

  auto operator<=>(const FluentLiteral&) const = default;
};

FluentLiteral negate(const FluentLiteral& l);

struct Disequality {
  Term lhs;
  Term rhs;

  auto operator<=>(const Disequality&) const = default;
};

// A set of fluent literals plus built-in disequalities. Insertion order is
// kept for printing; duplicates are dropped.
class Condition {
 public:
  Condition() = default;
  Condition(std::vector<FluentLiteral> literals, std::vector<Disequality> disequalities = {});

  void add(FluentLiteral l);
  void add(Disequality d);

  const std::vector<FluentLiteral>& literals() const { return literals_; }
  const std::vector<Disequality>& disequalities() const { return disequalities_; }
  bool empty() const { return literals_.empty() && disequalities_.empty(); }

  // True iff some fluent appears both positively and negatively.
  bool contradictory() const;

  bool operator==(const Condition&) const = default;

 private:
  std::vector<FluentLiteral> literals_;
  std::vector<Disequality> disequalities_;
};

// L holds-at T
struct TProp {
  FluentLiteral literal;
  TimePoint time;
  bool operator==(const TProp&) const = default;
};

// A happens-at T
struct HProp {
  Atom action;
  TimePoint time;
  bool operator==(const HProp&) const = default;
};

// A initiates|terminates F when C
struct CProp {
  enum class Kind { kInitiates, kTerminates };
  Atom action;
  Kind kind = Kind::kInitiates;
  Atom fluent;
  Condition condition;

  FluentLiteral effect() const { return {fluent, kind == Kind::kInitiates}; }
  bool operator==(const CProp&) const = default;
};

// L whenever C; a missing head is falsum (a denial).
struct RProp {
  std::optional<FluentLiteral> head;
  Condition condition;

  bool is_denial() const { return !head.has_value(); }
  bool operator==(const RProp&) const = default;
};

// A needs C
struct PProp {
  Atom action;
  Condition condition;
  bool operator==(const PProp&) const = default;
};

using Proposition = std::variant<TProp, HProp, CProp, RProp, PProp>;

struct SortDecl {
  std::string name;
  std::vector<std::string> constants;
  bool operator==(const SortDecl&) const = default;
};

struct FluentDecl {
  std::string name;
  std::vector<std::string> arg_sorts;
  bool is_constant = false;
  bool operator==(const FluentDecl&) const = default;
};

struct ActionDecl {
  std::string name;
  std::vector<std::string> arg_sorts;
  bool operator==(const ActionDecl&) const = default;
};

// Declarations in source order.
struct Signature {
  std::vector<SortDecl> sorts;
  std::vector<FluentDecl> fluents;
  std::vector<ActionDecl> actions;

  const SortDecl* find_sort(std::string_view name) const;
  const FluentDecl* find_fluent(std::string_view name) const;
  const ActionDecl* find_action(std::string_view name) const;
  // The sort an object constant belongs to, if any.
  const SortDecl* sort_of_constant(std::string_view constant) const;

  bool operator==(const Signature&) const = default;
};

struct DomainDescription {
  Signature signature;
  std::vector<Proposition> propositions;

  bool operator==(const DomainDescription&) const = default;
};

// A conjunction of ground t-propositions to be checked credulously or
// skeptically, optionally over an explicit horizon.
struct Query {
  enum class Mode { kCredulous, kSkeptical };
  Mode mode = Mode::kCredulous;
  std::vector<TProp> goals;
  std::optional<TimePoint> horizon;

  bool operator==(const Query&) const = default;
};

std::string to_string(Query::Mode mode);
std::string to_string(const Query& q);

// Byte range of a construct within one input file.
struct SourceSpan {
  std::uint32_t file = 0;
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  std::uint32_t line = 1;
  std::uint32_t column = 1;

  bool operator==(const SourceSpan&) const = default;
};

struct Diagnostic {
  enum class Severity { kWarning, kError };
  enum class Code {
    kNameClash,
    kUnknownSort,
    kEmptySort,
    kDuplicateConstant,
    kUnknownFluent,
    kUnknownAction,
    kArity,
    kSortMismatch,
    kUnsortedVariable,
    kConstantEffect,
    kContradictoryCondition,
    kDuplicateProposition,
  };

  Severity severity = Severity::kError;
  Code code = Code::kNameClash;
  std::string message;
  // Index of the offending proposition, if the problem is in one.
  std::optional<std::size_t> proposition;
  std::optional<SourceSpan> span;
};

// Checks the well-formedness invariants of a domain. Spans, when given, are
// indexed like domain.propositions and are attached to diagnostics.
std::vector<Diagnostic> validate(const DomainDescription& domain,
                                 const std::vector<SourceSpan>* spans = nullptr);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

// Maps each variable of a proposition to its sort. Typing comes from
// declarations: a variable takes the sort of the argument position it fills.
// Returns std::nullopt and sets *error if a variable has no or conflicting
// sorts.
using VariableSorts = std::vector<std::pair<std::string, std::string>>;
std::optional<VariableSorts> infer_variable_sorts(const Signature& sig, const Proposition& p,
                                                  std::string* error = nullptr);

std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(const FluentLiteral& l);
std::string to_string(const Condition& c);
std::string to_string(const Proposition& p);
std::string to_string(Diagnostic::Code code);

}  // namespace elang

#endif  // ELANG_MODEL_H_
