#include "elang/model.h"

#include <algorithm>
#include <map>
#include <set>

namespace elang {

bool Atom::is_ground() const {
  return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_variable(); });
}

FluentLiteral negate(const FluentLiteral& l) { return {l.atom, !l.positive}; }

Condition::Condition(std::vector<FluentLiteral> literals, std::vector<Disequality> disequalities) {
  for (auto& l : literals) add(std::move(l));
  for (auto& d : disequalities) add(std::move(d));
}

void Condition::add(FluentLiteral l) {
  if (std::find(literals_.begin(), literals_.end(), l) == literals_.end()) {
    literals_.push_back(std::move(l));
  }
}

void Condition::add(Disequality d) {
  if (std::find(disequalities_.begin(), disequalities_.end(), d) == disequalities_.end()) {
    disequalities_.push_back(std::move(d));
  }
}

bool Condition::contradictory() const {
  for (const auto& l : literals_) {
    if (std::find(literals_.begin(), literals_.end(), negate(l)) != literals_.end()) return true;
  }
  return false;
}

const SortDecl* Signature::find_sort(std::string_view name) const {
  auto it = std::find_if(sorts.begin(), sorts.end(), [&](const SortDecl& s) { return s.name == name; });
  return it == sorts.end() ? nullptr : &*it;
}

const FluentDecl* Signature::find_fluent(std::string_view name) const {
  auto it = std::find_if(fluents.begin(), fluents.end(), [&](const FluentDecl& f) { return f.name == name; });
  return it == fluents.end() ? nullptr : &*it;
}

const ActionDecl* Signature::find_action(std::string_view name) const {
  auto it = std::find_if(actions.begin(), actions.end(), [&](const ActionDecl& a) { return a.name == name; });
  return it == actions.end() ? nullptr : &*it;
}

const SortDecl* Signature::sort_of_constant(std::string_view constant) const {
  for (const auto& s : sorts) {
    if (std::find(s.constants.begin(), s.constants.end(), constant) != s.constants.end()) return &s;
  }
  return nullptr;
}

namespace {

// Collects the atoms of a proposition together with the declared argument
// sorts of their symbols. Atoms with undeclared symbols or wrong arity are
// skipped; validate reports them separately.
struct TypedAtom {
  const Atom* atom;
  const std::vector<std::string>* sorts;
};

std::vector<TypedAtom> typed_atoms(const Signature& sig, const Proposition& p) {
  std::vector<TypedAtom> out;
  auto fluent = [&](const Atom& a) {
    if (const auto* d = sig.find_fluent(a.name); d && d->arg_sorts.size() == a.args.size()) {
      out.push_back({&a, &d->arg_sorts});
    }
  };
  auto action = [&](const Atom& a) {
    if (const auto* d = sig.find_action(a.name); d && d->arg_sorts.size() == a.args.size()) {
      out.push_back({&a, &d->arg_sorts});
    }
  };
  auto condition = [&](const Condition& c) {
    for (const auto& l : c.literals()) fluent(l.atom);
  };
  std::visit(
      [&](const auto& prop) {
        using T = std::decay_t<decltype(prop)>;
        if constexpr (std::is_same_v<T, TProp>) {
          fluent(prop.literal.atom);
        } else if constexpr (std::is_same_v<T, HProp>) {
          action(prop.action);
        } else if constexpr (std::is_same_v<T, CProp>) {
          action(prop.action);
          fluent(prop.fluent);
          condition(prop.condition);
        } else if constexpr (std::is_same_v<T, RProp>) {
          if (prop.head) fluent(prop.head->atom);
          condition(prop.condition);
        } else {
          action(prop.action);
          condition(prop.condition);
        }
      },
      p);
  return out;
}

const Condition* condition_of(const Proposition& p) {
  if (const auto* c = std::get_if<CProp>(&p)) return &c->condition;
  if (const auto* r = std::get_if<RProp>(&p)) return &r->condition;
  if (const auto* n = std::get_if<PProp>(&p)) return &n->condition;
  return nullptr;
}

}  // namespace

std::optional<VariableSorts> infer_variable_sorts(const Signature& sig, const Proposition& p,
                                                  std::string* error) {
  VariableSorts result;
  auto bind = [&](const std::string& var, const std::string& sort) -> bool {
    for (const auto& [v, s] : result) {
      if (v == var) {
        if (s != sort) {
          if (error) *error = "variable " + var + " used with sorts " + s + " and " + sort;
          return false;
        }
        return true;
      }
    }
    result.emplace_back(var, sort);
    return true;
  };
  for (const auto& ta : typed_atoms(sig, p)) {
    for (std::size_t i = 0; i < ta.atom->args.size(); ++i) {
      const Term& t = ta.atom->args[i];
      if (t.is_variable() && !bind(t.name, (*ta.sorts)[i])) return std::nullopt;
    }
  }
  if (const auto* c = condition_of(p)) {
    for (const auto& d : c->disequalities()) {
      for (const Term* t : {&d.lhs, &d.rhs}) {
        if (!t->is_variable()) continue;
        bool known = std::any_of(result.begin(), result.end(), [&](const auto& vs) { return vs.first == t->name; });
        if (!known) {
          if (error) *error = "variable " + t->name + " occurs only in a disequality";
          return std::nullopt;
        }
      }
    }
  }
  return result;
}

std::vector<Diagnostic> validate(const DomainDescription& domain, const std::vector<SourceSpan>* spans) {
  std::vector<Diagnostic> out;
  const Signature& sig = domain.signature;
  auto report = [&](Diagnostic::Severity sev, Diagnostic::Code code, std::string msg,
                    std::optional<std::size_t> prop = std::nullopt) {
    Diagnostic d{sev, code, std::move(msg), prop, std::nullopt};
    if (prop && spans && *prop < spans->size()) d.span = (*spans)[*prop];
    out.push_back(std::move(d));
  };
  constexpr auto kError = Diagnostic::Severity::kError;
  constexpr auto kWarning = Diagnostic::Severity::kWarning;

  // Symbol namespaces are pairwise disjoint.
  std::map<std::string, std::string> symbols;
  auto declare = [&](const std::string& name, const std::string& what) {
    auto [it, fresh] = symbols.emplace(name, what);
    if (!fresh) {
      report(kError, Diagnostic::Code::kNameClash, what + " '" + name + "' clashes with " + it->second);
    }
  };
  for (const auto& s : sig.sorts) declare(s.name, "sort");
  for (const auto& f : sig.fluents) declare(f.name, "fluent");
  for (const auto& a : sig.actions) declare(a.name, "action");

  std::set<std::string> constants;
  for (const auto& s : sig.sorts) {
    if (s.constants.empty()) {
      report(kError, Diagnostic::Code::kEmptySort, "sort '" + s.name + "' has no object constants");
    }
    for (const auto& c : s.constants) {
      if (!constants.insert(c).second) {
        report(kError, Diagnostic::Code::kDuplicateConstant, "object constant '" + c + "' declared twice");
      }
    }
  }
  auto check_sorts = [&](const std::string& owner, const std::vector<std::string>& arg_sorts) {
    for (const auto& s : arg_sorts) {
      if (!sig.find_sort(s)) {
        report(kError, Diagnostic::Code::kUnknownSort, "'" + owner + "' refers to undeclared sort '" + s + "'");
      }
    }
  };
  for (const auto& f : sig.fluents) check_sorts(f.name, f.arg_sorts);
  for (const auto& a : sig.actions) check_sorts(a.name, a.arg_sorts);

  for (std::size_t i = 0; i < domain.propositions.size(); ++i) {
    const Proposition& p = domain.propositions[i];
    auto check_atom = [&](const Atom& atom, bool is_action) {
      const std::vector<std::string>* arg_sorts = nullptr;
      if (is_action) {
        if (const auto* d = sig.find_action(atom.name)) arg_sorts = &d->arg_sorts;
      } else if (const auto* d = sig.find_fluent(atom.name)) {
        arg_sorts = &d->arg_sorts;
      }
      if (!arg_sorts) {
        report(kError, is_action ? Diagnostic::Code::kUnknownAction : Diagnostic::Code::kUnknownFluent,
               std::string(is_action ? "action" : "fluent") + " '" + atom.name + "' is not declared", i);
        return;
      }
      if (arg_sorts->size() != atom.args.size()) {
        report(kError, Diagnostic::Code::kArity,
               "'" + atom.name + "' expects " + std::to_string(arg_sorts->size()) + " arguments, got " +
                   std::to_string(atom.args.size()),
               i);
        return;
      }
      for (std::size_t k = 0; k < atom.args.size(); ++k) {
        const Term& t = atom.args[k];
        if (t.is_variable()) continue;
        const SortDecl* s = sig.sort_of_constant(t.name);
        if (!s || s->name != (*arg_sorts)[k]) {
          report(kError, Diagnostic::Code::kSortMismatch,
                 "argument '" + t.name + "' of '" + atom.name + "' is not of sort '" + (*arg_sorts)[k] + "'", i);
        }
      }
    };
    auto check_condition = [&](const Condition& c) {
      for (const auto& l : c.literals()) check_atom(l.atom, false);
      for (const auto& d : c.disequalities()) {
        for (const Term* t : {&d.lhs, &d.rhs}) {
          if (!t->is_variable() && !sig.sort_of_constant(t->name)) {
            report(kError, Diagnostic::Code::kSortMismatch, "'" + t->name + "' is not an object constant", i);
          }
        }
      }
      if (c.contradictory()) {
        report(kWarning, Diagnostic::Code::kContradictoryCondition, "condition " + to_string(c) + " is unsatisfiable",
               i);
      }
    };
    std::visit(
        [&](const auto& prop) {
          using T = std::decay_t<decltype(prop)>;
          if constexpr (std::is_same_v<T, TProp>) {
            check_atom(prop.literal.atom, false);
          } else if constexpr (std::is_same_v<T, HProp>) {
            check_atom(prop.action, true);
          } else if constexpr (std::is_same_v<T, CProp>) {
            check_atom(prop.action, true);
            check_atom(prop.fluent, false);
            if (const auto* d = sig.find_fluent(prop.fluent.name); d && d->is_constant) {
              report(kError, Diagnostic::Code::kConstantEffect,
                     "constant fluent '" + prop.fluent.name + "' cannot be the effect of an action", i);
            }
            check_condition(prop.condition);
          } else if constexpr (std::is_same_v<T, RProp>) {
            if (prop.head) check_atom(prop.head->atom, false);
            check_condition(prop.condition);
          } else {
            check_atom(prop.action, true);
            check_condition(prop.condition);
          }
        },
        p);
    std::string error;
    if (!infer_variable_sorts(sig, p, &error)) {
      report(kError,
             error.find("only in") != std::string::npos ? Diagnostic::Code::kUnsortedVariable
                                                        : Diagnostic::Code::kSortMismatch,
             error, i);
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (domain.propositions[j] == p) {
        report(kWarning, Diagnostic::Code::kDuplicateProposition,
               "duplicate of proposition " + std::to_string(j) + ": " + to_string(p), i);
        break;
      }
    }
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::kError; });
}

std::string to_string(const Term& t) { return t.name; }

std::string to_string(const Atom& a) {
  std::string s = a.name;
  if (!a.args.empty()) {
    s += '(';
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (i) s += ',';
      s += a.args[i].name;
    }
    s += ')';
  }
  return s;
}

std::string to_string(const FluentLiteral& l) { return (l.positive ? "" : "neg ") + to_string(l.atom); }

std::string to_string(const Condition& c) {
  std::string s = "{ ";
  bool first = true;
  for (const auto& l : c.literals()) {
    if (!first) s += ", ";
    s += to_string(l);
    first = false;
  }
  for (const auto& d : c.disequalities()) {
    if (!first) s += ", ";
    s += d.lhs.name + " != " + d.rhs.name;
    first = false;
  }
  s += first ? "}" : " }";
  return s;
}

std::string to_string(const Proposition& p) {
  return std::visit(
      [](const auto& prop) -> std::string {
        using T = std::decay_t<decltype(prop)>;
        if constexpr (std::is_same_v<T, TProp>) {
          return to_string(prop.literal) + " holds-at " + std::to_string(prop.time.value) + ".";
        } else if constexpr (std::is_same_v<T, HProp>) {
          return to_string(prop.action) + " happens-at " + std::to_string(prop.time.value) + ".";
        } else if constexpr (std::is_same_v<T, CProp>) {
          std::string s = to_string(prop.action) +
                          (prop.kind == CProp::Kind::kInitiates ? " initiates " : " terminates ") +
                          to_string(prop.fluent);
          if (!prop.condition.empty()) s += " when " + to_string(prop.condition);
          return s + ".";
        } else if constexpr (std::is_same_v<T, RProp>) {
          return (prop.head ? to_string(*prop.head) : std::string("false")) + " whenever " +
                 to_string(prop.condition) + ".";
        } else {
          return to_string(prop.action) + " needs " + to_string(prop.condition) + ".";
        }
      },
      p);
}

std::string to_string(Query::Mode mode) {
  return mode == Query::Mode::kCredulous ? "credulous" : "skeptical";
}

std::string to_string(const Query& q) {
  std::string s = to_string(q.mode) + " {";
  for (std::size_t i = 0; i < q.goals.size(); ++i) {
    s += i ? ", " : " ";
    s += to_string(q.goals[i].literal) + " holds-at " + std::to_string(q.goals[i].time.value);
  }
  s += q.goals.empty() ? "}" : " }";
  if (q.horizon) s += " horizon " + std::to_string(q.horizon->value);
  return s;
}

std::string to_string(Diagnostic::Code code) {
  switch (code) {
    case Diagnostic::Code::kNameClash: return "name-clash";
    case Diagnostic::Code::kUnknownSort: return "unknown-sort";
    case Diagnostic::Code::kEmptySort: return "empty-sort";
    case Diagnostic::Code::kDuplicateConstant: return "duplicate-constant";
    case Diagnostic::Code::kUnknownFluent: return "unknown-fluent";
    case Diagnostic::Code::kUnknownAction: return "unknown-action";
    case Diagnostic::Code::kArity: return "arity";
    case Diagnostic::Code::kSortMismatch: return "sort-mismatch";
    case Diagnostic::Code::kUnsortedVariable: return "unsorted-variable";
    case Diagnostic::Code::kConstantEffect: return "constant-effect";
    case Diagnostic::Code::kContradictoryCondition: return "contradictory-condition";
    case Diagnostic::Code::kDuplicateProposition: return "duplicate-proposition";
  }
  return "unknown";
}

}  // namespace elang
