#include "elang/grounder.h"

#include <algorithm>
#include <set>

namespace elang {

void GroundTheory::reindex() {
  cprops_by_action.assign(action_names.size(), {});
  pprops_by_action.assign(action_names.size(), {});
  for (std::size_t i = 0; i < cprops.size(); ++i) cprops_by_action[cprops[i].action].push_back(i);
  for (std::size_t i = 0; i < pprops.size(); ++i) pprops_by_action[pprops[i].action].push_back(i);
  fluent_index.clear();
  action_index.clear();
  constant_index.clear();
  for (std::size_t i = 0; i < fluent_names.size(); ++i) fluent_index.emplace(fluent_names[i], i);
  for (std::size_t i = 0; i < action_names.size(); ++i) action_index.emplace(action_names[i], i);
  for (std::size_t i = 0; i < constant_names.size(); ++i) constant_index.emplace(constant_names[i], i);
}

std::optional<FluentId> GroundTheory::find_fluent(const std::string& name) const {
  auto it = fluent_index.find(name);
  if (it == fluent_index.end()) return std::nullopt;
  return it->second;
}

std::optional<ActionId> GroundTheory::find_action(const std::string& name) const {
  auto it = action_index.find(name);
  if (it == action_index.end()) return std::nullopt;
  return it->second;
}

std::optional<bool> GroundTheory::constant_value(const std::string& name) const {
  auto it = constant_index.find(name);
  if (it == constant_index.end()) return std::nullopt;
  return constant_values[it->second];
}

const std::vector<ActionId>& GroundTheory::actions_at(std::uint32_t t) const {
  static const std::vector<ActionId> kNone;
  auto it = occurrences.find(t);
  return it == occurrences.end() ? kNone : it->second;
}

std::vector<FluentId> GroundTheory::open_fluents() const {
  std::vector<bool> observed(num_fluents(), false);
  for (const auto& o : observations) {
    if (o.time.value == 0) observed[o.literal.fluent] = true;
  }
  std::vector<FluentId> out;
  for (FluentId f = 0; f < num_fluents(); ++f) {
    if (!observed[f]) out.push_back(f);
  }
  return out;
}

std::string GroundTheory::name(GroundLiteral l) const {
  return (l.positive ? "" : "neg ") + fluent_names[l.fluent];
}

GroundStats GroundTheory::stats() const {
  GroundStats s;
  s.fluents = fluent_names.size();
  s.constant_atoms = constant_names.size();
  s.constant_true = static_cast<std::size_t>(std::count(constant_values.begin(), constant_values.end(), true));
  s.actions = action_names.size();
  s.cprops = cprops.size();
  s.rprops = rprops.size();
  s.denials = static_cast<std::size_t>(
      std::count_if(rprops.begin(), rprops.end(), [](const GroundRProp& r) { return !r.head; }));
  s.pprops = pprops.size();
  for (const auto& [t, acts] : occurrences) s.occurrences += acts.size();
  s.observations = observations.size();
  for (const auto& c : cprops) s.condition_literals += c.condition.size();
  for (const auto& r : rprops) s.condition_literals += r.condition.size();
  for (const auto& p : pprops) s.condition_literals += p.condition.size();
  s.clauses_per_time = s.cprops + s.rprops + s.pprops + 2 * s.fluents;
  return s;
}

std::vector<std::pair<std::string, std::size_t>> report_stats(const GroundTheory& theory) {
  GroundStats s = theory.stats();
  return {
      {"fluents", s.fluents},
      {"constant_atoms", s.constant_atoms},
      {"constant_true", s.constant_true},
      {"actions", s.actions},
      {"cprops", s.cprops},
      {"rprops", s.rprops},
      {"denials", s.denials},
      {"pprops", s.pprops},
      {"occurrences", s.occurrences},
      {"observations", s.observations},
      {"condition_literals", s.condition_literals},
      {"clauses_per_time", s.clauses_per_time},
  };
}

std::uint32_t max_time(const DomainDescription& domain) {
  std::uint32_t m = 0;
  for (const auto& p : domain.propositions) {
    if (const auto* t = std::get_if<TProp>(&p)) m = std::max(m, t->time.value);
    if (const auto* h = std::get_if<HProp>(&p)) m = std::max(m, h->time.value);
  }
  return m;
}

namespace {

// Dense numbering of the ground instances of a family of declarations: each
// declaration owns a block of indices laid out in mixed radix over its
// argument sorts.
class AtomTable {
 public:
  struct Block {
    std::size_t offset;
    std::vector<std::size_t> radix;
  };

  void add(const std::string& name, const std::vector<std::string>& arg_sorts, const Signature& sig,
           std::vector<std::string>& names_out) {
    Block b{names_out.size(), {}};
    std::vector<const SortDecl*> sorts;
    std::size_t count = 1;
    for (const auto& s : arg_sorts) {
      sorts.push_back(sig.find_sort(s));
      b.radix.push_back(sorts.back()->constants.size());
      count *= b.radix.back();
    }
    std::vector<std::size_t> digits(sorts.size(), 0);
    for (std::size_t n = 0; n < count; ++n) {
      Atom a{name, {}};
      for (std::size_t k = 0; k < sorts.size(); ++k) a.args.push_back(Term::Constant(sorts[k]->constants[digits[k]]));
      names_out.push_back(to_string(a));
      for (std::size_t k = sorts.size(); k-- > 0;) {
        if (++digits[k] < b.radix[k]) break;
        digits[k] = 0;
      }
    }
    blocks_.emplace(name, std::move(b));
  }

  bool contains(const std::string& name) const { return blocks_.count(name) != 0; }

  std::size_t index(const std::string& name, const std::vector<std::size_t>& arg_ids) const {
    const Block& b = blocks_.at(name);
    std::size_t idx = 0;
    for (std::size_t k = 0; k < arg_ids.size(); ++k) idx = idx * b.radix[k] + arg_ids[k];
    return b.offset + idx;
  }

 private:
  std::unordered_map<std::string, Block> blocks_;
};

// A variable assignment: per variable name, the index of its value within its
// sort, plus the sort's constants for name lookup.
class Substitution {
 public:
  Substitution(const Signature& sig, const VariableSorts& vars) {
    for (const auto& [v, s] : vars) {
      names_.push_back(v);
      sorts_.push_back(sig.find_sort(s));
    }
    digits_.assign(names_.size(), 0);
  }

  // Advances to the next assignment; false after the last one.
  bool next() {
    for (std::size_t k = names_.size(); k-- > 0;) {
      if (++digits_[k] < sorts_[k]->constants.size()) return true;
      digits_[k] = 0;
    }
    return false;
  }

  const std::string& value(const std::string& var) const {
    for (std::size_t k = 0; k < names_.size(); ++k) {
      if (names_[k] == var) return sorts_[k]->constants[digits_[k]];
    }
    throw GroundingError("unbound variable " + var);
  }

 private:
  std::vector<std::string> names_;
  std::vector<const SortDecl*> sorts_;
  std::vector<std::size_t> digits_;
};

class Grounder {
 public:
  Grounder(const DomainDescription& domain, TimePoint horizon) : domain_(domain), sig_(domain.signature) {
    theory_.horizon = horizon;
    for (const auto& s : sig_.sorts) {
      for (std::size_t i = 0; i < s.constants.size(); ++i) constant_ids_[s.constants[i]] = i;
    }
    for (const auto& f : sig_.fluents) {
      if (f.is_constant) {
        constants_.add(f.name, f.arg_sorts, sig_, theory_.constant_names);
      } else {
        dynamic_.add(f.name, f.arg_sorts, sig_, theory_.fluent_names);
      }
    }
    for (const auto& a : sig_.actions) actions_.add(a.name, a.arg_sorts, sig_, theory_.action_names);
    theory_.constant_values.assign(theory_.constant_names.size(), false);
  }

  GroundTheory run() {
    close_constants();
    for (std::size_t i = 0; i < domain_.propositions.size(); ++i) {
      ground_dynamic(domain_.propositions[i]);
    }
    for (auto& [t, acts] : theory_.occurrences) {
      std::sort(acts.begin(), acts.end());
      acts.erase(std::unique(acts.begin(), acts.end()), acts.end());
    }
    theory_.reindex();
    return std::move(theory_);
  }

 private:
  struct Lit {
    bool constant;
    std::size_t id;
    bool positive;
  };

  std::vector<std::size_t> arg_ids(const Atom& a, const Substitution& sub) const {
    std::vector<std::size_t> ids;
    ids.reserve(a.args.size());
    for (const auto& t : a.args) ids.push_back(constant_ids_.at(t.is_variable() ? sub.value(t.name) : t.name));
    return ids;
  }

  Lit lit(const FluentLiteral& l, const Substitution& sub) const {
    if (constants_.contains(l.atom.name)) return {true, constants_.index(l.atom.name, arg_ids(l.atom, sub)), l.positive};
    return {false, dynamic_.index(l.atom.name, arg_ids(l.atom, sub)), l.positive};
  }

  ActionId action(const Atom& a, const Substitution& sub) const {
    return static_cast<ActionId>(actions_.index(a.name, arg_ids(a, sub)));
  }

  bool diseqs_hold(const Condition& c, const Substitution& sub) const {
    for (const auto& d : c.disequalities()) {
      const std::string& l = d.lhs.is_variable() ? sub.value(d.lhs.name) : d.lhs.name;
      const std::string& r = d.rhs.is_variable() ? sub.value(d.rhs.name) : d.rhs.name;
      if (l == r) return false;
    }
    return true;
  }

  bool holds(const Lit& l) const { return theory_.constant_values[l.id] == l.positive; }

  bool is_constant_atom(const Atom& a) const { return constants_.contains(a.name); }

  template <typename F>
  void for_each_instance(const Proposition& p, F&& f) const {
    std::string error;
    auto vars = infer_variable_sorts(sig_, p, &error);
    if (!vars) throw GroundingError("cannot ground " + to_string(p) + ": " + error);
    Substitution sub(sig_, *vars);
    do {
      f(sub);
    } while (sub.next());
  }

  // Least fixpoint of the time-0 constant facts under constant-only
  // r-propositions, followed by a check that every such constraint holds.
  void close_constants() {
    struct Rule {
      std::optional<Lit> head;
      std::vector<Lit> body;
      std::string text;
    };
    std::vector<Rule> rules;
    for (const auto& p : domain_.propositions) {
      if (const auto* t = std::get_if<TProp>(&p)) {
        if (t->time.value != 0 || !t->literal.positive || !is_constant_atom(t->literal.atom)) continue;
        for_each_instance(p, [&](const Substitution& sub) {
          theory_.constant_values[lit(t->literal, sub).id] = true;
        });
      } else if (const auto* r = std::get_if<RProp>(&p)) {
        bool all_constant = !r->head || is_constant_atom(r->head->atom);
        for (const auto& l : r->condition.literals()) all_constant = all_constant && is_constant_atom(l.atom);
        if (!all_constant) continue;
        for_each_instance(p, [&](const Substitution& sub) {
          if (!diseqs_hold(r->condition, sub)) return;
          Rule rule;
          if (r->head) rule.head = lit(*r->head, sub);
          for (const auto& l : r->condition.literals()) rule.body.push_back(lit(l, sub));
          rule.text = to_string(p);
          rules.push_back(std::move(rule));
        });
      }
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& rule : rules) {
        if (!rule.head || !rule.head->positive || theory_.constant_values[rule.head->id]) continue;
        if (std::all_of(rule.body.begin(), rule.body.end(), [&](const Lit& l) { return holds(l); })) {
          theory_.constant_values[rule.head->id] = true;
          changed = true;
        }
      }
    }
    for (const auto& rule : rules) {
      if (!std::all_of(rule.body.begin(), rule.body.end(), [&](const Lit& l) { return holds(l); })) continue;
      if (!rule.head || !holds(*rule.head)) {
        throw GroundingError("closed-world closure of constant fluents violates " + rule.text);
      }
    }
    // Observations on constants must agree with the closure at every time.
    for (const auto& p : domain_.propositions) {
      const auto* t = std::get_if<TProp>(&p);
      if (!t || !is_constant_atom(t->literal.atom)) continue;
      for_each_instance(p, [&](const Substitution& sub) {
        Lit l = lit(t->literal, sub);
        if (!holds(l)) {
          throw GroundingError("observation " + to_string(p) + " conflicts with the closed-world value of " +
                               theory_.constant_names[l.id]);
        }
      });
    }
  }

  // Evaluates constant literals away. Returns false if some constant literal
  // is false; the dynamic residue goes to out.
  bool residue(const Condition& c, const Substitution& sub, GroundCondition& out) const {
    for (const auto& fl : c.literals()) {
      Lit l = lit(fl, sub);
      if (l.constant) {
        if (!holds(l)) return false;
      } else {
        GroundLiteral g{static_cast<FluentId>(l.id), l.positive};
        if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
      }
    }
    return true;
  }

  static bool contradictory(const GroundCondition& c) {
    for (const auto& l : c) {
      if (std::find(c.begin(), c.end(), ~l) != c.end()) return true;
    }
    return false;
  }

  void ground_dynamic(const Proposition& p) {
    std::visit(
        [&](const auto& prop) {
          using T = std::decay_t<decltype(prop)>;
          if constexpr (std::is_same_v<T, TProp>) {
            if (is_constant_atom(prop.literal.atom)) return;
            check_time(prop.time, p);
            for_each_instance(p, [&](const Substitution& sub) {
              Lit l = lit(prop.literal, sub);
              Observation o{{static_cast<FluentId>(l.id), l.positive}, prop.time};
              push_unique(theory_.observations, seen_observations_, o);
            });
          } else if constexpr (std::is_same_v<T, HProp>) {
            check_time(prop.time, p);
            for_each_instance(p, [&](const Substitution& sub) {
              theory_.occurrences[prop.time.value].push_back(action(prop.action, sub));
            });
          } else if constexpr (std::is_same_v<T, CProp>) {
            for_each_instance(p, [&](const Substitution& sub) {
              if (!diseqs_hold(prop.condition, sub)) return;
              GroundCProp g;
              g.action = action(prop.action, sub);
              Lit e = lit(prop.effect(), sub);
              g.effect = {static_cast<FluentId>(e.id), e.positive};
              if (!residue(prop.condition, sub, g.condition) || contradictory(g.condition)) return;
              std::sort(g.condition.begin(), g.condition.end());
              push_unique(theory_.cprops, seen_cprops_, std::move(g));
            });
          } else if constexpr (std::is_same_v<T, RProp>) {
            bool all_constant = !prop.head || is_constant_atom(prop.head->atom);
            for (const auto& l : prop.condition.literals()) all_constant = all_constant && is_constant_atom(l.atom);
            if (all_constant) return;
            for_each_instance(p, [&](const Substitution& sub) {
              if (!diseqs_hold(prop.condition, sub)) return;
              GroundRProp g;
              if (!residue(prop.condition, sub, g.condition) || contradictory(g.condition)) return;
              if (prop.head) {
                Lit h = lit(*prop.head, sub);
                if (h.constant) {
                  // A satisfied constant head makes the instance vacuous; a
                  // false one leaves a denial on the dynamic residue.
                  if (holds(h)) return;
                } else {
                  g.head = GroundLiteral{static_cast<FluentId>(h.id), h.positive};
                }
              }
              std::sort(g.condition.begin(), g.condition.end());
              push_unique(theory_.rprops, seen_rprops_, std::move(g));
            });
          } else {
            for_each_instance(p, [&](const Substitution& sub) {
              if (!diseqs_hold(prop.condition, sub)) return;
              GroundPProp g;
              g.action = action(prop.action, sub);
              g.impossible = !residue(prop.condition, sub, g.condition) || contradictory(g.condition);
              if (g.impossible) g.condition.clear();
              std::sort(g.condition.begin(), g.condition.end());
              push_unique(theory_.pprops, seen_pprops_, std::move(g));
            });
          }
        },
        p);
  }

  void check_time(TimePoint t, const Proposition& p) const {
    if (t > theory_.horizon) {
      throw GroundingError(to_string(p) + " lies beyond the horizon " + std::to_string(theory_.horizon.value));
    }
  }

  template <typename T>
  static void push_unique(std::vector<T>& v, std::set<T>& seen, T x) {
    if (seen.insert(x).second) v.push_back(std::move(x));
  }

  const DomainDescription& domain_;
  const Signature& sig_;
  GroundTheory theory_;
  std::unordered_map<std::string, std::size_t> constant_ids_;
  AtomTable constants_;
  AtomTable dynamic_;
  AtomTable actions_;
  std::set<GroundCProp> seen_cprops_;
  std::set<GroundRProp> seen_rprops_;
  std::set<GroundPProp> seen_pprops_;
  std::set<Observation> seen_observations_;
};

}  // namespace

GroundTheory ground(const DomainDescription& domain, TimePoint horizon) {
  auto diagnostics = validate(domain);
  if (has_errors(diagnostics)) {
    for (const auto& d : diagnostics) {
      if (d.severity == Diagnostic::Severity::kError) throw GroundingError("invalid domain: " + d.message);
    }
  }
  return Grounder(domain, horizon).run();
}

void dump(const GroundTheory& theory, std::ostream& out) {
  auto cond = [&](const GroundCondition& c) {
    std::string s = "{ ";
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? ", " : "") + theory.name(c[i]);
    return s + (c.empty() ? "}" : " }");
  };
  out << "% horizon " << theory.horizon.value << "\n";
  for (std::size_t i = 0; i < theory.constant_names.size(); ++i) {
    if (theory.constant_values[i]) out << theory.constant_names[i] << " holds-at 0.\n";
  }
  for (const auto& c : theory.cprops) {
    out << theory.action_names[c.action] << (c.effect.positive ? " initiates " : " terminates ")
        << theory.fluent_names[c.effect.fluent];
    if (!c.condition.empty()) out << " when " << cond(c.condition);
    out << ".\n";
  }
  for (const auto& r : theory.rprops) {
    out << (r.head ? theory.name(*r.head) : std::string("false")) << " whenever " << cond(r.condition) << ".\n";
  }
  for (const auto& p : theory.pprops) {
    out << theory.action_names[p.action] << " needs " << (p.impossible ? "{ false }" : cond(p.condition)) << ".\n";
  }
  for (const auto& [t, acts] : theory.occurrences) {
    for (ActionId a : acts) out << theory.action_names[a] << " happens-at " << t << ".\n";
  }
  for (const auto& o : theory.observations) {
    out << theory.name(o.literal) << " holds-at " << o.time.value << ".\n";
  }
}

}  // namespace elang
