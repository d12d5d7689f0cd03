#include "elang/transition.h"

#include <algorithm>
#include <map>

#include "elang/clause_search.h"

namespace elang {

namespace {

std::size_t slot(GroundLiteral l) { return 2 * static_cast<std::size_t>(l.fluent) + (l.positive ? 1 : 0); }

bool has_complementary_pair(const std::vector<GroundLiteral>& sorted) {
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].fluent == sorted[i - 1].fluent) return true;
  }
  return false;
}

void sort_unique(std::vector<GroundLiteral>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void keep_least(std::map<State, EffectSet>& found, State target, EffectSet effects) {
  auto it = found.find(target);
  if (it == found.end()) {
    found.emplace(std::move(target), std::move(effects));
  } else if (effects.applied < it->second.applied) {
    it->second = std::move(effects);
  }
}

std::vector<Transition> to_transitions(const State& s, const std::vector<ActionId>& actions,
                                       std::map<State, EffectSet>& found) {
  std::vector<Transition> out;
  out.reserve(found.size());
  for (auto& [target, effects] : found) out.push_back({s, actions, target, std::move(effects)});
  return out;
}

}  // namespace

bool satisfies_constraints(const GroundTheory& theory, const State& s) {
  for (const auto& r : theory.rprops) {
    if (s.holds(r.condition) && (!r.head || !s.holds(*r.head))) return false;
  }
  return true;
}

std::vector<GroundLiteral> direct_candidates(const GroundTheory& theory, const State& s,
                                             const std::vector<ActionId>& actions) {
  std::vector<GroundLiteral> out;
  for (ActionId a : actions) {
    for (std::size_t i : theory.cprops_by_action[a]) {
      const auto& c = theory.cprops[i];
      if (s.holds(c.condition)) out.push_back(c.effect);
    }
  }
  sort_unique(out);
  return out;
}

std::optional<EffectSet> ramification_closure(const GroundTheory& theory, const std::vector<GroundLiteral>& applied,
                                              const State& target) {
  EffectSet e;
  e.applied = applied;
  sort_unique(e.applied);
  if (has_complementary_pair(e.applied)) return std::nullopt;
  std::vector<char> in(2 * theory.num_fluents(), 0);
  for (const auto& l : e.applied) in[slot(l)] = 1;
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& r : theory.rprops) {
      if (!r.head || in[slot(*r.head)] || !target.holds(r.condition)) continue;
      bool triggered = std::any_of(r.condition.begin(), r.condition.end(), [&](GroundLiteral b) { return in[slot(b)]; });
      if (!triggered) continue;
      if (in[slot(~*r.head)]) return std::nullopt;
      in[slot(*r.head)] = 1;
      grew = true;
    }
  }
  for (FluentId f = 0; f < theory.num_fluents(); ++f) {
    if (in[slot({f, false})]) e.changed.push_back({f, false});
    if (in[slot({f, true})]) e.changed.push_back({f, true});
  }
  return e;
}

struct SuccessorEngine::Impl {
  const GroundTheory& theory;
  std::size_t n;
  // Non-denial r-propositions indexed by body literal and by head.
  std::vector<std::vector<std::size_t>> by_body;
  std::vector<std::vector<std::size_t>> by_head;
  mutable ClauseSearch search;
  mutable std::vector<std::uint64_t> dropped_;
  mutable std::vector<std::uint64_t> seen_;
  mutable std::uint64_t drop_round_ = 0;
  mutable std::uint64_t seen_round_ = 0;

  explicit Impl(const GroundTheory& t) : theory(t), n(t.num_fluents()), by_body(2 * n), by_head(2 * n), search(n),
        dropped_(t.rprops.size(), 0), seen_(t.rprops.size(), 0) {
    for (std::size_t i = 0; i < t.rprops.size(); ++i) {
      const auto& r = t.rprops[i];
      if (!r.head) continue;
      by_head[slot(*r.head)].push_back(i);
      for (const auto& b : r.condition) by_body[slot(b)].push_back(i);
    }
    search.add_rprops(t.rprops);
  }

  // Literals reachable from `from` through rules not dropped in this round.
  // Every rule met on the way is appended to touched.
  void close(const std::vector<GroundLiteral>& from, std::vector<char>& in, std::vector<std::size_t>& touched) const {
    std::fill(in.begin(), in.end(), 0);
    touched.clear();
    ++seen_round_;
    std::vector<GroundLiteral> work;
    for (const auto& l : from) {
      if (!in[slot(l)]) {
        in[slot(l)] = 1;
        work.push_back(l);
      }
    }
    while (!work.empty()) {
      GroundLiteral l = work.back();
      work.pop_back();
      for (std::size_t i : by_body[slot(l)]) {
        if (dropped_[i] == drop_round_) continue;
        if (seen_[i] != seen_round_) {
          seen_[i] = seen_round_;
          touched.push_back(i);
        }
        GroundLiteral h = *theory.rprops[i].head;
        if (!in[slot(h)]) {
          in[slot(h)] = 1;
          work.push_back(h);
        }
      }
    }
  }

  // Over-approximates the changed set of any successor built from applied:
  // rules are dropped while their bodies need a literal that is false in s
  // and cannot be brought about.
  std::vector<char> reach(const std::vector<GroundLiteral>& applied, const State& s) const {
    ++drop_round_;
    std::vector<char> in(2 * n, 0);
    std::vector<std::size_t> touched;
    for (;;) {
      close(applied, in, touched);
      bool shrunk = false;
      for (std::size_t i : touched) {
        for (const auto& b : theory.rprops[i].condition) {
          if (!s.holds(b) && !in[slot(b)]) {
            dropped_[i] = drop_round_;
            shrunk = true;
            break;
          }
        }
      }
      if (!shrunk) return in;
    }
  }

  std::optional<EffectSet> closure(const std::vector<GroundLiteral>& applied, const State& target) const {
    std::vector<char> in(2 * n, 0);
    std::vector<GroundLiteral> work;
    for (const auto& l : applied) {
      in[slot(l)] = 1;
      work.push_back(l);
    }
    while (!work.empty()) {
      GroundLiteral l = work.back();
      work.pop_back();
      for (std::size_t i : by_body[slot(l)]) {
        const auto& r = theory.rprops[i];
        GroundLiteral h = *r.head;
        if (in[slot(h)] || !target.holds(r.condition)) continue;
        if (in[slot(~h)]) return std::nullopt;
        in[slot(h)] = 1;
        work.push_back(h);
      }
    }
    EffectSet e;
    e.applied = applied;
    for (FluentId f = 0; f < n; ++f) {
      if (in[slot({f, false})]) e.changed.push_back({f, false});
      if (in[slot({f, true})]) e.changed.push_back({f, true});
    }
    return e;
  }

  void run_applied(const State& s, const std::vector<GroundLiteral>& candidates,
                   const std::vector<GroundLiteral>& applied, std::map<State, EffectSet>& found,
                   SearchCounters& counters, std::ostream* trace) const {
    ++counters.applied_sets;
    std::vector<char> reachable = reach(applied, s);
    std::vector<GroundLiteral> omitted;
    for (const auto& d : candidates) {
      if (std::binary_search(applied.begin(), applied.end(), d)) continue;
      if (!reachable[slot(~d)]) {
        if (trace) *trace << "applied " << to_string(theory, applied) << " pruned: cannot defeat " << theory.name(d) << "\n";
        return;
      }
      omitted.push_back(d);
    }
    std::vector<char> in_applied(2 * n, 0);
    for (const auto& l : applied) in_applied[slot(l)] = 1;

    ClauseSearch::Assignment start(n);
    std::vector<bool> prefer(n);
    std::vector<FluentId> order;
    for (FluentId f = 0; f < n; ++f) {
      prefer[f] = s[f];
      start[f] = s[f] ? 1 : 0;
      if (reachable[slot({f, !s[f]})]) {
        start[f] = -1;
        order.push_back(f);
      }
    }
    for (const auto& l : applied) start[l.fluent] = l.positive ? 1 : 0;

    auto accept = [&](FluentId f, bool value, const ClauseSearch::Assignment& a) {
      if (value == s[f]) return true;
      GroundLiteral l{f, value};
      if (in_applied[slot(l)]) return true;
      if (!reachable[slot(l)]) return false;
      for (std::size_t i : by_head[slot(l)]) {
        bool falsified = false;
        for (const auto& b : theory.rprops[i].condition) {
          int v = a[b.fluent];
          if (v >= 0 && (v == 1) != b.positive) {
            falsified = true;
            break;
          }
        }
        if (!falsified) return true;
      }
      return false;
    };
    auto leaf = [&](const ClauseSearch::Assignment& a) {
      ++counters.leaves;
      State target(n);
      for (FluentId f = 0; f < n; ++f) target.set(f, a[f] == 1);
      auto e = closure(applied, target);
      if (!e) {
        ++counters.closures_failed;
        return true;
      }
      std::vector<char> in(2 * n, 0);
      for (const auto& l : e->changed) {
        if (!target.holds(l)) return true;
        in[slot(l)] = 1;
      }
      for (FluentId f = 0; f < n; ++f) {
        if (target[f] != s[f] && !in[slot(target.literal(f))]) return true;
      }
      for (const auto& d : omitted) {
        if (!in[slot(~d)]) return true;
      }
      if (trace) {
        *trace << "applied " << to_string(theory, applied) << " changed " << to_string(theory, e->changed)
               << " target " << to_string(theory, target) << "\n";
      }
      keep_least(found, std::move(target), std::move(*e));
      return true;
    };
    search.enumerate(std::move(start), order, prefer, accept, leaf, &counters.nodes);
  }
};

SuccessorEngine::SuccessorEngine(const GroundTheory& theory) : impl_(std::make_unique<Impl>(theory)) {}
SuccessorEngine::~SuccessorEngine() = default;

std::vector<Transition> SuccessorEngine::successors(const State& s, const std::vector<ActionId>& actions,
                                                    SearchCounters* counters, std::ostream* trace) const {
  SearchCounters local;
  SearchCounters& c = counters ? *counters : local;
  ++c.calls;
  const GroundTheory& theory = impl_->theory;
  std::vector<GroundLiteral> candidates = direct_candidates(theory, s, actions);
  std::map<State, EffectSet> found;
  if (candidates.empty()) {
    if (satisfies_constraints(theory, s)) found.emplace(s, EffectSet{});
    return to_transitions(s, actions, found);
  }
  // A candidate can be left out only if its complement may be brought about.
  std::vector<char> reachable = impl_->reach(candidates, s);
  std::vector<GroundLiteral> fixed;
  std::vector<GroundLiteral> optional;
  for (const auto& d : candidates) (reachable[slot(~d)] ? optional : fixed).push_back(d);
  if (optional.size() >= 30) throw std::runtime_error("too many conflicting direct effects");
  // reach is monotone in its seeds, so a literal outside every applied set
  // can only join the changed set as the head of a rule whose body fits in
  // s plus reach(candidates).
  std::vector<char> derivable(reachable.size(), 0);
  for (const auto& r : theory.rprops) {
    if (!r.head) continue;
    bool fits = std::all_of(r.condition.begin(), r.condition.end(),
                            [&](GroundLiteral b) { return s.holds(b) || reachable[slot(b)]; });
    if (fits) derivable[slot(*r.head)] = 1;
  }
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << optional.size()); ++mask) {
    std::vector<GroundLiteral> applied = fixed;
    for (std::size_t k = 0; k < optional.size(); ++k) {
      if (mask >> k & 1) applied.push_back(optional[k]);
    }
    std::sort(applied.begin(), applied.end());
    if (has_complementary_pair(applied)) continue;
    bool defeatable = true;
    for (std::size_t k = 0; k < optional.size() && defeatable; ++k) {
      GroundLiteral c = ~optional[k];
      if (mask >> k & 1 || derivable[slot(c)]) continue;
      defeatable = std::binary_search(applied.begin(), applied.end(), c);
    }
    if (!defeatable) continue;
    impl_->run_applied(s, candidates, applied, found, c, trace);
  }
  return to_transitions(s, actions, found);
}

std::vector<Transition> successor_states(const GroundTheory& theory, const State& s,
                                         const std::vector<ActionId>& actions, std::ostream* trace) {
  return SuccessorEngine(theory).successors(s, actions, nullptr, trace);
}

std::vector<Transition> brute_force_successors(const GroundTheory& theory, const State& s,
                                               const std::vector<ActionId>& actions, std::size_t max_fluents) {
  const std::size_t n = theory.num_fluents();
  if (n > max_fluents) {
    throw OracleBoundError("oracle bound exceeded: " + std::to_string(n) + " fluents > " + std::to_string(max_fluents));
  }
  std::vector<GroundLiteral> candidates;
  for (const auto& c : theory.cprops) {
    if (std::find(actions.begin(), actions.end(), c.action) == actions.end()) continue;
    bool holds = true;
    for (const auto& l : c.condition) holds = holds && s[l.fluent] == l.positive;
    if (holds && std::find(candidates.begin(), candidates.end(), c.effect) == candidates.end()) {
      candidates.push_back(c.effect);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  auto is_true = [](const State& st, GroundLiteral l) { return st[l.fluent] == l.positive; };
  auto contains = [](const std::vector<GroundLiteral>& v, GroundLiteral l) {
    return std::find(v.begin(), v.end(), l) != v.end();
  };

  std::map<State, EffectSet> found;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    State target(n);
    for (FluentId f = 0; f < n; ++f) target.set(f, bits >> f & 1);
    // (d)
    bool consistent = true;
    for (const auto& r : theory.rprops) {
      bool body = true;
      for (const auto& l : r.condition) body = body && is_true(target, l);
      if (body && (!r.head || !is_true(target, *r.head))) consistent = false;
    }
    if (!consistent) continue;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << candidates.size()); ++mask) {
      std::vector<GroundLiteral> applied;
      for (std::size_t k = 0; k < candidates.size(); ++k) {
        if (mask >> k & 1) applied.push_back(candidates[k]);
      }
      // (a)
      std::vector<GroundLiteral> changed = applied;
      bool grew = true;
      while (grew) {
        grew = false;
        for (const auto& r : theory.rprops) {
          if (!r.head || contains(changed, *r.head)) continue;
          bool body = true;
          bool triggered = false;
          for (const auto& l : r.condition) {
            body = body && is_true(target, l);
            triggered = triggered || contains(changed, l);
          }
          if (body && triggered) {
            changed.push_back(*r.head);
            grew = true;
          }
        }
      }
      bool ok = true;
      for (const auto& l : changed) ok = ok && !contains(changed, ~l);
      // (b)
      for (const auto& l : changed) ok = ok && is_true(target, l);
      // (c)
      for (FluentId f = 0; f < n && ok; ++f) {
        if (target[f] != s[f] && !contains(changed, {f, target[f]})) ok = false;
      }
      // (e)
      for (const auto& d : candidates) {
        if (!contains(applied, d) && !contains(changed, ~d)) ok = false;
      }
      if (!ok) continue;
      std::sort(changed.begin(), changed.end());
      keep_least(found, target, EffectSet{applied, changed});
    }
  }
  return to_transitions(s, actions, found);
}

std::string to_string(const GroundTheory& theory, const State& s) {
  std::string out = "{";
  bool first = true;
  for (FluentId f = 0; f < s.size(); ++f) {
    if (!s[f]) continue;
    out += first ? " " : ", ";
    out += theory.fluent_names[f];
    first = false;
  }
  return out + (first ? "}" : " }");
}

std::string to_string(const GroundTheory& theory, const std::vector<GroundLiteral>& literals) {
  std::string out = "{";
  for (std::size_t i = 0; i < literals.size(); ++i) out += (i ? ", " : " ") + theory.name(literals[i]);
  return out + (literals.empty() ? "}" : " }");
}

}  // namespace elang
