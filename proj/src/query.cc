#include "elang/query.h"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "elang/clause_search.h"

namespace elang {

std::string to_string(Answer a) {
  switch (a) {
    case Answer::kTrue: return "true";
    case Answer::kFalse: return "false";
    case Answer::kInconsistent: return "domain-inconsistent";
    case Answer::kBudgetExceeded: return "budget-exceeded";
  }
  return "?";
}

std::optional<Answer> parse_answer(const std::string& text) {
  for (Answer a : {Answer::kTrue, Answer::kFalse, Answer::kInconsistent, Answer::kBudgetExceeded}) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

std::vector<GroundGoal> resolve_goals(const GroundTheory& theory, const Query& query) {
  std::vector<GroundGoal> out;
  for (const auto& g : query.goals) {
    GroundGoal r;
    r.time = g.time;
    r.atom = to_string(g.literal.atom);
    if (g.time > theory.horizon) {
      throw std::invalid_argument("goal " + to_string(g.literal) + " holds-at " + std::to_string(g.time.value) +
                                  " lies beyond the horizon " + std::to_string(theory.horizon.value));
    }
    const std::string& name = r.atom;
    if (auto f = theory.find_fluent(name)) {
      r.kind = GroundGoal::Kind::kDynamic;
      r.literal = {*f, g.literal.positive};
    } else if (auto c = theory.constant_value(name)) {
      r.kind = *c == g.literal.positive ? GroundGoal::Kind::kConstantTrue : GroundGoal::Kind::kConstantFalse;
    } else {
      r.kind = GroundGoal::Kind::kUnknown;
      r.literal.positive = g.literal.positive;
    }
    out.push_back(r);
  }
  return out;
}

TimePoint default_horizon(const DomainDescription& domain, const Query& query) {
  if (query.horizon) return *query.horizon;
  std::uint32_t m = max_time(domain);
  for (const auto& g : query.goals) m = std::max(m, g.time.value);
  return TimePoint{m + 1};
}

namespace {

struct NodeKey {
  State state;
  bool flag;
  bool operator==(const NodeKey&) const = default;
};

struct NodeKeyHash {
  std::size_t operator()(const NodeKey& k) const { return k.state.hash() * 2 + k.flag; }
};

class BudgetExceeded {};

// Time-indexed views of a theory's scenario.
struct Scenario {
  std::uint32_t horizon;
  std::vector<std::vector<GroundLiteral>> observed;
  // Conjunction of the p-proposition conditions of the occurrences at t.
  std::vector<std::vector<GroundLiteral>> required;
  std::vector<bool> impossible;
  // First time with an occurrence, or the horizon.
  std::uint32_t first_event;

  explicit Scenario(const GroundTheory& th) : horizon(th.horizon.value) {
    observed.resize(horizon + 1);
    required.resize(horizon + 1);
    impossible.assign(horizon + 1, false);
    first_event = horizon;
    for (const auto& o : th.observations) observed[o.time.value].push_back(o.literal);
    for (const auto& [t, acts] : th.occurrences) {
      if (acts.empty() || t > horizon) continue;
      first_event = std::min(first_event, t);
      for (ActionId a : acts) {
        for (std::size_t i : th.pprops_by_action[a]) {
          const auto& p = th.pprops[i];
          if (p.impossible) impossible[t] = true;
          required[t].insert(required[t].end(), p.condition.begin(), p.condition.end());
        }
      }
    }
  }

  bool holds_at(const State& s, std::uint32_t t) const {
    if (impossible[t]) return false;
    for (const auto& l : observed[t]) {
      if (!s.holds(l)) return false;
    }
    for (const auto& l : required[t]) {
      if (!s.holds(l)) return false;
    }
    return true;
  }
};

// Calls sink(state) for every time-0 state consistent with the constraints
// and with every observation and precondition up to the first occurrence
// (the state cannot change before then). Open fluents are decided in
// declaration order, false first. sink returns false to stop.
template <typename Sink>
bool initial_states(const GroundTheory& th, const Scenario& sc, bool through_first_event, std::size_t* nodes,
                    Sink&& sink) {
  const std::size_t n = th.num_fluents();
  ClauseSearch search(n);
  search.add_rprops(th.rprops);
  ClauseSearch::Assignment start(n, -1);
  std::vector<GroundLiteral> units = sc.observed[0];
  if (through_first_event) {
    if (sc.impossible[sc.first_event]) return true;
    for (std::uint32_t t = 1; t <= sc.first_event; ++t) {
      units.insert(units.end(), sc.observed[t].begin(), sc.observed[t].end());
    }
    const auto& req = sc.required[sc.first_event];
    units.insert(units.end(), req.begin(), req.end());
  }
  for (const auto& l : units) {
    std::int8_t v = l.positive ? 1 : 0;
    if (start[l.fluent] >= 0 && start[l.fluent] != v) return true;
    start[l.fluent] = v;
  }
  std::vector<FluentId> order;
  for (FluentId f = 0; f < n; ++f) {
    if (start[f] < 0) order.push_back(f);
  }
  std::vector<bool> prefer(n, false);
  auto accept = [](FluentId, bool, const ClauseSearch::Assignment&) { return true; };
  auto leaf = [&](const ClauseSearch::Assignment& a) {
    State s(n);
    for (FluentId f = 0; f < n; ++f) s.set(f, a[f] == 1);
    return sink(s);
  };
  return search.enumerate(std::move(start), order, prefer, accept, leaf, nodes);
}

class Searcher {
 public:
  Searcher(const GroundTheory& th, const std::vector<GroundGoal>& goals, Query::Mode mode, const QueryOptions& opts)
      : th_(th), sc_(th), engine_(th), mode_(mode), opts_(opts) {
    goals_at_.resize(sc_.horizon + 1);
    for (const auto& g : goals) goals_at_[g.time.value].push_back(&g);
    seen_.resize(sc_.horizon + 1);
  }

  EntailmentResult run() {
    auto started = std::chrono::steady_clock::now();
    bool stopped = false;
    bool budget_hit = false;
    try {
      stopped = !initial_states(th_, sc_, true, &stats_.search.nodes, [&](const State& s) {
        ++stats_.initial_states;
        bool flag = next_flag(credulous() ? true : false, s, 0);
        path_.assign(1, s);
        steps_.clear();
        return !dfs(s, 0, flag);
      });
    } catch (const BudgetExceeded&) {
      budget_hit = true;
    }
    EntailmentResult r;
    if (budget_hit) {
      r.answer = Answer::kBudgetExceeded;
    } else if (stopped) {
      r.answer = credulous() ? Answer::kTrue : Answer::kFalse;
      r.witness = witness_;
    } else if (!any_model_) {
      r.answer = Answer::kInconsistent;
    } else {
      r.answer = credulous() ? Answer::kFalse : Answer::kTrue;
    }
    stats_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    stats_.slice_fluents = th_.num_fluents();
    r.stats = stats_;
    r.fluent_names = th_.fluent_names;
    return r;
  }

 private:
  bool credulous() const { return mode_ == Query::Mode::kCredulous; }

  // Credulous: every goal so far holds. Skeptical: some goal so far fails.
  bool next_flag(bool flag, const State& s, std::uint32_t t) const {
    for (const GroundGoal* g : goals_at_[t]) {
      bool holds = false;
      switch (g->kind) {
        case GroundGoal::Kind::kDynamic: holds = s.holds(g->literal); break;
        case GroundGoal::Kind::kConstantTrue: holds = true; break;
        case GroundGoal::Kind::kConstantFalse: holds = false; break;
        // An unmentioned fluent can take either value.
        case GroundGoal::Kind::kUnknown: holds = credulous(); break;
      }
      if (credulous()) {
        flag = flag && holds;
      } else {
        flag = flag || !holds;
      }
    }
    return flag;
  }

  void charge() {
    ++stats_.nodes;
    if (opts_.budget && stats_.nodes + stats_.search.nodes > opts_.budget) throw BudgetExceeded();
  }

  // True when a witness was found.
  bool dfs(const State& s, std::uint32_t t, bool flag) {
    charge();
    if (credulous() && !flag && any_model_) return false;
    auto& seen = seen_[t];
    if (!flag && seen.count(NodeKey{s, true})) return false;
    if (!seen.insert(NodeKey{s, flag}).second) return false;
    if (t == sc_.horizon) {
      any_model_ = true;
      ++stats_.models;
      if (!flag) return false;
      witness_ = Trajectory{path_, steps_};
      return true;
    }
    const auto& acts = th_.actions_at(t);
    std::vector<Transition> next;
    if (acts.empty()) {
      next.push_back({s, {}, s, {}});
    } else {
      next = engine_.successors(s, acts, &stats_.search);
    }
    for (auto& tr : next) {
      if (!sc_.holds_at(tr.target, t + 1)) {
        ++stats_.pruned;
        continue;
      }
      bool f = next_flag(flag, tr.target, t + 1);
      path_.push_back(tr.target);
      steps_.push_back(tr.effects);
      if (dfs(path_.back(), t + 1, f)) return true;
      path_.pop_back();
      steps_.pop_back();
    }
    return false;
  }

  const GroundTheory& th_;
  Scenario sc_;
  SuccessorEngine engine_;
  Query::Mode mode_;
  QueryOptions opts_;
  std::vector<std::vector<const GroundGoal*>> goals_at_;
  std::vector<std::unordered_set<NodeKey, NodeKeyHash>> seen_;
  std::vector<State> path_;
  std::vector<EffectSet> steps_;
  std::optional<Trajectory> witness_;
  bool any_model_ = false;
  QueryStats stats_;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

UnionFind dependencies(const GroundTheory& th) {
  UnionFind uf(th.num_fluents());
  for (const auto& r : th.rprops) {
    std::vector<FluentId> fs;
    if (r.head) fs.push_back(r.head->fluent);
    for (const auto& l : r.condition) fs.push_back(l.fluent);
    for (std::size_t i = 1; i < fs.size(); ++i) uf.unite(fs[0], fs[i]);
  }
  for (const auto& c : th.cprops) {
    for (const auto& l : c.condition) uf.unite(c.effect.fluent, l.fluent);
  }
  return uf;
}

GroundTheory restrict(const GroundTheory& th, const std::vector<char>& keep) {
  GroundTheory out;
  std::vector<FluentId> renumber(th.num_fluents(), 0);
  for (FluentId f = 0; f < th.num_fluents(); ++f) {
    if (!keep[f]) continue;
    renumber[f] = static_cast<FluentId>(out.fluent_names.size());
    out.fluent_names.push_back(th.fluent_names[f]);
  }
  auto map_lit = [&](GroundLiteral l) { return GroundLiteral{renumber[l.fluent], l.positive}; };
  auto map_cond = [&](const GroundCondition& c) {
    GroundCondition r;
    for (const auto& l : c) {
      if (keep[l.fluent]) r.push_back(map_lit(l));
    }
    return r;
  };
  out.action_names = th.action_names;
  out.constant_names = th.constant_names;
  out.constant_values = th.constant_values;
  out.horizon = th.horizon;
  std::vector<char> relevant_action(th.action_names.size(), 0);
  for (const auto& c : th.cprops) {
    if (!keep[c.effect.fluent]) continue;
    out.cprops.push_back({c.action, map_lit(c.effect), map_cond(c.condition)});
    relevant_action[c.action] = 1;
  }
  for (const auto& r : th.rprops) {
    FluentId any = r.head ? r.head->fluent : r.condition.front().fluent;
    if (!keep[any]) continue;
    GroundRProp g;
    if (r.head) g.head = map_lit(*r.head);
    g.condition = map_cond(r.condition);
    out.rprops.push_back(std::move(g));
  }
  for (const auto& p : th.pprops) {
    GroundPProp g{p.action, map_cond(p.condition), p.impossible};
    if (!g.impossible && g.condition.empty()) continue;
    relevant_action[p.action] = 1;
    out.pprops.push_back(std::move(g));
  }
  for (const auto& [t, acts] : th.occurrences) {
    for (ActionId a : acts) {
      if (relevant_action[a]) out.occurrences[t].push_back(a);
    }
  }
  for (const auto& o : th.observations) {
    if (keep[o.literal.fluent]) out.observations.push_back({map_lit(o.literal), o.time});
  }
  out.reindex();
  return out;
}

std::vector<char> slice_mask(const GroundTheory& th, const std::vector<GroundGoal>& goals) {
  UnionFind uf = dependencies(th);
  std::vector<char> roots(th.num_fluents(), 0);
  for (const auto& g : goals) {
    if (g.kind == GroundGoal::Kind::kDynamic) roots[uf.find(g.literal.fluent)] = 1;
  }
  std::vector<char> keep(th.num_fluents(), 0);
  for (FluentId f = 0; f < th.num_fluents(); ++f) keep[f] = roots[uf.find(f)];
  return keep;
}

}  // namespace

std::size_t enumerate_models(const GroundTheory& theory, const std::function<bool(const Trajectory&)>& sink) {
  Scenario sc(theory);
  SuccessorEngine engine(theory);
  std::size_t count = 0;
  Trajectory traj;
  std::function<bool(std::uint32_t)> extend = [&](std::uint32_t t) {
    const State& s = traj.states.back();
    if (!sc.holds_at(s, t)) return true;
    if (t == sc.horizon) {
      ++count;
      return sink(traj);
    }
    for (auto& tr : engine.successors(s, theory.actions_at(t))) {
      traj.states.push_back(tr.target);
      traj.steps.push_back(tr.effects);
      bool go_on = extend(t + 1);
      traj.states.pop_back();
      traj.steps.pop_back();
      if (!go_on) return false;
    }
    return true;
  };
  initial_states(theory, sc, false, nullptr, [&](const State& s) {
    traj.states.assign(1, s);
    traj.steps.clear();
    return extend(0);
  });
  return count;
}

GroundTheory relevance_slice(const GroundTheory& theory, const Query& query) {
  return restrict(theory, slice_mask(theory, resolve_goals(theory, query)));
}

std::vector<GroundTheory> components(const GroundTheory& theory) {
  UnionFind uf = dependencies(theory);
  std::vector<std::size_t> order;
  std::vector<std::vector<char>> masks;
  std::vector<std::size_t> index(theory.num_fluents(), SIZE_MAX);
  for (FluentId f = 0; f < theory.num_fluents(); ++f) {
    std::size_t root = uf.find(f);
    if (index[root] == SIZE_MAX) {
      index[root] = masks.size();
      masks.emplace_back(theory.num_fluents(), 0);
    }
    masks[index[root]][f] = 1;
  }
  std::vector<GroundTheory> out;
  for (const auto& m : masks) out.push_back(restrict(theory, m));
  return out;
}

EntailmentResult answer(const GroundTheory& theory, const Query& query, const QueryOptions& options) {
  std::vector<GroundGoal> goals = resolve_goals(theory, query);
  // Contradictory goals on an unmentioned fluent have no model.
  bool contradictory = false;
  if (query.mode == Query::Mode::kCredulous) {
    for (const auto& a : goals) {
      for (const auto& b : goals) {
        if (a.kind == GroundGoal::Kind::kUnknown && b.kind == GroundGoal::Kind::kUnknown && a.time == b.time &&
            a.atom == b.atom && a.literal.positive != b.literal.positive) {
          contradictory = true;
        }
      }
    }
  }
  if (contradictory) goals.push_back({GroundGoal::Kind::kConstantFalse, {}, TimePoint{0}, ""});
  if (!options.slice) return Searcher(theory, goals, query.mode, options).run();

  auto started = std::chrono::steady_clock::now();
  std::vector<char> keep = slice_mask(theory, goals);
  GroundTheory slice = restrict(theory, keep);
  std::vector<GroundGoal> sliced_goals = goals;
  {
    std::vector<FluentId> renumber(theory.num_fluents(), 0);
    FluentId next = 0;
    for (FluentId f = 0; f < theory.num_fluents(); ++f) {
      if (keep[f]) renumber[f] = next++;
    }
    for (auto& g : sliced_goals) {
      if (g.kind == GroundGoal::Kind::kDynamic) g.literal.fluent = renumber[g.literal.fluent];
    }
  }
  // Every other component must admit a model on its own.
  QueryStats rest;
  std::vector<char> other(theory.num_fluents(), 0);
  for (FluentId f = 0; f < theory.num_fluents(); ++f) other[f] = !keep[f];
  for (const auto& comp : components(restrict(theory, other))) {
    QueryOptions o = options;
    o.slice = false;
    EntailmentResult c = Searcher(comp, {}, Query::Mode::kCredulous, o).run();
    rest.nodes += c.stats.nodes;
    rest.search += c.stats.search;
    ++rest.components;
    if (c.answer == Answer::kBudgetExceeded || c.answer == Answer::kInconsistent) {
      c.stats.components = rest.components;
      return c;
    }
  }
  EntailmentResult r = Searcher(slice, sliced_goals, query.mode, options).run();
  r.stats.nodes += rest.nodes;
  r.stats.search += rest.search;
  r.stats.components = rest.components + 1;
  r.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return r;
}

EntailmentResult check_consistency(const GroundTheory& theory, const QueryOptions& options) {
  Query q;
  q.mode = Query::Mode::kCredulous;
  EntailmentResult r = answer(theory, q, options);
  if (r.answer == Answer::kInconsistent) r.answer = Answer::kFalse;
  return r;
}

void write_record(std::ostream& out, const Query& query, TimePoint horizon, const EntailmentResult& r) {
  out << "record\n";
  out << "answer " << to_string(r.answer) << "\n";
  out << "mode " << to_string(query.mode) << "\n";
  for (const auto& g : query.goals) {
    out << "goal " << to_string(g.literal) << " holds-at " << g.time.value << "\n";
  }
  out << "horizon " << horizon.value << "\n";
  if (r.witness) {
    for (std::size_t t = 0; t < r.witness->states.size(); ++t) {
      out << "witness " << t << " {";
      bool first = true;
      for (FluentId f = 0; f < r.witness->states[t].size(); ++f) {
        if (!r.witness->states[t][f]) continue;
        out << (first ? " " : ", ") << r.fluent_names[f];
        first = false;
      }
      out << (first ? "}" : " }") << "\n";
    }
  }
  const QueryStats& s = r.stats;
  out << "stats.nodes " << s.nodes << "\n";
  out << "stats.initial_states " << s.initial_states << "\n";
  out << "stats.models " << s.models << "\n";
  out << "stats.pruned " << s.pruned << "\n";
  out << "stats.components " << s.components << "\n";
  out << "stats.slice_fluents " << s.slice_fluents << "\n";
  out << "stats.successor_calls " << s.search.calls << "\n";
  out << "stats.search_nodes " << s.search.nodes << "\n";
  out << "stats.applied_sets " << s.search.applied_sets << "\n";
  out << "stats.seconds " << s.seconds << "\n";
  out << "end\n";
}

}  // namespace elang
