#include "elang/sat.h"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>

namespace elang {
namespace {

bool jointly_satisfiable(const GroundCondition& a, const GroundCondition& b) {
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (x == ~y) return false;
    }
    for (const auto& y : a) {
      if (x == ~y) return false;
    }
  }
  for (const auto& x : b) {
    for (const auto& y : b) {
      if (x == ~y) return false;
    }
  }
  return true;
}

std::size_t literal_index(GroundLiteral l) { return 2 * l.fluent + (l.positive ? 0 : 1); }

// Literals a literal can bring about through ramifications, assuming every
// other body literal cooperates.
class Reach {
 public:
  explicit Reach(const GroundTheory& t) : theory_(t), by_body_(2 * t.num_fluents()) {
    for (std::size_t i = 0; i < t.rprops.size(); ++i) {
      if (!t.rprops[i].head) continue;
      for (const auto& b : t.rprops[i].condition) by_body_[literal_index(b)].push_back(i);
    }
  }

  const std::set<GroundLiteral>& of(GroundLiteral l) {
    auto it = cache_.find(l);
    if (it != cache_.end()) return it->second;
    std::set<GroundLiteral> seen{l};
    std::vector<GroundLiteral> stack{l};
    while (!stack.empty()) {
      GroundLiteral x = stack.back();
      stack.pop_back();
      for (auto r : by_body_[literal_index(x)]) {
        GroundLiteral h = *theory_.rprops[r].head;
        if (seen.insert(h).second) stack.push_back(h);
      }
    }
    return cache_.emplace(l, std::move(seen)).first->second;
  }

  bool conflict(GroundLiteral a, GroundLiteral b) {
    const auto& ra = of(a);
    for (const auto& x : of(b)) {
      if (ra.count(~x)) return true;
    }
    return false;
  }

 private:
  const GroundTheory& theory_;
  std::vector<std::vector<std::size_t>> by_body_;
  std::map<GroundLiteral, std::set<GroundLiteral>> cache_;
};

bool has_cycle(const GroundTheory& t, std::string* where) {
  std::vector<std::vector<FluentId>> edges(t.num_fluents());
  for (const auto& r : t.rprops) {
    if (!r.head) continue;
    for (const auto& b : r.condition) edges[b.fluent].push_back(r.head->fluent);
  }
  std::vector<int> color(t.num_fluents(), 0);
  std::vector<std::pair<FluentId, std::size_t>> stack;
  for (FluentId root = 0; root < t.num_fluents(); ++root) {
    if (color[root]) continue;
    stack.push_back({root, 0});
    color[root] = 1;
    while (!stack.empty()) {
      auto& [f, next] = stack.back();
      if (next == edges[f].size()) {
        color[f] = 2;
        stack.pop_back();
        continue;
      }
      FluentId g = edges[f][next++];
      if (color[g] == 1) {
        *where = t.fluent_names[g];
        return true;
      }
      if (color[g] == 0) {
        color[g] = 1;
        stack.push_back({g, 0});
      }
    }
  }
  return false;
}

std::string show(const GroundTheory& t, const GroundCProp& c) {
  return t.action_names[c.action] + " -> " + t.name(c.effect);
}

}  // namespace

std::string to_string(FragmentViolation::Kind kind) {
  switch (kind) {
    case FragmentViolation::Kind::kNondeterministicAction:
      return "nondeterministic-action";
    case FragmentViolation::Kind::kConflictingConcurrency:
      return "conflicting-concurrency-possible";
    case FragmentViolation::Kind::kCyclicRamifications:
      return "cyclic-ramifications";
  }
  return "?";
}

FragmentReport check_fragment(const GroundTheory& theory) {
  FragmentReport report;
  auto add = [&](FragmentViolation::Kind k, std::string where) {
    report.violations.push_back({k, std::move(where)});
  };
  std::string where;
  if (has_cycle(theory, &where)) add(FragmentViolation::Kind::kCyclicRamifications, "through " + where);

  Reach reach(theory);
  std::set<ActionId> occurring;
  for (const auto& [time, acts] : theory.occurrences) occurring.insert(acts.begin(), acts.end());
  for (ActionId a : occurring) {
    const auto& laws = theory.cprops_by_action[a];
    bool found = false;
    for (std::size_t i = 0; i < laws.size() && !found; ++i) {
      for (std::size_t j = i; j < laws.size() && !found; ++j) {
        const auto& x = theory.cprops[laws[i]];
        const auto& y = theory.cprops[laws[j]];
        if (!jointly_satisfiable(x.condition, y.condition) || !reach.conflict(x.effect, y.effect)) continue;
        add(FragmentViolation::Kind::kNondeterministicAction, show(theory, x) + " / " + show(theory, y));
        found = true;
      }
    }
  }
  for (const auto& [time, acts] : theory.occurrences) {
    bool found = false;
    for (std::size_t i = 0; i < acts.size() && !found; ++i) {
      for (std::size_t j = i + 1; j < acts.size() && !found; ++j) {
        for (auto x : theory.cprops_by_action[acts[i]]) {
          for (auto y : theory.cprops_by_action[acts[j]]) {
            const auto& cx = theory.cprops[x];
            const auto& cy = theory.cprops[y];
            if (found || !jointly_satisfiable(cx.condition, cy.condition) || !reach.conflict(cx.effect, cy.effect)) {
              continue;
            }
            add(FragmentViolation::Kind::kConflictingConcurrency,
                "time " + std::to_string(time) + ": " + show(theory, cx) + " / " + show(theory, cy));
            found = true;
          }
        }
      }
    }
  }
  report.accepted = report.violations.empty();
  return report;
}

namespace {

class Builder {
 public:
  explicit Builder(CnfInstance& cnf) : cnf_(cnf) {}

  int aux(std::string what) {
    int v = ++cnf_.num_vars;
    cnf_.auxiliary.push_back({v, std::move(what)});
    return v;
  }

  void clause(Clause c, const std::string& from) {
    cnf_.clauses.push_back(std::move(c));
    cnf_.provenance.push_back(from);
  }

  // y <-> AND(xs)
  void define_and(int y, const std::vector<int>& xs, const std::string& from) {
    Clause big{y};
    for (int x : xs) {
      clause({-y, x}, from);
      big.push_back(-x);
    }
    clause(big, from);
  }

  // y <-> OR(xs)
  void define_or(int y, const std::vector<int>& xs, const std::string& from) {
    Clause big{-y};
    for (int x : xs) {
      clause({y, -x}, from);
      big.push_back(x);
    }
    clause(big, from);
  }

 private:
  CnfInstance& cnf_;
};

std::string rprop_label(std::size_t i) { return "r-proposition " + std::to_string(i); }

}  // namespace

CnfInstance compile(const GroundTheory& theory) {
  FragmentReport report = check_fragment(theory);
  if (!report.accepted) {
    const auto& v = report.violations.front();
    throw FragmentError(to_string(v.kind) + ": " + v.location);
  }
  CnfInstance cnf;
  Builder b(cnf);
  std::uint32_t horizon = theory.horizon.value;
  std::size_t n = theory.num_fluents();
  cnf.fluent_var.assign(horizon + 1, std::vector<int>(n, 0));
  for (std::uint32_t t = 0; t <= horizon; ++t) {
    for (std::size_t f = 0; f < n; ++f) cnf.fluent_var[t][f] = ++cnf.num_vars;
  }
  auto at = [&](const GroundCondition& c, std::uint32_t t) {
    std::vector<int> out;
    for (const auto& l : c) out.push_back(cnf.lit(l, t));
    return out;
  };

  for (std::uint32_t t = 0; t <= horizon; ++t) {
    std::string when = " at " + std::to_string(t);
    for (std::size_t i = 0; i < theory.rprops.size(); ++i) {
      const auto& r = theory.rprops[i];
      Clause c;
      for (int x : at(r.condition, t)) c.push_back(-x);
      if (r.head) c.push_back(cnf.lit(*r.head, t));
      b.clause(c, rprop_label(i) + when);
    }
  }
  for (const auto& o : theory.observations) {
    b.clause({cnf.lit(o.literal, o.time.value)}, "observation " + theory.name(o.literal) + " at " + std::to_string(o.time.value));
  }

  for (std::uint32_t t = 0; t < horizon; ++t) {
    std::uint32_t next = t + 1;
    std::string when = " at " + std::to_string(t);
    const auto& acts = theory.actions_at(t);
    for (ActionId a : acts) {
      for (auto p : theory.pprops_by_action[a]) {
        const auto& pp = theory.pprops[p];
        std::string from = "p-proposition " + std::to_string(p) + " of " + theory.action_names[a] + when;
        if (pp.impossible) {
          b.clause({}, from);
          continue;
        }
        for (int x : at(pp.condition, t)) b.clause({x}, from);
      }
    }

    // Terms that can cause each literal at t + 1.
    std::vector<std::vector<int>> terms(2 * n);
    for (ActionId a : acts) {
      for (auto i : theory.cprops_by_action[a]) {
        const auto& c = theory.cprops[i];
        int y = b.aux("c-proposition " + std::to_string(i) + " fires" + when);
        b.define_and(y, at(c.condition, t), "c-proposition " + std::to_string(i) + when);
        terms[literal_index(c.effect)].push_back(y);
      }
    }
    std::vector<char> possible(2 * n, 0);
    for (std::size_t l = 0; l < 2 * n; ++l) possible[l] = !terms[l].empty();
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& r : theory.rprops) {
        if (!r.head || possible[literal_index(*r.head)]) continue;
        for (const auto& x : r.condition) {
          if (possible[literal_index(x)]) {
            possible[literal_index(*r.head)] = 1;
            grew = true;
            break;
          }
        }
      }
    }
    std::vector<int> caused(2 * n, 0);
    for (std::size_t l = 0; l < 2 * n; ++l) {
      if (!possible[l]) continue;
      GroundLiteral lit{static_cast<FluentId>(l / 2), l % 2 == 0};
      caused[l] = b.aux("caused " + theory.name(lit) + " at " + std::to_string(next));
    }
    for (std::size_t i = 0; i < theory.rprops.size(); ++i) {
      const auto& r = theory.rprops[i];
      if (!r.head || !possible[literal_index(*r.head)]) continue;
      std::vector<int> via;
      for (const auto& x : r.condition) {
        if (caused[literal_index(x)]) via.push_back(caused[literal_index(x)]);
      }
      if (via.empty()) continue;
      std::string from = rprop_label(i) + " ramification at " + std::to_string(next);
      int z = b.aux(from + ", body changed");
      b.define_or(z, via, from);
      std::vector<int> body = at(r.condition, next);
      body.push_back(z);
      int y = b.aux(from + ", fires");
      b.define_and(y, body, from);
      terms[literal_index(*r.head)].push_back(y);
    }
    for (std::size_t l = 0; l < 2 * n; ++l) {
      if (caused[l]) b.define_or(caused[l], terms[l], "causes of " + theory.name({static_cast<FluentId>(l / 2), l % 2 == 0}) + " at " + std::to_string(next));
    }
    for (FluentId f = 0; f < n; ++f) {
      std::string from = "frame " + theory.fluent_names[f] + " at " + std::to_string(next);
      int now = cnf.var(f, t), then = cnf.var(f, next);
      int up = caused[literal_index({f, true})], down = caused[literal_index({f, false})];
      if (up) b.clause({-up, then}, from);
      if (down) b.clause({-down, -then}, from);
      Clause rise{-then, now}, fall{then, -now};
      if (up) rise.push_back(up);
      if (down) fall.push_back(down);
      b.clause(rise, from);
      b.clause(fall, from);
    }
  }
  return cnf;
}

void write_dimacs(std::ostream& out, const CnfInstance& cnf) {
  out << "p cnf " << cnf.num_vars << " " << cnf.clauses.size() << "\n";
  for (const auto& c : cnf.clauses) {
    for (int x : c) out << x << " ";
    out << "0\n";
  }
}

void write_provenance(std::ostream& out, const CnfInstance& cnf) {
  for (std::size_t i = 0; i < cnf.provenance.size(); ++i) out << i + 1 << "\t" << cnf.provenance[i] << "\n";
}

Solver::Solver(int num_vars) {
  for (int i = 0; i < num_vars; ++i) new_var();
}

Solver::Solver(const CnfInstance& cnf) : Solver(cnf.num_vars) {
  for (const auto& c : cnf.clauses) add_clause(c);
}

int Solver::new_var() {
  ++num_vars_;
  assigns_.push_back(0);
  watches_.resize(2 * (num_vars_ + 1));
  return num_vars_;
}

namespace {
std::size_t watch_index(int lit) { return 2 * static_cast<std::size_t>(std::abs(lit)) + (lit < 0 ? 1 : 0); }
}  // namespace

void Solver::add_clause(Clause c) {
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      if (c[i] == -c[j]) return;
    }
  }
  for (int x : c) {
    while (std::abs(x) > num_vars_) new_var();
  }
  if (c.empty()) {
    empty_clause_ = true;
  } else if (c.size() == 1) {
    units_.push_back(c[0]);
  } else {
    int id = static_cast<int>(clauses_.size());
    watches_[watch_index(c[0])].push_back(id);
    watches_[watch_index(c[1])].push_back(id);
    clauses_.push_back(std::move(c));
  }
}

int Solver::value(int lit) const {
  int v = assigns_[std::abs(lit)];
  return lit > 0 ? v : -v;
}

bool Solver::enqueue(int lit) {
  int v = value(lit);
  if (v != 0) return v > 0;
  assigns_[std::abs(lit)] = lit > 0 ? 1 : -1;
  trail_.push_back(lit);
  return true;
}

bool Solver::propagate() {
  while (qhead_ < trail_.size()) {
    int falselit = -trail_[qhead_++];
    auto& ws = watches_[watch_index(falselit)];
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      int ci = ws[i++];
      Clause& c = clauses_[ci];
      if (c[0] == falselit) std::swap(c[0], c[1]);
      if (value(c[0]) > 0) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (value(c[k]) >= 0) {
          std::swap(c[1], c[k]);
          watches_[watch_index(c[1])].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = ci;
      if (value(c[0]) < 0) {
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        qhead_ = trail_.size();
        return false;
      }
      enqueue(c[0]);
    }
    ws.resize(j);
  }
  return true;
}

SolveResult Solver::solve(const std::vector<int>& assumptions, std::size_t budget) {
  SolveResult result;
  std::fill(assigns_.begin(), assigns_.end(), 0);
  trail_.clear();
  trail_lim_.clear();
  qhead_ = 0;
  if (empty_clause_) return result;
  for (int u : units_) {
    if (!enqueue(u)) return result;
  }
  for (int a : assumptions) {
    while (std::abs(a) > num_vars_) new_var();
  }

  struct Level {
    int lit;
    bool flipped;
    bool assumption;
  };
  std::vector<Level> levels;
  std::size_t next_assumption = 0;
  auto push = [&](Level l) {
    trail_lim_.push_back(trail_.size());
    levels.push_back(l);
    enqueue(l.lit);
  };
  auto undo = [&]() {
    std::size_t lim = trail_lim_.back();
    trail_lim_.pop_back();
    for (std::size_t k = lim; k < trail_.size(); ++k) assigns_[std::abs(trail_[k])] = 0;
    trail_.resize(lim);
    qhead_ = lim;
  };
  int scan = 1;
  while (true) {
    std::size_t before = trail_.size();
    bool ok = propagate();
    result.propagations += trail_.size() - before;
    if (!ok) {
      bool resumed = false;
      while (!levels.empty()) {
        Level l = levels.back();
        levels.pop_back();
        undo();
        if (l.assumption) return result;
        if (!l.flipped) {
          push({-l.lit, true, false});
          resumed = true;
          break;
        }
      }
      if (!resumed) return result;
      scan = 1;
      continue;
    }
    if (next_assumption < assumptions.size()) {
      int a = assumptions[next_assumption++];
      if (value(a) > 0) continue;
      if (value(a) < 0) return result;
      push({a, false, true});
      continue;
    }
    while (scan <= num_vars_ && assigns_[scan] != 0) ++scan;
    if (scan > num_vars_) {
      result.status = SolveResult::Status::kSat;
      result.model.assign(num_vars_ + 1, false);
      for (int v = 1; v <= num_vars_; ++v) result.model[v] = assigns_[v] > 0;
      return result;
    }
    if (budget && result.decisions >= budget) {
      result.status = SolveResult::Status::kBudgetExceeded;
      return result;
    }
    ++result.decisions;
    push({-scan, false, false});
  }
}

Trajectory decode(const CnfInstance& cnf, const std::vector<bool>& model) {
  Trajectory tr;
  for (const auto& vars : cnf.fluent_var) {
    State s(vars.size());
    for (std::size_t f = 0; f < vars.size(); ++f) s.set(static_cast<FluentId>(f), model[vars[f]]);
    tr.states.push_back(std::move(s));
  }
  return tr;
}

EntailmentResult sat_answer(const GroundTheory& theory, const Query& query, const QueryOptions& options) {
  auto started = std::chrono::steady_clock::now();
  auto goals = resolve_goals(theory, query);
  CnfInstance cnf = compile(theory);
  Solver solver(cnf);
  EntailmentResult result;
  result.fluent_names = theory.fluent_names;
  result.stats.slice_fluents = theory.num_fluents();
  auto finish = [&](Answer a, const SolveResult* witness) {
    result.answer = a;
    if (witness) result.witness = decode(cnf, witness->model);
    result.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
  };
  auto run = [&](const std::vector<int>& assumptions) {
    SolveResult r = solver.solve(assumptions, options.budget);
    result.stats.nodes += r.decisions;
    return r;
  };

  SolveResult base = run({});
  if (base.status == SolveResult::Status::kBudgetExceeded) return finish(Answer::kBudgetExceeded, nullptr);
  if (base.status == SolveResult::Status::kUnsat) return finish(Answer::kInconsistent, nullptr);

  bool impossible = false, unknown = false;
  std::vector<int> lits;
  for (const auto& g : goals) {
    switch (g.kind) {
      case GroundGoal::Kind::kDynamic:
        lits.push_back(cnf.lit(g.literal, g.time.value));
        break;
      case GroundGoal::Kind::kConstantTrue:
        break;
      case GroundGoal::Kind::kConstantFalse:
        impossible = true;
        break;
      case GroundGoal::Kind::kUnknown:
        unknown = true;
        for (const auto& h : goals) {
          if (h.kind == GroundGoal::Kind::kUnknown && h.time == g.time && h.atom == g.atom &&
              h.literal.positive != g.literal.positive) {
            impossible = true;
          }
        }
        break;
    }
  }

  if (query.mode == Query::Mode::kCredulous) {
    if (impossible) return finish(Answer::kFalse, nullptr);
    SolveResult r = run(lits);
    if (r.status == SolveResult::Status::kBudgetExceeded) return finish(Answer::kBudgetExceeded, nullptr);
    return r.status == SolveResult::Status::kSat ? finish(Answer::kTrue, &r) : finish(Answer::kFalse, nullptr);
  }
  if (impossible || unknown) return finish(Answer::kFalse, &base);
  if (lits.empty()) return finish(Answer::kTrue, nullptr);
  int selector = solver.new_var();
  Clause guard{-selector};
  for (int x : lits) guard.push_back(-x);
  solver.add_clause(guard);
  SolveResult r = run({selector});
  if (r.status == SolveResult::Status::kBudgetExceeded) return finish(Answer::kBudgetExceeded, nullptr);
  return r.status == SolveResult::Status::kSat ? finish(Answer::kFalse, &r) : finish(Answer::kTrue, nullptr);
}

}  // namespace elang
