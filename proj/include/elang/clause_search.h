// Backtracking enumeration of the total assignments to a set of boolean
// fluents that satisfy a fixed clause set, with unit propagation. Shared by the
// successor search and the initial-state completion.

#ifndef ELANG_CLAUSE_SEARCH_H_
#define ELANG_CLAUSE_SEARCH_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "elang/grounder.h"

namespace elang {

class ClauseSearch {
 public:
  // Per variable: -1 unassigned, 0 false, 1 true.
  using Assignment = std::vector<std::int8_t>;

  explicit ClauseSearch(std::size_t num_vars) : occurs_(2 * num_vars) {}

  // Adds the disjunction of lits. An empty clause makes every search fail.
  void add_clause(std::vector<GroundLiteral> lits) {
    std::size_t id = clauses_.size();
    for (const auto& l : lits) occurs_[slot(l)].push_back(id);
    clauses_.push_back(std::move(lits));
  }

  // Every r-proposition as a classical clause.
  void add_rprops(const std::vector<GroundRProp>& rprops) {
    for (const auto& r : rprops) {
      std::vector<GroundLiteral> c;
      for (const auto& b : r.condition) c.push_back(~b);
      if (r.head) c.push_back(*r.head);
      add_clause(std::move(c));
    }
  }

  std::size_t num_clauses() const { return clauses_.size(); }

  // Enumerates completions of `start`. Variables in `order` are decided in
  // that order, trying prefer[v] first; all other unassigned variables must be
  // settled by propagation. accept(v, value, assignment) may veto any
  // assignment as it is made; leaf(assignment) sees each total model and
  // returns false to stop. Returns false if stopped early.
  template <typename Accept, typename Leaf>
  bool enumerate(Assignment start, const std::vector<FluentId>& order, const std::vector<bool>& prefer,
                 Accept&& accept, Leaf&& leaf, std::size_t* nodes = nullptr) {
    a_ = std::move(start);
    trail_.clear();
    for (std::size_t v = 0; v < a_.size(); ++v) {
      if (a_[v] >= 0) trail_.push_back(static_cast<FluentId>(v));
    }
    head_ = 0;
    bool ok = initial_units() && propagate(accept);
    if (!ok) return true;
    return decide(0, order, prefer, accept, leaf, nodes);
  }

 private:
  static std::size_t slot(GroundLiteral l) { return 2 * static_cast<std::size_t>(l.fluent) + (l.positive ? 1 : 0); }

  int value(GroundLiteral l) const {
    int v = a_[l.fluent];
    if (v < 0) return -1;
    return (v == 1) == l.positive ? 1 : 0;
  }

  bool initial_units() {
    for (const auto& c : clauses_) {
      if (c.empty()) return false;
      if (c.size() != 1) continue;
      int v = value(c[0]);
      if (v == 0) return false;
      if (v < 0) {
        a_[c[0].fluent] = c[0].positive ? 1 : 0;
        trail_.push_back(c[0].fluent);
      }
    }
    return true;
  }

  template <typename Accept>
  bool propagate(Accept& accept) {
    while (head_ < trail_.size()) {
      FluentId var = trail_[head_++];
      if (!accept(var, a_[var] == 1, static_cast<const Assignment&>(a_))) return false;
      GroundLiteral falsified{var, a_[var] != 1};
      for (std::size_t id : occurs_[slot(falsified)]) {
        const auto& c = clauses_[id];
        const GroundLiteral* open = nullptr;
        std::size_t unknown = 0;
        bool sat = false;
        for (const auto& l : c) {
          int v = value(l);
          if (v == 1) {
            sat = true;
            break;
          }
          if (v < 0) {
            ++unknown;
            open = &l;
          }
        }
        if (sat) continue;
        if (unknown == 0) return false;
        if (unknown == 1) {
          a_[open->fluent] = open->positive ? 1 : 0;
          trail_.push_back(open->fluent);
        }
      }
    }
    return true;
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      a_[trail_.back()] = -1;
      trail_.pop_back();
    }
    head_ = mark;
  }

  template <typename Accept, typename Leaf>
  bool decide(std::size_t pos, const std::vector<FluentId>& order, const std::vector<bool>& prefer, Accept& accept,
              Leaf& leaf, std::size_t* nodes) {
    while (pos < order.size() && a_[order[pos]] >= 0) ++pos;
    if (nodes) ++*nodes;
    if (pos == order.size()) {
      for (auto v : a_) {
        if (v < 0) return true;
      }
      return leaf(static_cast<const Assignment&>(a_));
    }
    FluentId var = order[pos];
    for (int k = 0; k < 2; ++k) {
      bool val = k == 0 ? prefer[var] : !prefer[var];
      std::size_t mark = trail_.size();
      a_[var] = val ? 1 : 0;
      trail_.push_back(var);
      bool ok = propagate(accept);
      bool go_on = !ok || decide(pos + 1, order, prefer, accept, leaf, nodes);
      undo(mark);
      if (!go_on) return false;
    }
    return true;
  }

  std::vector<std::vector<GroundLiteral>> clauses_;
  std::vector<std::vector<std::size_t>> occurs_;
  Assignment a_;
  std::vector<FluentId> trail_;
  std::size_t head_ = 0;
};

}  // namespace elang

#endif  // ELANG_CLAUSE_SEARCH_H_
