#ifndef ELANG_TESTS_RANDOM_DOMAINS_H_
#define ELANG_TESTS_RANDOM_DOMAINS_H_

#include <random>
#include <string>
#include <vector>

#include "elang/model.h"

namespace elang::testing {

// Random well-formed, well-sorted domains.
class DomainGenerator {
 public:
  explicit DomainGenerator(std::uint64_t seed) : rng_(seed) {}

  DomainDescription domain() {
    DomainDescription d;
    std::size_t nsorts = pick(1, 3);
    for (std::size_t i = 0; i < nsorts; ++i) {
      SortDecl s{"s" + std::to_string(i), {}};
      std::size_t nc = pick(1, 3);
      for (std::size_t k = 0; k < nc; ++k) s.constants.push_back("c" + std::to_string(i) + "_" + std::to_string(k));
      d.signature.sorts.push_back(s);
    }
    std::size_t nf = pick(1, 4);
    for (std::size_t i = 0; i < nf; ++i) {
      d.signature.fluents.push_back({"f" + std::to_string(i), arg_sorts(d), i > 0 && coin()});
    }
    std::size_t na = pick(1, 3);
    for (std::size_t i = 0; i < na; ++i) d.signature.actions.push_back({"a" + std::to_string(i), arg_sorts(d)});
    std::size_t np = pick(0, 8);
    for (std::size_t i = 0; i < np; ++i) d.propositions.push_back(proposition(d));
    return d;
  }

 private:
  std::size_t pick(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }
  bool coin() { return pick(0, 1) == 1; }

  std::vector<std::string> arg_sorts(const DomainDescription& d) {
    std::vector<std::string> out;
    std::size_t n = pick(0, 2);
    for (std::size_t i = 0; i < n; ++i) out.push_back(d.signature.sorts[pick(0, d.signature.sorts.size() - 1)].name);
    return out;
  }

  // Variables are named after their sort so every statement is well sorted.
  Term term(const DomainDescription& d, const std::string& sort, bool ground) {
    const SortDecl* s = d.signature.find_sort(sort);
    if (!ground && coin()) return Term::Variable("V" + sort.substr(1) + "_" + std::to_string(pick(0, 1)));
    return Term::Constant(s->constants[pick(0, s->constants.size() - 1)]);
  }

  Atom atom(const DomainDescription& d, const std::string& name, const std::vector<std::string>& sorts, bool ground) {
    Atom a{name, {}};
    for (const auto& s : sorts) a.args.push_back(term(d, s, ground));
    return a;
  }

  FluentLiteral literal(const DomainDescription& d, bool ground, bool dynamic_only = false) {
    const auto& fs = d.signature.fluents;
    const FluentDecl* f = &fs[pick(0, fs.size() - 1)];
    if (dynamic_only) f = &fs[0];
    return {atom(d, f->name, f->arg_sorts, ground), coin()};
  }

  Condition condition(const DomainDescription& d) {
    Condition c;
    std::size_t n = pick(0, 3);
    for (std::size_t i = 0; i < n; ++i) c.add(literal(d, false));
    if (coin()) {
      const auto& s = d.signature.sorts[0];
      c.add(Disequality{Term::Variable("V0_0"), Term::Constant(s.constants[0])});
    }
    return c;
  }

  Proposition proposition(const DomainDescription& d) {
    const auto& acts = d.signature.actions;
    const ActionDecl& a = acts[pick(0, acts.size() - 1)];
    switch (pick(0, 4)) {
      case 0:
        return TProp{literal(d, true), {static_cast<std::uint32_t>(pick(0, 5))}};
      case 1:
        return HProp{atom(d, a.name, a.arg_sorts, true), {static_cast<std::uint32_t>(pick(0, 5))}};
      case 2: {
        CProp c;
        c.action = atom(d, a.name, a.arg_sorts, false);
        c.kind = coin() ? CProp::Kind::kInitiates : CProp::Kind::kTerminates;
        c.fluent = literal(d, false, true).atom;
        c.condition = condition(d);
        return c;
      }
      case 3: {
        RProp r;
        if (coin()) r.head = literal(d, false);
        r.condition = condition(d);
        return r;
      }
      default:
        return PProp{atom(d, a.name, a.arg_sorts, false), condition(d)};
    }
  }

  std::mt19937_64 rng_;
};

}  // namespace elang::testing

#endif  // ELANG_TESTS_RANDOM_DOMAINS_H_
