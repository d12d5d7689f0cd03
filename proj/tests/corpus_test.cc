#include "elang/corpus.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <regex>
#include <set>
#include <sstream>

#include "elang/grounder.h"
#include "elang/parser.h"
#include "elang/transition.h"

namespace elang {
namespace {

TEST(Corpus, ShippedWorldIsTheGeneratorOutput) { EXPECT_EQ(read_corpus_file("zoo_world.e"), zoo_world()); }

TEST(Corpus, GeneratedWorldsGroundForEveryPositionCount) {
  for (std::size_t n = 3; n <= 15; ++n) {
    DomainDescription d = zoo_domain(ZooVariant::kDual, {n, 0});
    EXPECT_FALSE(has_errors(validate(d))) << n;
    GroundTheory t = ground(d, TimePoint{1});
    EXPECT_EQ(d.signature.find_sort("positions")->constants.size(), n);
    EXPECT_TRUE(t.find_fluent("animal_pos(john,p" + std::to_string(n) + ")"));
  }
  EXPECT_THROW(zoo_world({2, 0}), std::invalid_argument);
  EXPECT_THROW(zoo_world({16, 0}), std::invalid_argument);
}

TEST(Corpus, DefaultTerrain) {
  GroundTheory t = ground(zoo_domain(ZooVariant::kDual, {}), TimePoint{0});
  auto neighbors = [&](const std::string& p) {
    std::set<std::string> out;
    for (int q = 1; q <= 6; ++q) {
      std::string name = "p" + std::to_string(q);
      if (t.constant_value("neighbor(" + p + "," + name + ")") == true) out.insert(name);
    }
    return out;
  };
  EXPECT_EQ(neighbors("p1"), (std::set<std::string>{"p2", "p3"}));
  EXPECT_EQ(neighbors("p4"), (std::set<std::string>{"p5"}));
  EXPECT_TRUE(neighbors("p6").empty());
  EXPECT_EQ(t.constant_value("gate_link(g1,p4,p2)"), true);
  EXPECT_EQ(t.constant_value("gate_link(g2,p6,p3)"), true);
  EXPECT_EQ(t.constant_value("animal_is_large(elly)"), true);
  EXPECT_EQ(t.constant_value("animal_is_large(dumpo)"), false);
  EXPECT_EQ(t.constant_value("animal_is_large(john)"), false);
}

TEST(Corpus, BulbHasSevenPropositions) {
  ParsedUnit u = load_files({"bulb.e"});
  EXPECT_EQ(u.domain.propositions.size(), 7u);
  EXPECT_EQ(u.domain.signature.fluents.size(), 2u);
  EXPECT_EQ(u.domain.signature.actions.size(), 3u);
  EXPECT_EQ(load_files({"bulb_noinit.e"}).domain.propositions.size(), 6u);
}

std::set<std::string> statements(const DomainDescription& d) {
  std::istringstream in(pretty_print(d));
  std::set<std::string> out;
  for (std::string line; std::getline(in, line);) out.insert(line);
  return out;
}

TEST(Corpus, VariantsShareOneSignature) {
  auto direct = load_files(zoo_files(ZooVariant::kDirect)).domain;
  auto indirect = load_files(zoo_files(ZooVariant::kIndirect)).domain;
  auto dual = load_files(zoo_files(ZooVariant::kDual)).domain;
  EXPECT_EQ(direct.signature, indirect.signature);
  EXPECT_EQ(dual.signature, indirect.signature);
  for (const auto* d : {&direct, &indirect, &dual}) EXPECT_FALSE(has_errors(validate(*d)));
}

TEST(Corpus, DualIsIndirectPlusTheTwoDirectMoveLaws) {
  auto indirect = statements(load_files(zoo_files(ZooVariant::kIndirect)).domain);
  auto dual = statements(load_files(zoo_files(ZooVariant::kDual)).domain);
  std::set<std::string> extra;
  std::set_difference(dual.begin(), dual.end(), indirect.begin(), indirect.end(), std::inserter(extra, extra.end()));
  EXPECT_TRUE(std::includes(dual.begin(), dual.end(), indirect.begin(), indirect.end()));
  EXPECT_EQ(extra, (std::set<std::string>{
                       "move_to_position(A,P) initiates animal_pos(A1,P) when { rides(A1,A) }.",
                       "move_to_position(A,P) terminates animal_pos(A,P1) when { animal_pos(A,P1) }.",
                   }));
}

TEST(Corpus, IndirectMovesRidersOnlyThroughConstraints) {
  auto indirect = statements(load_files(zoo_files(ZooVariant::kIndirect)).domain);
  EXPECT_TRUE(indirect.count("animal_pos(A1,P) whenever { animal_pos(A,P), rides(A1,A) }."));
  EXPECT_TRUE(indirect.count("neg animal_pos(A,P1) whenever { animal_pos(A,P), P1 != P }."));
  for (const auto& s : indirect) {
    if (s.rfind("move_to_position", 0) == 0 && s.find("initiates") != std::string::npos) {
      EXPECT_EQ(s, "move_to_position(A,P) initiates animal_pos(A,P) when { reachable(A,P) }.");
    }
    if (s.rfind("move_to_position", 0) == 0) EXPECT_EQ(s.find("terminates"), std::string::npos) << s;
  }
}

TEST(Corpus, DirectHasNoRamifications) {
  ParsedUnit u = load_files(zoo_files(ZooVariant::kDirect));
  std::size_t laws = 0;
  for (std::size_t i = 0; i < u.domain.propositions.size(); ++i) {
    if (u.spans[i].file != 2) continue;
    ++laws;
    if (const auto* r = std::get_if<RProp>(&u.domain.propositions[i])) EXPECT_FALSE(r->head);
  }
  EXPECT_GT(laws, 30u);
}

TEST(Corpus, KeyValueParsing) {
  auto blocks = parse_key_values("# c\n[a]\nx = 1\ny=two words \n\n[b]\nx = 3\n");
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0].name, "a");
  EXPECT_EQ(blocks[0].at("y"), "two words");
  EXPECT_EQ(blocks[1].get("y", "none"), "none");
  EXPECT_THROW(blocks[1].at("y"), std::runtime_error);
  EXPECT_THROW(parse_key_values("[a]\nx = 1\nx = 2\n"), std::runtime_error);
  EXPECT_THROW(parse_key_values("[a\n"), std::runtime_error);
  EXPECT_THROW(parse_key_values("novalue\n"), std::runtime_error);
}

TEST(Corpus, GoldenCasesNeedAnOrigin) {
  EXPECT_THROW(parse_golden("[x]\nfiles = bulb.e\nquery = credulous { }\nexpect = true\n"), std::runtime_error);
  EXPECT_THROW(parse_golden("[x]\nfiles = bulb.e\nquery = credulous { }\nexpect = maybe\norigin = stated\n"),
               std::runtime_error);
}

TEST(Corpus, EveryGoldenCaseHolds) {
  auto outcomes = run_golden();
  std::ostringstream report;
  write_report(report, outcomes);
  std::set<std::string> names;
  for (const auto& o : outcomes) {
    EXPECT_TRUE(o.passed) << report.str();
    names.insert(o.golden.name);
  }
  for (const char* required :
       {"bulb-light-skeptical", "bulb-noinit-light-skeptical", "bulb-noinit-light-credulous", "dual-rides-before-throw-1",
        "dual-landing-credulous", "dual-landing-skeptical", "dual-mounted-4", "dual-concurrent-move-skeptical",
        "dual-concurrent-move-seen"}) {
    EXPECT_TRUE(names.count(required)) << required;
  }
}

TEST(Corpus, SlicedGoldenRunAgrees) {
  QueryOptions o;
  o.slice = true;
  for (const auto& r : run_golden(o)) EXPECT_TRUE(r.passed) << r.golden.name;
}

TEST(Corpus, EveryVariantIsConsistentUnderTheScenario) {
  for (auto v : {ZooVariant::kDirect, ZooVariant::kIndirect, ZooVariant::kDual}) {
    auto files = zoo_files(v);
    files.push_back("zoo_scenario.e");
    auto d = load_files(files).domain;
    EXPECT_EQ(check_consistency(ground(d, TimePoint{5})).answer, Answer::kTrue) << to_string(v);
  }
}

// The unique time-0 state fixed by a set of observations.
State fixed_state(const GroundTheory& t) {
  std::vector<State> found;
  enumerate_models(t, [&](const Trajectory& m) {
    found.push_back(m.states[0]);
    return found.size() < 2;
  });
  EXPECT_EQ(found.size(), 1u);
  return found.empty() ? State() : found[0];
}

GroundTheory zoo_at(ZooVariant v, const ZooOptions& o, const std::string& facts) {
  return ground(zoo_domain(v, o, {facts}), TimePoint{0});
}

const char* kRiderOnDumpo =
    "animal_pos(john, p1) holds-at 0. animal_pos(dumpo, p1) holds-at 0. rides(john, dumpo) holds-at 0.\n"
    "animal_pos(jane, p4) holds-at 0. animal_pos(elly, p5) holds-at 0.\n"
    "opened(g1) holds-at 0. neg opened(g2) holds-at 0.\n";

std::vector<Transition> step(const GroundTheory& t, const State& s, const std::vector<std::string>& actions) {
  std::vector<ActionId> ids;
  for (const auto& a : actions) ids.push_back(*t.find_action(a));
  std::sort(ids.begin(), ids.end());
  return successor_states(t, s, ids);
}

TEST(ZooTransitions, DirectLawPreferredForTheRider) {
  GroundTheory dual = zoo_at(ZooVariant::kDual, {}, kRiderOnDumpo);
  auto d = step(dual, fixed_state(dual), {"move_to_position(dumpo,p2)"});
  ASSERT_EQ(d.size(), 1u);
  EXPECT_TRUE(d[0].target[*dual.find_fluent("animal_pos(john,p2)")]);
  EXPECT_TRUE(d[0].target[*dual.find_fluent("rides(john,dumpo)")]);

  GroundTheory indirect = zoo_at(ZooVariant::kIndirect, {}, kRiderOnDumpo);
  auto i = step(indirect, fixed_state(indirect), {"move_to_position(dumpo,p2)"});
  ASSERT_EQ(i.size(), 2u);
  std::set<std::string> rider;
  for (const auto& tr : i) {
    bool rides = tr.target[*indirect.find_fluent("rides(john,dumpo)")];
    bool at2 = tr.target[*indirect.find_fluent("animal_pos(john,p2)")];
    bool at1 = tr.target[*indirect.find_fluent("animal_pos(john,p1)")];
    rider.insert(rides && at2 ? "stays on" : !rides && at1 ? "comes off" : "other");
  }
  EXPECT_EQ(rider, (std::set<std::string>{"stays on", "comes off"}));

  GroundTheory direct = zoo_at(ZooVariant::kDirect, {}, kRiderOnDumpo);
  EXPECT_EQ(step(direct, fixed_state(direct), {"move_to_position(dumpo,p2)"}).size(), 1u);
}

TEST(ZooTransitions, GetoffDuringMove) {
  auto count = [](ZooVariant v) {
    GroundTheory t = zoo_at(v, {}, kRiderOnDumpo);
    return step(t, fixed_state(t), {"getoff(john,dumpo,p3)", "move_to_position(dumpo,p2)"});
  };
  auto dual = count(ZooVariant::kDual);
  EXPECT_EQ(dual.size(), 2u);
  auto indirect = count(ZooVariant::kIndirect);
  ASSERT_EQ(indirect.size(), 1u);
  GroundTheory t = zoo_at(ZooVariant::kIndirect, {}, kRiderOnDumpo);
  EXPECT_TRUE(indirect[0].target[*t.find_fluent("animal_pos(john,p3)")]);
  EXPECT_TRUE(count(ZooVariant::kDirect).empty());
}

std::string star_facts() { return "animal_pos(john, p1) holds-at 0. animal_pos(elly, p1) holds-at 0. rides(john, elly) holds-at 0. opened(g1) holds-at 0.\n"; }

TEST(ZooTransitions, ThrowoffLandsOnEveryReachablePosition) {
  for (std::size_t k = 1; k <= 8; ++k) {
    for (auto v : {ZooVariant::kDual, ZooVariant::kIndirect, ZooVariant::kDirect}) {
      GroundTheory t = zoo_at(v, {3, k}, star_facts());
      auto next = step(t, fixed_state(t), {"throwoff(elly,john)"});
      ASSERT_EQ(next.size(), k) << to_string(v);
      std::set<std::string> landed;
      for (const auto& tr : next) {
        for (std::size_t p = 2; p <= k + 1; ++p) {
          if (tr.target[*t.find_fluent("animal_pos(john,p" + std::to_string(p) + ")")]) landed.insert("p" + std::to_string(p));
        }
        EXPECT_FALSE(tr.target[*t.find_fluent("rides(john,elly)")]);
      }
      EXPECT_EQ(landed.size(), k);
    }
  }
}

TEST(ZooTransitions, ThrowoffMatchesTheOracle) {
  for (std::size_t k = 1; k <= 2; ++k) {
    for (auto v : {ZooVariant::kDual, ZooVariant::kDirect}) {
      GroundTheory t = zoo_at(v, {3, k}, star_facts());
      GroundTheory s = relevance_slice(t, parse_query("credulous { animal_pos(john, p2) holds-at 0 }"));
      State init = fixed_state(s);
      std::vector<ActionId> a{*s.find_action("throwoff(elly,john)")};
      EXPECT_EQ(successor_states(s, init, a), brute_force_successors(s, init, a, 20)) << to_string(v) << " " << k;
    }
  }
}

TEST(ZooTransitions, ThrowoffLandingIsCredulousOnly) {
  for (std::size_t k = 1; k <= 5; ++k) {
    std::string scenario = star_facts() + "throwoff(elly, john) happens-at 1.\n";
    GroundTheory t = ground(zoo_domain(ZooVariant::kDual, {3, k}, {scenario}), TimePoint{2});
    for (std::size_t p = 1; p <= k + 1; ++p) {
      std::string goal = "{ animal_pos(john, p" + std::to_string(p) + ") holds-at 2 }";
      bool leaf = p > 1;
      EXPECT_EQ(answer(t, parse_query("credulous " + goal)).answer, leaf ? Answer::kTrue : Answer::kFalse);
      EXPECT_EQ(answer(t, parse_query("skeptical " + goal)).answer, leaf && k == 1 ? Answer::kTrue : Answer::kFalse);
    }
  }
}

TEST(ZooTransitions, ScenarioBlocksPrecondition) {
  // Moving to a position that is not reachable leaves no model.
  std::string s = "animal_pos(john, p1) holds-at 0. move_to_position(john, p5) happens-at 1.\n";
  GroundTheory t = ground(zoo_domain(ZooVariant::kDual, {}, {s}), TimePoint{2});
  EXPECT_EQ(check_consistency(t).answer, Answer::kFalse);
}

TEST(ZooTransitions, GatesMoveAnimalsBetweenCages) {
  std::string s = "animal_pos(john, p2) holds-at 0. neg opened(g1) holds-at 0.\n"
                  "open_gate(john, g1) happens-at 1. pass_gate(john, g1) happens-at 2.\n";
  for (auto v : {ZooVariant::kDual, ZooVariant::kIndirect, ZooVariant::kDirect}) {
    GroundTheory t = ground(zoo_domain(v, {}, {s}), TimePoint{3});
    EXPECT_EQ(answer(t, parse_query("skeptical { animal_pos(john, p4) holds-at 3, reachable(john, p5) holds-at 3, "
                                    "neg reachable(john, p1) holds-at 3 }"))
                  .answer,
              Answer::kTrue)
        << to_string(v);
  }
  std::string elephant = "animal_pos(elly, p2) holds-at 0. open_gate(elly, g1) happens-at 1.\n";
  GroundTheory t = ground(zoo_domain(ZooVariant::kDual, {}, {elephant}), TimePoint{2});
  EXPECT_EQ(check_consistency(t).answer, Answer::kFalse);
}

TEST(Corpus, StatementTableMatchesTheFiles) {
  std::string doc = read_file(std::string(ELANG_CORPUS_DIR) + "/../docs/statements.md");
  std::regex row(R"(\| `([^`]+)`[^|]*\| `([a-z_]+\.e):(\d+)` \|)");
  std::size_t checked = 0;
  for (auto it = std::sregex_iterator(doc.begin(), doc.end(), row); it != std::sregex_iterator(); ++it) {
    std::istringstream lines(read_corpus_file((*it)[2]));
    std::string line;
    for (int n = std::stoi((*it)[3]); n > 0; --n) std::getline(lines, line);
    EXPECT_EQ(line, (*it)[1].str()) << (*it)[2] << ":" << (*it)[3];
    ++checked;
  }
  EXPECT_GE(checked, 29u);
}

}  // namespace
}  // namespace elang
