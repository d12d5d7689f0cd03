#include "elang/bench.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "elang/parser.h"
#include "test_support.h"

namespace elang {
namespace {

using testing::corpus_domain;

std::size_t count_occurrences(const DomainDescription& d) {
  return std::count_if(d.propositions.begin(), d.propositions.end(),
                       [](const Proposition& p) { return std::holds_alternative<HProp>(p); });
}

std::size_t count_observations(const DomainDescription& d) {
  return std::count_if(d.propositions.begin(), d.propositions.end(),
                       [](const Proposition& p) { return std::holds_alternative<TProp>(p); });
}

DomainDescription zoo_base() { return zoo_domain(ZooVariant::kDual, {}, {read_corpus_file("zoo_scenario.e")}); }

TEST(Bench, ZeroLevelsLeaveTheScenario) {
  DomainDescription d = corpus_domain({"bulb.e"});
  GroundTheory t = ground(d, TimePoint{5});
  Query q = parse_query("skeptical { Light holds-at 4 }");
  EXPECT_EQ(inject_irrelevant(d, t, q, 0), d);
  EXPECT_EQ(enrich_scenario(d, t, 0), d);
}

TEST(Bench, EnrichmentAddsSkepticalConclusions) {
  DomainDescription d = corpus_domain({"bulb.e"});
  GroundTheory t = ground(d, TimePoint{5});
  auto probes = parse_goals("Normal holds-at 2, Light holds-at 1, Light holds-at 3");
  DomainDescription e = enrich_scenario(d, t, 3, probes);
  ASSERT_EQ(count_observations(e), count_observations(d) + 3);
  GroundTheory et = ground(e, TimePoint{5});
  std::vector<Observation> added;
  for (const auto& o : et.observations) {
    if (o.time.value > 0) added.push_back(o);
  }
  ASSERT_EQ(added.size(), 3u);
  EXPECT_FALSE(added[0].literal.positive);  // neg Light at 1, earliest first
  EXPECT_EQ(et.fluent_names[added[0].literal.fluent], "Light");
  Query q = parse_query("skeptical { Light holds-at 4 }");
  EXPECT_EQ(answer(t, q).answer, answer(et, q).answer);
}

TEST(Bench, EnrichmentStopsAtLevelAndSkipsOpenProbes) {
  DomainDescription d = corpus_domain({"bulb_noinit.e"});
  GroundTheory t = ground(d, TimePoint{5});
  // Normal is open at 0 and stays open, so no probe on it is added.
  auto probes = parse_goals("Normal holds-at 0, Normal holds-at 3, Light holds-at 0, Light holds-at 1");
  DomainDescription e = enrich_scenario(d, t, 1, probes);
  ASSERT_EQ(count_observations(e), count_observations(d) + 1);
  EXPECT_EQ(to_string(e.propositions.back()), "neg Light holds-at 0.");
}

TEST(Bench, InjectionKeepsTheQuerySliceAndAnswer) {
  DomainDescription d = zoo_base();
  Query q = parse_query("skeptical { animal_pos(john, p1) holds-at 3 }");
  GroundTheory t = ground(d, default_horizon(d, q));
  DomainDescription injected = inject_irrelevant(d, t, q, 3);
  EXPECT_EQ(count_occurrences(injected), count_occurrences(d) + 3);
  GroundTheory it = ground(injected, t.horizon);
  EXPECT_EQ(relevance_slice(it, q).fluent_names, relevance_slice(t, q).fluent_names);
  EXPECT_EQ(answer(it, q).answer, answer(t, q).answer);
  QueryOptions sliced;
  sliced.slice = true;
  EXPECT_EQ(check_consistency(it, sliced).answer, Answer::kTrue);
}

TEST(Bench, InjectionNeedsADisjointAction) {
  DomainDescription d = corpus_domain({"bulb.e"});
  GroundTheory t = ground(d, TimePoint{5});
  Query q = parse_query("credulous { Light holds-at 4, Normal holds-at 4 }");
  EXPECT_THROW(inject_irrelevant(d, t, q, 1), std::invalid_argument);
}

TEST(Bench, ParsesExperimentSpecs) {
  auto specs = parse_experiments(
      "[c]\nfamily = completeness\ndomain = bulb.e\nqueries = skeptical { Light holds-at 4 }; credulous { Light holds-at 4 }\n"
      "levels = 0 1 2\nprobes = Light holds-at 1\nrepetitions = 3\nslice = on\n"
      "[r]\nfamily = representation\nscenario = zoo_scenario.e\nvariants = direct indirect\n"
      "queries = skeptical { animal_pos(john, p1) holds-at 3 }\nbackend = engine\n");
  ASSERT_EQ(specs.size(), 2u);
  EXPECT_EQ(specs[0].queries.size(), 2u);
  EXPECT_EQ(specs[0].levels, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(specs[0].probes.size(), 1u);
  EXPECT_TRUE(specs[0].slice);
  EXPECT_EQ(specs[1].family, Family::kRepresentation);
  EXPECT_EQ(specs[1].variants, (std::vector<ZooVariant>{ZooVariant::kDirect, ZooVariant::kIndirect}));
  EXPECT_EQ(specs[1].repetitions, 5u);
}

TEST(Bench, RejectsBadSpecs) {
  const char* bad[] = {
      "[x]\nfamily = speed\ndomain = bulb.e\nqueries = credulous { Light holds-at 1 }\n",
      "[x]\nfamily = completeness\nqueries = credulous { Light holds-at 1 }\n",
      "[x]\nfamily = completeness\ndomain = bulb.e\nqueries = credulous { Light }\n",
      "[x]\nfamily = completeness\ndomain = bulb.e\nqueries = credulous { Light holds-at 1 }\nrepetitions = 2\n",
      "[x]\nfamily = completeness\ndomain = bulb.e\nqueries = credulous { Light holds-at 1 }\ncolour = red\n",
      "[x]\nfamily = scaling\nvariants = dual\npositions = 3 16\nqueries = credulous { rides(john, elly) holds-at 0 }\n",
      "[x]\nfamily = scaling\nvariants = dual indirect\nqueries = credulous { rides(john, elly) holds-at 0 }\n",
      "[x]\nfamily = representation\nvariants = sideways\nqueries = credulous { rides(john, elly) holds-at 0 }\n",
      "[x]\nfamily = completeness\ndomain = bulb.e\nqueries = credulous { Light holds-at 1 }\nslice = maybe\n",
  };
  for (const char* text : bad) EXPECT_THROW(parse_experiments(text), SpecError) << text;
}

TEST(Bench, CompletenessRunKeepsAnswers) {
  auto specs = parse_experiments(
      "[c]\nfamily = completeness\ndomain = bulb.e\nqueries = skeptical { Light holds-at 4 }\nlevels = 0 2\n"
      "repetitions = 3\n");
  std::ostringstream records;
  ResultTable table = run_experiment(specs[0], &records);
  ASSERT_EQ(table.rows.size(), 2u);
  for (const auto& r : table.rows) {
    EXPECT_EQ(r.answer, "true");
    EXPECT_EQ(r.flag, "");
    EXPECT_LE(r.min, r.median);
    EXPECT_LE(r.median, r.max);
  }
  EXPECT_EQ(table.rows[1].value, "2");
  EXPECT_NE(records.str().find("skeptical"), std::string::npos);
}

TEST(Bench, SatBackendFlagsOutsideTheFragment) {
  auto specs = parse_experiments(
      "[r]\nfamily = representation\nscenario = zoo_scenario.e\nvariants = direct dual\nbackend = sat\n"
      "queries = skeptical { rides(john, elly) holds-at 1 }\nrepetitions = 3\n");
  ResultTable table = run_experiment(specs[0]);
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.rows[0].flag, "fragment");
  EXPECT_EQ(table.rows[1].flag, "fragment");
}

TEST(Bench, ScalingRowsCarryGroundStats) {
  auto specs = parse_experiments(
      "[s]\nfamily = scaling\nscenario = zoo_scenario.e\nvariants = indirect\npositions = 6 8\nslice = on\n"
      "queries = skeptical { rides(john, elly) holds-at 1 }\nrepetitions = 3\n");
  ResultTable table = run_experiment(specs[0]);
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_LT(table.rows[0].fluents, table.rows[1].fluents);
  EXPECT_LT(table.rows[0].clauses_per_time, table.rows[1].clauses_per_time);
  EXPECT_EQ(table.rows[0].answer, "true");
}

TEST(Bench, TsvRoundTrip) {
  ResultTable table{"linux; test", {}};
  ResultRow r;
  r.experiment = "e";
  r.family = Family::kIrrelevance;
  r.knob = "k";
  r.value = "3";
  r.query = "skeptical { Light holds-at 4 }";
  r.answer = "true";
  r.median = 0.25;
  r.min = 0.125;
  r.max = 0.5;
  r.nodes = 7;
  r.fluents = 2;
  r.flag = "budget";
  table.rows.push_back(r);
  r.value = "4";
  r.flag = "";
  table.rows.push_back(r);
  std::stringstream s;
  write_tsv(s, table);
  ResultTable back = read_tsv(s);
  EXPECT_EQ(back.fingerprint, table.fingerprint);
  EXPECT_EQ(back.rows, table.rows);
  EXPECT_DOUBLE_EQ(total_median(back, "3"), 0.25);
}

TEST(Bench, FingerprintNamesTheMachine) {
  std::string f = environment_fingerprint();
  EXPECT_NE(f.find("elang"), std::string::npos);
  EXPECT_NE(f.find("threads"), std::string::npos);
}

}  // namespace
}  // namespace elang
