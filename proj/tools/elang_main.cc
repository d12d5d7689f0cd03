// Command line front end: check, query, ground, bench and corpus.
//
// Exit status: 0 success or true, 1 false, 2 inconsistent domain, 3 input
// error, 4 usage error, 5 budget exceeded, 6 outside the SAT fragment.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "elang/bench.h"
#include "elang/corpus.h"
#include "elang/grounder.h"
#include "elang/parser.h"
#include "elang/query.h"
#include "elang/sat.h"

namespace {

using namespace elang;

enum Exit { kTrue = 0, kFalse = 1, kInconsistent = 2, kInputError = 3, kUsage = 4, kBudget = 5, kFragment = 6 };

// Paths that do not exist are looked up in the corpus.
std::string load(const std::string& path) {
  if (std::filesystem::exists(path)) return read_file(path);
  if (std::filesystem::exists(corpus_dir() + "/" + path)) return read_corpus_file(path);
  throw std::runtime_error("cannot open " + path);
}

std::string location(const std::vector<std::string>& files, const SourceSpan& s) {
  std::string name = s.file < files.size() ? files[s.file] : "?";
  return name + ":" + std::to_string(s.line) + ":" + std::to_string(s.column);
}

DomainDescription load_domain(const std::vector<std::string>& files) {
  std::vector<std::string> texts;
  for (const auto& f : files) texts.push_back(load(f));
  std::vector<std::string_view> views(texts.begin(), texts.end());
  ParsedUnit unit;
  try {
    unit = parse_domain(views);
  } catch (const ParseError& e) {
    throw std::runtime_error(location(files, e.span()) + ": " + to_string(e.kind()) + ": " + e.what());
  }
  auto diags = validate(unit.domain, &unit.spans);
  diags.insert(diags.end(), unit.warnings.begin(), unit.warnings.end());
  for (const auto& d : diags) {
    std::cerr << (d.span ? location(files, *d.span) + ": " : "")
              << (d.severity == Diagnostic::Severity::kError ? "error: " : "warning: ") << d.message << "\n";
  }
  if (has_errors(diags)) throw std::runtime_error("domain has errors");
  return unit.domain;
}

int exit_for(Answer a) {
  switch (a) {
    case Answer::kTrue:
      return kTrue;
    case Answer::kFalse:
      return kFalse;
    case Answer::kInconsistent:
      return kInconsistent;
    case Answer::kBudgetExceeded:
      return kBudget;
  }
  return kInputError;
}

QueryOptions options_from(const std::string& slice, std::size_t budget) {
  QueryOptions o;
  o.slice = slice == "on";
  o.budget = budget;
  return o;
}

int run_check(const std::vector<std::string>& files, const std::string& slice) {
  DomainDescription d = load_domain(files);
  GroundTheory t = ground(d, TimePoint{max_time(d) + 1});
  EntailmentResult r = check_consistency(t, options_from(slice, 0));
  std::cout << (r.answer == Answer::kTrue ? "consistent" : "inconsistent") << "\n";
  return r.answer == Answer::kTrue ? kTrue : kInconsistent;
}

struct QueryArgs {
  std::vector<std::string> files;
  std::string query_file;
  std::string goal;
  std::string mode = "credulous";
  std::uint32_t horizon = 0;
  std::string backend = "engine";
  std::string slice = "off";
  std::size_t budget = 0;
  bool record = false;
};

int run_query(const QueryArgs& a) {
  Query q;
  if (!a.query_file.empty()) {
    q = parse_query(load(a.query_file));
  } else {
    q.goals = parse_goals(a.goal);
    q.mode = a.mode == "skeptical" ? Query::Mode::kSkeptical : Query::Mode::kCredulous;
  }
  if (a.horizon) q.horizon = TimePoint{a.horizon};
  DomainDescription d = load_domain(a.files);
  TimePoint h = q.horizon ? *q.horizon : default_horizon(d, q);
  GroundTheory t = ground(d, h);
  QueryOptions o = options_from(a.slice, a.budget);
  EntailmentResult r;
  try {
    r = a.backend == "sat" ? sat_answer(t, q, o) : answer(t, q, o);
  } catch (const FragmentError& e) {
    std::cerr << "outside the SAT fragment: " << e.what() << "\n";
    return kFragment;
  }
  if (a.record) {
    write_record(std::cout, q, h, r);
  } else {
    std::cout << to_string(r.answer) << "\n";
  }
  return exit_for(r.answer);
}

int run_ground(const std::vector<std::string>& files, std::uint32_t horizon, bool stats, const std::string& dimacs) {
  DomainDescription d = load_domain(files);
  GroundTheory t = ground(d, TimePoint{horizon ? horizon : max_time(d) + 1});
  if (!dimacs.empty()) {
    CnfInstance cnf;
    try {
      cnf = compile(t);
    } catch (const FragmentError& e) {
      std::cerr << "outside the SAT fragment: " << e.what() << "\n";
      return kFragment;
    }
    std::ofstream out(dimacs);
    write_dimacs(out, cnf);
    std::ofstream prov(dimacs + ".map");
    write_provenance(prov, cnf);
    std::cout << "wrote " << cnf.num_vars << " variables, " << cnf.clauses.size() << " clauses to " << dimacs << "\n";
  }
  if (stats) {
    GroundStats s = t.stats();
    std::cout << "horizon\t" << t.horizon.value << "\n"
              << "fluents\t" << s.fluents << "\n"
              << "constant_atoms\t" << s.constant_atoms << "\n"
              << "constant_true\t" << s.constant_true << "\n"
              << "actions\t" << s.actions << "\n"
              << "cprops\t" << s.cprops << "\n"
              << "rprops\t" << s.rprops << "\n"
              << "denials\t" << s.denials << "\n"
              << "pprops\t" << s.pprops << "\n"
              << "occurrences\t" << s.occurrences << "\n"
              << "observations\t" << s.observations << "\n"
              << "condition_literals\t" << s.condition_literals << "\n"
              << "clauses_per_time\t" << s.clauses_per_time << "\n"
              << "clauses_total\t" << s.clauses_per_time * (t.horizon.value + 1) << "\n";
  } else if (dimacs.empty()) {
    for (const auto& f : t.fluent_names) std::cout << "fluent " << f << "\n";
    for (const auto& a : t.action_names) std::cout << "action " << a << "\n";
  }
  return kTrue;
}

int run_bench(const std::string& spec_file, const std::string& out_path, const std::string& records_path,
              const std::string& only) {
  std::string base = std::filesystem::path(spec_file).parent_path().string();
  auto specs = parse_experiments(load(spec_file), base);
  std::ofstream records;
  if (!records_path.empty()) records.open(records_path);
  ResultTable all{environment_fingerprint(), {}};
  for (const auto& s : specs) {
    if (!only.empty() && s.id != only) continue;
    std::cerr << "running " << s.id << "\n";
    ResultTable t = run_experiment(s, records_path.empty() ? nullptr : &records);
    all.rows.insert(all.rows.end(), t.rows.begin(), t.rows.end());
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  write_tsv(out, all);
  int flagged = 0;
  for (const auto& r : all.rows) {
    if (r.flag == "answer-changed" || r.flag == "unstable") {
      std::cerr << "warning: " << r.experiment << " " << r.knob << "=" << r.value << " " << r.query << ": " << r.flag
                << "\n";
      ++flagged;
    }
  }
  std::cout << all.rows.size() << " rows written to " << out_path << "\n";
  return flagged ? kFalse : kTrue;
}

int run_verify(const std::string& slice) {
  auto outcomes = run_golden(options_from(slice, 0));
  write_report(std::cout, outcomes);
  std::size_t failed = 0;
  for (const auto& o : outcomes) failed += !o.passed;
  std::cout << outcomes.size() - failed << "/" << outcomes.size() << " golden cases pass\n";
  return failed ? kFalse : kTrue;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reasoning about actions in Language E"};
  app.require_subcommand(1);

  std::vector<std::string> check_files;
  std::string check_slice = "on";
  auto* check = app.add_subcommand("check", "parse, validate and test consistency");
  check->add_option("files", check_files, "domain files, parsed as one domain")->required();
  check->add_option("--slice", check_slice, "check components separately")->check(CLI::IsMember({"on", "off"}));

  QueryArgs qa;
  auto* query = app.add_subcommand("query", "answer a credulous or skeptical query");
  query->add_option("files", qa.files, "domain files, parsed as one domain")->required();
  auto* qfile = query->add_option("--query", qa.query_file, "query file");
  auto* qgoal = query->add_option("--goal", qa.goal, "goals as `L holds-at T, ...`");
  qfile->excludes(qgoal);
  query->add_option("--mode", qa.mode)->check(CLI::IsMember({"credulous", "skeptical"}));
  query->add_option("--horizon", qa.horizon, "last time point");
  query->add_option("--backend", qa.backend)->check(CLI::IsMember({"engine", "sat"}));
  query->add_option("--slice", qa.slice)->check(CLI::IsMember({"on", "off"}));
  query->add_option("--budget", qa.budget, "search node limit, 0 for none");
  query->add_flag("--record", qa.record, "print the full result record");

  std::vector<std::string> ground_files;
  std::uint32_t ground_horizon = 0;
  bool ground_stats = false;
  std::string dimacs;
  auto* groundc = app.add_subcommand("ground", "instantiate a domain");
  groundc->add_option("files", ground_files)->required();
  groundc->add_option("--horizon", ground_horizon);
  groundc->add_flag("--stats", ground_stats, "print size statistics");
  groundc->add_option("--dimacs", dimacs, "write the CNF encoding and its clause map");

  std::string spec_file, out_path, records_path, only;
  auto* bench = app.add_subcommand("bench", "run an experiment spec");
  bench->add_option("spec", spec_file)->required();
  bench->add_option("--out", out_path, "TSV result table")->required();
  bench->add_option("--records", records_path, "query result records");
  bench->add_option("--only", only, "run one experiment by id");

  auto* corpus = app.add_subcommand("corpus", "shipped domains");
  corpus->require_subcommand(1);
  std::string verify_slice = "off";
  auto* verify = corpus->add_subcommand("verify", "run the golden regressions");
  verify->add_option("--slice", verify_slice)->check(CLI::IsMember({"on", "off"}));
  ZooOptions world_options;
  auto* world = corpus->add_subcommand("world", "print a generated zoo landscape");
  world->add_option("--positions", world_options.positions);
  world->add_option("--star", world_options.star_leaves, "hub with this many leaves");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }
  if (query->parsed() && qa.query_file.empty() && qa.goal.empty()) {
    std::cerr << "query needs --query or --goal\n";
    return kUsage;
  }

  try {
    if (check->parsed()) return run_check(check_files, check_slice);
    if (query->parsed()) return run_query(qa);
    if (groundc->parsed()) return run_ground(ground_files, ground_horizon, ground_stats, dimacs);
    if (bench->parsed()) return run_bench(spec_file, out_path, records_path, only);
    if (verify->parsed()) return run_verify(verify_slice);
    if (world->parsed()) {
      std::cout << zoo_world(world_options);
      return kTrue;
    }
  } catch (const SpecError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kUsage;
}
