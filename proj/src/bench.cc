#include "elang/bench.h"

#include <sys/utsname.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "elang/parser.h"
#include "elang/sat.h"

#ifndef ELANG_VERSION
#define ELANG_VERSION "1.0.0"
#endif

namespace elang {
namespace {

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::vector<std::size_t> numbers(const KeyValueBlock& b, const std::string& key, std::vector<std::size_t> fallback) {
  if (!b.values.count(key)) return fallback;
  std::vector<std::size_t> out;
  for (const auto& w : words(b.at(key))) {
    try {
      out.push_back(std::stoul(w));
    } catch (const std::exception&) {
      throw SpecError("[" + b.name + "] " + key + ": not a number '" + w + "'");
    }
  }
  if (out.empty()) throw SpecError("[" + b.name + "] " + key + " is empty");
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

// `name(a,b)` as a ground atom.
Atom atom_from_name(const std::string& name) {
  Atom a;
  auto open = name.find('(');
  if (open == std::string::npos) {
    a.name = name;
    return a;
  }
  a.name = name.substr(0, open);
  std::string inner = name.substr(open + 1, name.size() - open - 2);
  std::istringstream in(inner);
  for (std::string arg; std::getline(in, arg, ',');) a.args.push_back(Term::Constant(trim(arg)));
  return a;
}

std::string resolve(const std::string& base_dir, const std::string& name) {
  namespace fs = std::filesystem;
  if (fs::path(name).is_absolute()) return name;
  if (!base_dir.empty() && fs::exists(fs::path(base_dir) / name)) return (fs::path(base_dir) / name).string();
  return corpus_dir() + "/" + name;
}

DomainDescription parse_texts(const std::vector<std::string>& texts) {
  std::vector<std::string_view> views(texts.begin(), texts.end());
  return parse_domain(views).domain;
}

std::set<FluentId> touched(const GroundTheory& t, ActionId a) {
  std::set<FluentId> out;
  for (auto i : t.cprops_by_action[a]) {
    out.insert(t.cprops[i].effect.fluent);
    for (const auto& l : t.cprops[i].condition) out.insert(l.fluent);
  }
  for (auto i : t.pprops_by_action[a]) {
    for (const auto& l : t.pprops[i].condition) out.insert(l.fluent);
  }
  return out;
}

Query probe_query(const GroundTheory& t, FluentId f) {
  Query q;
  q.goals.push_back({FluentLiteral{atom_from_name(t.fluent_names[f]), true}, TimePoint{0}});
  return q;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::kCompleteness:
      return "completeness";
    case Family::kIrrelevance:
      return "irrelevance";
    case Family::kRepresentation:
      return "representation";
    case Family::kScaling:
      return "scaling";
  }
  return "?";
}

std::string to_string(Backend b) { return b == Backend::kSat ? "sat" : "engine"; }

std::vector<ExperimentSpec> parse_experiments(const std::string& text, const std::string& base_dir) {
  std::vector<ExperimentSpec> specs;
  std::vector<KeyValueBlock> blocks;
  try {
    blocks = parse_key_values(text);
  } catch (const std::runtime_error& e) {
    throw SpecError(e.what());
  }
  static const std::set<std::string> known{"family", "domain", "scenario", "queries", "levels", "variants", "positions",
                                           "probes", "horizon", "repetitions", "backend", "budget", "slice"};
  for (const auto& b : blocks) {
    for (const auto& [k, v] : b.values) {
      if (!known.count(k)) throw SpecError("[" + b.name + "] unknown key '" + k + "'");
    }
    ExperimentSpec s;
    s.id = b.name;
    s.base_dir = base_dir;
    std::string family = b.get("family");
    if (family == "completeness") {
      s.family = Family::kCompleteness;
    } else if (family == "irrelevance") {
      s.family = Family::kIrrelevance;
    } else if (family == "representation") {
      s.family = Family::kRepresentation;
    } else if (family == "scaling") {
      s.family = Family::kScaling;
    } else {
      throw SpecError("[" + b.name + "] unknown family '" + family + "'");
    }
    s.domain = words(b.get("domain"));
    s.scenario = words(b.get("scenario"));
    std::istringstream qs(b.get("queries"));
    for (std::string q; std::getline(qs, q, ';');) {
      if (!trim(q).empty()) s.queries.push_back(trim(q));
    }
    if (s.queries.empty()) throw SpecError("[" + b.name + "] needs queries");
    for (const auto& q : s.queries) {
      try {
        parse_query(q);
      } catch (const std::exception& e) {
        throw SpecError("[" + b.name + "] bad query '" + q + "': " + e.what());
      }
    }
    s.levels = numbers(b, "levels", {0});
    s.positions = numbers(b, "positions", {6});
    if (b.values.count("variants")) {
      s.variants.clear();
      for (const auto& w : words(b.at("variants"))) {
        auto v = parse_variant(w);
        if (!v) throw SpecError("[" + b.name + "] unknown variant '" + w + "'");
        s.variants.push_back(*v);
      }
    }
    if (b.values.count("probes")) {
      try {
        s.probes = parse_goals(b.at("probes"));
      } catch (const std::exception& e) {
        throw SpecError("[" + b.name + "] bad probes: " + e.what());
      }
    }
    s.horizon = static_cast<std::uint32_t>(numbers(b, "horizon", {0})[0]);
    s.repetitions = numbers(b, "repetitions", {5})[0];
    s.budget = numbers(b, "budget", {0})[0];
    std::string backend = b.get("backend", "engine");
    if (backend != "engine" && backend != "sat") throw SpecError("[" + b.name + "] unknown backend '" + backend + "'");
    s.backend = backend == "sat" ? Backend::kSat : Backend::kEngine;
    std::string slice = b.get("slice", "off");
    if (slice != "on" && slice != "off") throw SpecError("[" + b.name + "] slice must be on or off");
    s.slice = slice == "on";

    if (s.repetitions < 3) throw SpecError("[" + b.name + "] repetitions must be at least 3");
    bool zoo = s.family == Family::kRepresentation || s.family == Family::kScaling;
    if (!zoo && s.domain.empty()) throw SpecError("[" + b.name + "] needs a domain");
    if (zoo && !s.domain.empty()) throw SpecError("[" + b.name + "] takes variants, not a domain");
    if (s.family == Family::kScaling && s.variants.size() != 1) throw SpecError("[" + b.name + "] needs one variant");
    for (auto p : s.positions) {
      if (p < 3 || p > 15) throw SpecError("[" + b.name + "] positions must lie within 3..15");
    }
    specs.push_back(std::move(s));
  }
  return specs;
}

std::string environment_fingerprint() {
  std::ostringstream out;
  utsname u{};
  if (uname(&u) == 0) out << u.sysname << " " << u.release << " " << u.machine;
  std::ifstream cpu("/proc/cpuinfo");
  for (std::string line; std::getline(cpu, line);) {
    if (line.rfind("model name", 0) == 0) {
      out << "; " << trim(line.substr(line.find(':') + 1));
      break;
    }
  }
  out << "; " << std::thread::hardware_concurrency() << " threads";
#ifdef __VERSION__
  out << "; compiler " << __VERSION__;
#endif
#ifdef NDEBUG
  out << "; optimized";
#else
  out << "; debug";
#endif
  out << "; elang " << ELANG_VERSION;
  return out.str();
}

DomainDescription inject_irrelevant(const DomainDescription& scenario, const GroundTheory& theory, const Query& query,
                                    std::size_t k) {
  if (k == 0) return scenario;
  GroundTheory slice = relevance_slice(theory, query);
  std::set<std::string> relevant(slice.fluent_names.begin(), slice.fluent_names.end());
  std::vector<ActionId> candidates;
  for (ActionId a = 0; a < theory.action_names.size(); ++a) {
    auto fs = touched(theory, a);
    bool disjoint = !fs.empty();
    for (auto f : fs) disjoint = disjoint && !relevant.count(theory.fluent_names[f]);
    if (disjoint) candidates.push_back(a);
  }
  if (candidates.empty()) throw std::invalid_argument("no action is irrelevant to the query");
  std::sort(candidates.begin(), candidates.end(),
            [&](ActionId x, ActionId y) { return theory.action_names[x] < theory.action_names[y]; });

  DomainDescription out = scenario;
  std::uint32_t last = std::max<std::uint32_t>(theory.horizon.value, 1);
  std::size_t added = 0;
  std::set<std::pair<std::uint32_t, ActionId>> used;
  for (const auto& [t, acts] : theory.occurrences) {
    for (auto a : acts) used.insert({t, a});
  }
  bool progress = true;
  while (added < k && progress) {
    progress = false;
    for (std::uint32_t t = 0; t < last && added < k; ++t) {
      for (ActionId a : candidates) {
        if (used.count({t, a})) continue;
        DomainDescription trial = out;
        trial.propositions.push_back(HProp{atom_from_name(theory.action_names[a]), TimePoint{t}});
        GroundTheory g = ground(trial, TimePoint{std::max(theory.horizon.value, t + 1)});
        GroundTheory part = relevance_slice(g, probe_query(g, *touched(theory, a).begin()));
        if (check_consistency(part).answer != Answer::kTrue) continue;
        used.insert({t, a});
        out = std::move(trial);
        ++added;
        progress = true;
        break;
      }
    }
  }
  if (added < k) throw std::invalid_argument("only " + std::to_string(added) + " irrelevant occurrences fit");
  return out;
}

DomainDescription enrich_scenario(const DomainDescription& scenario, const GroundTheory& theory, std::size_t level,
                                  const std::vector<TProp>& probes) {
  if (level == 0) return scenario;
  QueryOptions sliced;
  sliced.slice = true;
  if (check_consistency(theory, sliced).answer != Answer::kTrue) {
    throw std::invalid_argument("cannot enrich an inconsistent scenario");
  }
  std::vector<TProp> order = probes;
  if (order.empty()) {
    for (FluentId f : theory.open_fluents()) order.push_back(probe_query(theory, f).goals[0]);
  }
  std::stable_sort(order.begin(), order.end(), [](const TProp& a, const TProp& b) { return a.time < b.time; });
  DomainDescription out = scenario;
  std::size_t added = 0;
  for (const auto& p : order) {
    if (added == level) break;
    for (bool positive : {p.literal.positive, !p.literal.positive}) {
      Query q;
      q.mode = Query::Mode::kSkeptical;
      q.goals.push_back({FluentLiteral{p.literal.atom, positive}, p.time});
      if (answer(theory, q, sliced).answer != Answer::kTrue) continue;
      out.propositions.push_back(q.goals[0]);
      ++added;
      break;
    }
  }
  return out;
}

namespace {

class Runner {
 public:
  Runner(const ExperimentSpec& spec, std::ostream* records) : spec_(spec), records_(records) {}

  std::vector<std::string> texts(const std::vector<std::string>& names) const {
    std::vector<std::string> out;
    for (const auto& n : names) out.push_back(read_file(resolve(spec_.base_dir, n)));
    return out;
  }

  TimePoint horizon(const DomainDescription& d, const Query& q) const {
    if (q.horizon) return *q.horizon;
    TimePoint h = default_horizon(d, q);
    return spec_.horizon ? TimePoint{std::max(spec_.horizon, h.value)} : h;
  }

  ResultRow measure(const DomainDescription& d, const std::string& text, const std::string& knob,
                    const std::string& value) {
    Query q = parse_query(text);
    TimePoint h = horizon(d, q);
    auto g0 = std::chrono::steady_clock::now();
    GroundTheory theory = ground(d, h);
    double ground_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - g0).count();
    GroundStats stats = theory.stats();

    ResultRow row;
    row.experiment = spec_.id;
    row.family = spec_.family;
    row.knob = knob;
    row.value = value;
    row.query = text;
    row.fluents = stats.fluents;
    row.clauses_per_time = stats.clauses_per_time;
    row.ground_seconds = ground_seconds;

    QueryOptions options;
    options.budget = spec_.budget;
    options.slice = spec_.slice;
    std::vector<double> times;
    std::set<Answer> answers;
    EntailmentResult last;
    for (std::size_t rep = 0; rep <= spec_.repetitions; ++rep) {
      auto start = std::chrono::steady_clock::now();
      try {
        last = spec_.backend == Backend::kSat ? sat_answer(theory, q, options) : answer(theory, q, options);
      } catch (const FragmentError& e) {
        row.answer = "unsupported";
        row.flag = "fragment";
        return row;
      }
      double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      answers.insert(last.answer);
      // The first run warms caches and is discarded.
      if (rep > 0) times.push_back(seconds);
    }
    row.answer = to_string(last.answer);
    row.median = median_of(times);
    row.min = *std::min_element(times.begin(), times.end());
    row.max = *std::max_element(times.begin(), times.end());
    row.nodes = last.stats.nodes;
    row.initial_states = last.stats.initial_states;
    row.slice_fluents = last.stats.slice_fluents;
    if (answers.size() > 1) {
      row.flag = "unstable";
    } else if (last.answer == Answer::kBudgetExceeded) {
      row.flag = "budget";
    }
    if (records_) write_record(*records_, q, h, last);
    return row;
  }

  ResultTable run() {
    ResultTable table{environment_fingerprint(), {}};
    auto scenario = texts(spec_.scenario);
    switch (spec_.family) {
      case Family::kCompleteness: {
        auto all = texts(spec_.domain);
        all.insert(all.end(), scenario.begin(), scenario.end());
        DomainDescription base = parse_texts(all);
        std::uint32_t h = 0;
        for (const auto& q : spec_.queries) h = std::max(h, horizon(base, parse_query(q)).value);
        GroundTheory theory = ground(base, TimePoint{h});
        for (auto level : spec_.levels) {
          DomainDescription d = enrich_scenario(base, theory, level, spec_.probes);
          for (const auto& q : spec_.queries) table.rows.push_back(measure(d, q, "level", std::to_string(level)));
        }
        check_invariance(table);
        break;
      }
      case Family::kIrrelevance: {
        auto all = texts(spec_.domain);
        all.insert(all.end(), scenario.begin(), scenario.end());
        DomainDescription base = parse_texts(all);
        for (auto k : spec_.levels) {
          for (const auto& text : spec_.queries) {
            Query q = parse_query(text);
            GroundTheory theory = ground(base, horizon(base, q));
            DomainDescription d = inject_irrelevant(base, theory, q, k);
            table.rows.push_back(measure(d, text, "k", std::to_string(k)));
          }
        }
        check_invariance(table);
        break;
      }
      case Family::kRepresentation:
        for (auto v : spec_.variants) {
          DomainDescription d = zoo_domain(v, {spec_.positions[0], 0}, scenario);
          for (const auto& q : spec_.queries) table.rows.push_back(measure(d, q, "variant", to_string(v)));
        }
        break;
      case Family::kScaling:
        for (auto n : spec_.positions) {
          DomainDescription d = zoo_domain(spec_.variants[0], {n, 0}, scenario);
          for (const auto& q : spec_.queries) table.rows.push_back(measure(d, q, "positions", std::to_string(n)));
        }
        break;
    }
    return table;
  }

 private:
  // Rows of one query must share the answer of the first knob value.
  static void check_invariance(ResultTable& table) {
    std::map<std::string, std::string> first;
    for (auto& r : table.rows) {
      auto [it, fresh] = first.emplace(r.query, r.answer);
      if (!fresh && it->second != r.answer && r.flag.empty()) r.flag = "answer-changed";
    }
  }

  const ExperimentSpec& spec_;
  std::ostream* records_;
};

const char* kColumns[] = {"experiment", "family", "knob",    "value",          "query",           "answer",
                          "median_s",   "min_s",  "max_s",   "nodes",          "initial_states",  "slice_fluents",
                          "fluents",    "clauses_per_time", "ground_s", "flag"};

}  // namespace

ResultTable run_experiment(const ExperimentSpec& spec, std::ostream* records) { return Runner(spec, records).run(); }

void write_tsv(std::ostream& out, const ResultTable& table) {
  out << "# " << table.fingerprint << "\n";
  bool first = true;
  for (const char* c : kColumns) {
    out << (first ? "" : "\t") << c;
    first = false;
  }
  out << "\n";
  for (const auto& r : table.rows) {
    out << r.experiment << "\t" << to_string(r.family) << "\t" << r.knob << "\t" << r.value << "\t" << r.query << "\t"
        << r.answer << "\t" << r.median << "\t" << r.min << "\t" << r.max << "\t" << r.nodes << "\t"
        << r.initial_states << "\t" << r.slice_fluents << "\t" << r.fluents << "\t" << r.clauses_per_time << "\t"
        << r.ground_seconds << "\t" << (r.flag.empty() ? "-" : r.flag) << "\n";
  }
}

ResultTable read_tsv(std::istream& in) {
  ResultTable table;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw std::runtime_error("missing fingerprint line");
  table.fingerprint = line.substr(2);
  if (!std::getline(in, line)) throw std::runtime_error("missing column header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream cells(line);
    for (std::string c; std::getline(cells, c, '\t');) f.push_back(c);
    if (f.size() != std::size(kColumns)) throw std::runtime_error("bad row: " + line);
    ResultRow r;
    r.experiment = f[0];
    for (auto fam : {Family::kCompleteness, Family::kIrrelevance, Family::kRepresentation, Family::kScaling}) {
      if (to_string(fam) == f[1]) r.family = fam;
    }
    r.knob = f[2];
    r.value = f[3];
    r.query = f[4];
    r.answer = f[5];
    r.median = std::stod(f[6]);
    r.min = std::stod(f[7]);
    r.max = std::stod(f[8]);
    r.nodes = std::stoul(f[9]);
    r.initial_states = std::stoul(f[10]);
    r.slice_fluents = std::stoul(f[11]);
    r.fluents = std::stoul(f[12]);
    r.clauses_per_time = std::stoul(f[13]);
    r.ground_seconds = std::stod(f[14]);
    r.flag = f[15] == "-" ? "" : f[15];
    table.rows.push_back(std::move(r));
  }
  return table;
}

double total_median(const ResultTable& table, const std::string& value) {
  double sum = 0;
  for (const auto& r : table.rows) {
    if (r.value == value) sum += r.median;
  }
  return sum;
}

}  // namespace elang
