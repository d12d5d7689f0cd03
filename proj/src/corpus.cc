#include "elang/corpus.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "elang/grounder.h"

namespace elang {
namespace {

std::string position(std::size_t i) { return "p" + std::to_string(i); }

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Terrain {
  std::vector<std::vector<std::size_t>> cages;
  std::size_t exterior = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::pair<std::size_t, std::size_t>> gates;
};

Terrain terrain(const ZooOptions& o) {
  Terrain t;
  if (o.star_leaves) {
    std::vector<std::size_t> all{1};
    for (std::size_t i = 0; i < o.star_leaves; ++i) {
      all.push_back(i + 2);
      t.edges.push_back({1, i + 2});
    }
    t.cages.push_back(all);
    return t;
  }
  if (o.positions < 3 || o.positions > 15) throw std::invalid_argument("zoo positions must be within 3..15");
  t.exterior = o.positions;
  for (std::size_t p = 1; p < o.positions; p += 3) {
    std::vector<std::size_t> cage;
    for (std::size_t q = p; q < p + 3 && q < o.positions; ++q) cage.push_back(q);
    t.cages.push_back(cage);
  }
  for (const auto& cage : t.cages) {
    for (std::size_t i = 0; i < cage.size(); ++i) {
      for (std::size_t j = i + 1; j < cage.size(); ++j) t.edges.push_back({cage[i], cage[j]});
    }
  }
  for (std::size_t c = 0; c + 1 < t.cages.size(); ++c) {
    const auto& cage = t.cages[c];
    t.gates.push_back({cage[std::min<std::size_t>(1, cage.size() - 1)], t.cages[c + 1][0]});
  }
  t.gates.push_back({t.cages[0].back(), t.exterior});
  return t;
}

}  // namespace

std::string corpus_dir() {
  if (const char* env = std::getenv("ELANG_CORPUS_DIR"); env && *env) return env;
  return ELANG_CORPUS_DIR;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string read_corpus_file(const std::string& name) { return read_file(corpus_dir() + "/" + name); }

ParsedUnit load_files(const std::vector<std::string>& names) {
  std::vector<std::string> texts;
  for (const auto& n : names) texts.push_back(read_corpus_file(n));
  std::vector<std::string_view> views(texts.begin(), texts.end());
  return parse_domain(views);
}

std::string zoo_world(const ZooOptions& options) {
  Terrain t = terrain(options);
  bool star = options.star_leaves != 0;
  std::size_t n = star ? options.star_leaves + 1 : options.positions;
  std::vector<std::string> positions;
  for (std::size_t i = 1; i <= n; ++i) positions.push_back(position(i));
  std::vector<std::string> animals =
      star ? std::vector<std::string>{"john", "elly"} : std::vector<std::string>{"john", "jane", "elly", "dumpo"};

  std::ostringstream out;
  if (star) {
    out << "% Zoo landscape: hub p1 with " << options.star_leaves << " leaf positions.\n";
  } else {
    out << "% Zoo landscape over " << n << " positions.\n";
    for (std::size_t c = 0; c < t.cages.size(); ++c) {
      std::vector<std::string> names;
      for (auto p : t.cages[c]) names.push_back(position(p));
      out << "% cage " << c + 1 << ": " << join(names, " ") << "\n";
    }
    out << "% exterior: " << position(t.exterior) << "\n";
  }
  out << "\n";
  out << "sort animals: " << join(animals, ", ") << ".\n";
  out << "sort species: human, elephant.\n";
  out << "sort positions: " << join(positions, ", ") << ".\n";
  std::vector<std::string> gates;
  for (std::size_t g = 1; g <= std::max<std::size_t>(t.gates.size(), 1); ++g) gates.push_back("g" + std::to_string(g));
  out << "sort gates: " << join(gates, ", ") << ".\n\n";

  for (const auto& a : animals) out << "animal(" << a << ") holds-at 0.\n";
  for (const auto& p : positions) out << "position(" << p << ") holds-at 0.\n";
  for (const auto& a : animals) {
    bool human = a == "john" || a == "jane";
    out << "animal_species(" << a << ", " << (human ? "human" : "elephant") << ") holds-at 0.\n";
  }
  for (const auto& a : animals) {
    if (a != "dumpo") out << "animal_is_adult(" << a << ") holds-at 0.\n";
  }
  out << "species_is_large(elephant) holds-at 0.\n\n";

  for (const auto& [a, b] : t.edges) out << "neighbor_pos(" << position(a) << ", " << position(b) << ") holds-at 0.\n";
  for (std::size_t g = 0; g < t.gates.size(); ++g) {
    out << "gate_link(" << gates[g] << ", " << position(t.gates[g].first) << ", " << position(t.gates[g].second)
        << ") holds-at 0.\n";
  }
  out << "\n";

  std::vector<std::string> nowhere;
  for (const auto& p : positions) nowhere.push_back("neg animal_pos(A, " + p + ")");
  out << "false whenever { " << join(nowhere, ", ") << " }.\n";
  return out.str();
}

std::string to_string(ZooVariant v) {
  switch (v) {
    case ZooVariant::kDirect:
      return "direct";
    case ZooVariant::kIndirect:
      return "indirect";
    case ZooVariant::kDual:
      return "dual";
  }
  return "?";
}

std::optional<ZooVariant> parse_variant(const std::string& text) {
  for (auto v : {ZooVariant::kDirect, ZooVariant::kIndirect, ZooVariant::kDual}) {
    if (text == to_string(v) || text == "zoo_" + to_string(v)) return v;
  }
  return std::nullopt;
}

std::vector<std::string> zoo_files(ZooVariant v) { return {"zoo_world.e", "zoo_common.e", "zoo_" + to_string(v) + ".e"}; }

DomainDescription zoo_domain(ZooVariant v, const ZooOptions& options, const std::vector<std::string>& extra) {
  std::vector<std::string> texts{zoo_world(options)};
  auto files = zoo_files(v);
  for (std::size_t i = 1; i < files.size(); ++i) texts.push_back(read_corpus_file(files[i]));
  for (const auto& e : extra) texts.push_back(e);
  std::vector<std::string_view> views(texts.begin(), texts.end());
  return parse_domain(views).domain;
}

const std::string& KeyValueBlock::at(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) {
    throw std::runtime_error("line " + std::to_string(line) + ": [" + name + "] lacks '" + key + "'");
  }
  return it->second;
}

std::string KeyValueBlock::get(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

std::vector<KeyValueBlock> parse_key_values(const std::string& text) {
  std::vector<KeyValueBlock> blocks;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw std::runtime_error("line " + std::to_string(line) + ": unterminated section");
      blocks.push_back({trim(std::string_view(s).substr(1, s.size() - 2)), line, {}});
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) throw std::runtime_error("line " + std::to_string(line) + ": expected key = value");
    if (blocks.empty()) blocks.push_back({"", line, {}});
    std::string key = trim(std::string_view(s).substr(0, eq));
    if (!blocks.back().values.emplace(key, trim(std::string_view(s).substr(eq + 1))).second) {
      throw std::runtime_error("line " + std::to_string(line) + ": duplicate key '" + key + "'");
    }
  }
  return blocks;
}

std::vector<GoldenCase> parse_golden(const std::string& text) {
  std::vector<GoldenCase> cases;
  for (const auto& b : parse_key_values(text)) {
    GoldenCase c;
    c.name = b.name;
    std::istringstream files(b.at("files"));
    for (std::string f; files >> f;) c.files.push_back(f);
    c.query = b.at("query");
    auto expected = parse_answer(b.at("expect"));
    if (!expected || *expected == Answer::kBudgetExceeded) {
      throw std::runtime_error("line " + std::to_string(b.line) + ": bad expected answer '" + b.at("expect") + "'");
    }
    c.expected = *expected;
    c.origin = b.at("origin");
    if (c.origin != "stated" && c.origin != "derived") {
      throw std::runtime_error("line " + std::to_string(b.line) + ": origin must be stated or derived");
    }
    c.note = b.get("note");
    cases.push_back(std::move(c));
  }
  return cases;
}

std::vector<CorpusEntry> load_corpus() {
  std::vector<CorpusEntry> entries;
  for (auto& c : parse_golden(read_corpus_file("golden.txt"))) {
    auto it = std::find_if(entries.begin(), entries.end(), [&](const CorpusEntry& e) { return e.files == c.files; });
    if (it == entries.end()) {
      ParsedUnit unit = load_files(c.files);
      auto diags = validate(unit.domain, &unit.spans);
      if (has_errors(diags)) throw std::runtime_error(join(c.files, " ") + ": " + diags.front().message);
      ground(unit.domain, TimePoint{max_time(unit.domain) + 1});
      entries.push_back({join(c.files, " "), c.files, std::move(unit.domain), {}});
      it = std::prev(entries.end());
    }
    it->cases.push_back(std::move(c));
  }
  return entries;
}

std::vector<GoldenOutcome> run_golden(const QueryOptions& options) {
  std::vector<GoldenOutcome> outcomes;
  for (const auto& entry : load_corpus()) {
    for (const auto& c : entry.cases) {
      Query q = parse_query(c.query);
      GroundTheory t = ground(entry.domain, default_horizon(entry.domain, q));
      GoldenOutcome o{c, answer(t, q, options), false};
      o.passed = o.result.answer == c.expected;
      outcomes.push_back(std::move(o));
    }
  }
  return outcomes;
}

void write_report(std::ostream& out, const std::vector<GoldenOutcome>& outcomes) {
  for (const auto& o : outcomes) {
    out << (o.passed ? "ok   " : "FAIL ") << o.golden.name << "  " << o.golden.query << " -> "
        << to_string(o.result.answer) << "  (" << o.result.stats.seconds << " s)\n";
    if (o.passed) continue;
    out << "  expected " << to_string(o.golden.expected) << ", got " << to_string(o.result.answer) << "\n";
    if (!o.result.witness) continue;
    const auto& states = o.result.witness->states;
    for (std::size_t t = 0; t < states.size(); ++t) {
      std::vector<std::string> on;
      for (std::size_t f = 0; f < states[t].size(); ++f) {
        if (states[t][static_cast<FluentId>(f)]) on.push_back(o.result.fluent_names[f]);
      }
      out << "  " << t << ": { " << join(on, ", ") << " }\n";
    }
  }
}

}  // namespace elang
