#include "elang/parser.h"

#include <cctype>
#include <optional>
#include <set>

namespace elang {

ParseError::ParseError(Kind kind, SourceSpan span, const std::string& message)
    : std::runtime_error(std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + message),
      kind_(kind),
      span_(span) {}

std::string to_string(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::kLexical: return "lexical error";
    case ParseError::Kind::kSyntax: return "syntax error";
    case ParseError::Kind::kUnknownIdentifier: return "unknown identifier";
    case ParseError::Kind::kArity: return "arity mismatch";
  }
  return "error";
}

namespace {

enum class Tok {
  kIdent,
  kInt,
  kLParen,
  kRParen,
  kLBrace,
  kRBrace,
  kComma,
  kDot,
  kColon,
  kNotEqual,
  kEnd,
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  SourceSpan span;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::kIdent: return "'" + t.text + "'";
    case Tok::kInt: return "number " + t.text;
    case Tok::kEnd: return "end of input";
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  Lexer(std::string_view text, std::uint32_t file) : text_(text), file_(file) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.span = here();
      if (pos_ >= text_.size()) {
        t.kind = Tok::kEnd;
        out.push_back(t);
        return out;
      }
      char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < text_.size()) {
          char d = text_[pos_];
          if (std::isalnum(static_cast<unsigned char>(d)) || d == '_') {
            advance();
          } else if (d == '-' && pos_ + 1 < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_ + 1]))) {
            advance();
          } else {
            break;
          }
        }
        t.kind = Tok::kIdent;
        t.text = std::string(text_.substr(start, pos_ - start));
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
        t.kind = Tok::kInt;
        t.text = std::string(text_.substr(start, pos_ - start));
        if (t.text.size() > 9) {
          t.span.end = static_cast<std::uint32_t>(pos_);
          throw ParseError(ParseError::Kind::kLexical, t.span, "time point " + t.text + " is too large");
        }
      } else if (c == '!' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
        advance();
        advance();
        t.kind = Tok::kNotEqual;
        t.text = "!=";
      } else {
        switch (c) {
          case '(': t.kind = Tok::kLParen; break;
          case ')': t.kind = Tok::kRParen; break;
          case '{': t.kind = Tok::kLBrace; break;
          case '}': t.kind = Tok::kRBrace; break;
          case ',': t.kind = Tok::kComma; break;
          case '.': t.kind = Tok::kDot; break;
          case ':': t.kind = Tok::kColon; break;
          default:
            t.span.end = static_cast<std::uint32_t>(pos_ + 1);
            throw ParseError(ParseError::Kind::kLexical, t.span,
                             std::string("unexpected character '") + c + "'");
        }
        t.text = std::string(1, c);
        advance();
      }
      t.span.end = static_cast<std::uint32_t>(pos_);
      out.push_back(std::move(t));
    }
  }

 private:
  SourceSpan here() const {
    return {file_, static_cast<std::uint32_t>(pos_), static_cast<std::uint32_t>(pos_), line_, column_};
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::uint32_t file_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t column_ = 1;
};

const std::set<std::string, std::less<>> kKeywords = {
    "sort",      "fluent",     "constant",  "action",     "neg",       "false",    "when",     "whenever",
    "needs",     "initiates",  "terminates", "holds-at",  "happens-at", "credulous", "skeptical", "horizon"};

bool is_variable_name(const std::string& s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

// Syntactic forms before symbol resolution.
struct RawAtom {
  Atom atom;
  SourceSpan span;
};

struct RawCondItem {
  bool is_diseq = false;
  bool positive = true;
  RawAtom atom;
  Disequality diseq;
};

struct RawStatement {
  enum class Kind { kTProp, kHProp, kCProp, kRProp, kPProp } kind;
  bool positive = true;  // head polarity for t/r-props
  bool falsum = false;   // r-prop with head 'false'
  RawAtom subject;       // the literal's atom, or the action
  CProp::Kind effect = CProp::Kind::kInitiates;
  RawAtom object;  // c-prop fluent
  std::vector<RawCondItem> condition;
  std::uint32_t time = 0;
  SourceSpan span;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  // Sort names used by declarations, with their locations.
  const std::vector<std::pair<std::string, SourceSpan>>& sort_refs() const { return sort_refs_; }

  // Parses statements until end of input, adding declarations to sig and
  // collecting propositions for later resolution.
  void parse_file(Signature& sig, std::vector<RawStatement>& statements) {
    while (peek().kind != Tok::kEnd) {
      const Token& t = peek();
      if (t.kind == Tok::kIdent && t.text == "sort") {
        parse_sort(sig);
      } else if (t.kind == Tok::kIdent && (t.text == "fluent" || t.text == "constant")) {
        parse_fluent_decl(sig);
      } else if (t.kind == Tok::kIdent && t.text == "action") {
        parse_action_decl(sig);
      } else {
        statements.push_back(parse_statement());
      }
    }
  }

  Query parse_query() {
    Query q;
    const Token& m = expect_ident();
    if (m.text == "credulous") {
      q.mode = Query::Mode::kCredulous;
    } else if (m.text == "skeptical") {
      q.mode = Query::Mode::kSkeptical;
    } else {
      syntax_error(m, "expected 'credulous' or 'skeptical'");
    }
    expect(Tok::kLBrace, "'{'");
    if (peek().kind != Tok::kRBrace) {
      q.goals = parse_goal_list();
    }
    expect(Tok::kRBrace, "'}'");
    if (peek().kind == Tok::kIdent && peek().text == "horizon") {
      next();
      q.horizon = TimePoint{parse_time()};
    }
    if (peek().kind == Tok::kDot) next();
    if (peek().kind != Tok::kEnd) syntax_error(peek(), "unexpected " + describe(peek()) + " after query");
    for (const auto& g : q.goals) {
      if (q.horizon && g.time > *q.horizon) {
        throw ParseError(ParseError::Kind::kSyntax, peek().span,
                         "goal time " + std::to_string(g.time.value) + " exceeds horizon");
      }
    }
    return q;
  }

  std::vector<TProp> parse_goal_list() {
    std::vector<TProp> goals;
    for (;;) {
      bool positive = true;
      if (peek().kind == Tok::kIdent && peek().text == "neg") {
        next();
        positive = false;
      }
      RawAtom a = parse_atom();
      if (!a.atom.is_ground()) {
        throw ParseError(ParseError::Kind::kSyntax, a.span, "query literal " + to_string(a.atom) + " is not ground");
      }
      expect_keyword("holds-at");
      goals.push_back({{std::move(a.atom), positive}, TimePoint{parse_time()}});
      if (peek().kind != Tok::kComma) break;
      next();
    }
    return goals;
  }

  bool at_end() const { return peek().kind == Tok::kEnd; }
  const Token& peek() const { return toks_[pos_]; }

 private:
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void syntax_error(const Token& t, const std::string& msg) {
    throw ParseError(ParseError::Kind::kSyntax, t.span, msg);
  }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) syntax_error(peek(), std::string("expected ") + what + ", found " + describe(peek()));
    return next();
  }

  const Token& expect_ident() {
    if (peek().kind != Tok::kIdent) syntax_error(peek(), "expected identifier, found " + describe(peek()));
    return next();
  }

  const Token& expect_name() {
    const Token& t = expect_ident();
    if (kKeywords.count(t.text)) syntax_error(t, "keyword '" + t.text + "' cannot be used as a name");
    return t;
  }

  void expect_keyword(const char* kw) {
    if (peek().kind != Tok::kIdent || peek().text != kw) {
      syntax_error(peek(), std::string("expected '") + kw + "', found " + describe(peek()));
    }
    next();
  }

  std::uint32_t parse_time() {
    const Token& t = expect(Tok::kInt, "time point");
    return static_cast<std::uint32_t>(std::stoul(t.text));
  }

  std::vector<std::string> parse_sort_list() {
    std::vector<std::string> sorts;
    if (peek().kind != Tok::kLParen) return sorts;
    next();
    for (;;) {
      const Token& t = expect_name();
      sort_refs_.emplace_back(t.text, t.span);
      sorts.push_back(t.text);
      if (peek().kind == Tok::kComma) {
        next();
        continue;
      }
      expect(Tok::kRParen, "',' or ')'");
      return sorts;
    }
  }

  void parse_sort(Signature& sig) {
    next();
    SortDecl s;
    s.name = expect_name().text;
    expect(Tok::kColon, "':'");
    for (;;) {
      const Token& c = expect_name();
      if (is_variable_name(c.text)) syntax_error(c, "object constant '" + c.text + "' must start lowercase");
      s.constants.push_back(c.text);
      if (peek().kind != Tok::kComma) break;
      next();
    }
    expect(Tok::kDot, "'.'");
    sig.sorts.push_back(std::move(s));
  }

  void parse_fluent_decl(Signature& sig) {
    FluentDecl f;
    if (peek().text == "constant") {
      next();
      f.is_constant = true;
    }
    expect_keyword("fluent");
    f.name = expect_name().text;
    f.arg_sorts = parse_sort_list();
    expect(Tok::kDot, "'.'");
    sig.fluents.push_back(std::move(f));
  }

  void parse_action_decl(Signature& sig) {
    next();
    ActionDecl a;
    a.name = expect_name().text;
    a.arg_sorts = parse_sort_list();
    expect(Tok::kDot, "'.'");
    sig.actions.push_back(std::move(a));
  }

  Term parse_term() {
    const Token& t = expect_name();
    return is_variable_name(t.text) ? Term::Variable(t.text) : Term::Constant(t.text);
  }

  RawAtom parse_atom() {
    RawAtom r;
    const Token& name = expect_name();
    r.span = name.span;
    r.atom.name = name.text;
    if (peek().kind == Tok::kLParen) {
      next();
      for (;;) {
        r.atom.args.push_back(parse_term());
        if (peek().kind == Tok::kComma) {
          next();
          continue;
        }
        r.span.end = expect(Tok::kRParen, "',' or ')'").span.end;
        break;
      }
    }
    return r;
  }

  std::vector<RawCondItem> parse_condition() {
    std::vector<RawCondItem> items;
    expect(Tok::kLBrace, "'{'");
    if (peek().kind == Tok::kRBrace) {
      next();
      return items;
    }
    for (;;) {
      RawCondItem item;
      if (peek().kind == Tok::kIdent && peek().text == "neg") {
        next();
        item.positive = false;
        item.atom = parse_atom();
      } else {
        RawAtom a = parse_atom();
        if (peek().kind == Tok::kNotEqual) {
          next();
          if (!a.atom.args.empty()) syntax_error(peek(), "disequality operands must be terms");
          item.is_diseq = true;
          item.diseq.lhs = is_variable_name(a.atom.name) ? Term::Variable(a.atom.name) : Term::Constant(a.atom.name);
          item.diseq.rhs = parse_term();
        } else {
          item.atom = std::move(a);
        }
      }
      items.push_back(std::move(item));
      if (peek().kind == Tok::kComma) {
        next();
        continue;
      }
      expect(Tok::kRBrace, "',' or '}'");
      return items;
    }
  }

  RawStatement parse_statement() {
    RawStatement st;
    st.span = peek().span;
    if (peek().kind == Tok::kIdent && peek().text == "false") {
      next();
      expect_keyword("whenever");
      st.kind = RawStatement::Kind::kRProp;
      st.falsum = true;
      st.condition = parse_condition();
    } else {
      bool negated = false;
      if (peek().kind == Tok::kIdent && peek().text == "neg") {
        next();
        negated = true;
      }
      st.subject = parse_atom();
      st.positive = !negated;
      const Token& kw = expect_ident();
      if (kw.text == "holds-at") {
        st.kind = RawStatement::Kind::kTProp;
        st.time = parse_time();
      } else if (kw.text == "whenever") {
        st.kind = RawStatement::Kind::kRProp;
        st.condition = parse_condition();
      } else if (negated) {
        syntax_error(kw, "expected 'holds-at' or 'whenever' after a negative literal");
      } else if (kw.text == "happens-at") {
        st.kind = RawStatement::Kind::kHProp;
        st.time = parse_time();
      } else if (kw.text == "initiates" || kw.text == "terminates") {
        st.kind = RawStatement::Kind::kCProp;
        st.effect = kw.text == "initiates" ? CProp::Kind::kInitiates : CProp::Kind::kTerminates;
        st.object = parse_atom();
        if (peek().kind == Tok::kIdent && peek().text == "when") {
          next();
          st.condition = parse_condition();
        }
      } else if (kw.text == "needs") {
        st.kind = RawStatement::Kind::kPProp;
        st.condition = parse_condition();
      } else {
        syntax_error(kw, "expected a statement keyword, found " + describe(kw));
      }
    }
    st.span.end = expect(Tok::kDot, "'.'").span.end;
    return st;
  }

  std::vector<Token> toks_;
  std::vector<std::pair<std::string, SourceSpan>> sort_refs_;
  std::size_t pos_ = 0;
};

// Resolves raw statements against the complete signature.
class Resolver {
 public:
  explicit Resolver(const Signature& sig) : sig_(sig) {}

  Proposition resolve(const RawStatement& st) {
    switch (st.kind) {
      case RawStatement::Kind::kTProp:
        return TProp{{fluent(st.subject), st.positive}, TimePoint{st.time}};
      case RawStatement::Kind::kHProp:
        return HProp{action(st.subject), TimePoint{st.time}};
      case RawStatement::Kind::kCProp:
        return CProp{action(st.subject), st.effect, fluent(st.object), condition(st.condition)};
      case RawStatement::Kind::kRProp: {
        RProp r;
        if (!st.falsum) r.head = FluentLiteral{fluent(st.subject), st.positive};
        r.condition = condition(st.condition);
        return r;
      }
      case RawStatement::Kind::kPProp:
        return PProp{action(st.subject), condition(st.condition)};
    }
    return TProp{};
  }

 private:
  void check_args(const RawAtom& a, const std::vector<std::string>& sorts) {
    if (sorts.size() != a.atom.args.size()) {
      throw ParseError(ParseError::Kind::kArity, a.span,
                       "'" + a.atom.name + "' expects " + std::to_string(sorts.size()) + " arguments, got " +
                           std::to_string(a.atom.args.size()));
    }
    for (const auto& t : a.atom.args) {
      if (!t.is_variable() && !sig_.sort_of_constant(t.name)) {
        throw ParseError(ParseError::Kind::kUnknownIdentifier, a.span, "unknown object constant '" + t.name + "'");
      }
    }
  }

  Atom fluent(const RawAtom& a) {
    const FluentDecl* d = sig_.find_fluent(a.atom.name);
    if (!d) throw ParseError(ParseError::Kind::kUnknownIdentifier, a.span, "unknown fluent '" + a.atom.name + "'");
    check_args(a, d->arg_sorts);
    return a.atom;
  }

  Atom action(const RawAtom& a) {
    const ActionDecl* d = sig_.find_action(a.atom.name);
    if (!d) throw ParseError(ParseError::Kind::kUnknownIdentifier, a.span, "unknown action '" + a.atom.name + "'");
    check_args(a, d->arg_sorts);
    return a.atom;
  }

  Condition condition(const std::vector<RawCondItem>& items) {
    Condition c;
    for (const auto& item : items) {
      if (item.is_diseq) {
        for (const Term* t : {&item.diseq.lhs, &item.diseq.rhs}) {
          if (!t->is_variable() && !sig_.sort_of_constant(t->name)) {
            throw ParseError(ParseError::Kind::kUnknownIdentifier, item.atom.span,
                             "unknown object constant '" + t->name + "'");
          }
        }
        c.add(item.diseq);
        continue;
      }
      // Inline typing atoms `sort(X)` only restate declared typing; they are
      // checked and dropped.
      if (const SortDecl* s = sig_.find_sort(item.atom.atom.name); s && item.positive) {
        if (item.atom.atom.args.size() != 1) {
          throw ParseError(ParseError::Kind::kArity, item.atom.span, "typing atom '" + s->name + "' takes 1 argument");
        }
        const Term& t = item.atom.atom.args[0];
        if (!t.is_variable() && !sig_.sort_of_constant(t.name)) {
          throw ParseError(ParseError::Kind::kUnknownIdentifier, item.atom.span,
                           "unknown object constant '" + t.name + "'");
        }
        continue;
      }
      c.add(FluentLiteral{fluent(item.atom), item.positive});
    }
    return c;
  }

  const Signature& sig_;
};

}  // namespace

ParsedUnit parse_domain(std::string_view text) { return parse_domain(std::vector<std::string_view>{text}); }

ParsedUnit parse_domain(const std::vector<std::string_view>& texts) {
  ParsedUnit unit;
  std::vector<RawStatement> raw;
  std::vector<std::pair<std::string, SourceSpan>> sort_refs;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    Parser p(Lexer(texts[i], static_cast<std::uint32_t>(i)).tokenize());
    p.parse_file(unit.domain.signature, raw);
    sort_refs.insert(sort_refs.end(), p.sort_refs().begin(), p.sort_refs().end());
  }
  for (const auto& [name, span] : sort_refs) {
    if (!unit.domain.signature.find_sort(name)) {
      throw ParseError(ParseError::Kind::kUnknownIdentifier, span, "unknown sort '" + name + "'");
    }
  }
  Resolver r(unit.domain.signature);
  for (const auto& st : raw) {
    unit.domain.propositions.push_back(r.resolve(st));
    unit.spans.push_back(st.span);
  }
  for (const auto& d : validate(unit.domain, &unit.spans)) {
    if (d.code == Diagnostic::Code::kDuplicateProposition) unit.warnings.push_back(d);
  }
  return unit;
}

Query parse_query(std::string_view text) {
  Parser p(Lexer(text, 0).tokenize());
  return p.parse_query();
}

std::vector<TProp> parse_goals(std::string_view text) {
  Parser p(Lexer(text, 0).tokenize());
  std::vector<TProp> goals;
  if (!p.at_end()) goals = p.parse_goal_list();
  if (!p.at_end()) {
    throw ParseError(ParseError::Kind::kSyntax, p.peek().span, "unexpected " + describe(p.peek()) + " after goals");
  }
  return goals;
}

std::string pretty_print(const DomainDescription& domain) {
  std::string out;
  auto sort_list = [](const std::vector<std::string>& sorts) {
    std::string s;
    if (sorts.empty()) return s;
    s += '(';
    for (std::size_t i = 0; i < sorts.size(); ++i) {
      if (i) s += ", ";
      s += sorts[i];
    }
    return s + ')';
  };
  const Signature& sig = domain.signature;
  for (const auto& s : sig.sorts) {
    out += "sort " + s.name + ":";
    for (std::size_t i = 0; i < s.constants.size(); ++i) out += (i ? ", " : " ") + s.constants[i];
    out += ".\n";
  }
  for (const auto& f : sig.fluents) {
    out += std::string(f.is_constant ? "constant " : "") + "fluent " + f.name + sort_list(f.arg_sorts) + ".\n";
  }
  for (const auto& a : sig.actions) out += "action " + a.name + sort_list(a.arg_sorts) + ".\n";
  if (!out.empty() && !domain.propositions.empty()) out += "\n";
  for (const auto& p : domain.propositions) out += to_string(p) + "\n";
  return out;
}

}  // namespace elang
