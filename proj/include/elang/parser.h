// Concrete text syntax for domain (.e) and query (.q) files.

#ifndef ELANG_PARSER_H_
#define ELANG_PARSER_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "elang/model.h"

namespace elang {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { kLexical, kSyntax, kUnknownIdentifier, kArity };

  ParseError(Kind kind, SourceSpan span, const std::string& message);

  Kind kind() const { return kind_; }
  const SourceSpan& span() const { return span_; }

 private:
  Kind kind_;
  SourceSpan span_;
};

std::string to_string(ParseError::Kind kind);

struct ParsedUnit {
  DomainDescription domain;
  // spans[i] locates domain.propositions[i].
  std::vector<SourceSpan> spans;
  // Lint findings that do not prevent parsing (duplicate statements).
  std::vector<Diagnostic> warnings;
};

// Parses one domain text. Declarations may appear anywhere in the file.
ParsedUnit parse_domain(std::string_view text);

// Parses several texts as one domain (e.g. a theory file followed by a
// scenario file); spans carry the index of the originating text.
ParsedUnit parse_domain(const std::vector<std::string_view>& texts);

// `credulous|skeptical { L holds-at T, ... } [horizon N]`
Query parse_query(std::string_view text);

// A bare comma-separated list of ground `L holds-at T` goals.
std::vector<TProp> parse_goals(std::string_view text);

// Canonical text: declarations in order, then one statement per line.
std::string pretty_print(const DomainDescription& domain);

}  // namespace elang

#endif  // ELANG_PARSER_H_
