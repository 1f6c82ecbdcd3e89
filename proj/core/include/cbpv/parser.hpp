#pragma once

#include <string>
#include <string_view>

#include "cbpv/term.hpp"
#include "cbpv/types.hpp"

namespace cbpv {

class ParseError : public Error {
 public:
  ParseError(const std::string& message, SourceSpan span)
      : Error(std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + message), span_(span) {}
  SourceSpan span() const { return span_; }

 private:
  SourceSpan span_;
};

/// Parses one term of the surface grammar. Derived forms are expanded while
/// parsing, so the result only contains core constructs (possibly at
/// extended arrow types). Every identifier must be bound; `#` starts a
/// comment running to the end of the line.
Term parse_term(std::string_view text);

/// Parses a value or computation type.
Type parse_type(std::string_view text);

}  // namespace cbpv
