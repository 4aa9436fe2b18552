#pragma once

#include <stdexcept>
#include <string>

#include "syncpat/term.hpp"

namespace syncpat {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(std::string msg, int line_, int col_)
      : std::runtime_error(std::move(msg)), line(line_), col(col_) {}
};

/// Parses one term in the given calculus. The result is freshly labelled.
/// Throws ParseError on syntax errors and calculus-constraint violations.
Term parse(const std::string& text, Calculus cal);

/// Parses a source file: a `%calculus <id>` header line followed by one
/// term. `#` starts a comment anywhere.
Term parse_file(const std::string& text);

/// Pretty-printer; parse(render(t)) is alpha-equivalent to t.
std::string render(const Term& t);
std::string render(const NodePtr& n, Calculus cal);

}  // namespace syncpat
