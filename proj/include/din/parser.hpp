#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "din/model.hpp"

namespace din {

enum class ParseErrorCategory {
  Syntax,
  UnknownAgent,
  UnknownSite,
  UnknownState,
  DanglingBond,
  DuplicateName,
  NegativeRate,
  UnderspecifiedInit,
};

std::string_view to_string(ParseErrorCategory category);

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorCategory category, int line, int column, std::string token,
             const std::string& message);

  ParseErrorCategory category() const { return category_; }
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& token() const { return token_; }

 private:
  ParseErrorCategory category_;
  int line_;
  int column_;
  std::string token_;
};

/// Parses a model written in the supported Kappa subset:
///
///     %agent: A(x{u p}, d)
///     'name' A(x{u}) -> A(x{p}) @ 0.1
///     %init: 100 A(x{u}, d[.])
///     %obs: 'Ap' |A(x{p})|
///     %obs: 'frac' (|A(x{p})|) / (|A()|)
///
/// Agent declarations may appear anywhere in the file. Rule symmetry factors
/// are computed before returning. Throws ParseError.
Model parse_model(std::string_view source);

/// Canonical text that parses back to an equal Model.
std::string format_model(const Model& model);

/// Text of a single pattern in the canonical surface syntax.
std::string format_pattern(const Model& model, const Pattern& pattern);

}  // namespace din
