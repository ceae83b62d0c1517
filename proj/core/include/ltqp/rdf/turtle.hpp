#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ltqp/rdf/triple.hpp"

namespace ltqp::rdf {

/// Grammar violation in Turtle input. Line and column are 1-based.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, std::size_t column, std::string message);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

/// Valid Turtle that this parser deliberately does not handle (collections,
/// long strings).
class UnsupportedFeature : public ParseError {
public:
  using ParseError::ParseError;
};

/// Parses a Turtle document. Relative IRIs resolve against `base` (or a later
/// @base/BASE directive); every triple gets `base` as its source.
///
/// Supported: @prefix/@base and PREFIX/BASE, the `a` keyword, `;` and `,`
/// lists, labeled and anonymous blank nodes ("[]" and "[ p o ]"), short
/// strings with escapes, language tags, datatypes, and numeric/boolean
/// shorthand.
Document parse_turtle(std::string_view text, std::string_view base);

/// One N-Triples line per distinct (s, p, o), sorted canonically, LF
/// terminated. Source and aligned flag are not emitted.
std::string serialize_ntriples(std::span<const SourcedTriple> triples);

}  // namespace ltqp::rdf
