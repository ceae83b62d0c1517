#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ltqp/rdf/term.hpp"

namespace ltqp::sparql {

struct Variable {
  std::string name;  // without the leading '?'
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<rdf::Term, Variable>;

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;
};

/// `?variable = value` or `?variable != value`.
struct Constraint {
  std::string variable;
  bool equal = true;
  rdf::Term value;
};

struct GroupPattern;
using GroupPatternPtr = std::shared_ptr<const GroupPattern>;

struct Bgp {
  std::vector<TriplePattern> patterns;
};
struct Union {
  GroupPatternPtr left;
  GroupPatternPtr right;
};
/// Conjunction of sub-groups, e.g. a BGP next to a UNION block.
struct Join {
  std::vector<GroupPatternPtr> parts;
};
struct Filtered {
  GroupPatternPtr inner;
  Constraint constraint;
};

struct GroupPattern {
  std::variant<Bgp, Union, Join, Filtered> node;
};

struct CountAggregate {
  std::string counted;  // variable inside COUNT(...)
  std::string alias;    // AS ?alias
};

struct Query {
  std::vector<std::string> projection;  // plain projected variables, in order
  std::optional<CountAggregate> count;
  bool distinct = false;
  GroupPatternPtr pattern;
  std::optional<std::string> group_by;
  std::optional<std::size_t> limit;

  /// Output column names: projection, then the aggregate alias if any.
  std::vector<std::string> columns() const;
};

/// Every variable mentioned in a group pattern, in first-occurrence order.
std::vector<std::string> pattern_variables(const GroupPattern& pattern);

/// All triple patterns anywhere in the group, in text order.
std::vector<TriplePattern> all_triple_patterns(const GroupPattern& pattern);

class QueryParseError : public std::runtime_error {
public:
  QueryParseError(std::size_t position, std::string message);
  std::size_t position() const noexcept { return position_; }
  const std::string& message() const noexcept { return message_; }

private:
  std::size_t position_;
  std::string message_;
};

/// Syntax outside the supported fragment (OPTIONAL, property paths, ...).
class UnsupportedFeature : public QueryParseError {
public:
  using QueryParseError::QueryParseError;
};

/// Parses SELECT queries over BGPs, UNION, FILTER (in)equality, DISTINCT,
/// GROUP BY with a single COUNT, and LIMIT.
Query parse_query(std::string_view text);

}  // namespace ltqp::sparql
