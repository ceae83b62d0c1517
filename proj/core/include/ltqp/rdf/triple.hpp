#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ltqp/rdf/term.hpp"

namespace ltqp::rdf {

/// A triple tagged with the document it came from and whether it is the
/// aligned (rewritten) form or the original.
struct SourcedTriple {
  Term subject;
  Term predicate;
  Term object;
  std::string source;
  bool aligned = false;

  friend auto operator<=>(const SourcedTriple&, const SourcedTriple&) = default;
  friend bool operator==(const SourcedTriple&, const SourcedTriple&) = default;
};

std::size_t hash_value(const SourcedTriple& t) noexcept;

struct SourcedTripleHash {
  std::size_t operator()(const SourcedTriple& t) const noexcept { return hash_value(t); }
};

/// Compares (s, p, o) only.
bool same_statement(const SourcedTriple& a, const SourcedTriple& b) noexcept;

struct Document {
  std::string iri;
  std::vector<SourcedTriple> triples;
};

/// Bound components of a store lookup; unset fields match anything.
struct StorePattern {
  std::optional<Term> subject;
  std::optional<Term> predicate;
  std::optional<Term> object;
  std::optional<std::string> source;
  std::optional<bool> aligned;

  bool matches(const SourcedTriple& t) const noexcept;
};

}  // namespace ltqp::rdf
