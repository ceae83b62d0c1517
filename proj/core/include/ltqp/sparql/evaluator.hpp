#pragma once

#include <map>
#include <string>
#include <vector>

#include "ltqp/rdf/triple_store.hpp"
#include "ltqp/sparql/query.hpp"

namespace ltqp::sparql {

/// Partial mapping from variable names to terms.
using BindingRow = std::map<std::string, rdf::Term>;

/// Two rows merge iff they agree on all shared variables.
bool compatible(const BindingRow& a, const BindingRow& b);

struct ResultTable {
  std::vector<std::string> variables;
  std::vector<BindingRow> rows;  // sorted canonically

  friend bool operator==(const ResultTable&, const ResultTable&) = default;
};

/// Canonical row order: compare bindings column by column in `variables`
/// order; an unbound cell sorts before any bound one.
void sort_canonically(ResultTable& table);

/// Read-only graph that evaluation runs over. Implementations expose the
/// aligned triples only.
class GraphView {
public:
  virtual ~GraphView() = default;
  /// Distinct (s, p, o) statements matching the bound components.
  virtual std::vector<rdf::SourcedTriple> match(const rdf::StorePattern& pattern) const = 0;
  virtual std::size_t estimate(const rdf::StorePattern& pattern) const = 0;
};

/// View over a store snapshot restricted to aligned tuples, deduplicated by
/// statement across sources.
class AlignedView final : public GraphView {
public:
  explicit AlignedView(rdf::TripleStore::Snapshot snapshot) : snapshot_(snapshot) {}

  std::vector<rdf::SourcedTriple> match(const rdf::StorePattern& pattern) const override;
  std::size_t estimate(const rdf::StorePattern& pattern) const override;

  const rdf::TripleStore::Snapshot& snapshot() const noexcept { return snapshot_; }

private:
  rdf::TripleStore::Snapshot snapshot_;
};

/// Evaluates the query; rows come back sorted canonically, LIMIT applied
/// after sorting.
ResultTable evaluate(const Query& query, const GraphView& view);

/// Evaluates a bare group pattern to its solution multiset (unsorted).
std::vector<BindingRow> evaluate_pattern(const GroupPattern& pattern, const GraphView& view);

}  // namespace ltqp::sparql
