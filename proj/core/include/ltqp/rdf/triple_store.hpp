#pragma once

#include <cstdint>
#include <limits>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "ltqp/rdf/triple.hpp"

namespace ltqp::rdf {

/// Blank node label prefix derived from a document IRI.
std::string blank_scope_prefix(std::string_view source);

/// Prefixes blank node labels with the source digest unless they already
/// carry it.
SourcedTriple scope_blank_nodes(SourcedTriple t);

/// Append-only multi-version store of sourced triples.
///
/// Every insert gets a new version number. `retire` hides a live tuple from
/// later snapshots without erasing it, so a Snapshot keeps seeing exactly the
/// tuples that were live when it was taken.
class TripleStore {
public:
  class Snapshot {
  public:
    std::vector<SourcedTriple> match(const StorePattern& pattern) const;
    std::size_t count(const StorePattern& pattern) const;
    std::size_t size() const;
    std::uint64_t version() const noexcept { return version_; }

  private:
    friend class TripleStore;
    Snapshot(const TripleStore* store, std::uint64_t version) : store_(store), version_(version) {}

    const TripleStore* store_;
    std::uint64_t version_;
  };

  TripleStore() = default;
  TripleStore(const TripleStore&) = delete;
  TripleStore& operator=(const TripleStore&) = delete;

  /// Returns true iff the tuple was not already live. Blank nodes are scoped
  /// to the triple's source before storage.
  bool insert(SourcedTriple t);

  /// Hides a live tuple from subsequent reads. Returns false when absent.
  bool retire(const SourcedTriple& t);

  bool contains(const SourcedTriple& t) const;

  std::vector<SourcedTriple> match(const StorePattern& pattern) const;
  std::size_t count(const StorePattern& pattern) const;

  /// Distinct source IRIs with at least one live tuple, sorted.
  std::vector<std::string> sources() const;

  /// Live tuples.
  std::size_t size() const;
  /// Every tuple ever appended, live or retired.
  std::size_t appended() const;

  Snapshot snapshot() const;

private:
  static constexpr std::uint64_t kAlive = std::numeric_limits<std::uint64_t>::max();

  struct Entry {
    SourcedTriple triple;
    std::uint64_t born;
    std::uint64_t died = kAlive;

    bool visible_at(std::uint64_t v) const noexcept { return born <= v && v < died; }
  };

  template <typename Fn>
  void scan(const StorePattern& pattern, std::uint64_t version, Fn&& fn) const;

  mutable std::shared_mutex mutex_;
  std::vector<Entry> entries_;
  std::unordered_map<Term, std::vector<std::uint32_t>, TermHash> by_subject_;
  std::unordered_map<Term, std::vector<std::uint32_t>, TermHash> by_predicate_;
  std::unordered_map<Term, std::vector<std::uint32_t>, TermHash> by_object_;
  std::unordered_map<std::string, std::vector<std::uint32_t>> by_source_;
  std::unordered_map<SourcedTriple, std::uint32_t, SourcedTripleHash> live_;
  std::uint64_t version_ = 0;
};

}  // namespace ltqp::rdf
