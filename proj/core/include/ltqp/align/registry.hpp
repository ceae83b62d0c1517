#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ltqp/align/rules.hpp"
#include "ltqp/rdf/triple_store.hpp"

namespace ltqp::align {

enum class RejectReason : std::uint8_t { Overlap, Cycle, Malformed };

std::string_view to_string(RejectReason r) noexcept;

struct RuleDecision {
  AlignmentRule rule;
  std::optional<RejectReason> rejected;
  std::string detail;

  bool accepted() const noexcept { return !rejected; }
};

struct RuleSetDecision {
  std::string location;
  Subweb subweb;
  /// Set when the whole set was refused (subweb overlap).
  std::optional<RejectReason> rejected;
  std::string detail;
  std::vector<RuleDecision> rules;

  bool accepted() const noexcept { return !rejected; }
  std::size_t accepted_rule_count() const noexcept;
};

/// A refused rule or rule set, in the order refusals happened.
struct Rejection {
  std::string subject;  // rule description or rule-set location
  RejectReason reason;
  std::string detail;
};

/// Accepted subwebs and rules, with the non-overlap and acyclicity policies.
///
/// Each scope's rules combined with the issuer rules form one rewrite graph
/// per category. Admission keeps every such graph acyclic with at most one
/// outgoing edge per term, so rewriting by following edges always reaches a
/// unique fixpoint. Newcomers lose: a later overlapping subweb, a later
/// cycle-closing rule, or a later remap of an already-mapped term is refused.
class RuleRegistry {
public:
  RuleSetDecision register_rule_set(const RuleSet& rs);
  std::vector<RuleDecision> register_issuer_rules(const std::vector<AlignmentRule>& rules);

  /// The accepted subweb containing `doc`, if any.
  const Subweb* subweb_for(std::string_view doc) const noexcept;

  /// Next rewrite step for `term` in the combined graph of `scope` (may be
  /// nullptr for "no subweb") and the issuer rules.
  const AlignmentRule* next_step(const Subweb* scope, Category category,
                                 const std::string& term) const;

  const std::vector<Subweb>& subwebs() const noexcept { return subwebs_; }
  /// Accepted rules in admission order.
  const std::vector<AlignmentRule>& rules() const noexcept { return rules_; }
  const std::vector<Rejection>& rejections() const noexcept { return rejections_; }
  bool empty() const noexcept { return rules_.empty(); }

private:
  using EdgeMap = std::unordered_map<std::string, std::size_t>;  // source term -> rule index
  using ScopeEdges = std::array<EdgeMap, 3>;

  const AlignmentRule* edge(const std::string& scope_key, Category c, const std::string& term) const;
  std::optional<std::pair<RejectReason, std::string>> check_admission(const AlignmentRule& rule) const;
  bool reaches(const std::string& scope_key, Category c, const std::string& from,
               const std::string& to) const;
  void admit(AlignmentRule rule);

  std::vector<Subweb> subwebs_;
  std::vector<AlignmentRule> rules_;
  std::map<std::string, ScopeEdges> edges_;  // "" = issuer scope
  std::vector<Rejection> rejections_;
  std::uint64_t next_ordinal_ = 1;
};

struct AlignedTriple {
  rdf::SourcedTriple triple;
  std::vector<AlignmentRule> trace;  // rules applied, in order
};

/// Rewrites the triple to its fixpoint under the rules of the subweb holding
/// its source plus the issuer rules. The result has aligned = true.
AlignedTriple align_triple(const RuleRegistry& registry, const rdf::SourcedTriple& t);

struct RealignResult {
  std::size_t changed = 0;                 // aligned tuples replaced
  std::vector<rdf::SourcedTriple> added;  // new aligned tuples
};

/// Recomputes aligned tuples of every stored document inside `w` and swaps
/// stale ones for their new forms.
RealignResult realign_subweb(const RuleRegistry& registry, rdf::TripleStore& store, const Subweb& w);

}  // namespace ltqp::align
