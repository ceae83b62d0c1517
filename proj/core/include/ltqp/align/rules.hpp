#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltqp/rdf/triple.hpp"

namespace ltqp::align {

/// A provider-controlled set of IRI prefixes.
struct Subweb {
  std::string id;
  std::set<std::string> prefixes;

  friend bool operator==(const Subweb&, const Subweb&) = default;
};

/// Prefix membership of a document IRI.
bool subweb_contains(const Subweb& w, std::string_view doc) noexcept;

/// True iff some prefix of `a` and some prefix of `b` are string prefixes of
/// one another.
bool subwebs_overlap(const Subweb& a, const Subweb& b) noexcept;

enum class RelationKind : std::uint8_t {
  PredicateEquivalence,
  PredicateSpecialization,
  ClassEquivalence,
  ClassSpecialization,
  EntityIdentity,
};

/// Term position a rule rewrites.
enum class Category : std::uint8_t { Predicate = 0, Class = 1, Entity = 2 };

Category category_of(RelationKind kind) noexcept;
std::string_view to_string(RelationKind kind) noexcept;
std::string_view to_string(Category c) noexcept;
std::string_view relation_iri(RelationKind kind) noexcept;
/// Accepts a relation IRI or a kind name such as "predicate-equivalence".
std::optional<RelationKind> parse_relation(std::string_view text) noexcept;

/// Where a rule applies: one subweb, or everywhere for issuer rules.
class Scope {
public:
  static Scope issuer() { return Scope{}; }
  static Scope subweb(std::string id) {
    Scope s;
    s.subweb_ = std::move(id);
    return s;
  }

  bool is_issuer() const noexcept { return subweb_.empty(); }
  const std::string& subweb_id() const noexcept { return subweb_; }
  /// "ISSUER" or the subweb id.
  std::string label() const { return is_issuer() ? "ISSUER" : subweb_; }

  friend auto operator<=>(const Scope&, const Scope&) = default;

private:
  std::string subweb_;
};

/// Directional rewrite source -> target.
struct AlignmentRule {
  std::string source;
  RelationKind relation = RelationKind::PredicateEquivalence;
  std::string target;
  Scope scope;
  std::string origin;  // rule-set document, or "issuer"
  std::uint64_t ordinal = 0;

  Category category() const noexcept { return category_of(relation); }
  std::string describe() const;

  friend bool operator==(const AlignmentRule&, const AlignmentRule&) = default;
};

struct RuleSet {
  std::string location;
  Subweb subweb;
  std::vector<AlignmentRule> rules;
};

class MalformedRuleSet : public std::runtime_error {
public:
  explicit MalformedRuleSet(const std::string& reason)
      : std::runtime_error("malformed rule set: " + reason), reason_(reason) {}
  const std::string& reason() const noexcept { return reason_; }

private:
  std::string reason_;
};

/// Reads one semmap:Subweb and its semmap:Mapping resources, in document order.
RuleSet parse_rule_set(const rdf::Document& doc);

/// True when the document declares a semmap:Subweb.
bool is_rule_set_document(const rdf::Document& doc);

/// Issuer rules from a JSON array of {"subject", "relation", "object"}.
/// Throws std::invalid_argument on malformed entries.
std::vector<AlignmentRule> parse_issuer_rules(const nlohmann::json& json);

nlohmann::json to_json(const AlignmentRule& rule);

}  // namespace ltqp::align
