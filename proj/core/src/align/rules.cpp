#include "ltqp/align/rules.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "ltqp/rdf/iri.hpp"
#include "ltqp/rdf/vocab.hpp"

namespace ltqp::align {

bool subweb_contains(const Subweb& w, std::string_view doc) noexcept {
  return std::any_of(w.prefixes.begin(), w.prefixes.end(),
                     [&](const std::string& p) { return !p.empty() && doc.starts_with(p); });
}

bool subwebs_overlap(const Subweb& a, const Subweb& b) noexcept {
  for (const auto& pa : a.prefixes) {
    for (const auto& pb : b.prefixes) {
      if (pa.starts_with(pb) || pb.starts_with(pa)) return true;
    }
  }
  return false;
}

namespace {

struct RelationInfo {
  RelationKind kind;
  std::string_view name;
  std::string_view iri;
};

constexpr std::array<RelationInfo, 5> kRelations = {{
    {RelationKind::PredicateEquivalence, "predicate-equivalence", vocab::kOwlEquivalentProperty},
    {RelationKind::PredicateSpecialization, "predicate-specialization", vocab::kRdfsSubPropertyOf},
    {RelationKind::ClassEquivalence, "class-equivalence", vocab::kOwlEquivalentClass},
    {RelationKind::ClassSpecialization, "class-specialization", vocab::kRdfsSubClassOf},
    {RelationKind::EntityIdentity, "entity-identity", vocab::kOwlSameAs},
}};

const RelationInfo& info(RelationKind k) noexcept { return kRelations[static_cast<std::size_t>(k)]; }

}  // namespace

Category category_of(RelationKind kind) noexcept {
  switch (kind) {
    case RelationKind::PredicateEquivalence:
    case RelationKind::PredicateSpecialization: return Category::Predicate;
    case RelationKind::ClassEquivalence:
    case RelationKind::ClassSpecialization: return Category::Class;
    case RelationKind::EntityIdentity: return Category::Entity;
  }
  return Category::Entity;
}

std::string_view to_string(RelationKind kind) noexcept { return info(kind).name; }

std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::Predicate: return "predicate";
    case Category::Class: return "class";
    case Category::Entity: return "entity";
  }
  return "entity";
}

std::string_view relation_iri(RelationKind kind) noexcept { return info(kind).iri; }

std::optional<RelationKind> parse_relation(std::string_view text) noexcept {
  for (const auto& r : kRelations) {
    if (text == r.iri || text == r.name) return r.kind;
  }
  return std::nullopt;
}

std::string AlignmentRule::describe() const {
  return "<" + source + "> " + std::string(to_string(relation)) + " <" + target + "> [" +
         scope.label() + "]";
}

nlohmann::json to_json(const AlignmentRule& rule) {
  return {{"subject", rule.source},
          {"relation", std::string(to_string(rule.relation))},
          {"object", rule.target},
          {"scope", rule.scope.label()},
          {"origin", rule.origin},
          {"ordinal", rule.ordinal}};
}

namespace {

using rdf::Term;

struct Resource {
  std::map<std::string, std::vector<Term>> properties;
};

bool is_typed(const Resource& r, std::string_view cls) {
  const auto it = r.properties.find(std::string(vocab::kRdfType));
  if (it == r.properties.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(),
                     [&](const Term& t) { return t.is_iri() && t.value() == cls; });
}

const Term& single(const Resource& r, std::string_view property, const std::string& who) {
  const auto it = r.properties.find(std::string(property));
  if (it == r.properties.end() || it->second.empty()) {
    throw MalformedRuleSet(who + " lacks " + std::string(property));
  }
  if (it->second.size() > 1) {
    throw MalformedRuleSet(who + " has several values for " + std::string(property));
  }
  return it->second.front();
}

const std::string& single_iri(const Resource& r, std::string_view property, const std::string& who) {
  const Term& t = single(r, property, who);
  if (!t.is_iri()) throw MalformedRuleSet(who + ": " + std::string(property) + " must be an IRI");
  return t.value();
}

std::string node_name(const Term& t) { return t.is_blank() ? "_:" + t.value() : t.value(); }

}  // namespace

bool is_rule_set_document(const rdf::Document& doc) {
  return std::any_of(doc.triples.begin(), doc.triples.end(), [](const rdf::SourcedTriple& t) {
    return t.predicate.value() == vocab::kRdfType && t.object.is_iri() &&
           t.object.value() == vocab::kSemmapSubweb;
  });
}

RuleSet parse_rule_set(const rdf::Document& doc) {
  // Group properties per subject, remembering first-appearance order.
  std::vector<Term> order;
  std::map<Term, Resource> resources;
  for (const auto& t : doc.triples) {
    auto [it, inserted] = resources.try_emplace(t.subject);
    if (inserted) order.push_back(t.subject);
    it->second.properties[t.predicate.value()].push_back(t.object);
  }

  std::vector<Term> subwebs;
  std::vector<Term> mappings;
  for (const auto& subject : order) {
    const Resource& r = resources.at(subject);
    if (is_typed(r, vocab::kSemmapSubweb)) subwebs.push_back(subject);
    if (is_typed(r, vocab::kSemmapMapping)) mappings.push_back(subject);
  }
  if (subwebs.empty()) throw MalformedRuleSet("no semmap:Subweb declared");
  if (subwebs.size() > 1) throw MalformedRuleSet("more than one semmap:Subweb declared");
  if (!subwebs.front().is_iri()) throw MalformedRuleSet("the subweb must be identified by an IRI");

  RuleSet rs;
  rs.location = doc.iri;
  rs.subweb.id = subwebs.front().value();
  const Resource& sw = resources.at(subwebs.front());
  const auto prefixes = sw.properties.find(std::string(vocab::kSemmapIriPrefix));
  if (prefixes == sw.properties.end() || prefixes->second.empty()) {
    throw MalformedRuleSet("subweb " + rs.subweb.id + " has no semmap:iriPrefix");
  }
  for (const auto& p : prefixes->second) {
    if (!p.is_literal()) throw MalformedRuleSet("semmap:iriPrefix must be a string literal");
    if (p.value().empty() || !rdf::is_absolute_iri(p.value())) {
      throw MalformedRuleSet("subweb prefix '" + p.value() + "' is not an absolute IRI");
    }
    rs.subweb.prefixes.insert(p.value());
  }

  std::uint64_t ordinal = 0;
  for (const auto& m : mappings) {
    const Resource& r = resources.at(m);
    const std::string who = "mapping " + node_name(m);
    AlignmentRule rule;
    rule.source = single_iri(r, vocab::kSemmapSubjectId, who);
    rule.target = single_iri(r, vocab::kSemmapObjectId, who);
    const std::string& relation = single_iri(r, vocab::kSemmapMappingRelation, who);
    const auto kind = parse_relation(relation);
    if (!kind) throw MalformedRuleSet(who + ": unknown mapping relation <" + relation + ">");
    rule.relation = *kind;
    const std::string& scope = single_iri(r, vocab::kSemmapScope, who);
    if (scope != rs.subweb.id) {
      throw MalformedRuleSet(who + ": scope <" + scope + "> is not the declared subweb");
    }
    if (rule.source == rule.target) throw MalformedRuleSet(who + " maps a term onto itself");
    rule.scope = Scope::subweb(rs.subweb.id);
    rule.origin = doc.iri;
    rule.ordinal = ++ordinal;
    rs.rules.push_back(std::move(rule));
  }
  return rs;
}

std::vector<AlignmentRule> parse_issuer_rules(const nlohmann::json& json) {
  if (!json.is_array()) throw std::invalid_argument("issuer rules must be a JSON array");
  std::vector<AlignmentRule> rules;
  std::uint64_t ordinal = 0;
  for (const auto& entry : json) {
    const std::string at = "issuer rule #" + std::to_string(ordinal + 1);
    if (!entry.is_object()) throw std::invalid_argument(at + " is not an object");
    for (const char* field : {"subject", "relation", "object"}) {
      if (!entry.contains(field) || !entry[field].is_string()) {
        throw std::invalid_argument(at + " lacks string field '" + field + "'");
      }
    }
    AlignmentRule rule;
    rule.source = entry["subject"].get<std::string>();
    rule.target = entry["object"].get<std::string>();
    const auto kind = parse_relation(entry["relation"].get<std::string>());
    if (!kind) throw std::invalid_argument(at + " has an unknown relation");
    if (!rdf::is_absolute_iri(rule.source) || !rdf::is_absolute_iri(rule.target)) {
      throw std::invalid_argument(at + " must use absolute IRIs");
    }
    if (rule.source == rule.target) throw std::invalid_argument(at + " maps a term onto itself");
    rule.relation = *kind;
    rule.scope = Scope::issuer();
    rule.origin = "issuer";
    rule.ordinal = ++ordinal;
    rules.push_back(std::move(rule));
  }
  return rules;
}

}  // namespace ltqp::align
