#include "ltqp/align/registry.hpp"

#include <algorithm>
#include <set>

#include "ltqp/rdf/vocab.hpp"

namespace ltqp::align {

std::string_view to_string(RejectReason r) noexcept {
  switch (r) {
    case RejectReason::Overlap: return "overlap";
    case RejectReason::Cycle: return "cycle";
    case RejectReason::Malformed: return "malformed";
  }
  return "malformed";
}

std::size_t RuleSetDecision::accepted_rule_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(rules.begin(), rules.end(), [](const RuleDecision& d) { return d.accepted(); }));
}

namespace {
const std::string kIssuerKey;
}

const AlignmentRule* RuleRegistry::edge(const std::string& scope_key, Category c,
                                        const std::string& term) const {
  const auto it = edges_.find(scope_key);
  if (it == edges_.end()) return nullptr;
  const EdgeMap& map = it->second[static_cast<std::size_t>(c)];
  const auto e = map.find(term);
  return e == map.end() ? nullptr : &rules_[e->second];
}

const AlignmentRule* RuleRegistry::next_step(const Subweb* scope, Category category,
                                             const std::string& term) const {
  if (scope != nullptr) {
    if (const auto* r = edge(scope->id, category, term)) return r;
  }
  return edge(kIssuerKey, category, term);
}

bool RuleRegistry::reaches(const std::string& scope_key, Category c, const std::string& from,
                           const std::string& to) const {
  // Out-degree is at most one in every combined graph, so reachability is a walk.
  std::string current = from;
  std::size_t steps = 0;
  while (current != to) {
    const AlignmentRule* r = scope_key.empty() ? nullptr : edge(scope_key, c, current);
    if (r == nullptr) r = edge(kIssuerKey, c, current);
    if (r == nullptr || ++steps > rules_.size()) return false;
    current = r->target;
  }
  return true;
}

std::optional<std::pair<RejectReason, std::string>> RuleRegistry::check_admission(
    const AlignmentRule& rule) const {
  const Category c = rule.category();
  // Combined graphs this rule joins: its own scope, or every scope for issuer rules.
  std::vector<std::string> keys;
  if (rule.scope.is_issuer()) {
    keys.push_back(kIssuerKey);
    for (const auto& w : subwebs_) keys.push_back(w.id);
  } else {
    keys.push_back(rule.scope.subweb_id());
  }
  for (const auto& key : keys) {
    const AlignmentRule* existing = key.empty() ? nullptr : edge(key, c, rule.source);
    if (existing == nullptr) existing = edge(kIssuerKey, c, rule.source);
    if (existing != nullptr) {
      return std::pair{RejectReason::Malformed,
                       "<" + rule.source + "> already rewritten by " + existing->describe()};
    }
    if (reaches(key, c, rule.target, rule.source)) {
      return std::pair{RejectReason::Cycle, "<" + rule.target + "> already rewrites to <" +
                                                rule.source + "> in scope " +
                                                (key.empty() ? std::string("ISSUER") : key)};
    }
  }
  return std::nullopt;
}

void RuleRegistry::admit(AlignmentRule rule) {
  rule.ordinal = next_ordinal_++;
  const std::string key = rule.scope.is_issuer() ? kIssuerKey : rule.scope.subweb_id();
  edges_[key][static_cast<std::size_t>(rule.category())][rule.source] = rules_.size();
  rules_.push_back(std::move(rule));
}

RuleSetDecision RuleRegistry::register_rule_set(const RuleSet& rs) {
  RuleSetDecision decision;
  decision.location = rs.location;
  decision.subweb = rs.subweb;
  for (const auto& w : subwebs_) {
    if (subwebs_overlap(w, rs.subweb)) {
      decision.rejected = RejectReason::Overlap;
      decision.detail = "subweb <" + rs.subweb.id + "> overlaps accepted subweb <" + w.id + ">";
      rejections_.push_back(Rejection{rs.location, RejectReason::Overlap, decision.detail});
      for (const auto& r : rs.rules) {
        decision.rules.push_back(RuleDecision{r, RejectReason::Overlap, decision.detail});
      }
      return decision;
    }
  }
  subwebs_.push_back(rs.subweb);
  edges_.try_emplace(rs.subweb.id);
  for (AlignmentRule rule : rs.rules) {
    rule.scope = Scope::subweb(rs.subweb.id);
    if (rule.origin.empty()) rule.origin = rs.location;
    if (auto refusal = check_admission(rule)) {
      rejections_.push_back(Rejection{rule.describe(), refusal->first, refusal->second});
      decision.rules.push_back(RuleDecision{rule, refusal->first, refusal->second});
      continue;
    }
    admit(rule);
    decision.rules.push_back(RuleDecision{rules_.back(), std::nullopt, {}});
  }
  return decision;
}

std::vector<RuleDecision> RuleRegistry::register_issuer_rules(const std::vector<AlignmentRule>& rules) {
  std::vector<RuleDecision> out;
  for (AlignmentRule rule : rules) {
    rule.scope = Scope::issuer();
    if (rule.origin.empty()) rule.origin = "issuer";
    if (rule.source == rule.target) {
      const std::string detail = "rule maps a term onto itself";
      rejections_.push_back(Rejection{rule.describe(), RejectReason::Malformed, detail});
      out.push_back(RuleDecision{rule, RejectReason::Malformed, detail});
      continue;
    }
    if (auto refusal = check_admission(rule)) {
      rejections_.push_back(Rejection{rule.describe(), refusal->first, refusal->second});
      out.push_back(RuleDecision{rule, refusal->first, refusal->second});
      continue;
    }
    admit(rule);
    out.push_back(RuleDecision{rules_.back(), std::nullopt, {}});
  }
  return out;
}

const Subweb* RuleRegistry::subweb_for(std::string_view doc) const noexcept {
  for (const auto& w : subwebs_) {
    if (subweb_contains(w, doc)) return &w;
  }
  return nullptr;
}

AlignedTriple align_triple(const RuleRegistry& registry, const rdf::SourcedTriple& t) {
  AlignedTriple out{t, {}};
  out.triple.aligned = true;
  if (registry.empty()) return out;

  const Subweb* scope = registry.subweb_for(t.source);
  auto rewrite = [&](rdf::Term& term, Category c) {
    if (!term.is_iri()) return;
    std::string value = term.value();
    bool changed = false;
    while (const AlignmentRule* r = registry.next_step(scope, c, value)) {
      out.trace.push_back(*r);
      value = r->target;
      changed = true;
    }
    if (changed) term = rdf::Term::iri(std::move(value));
  };

  rewrite(out.triple.predicate, Category::Predicate);
  // The object of an rdf:type statement is a class; elsewhere IRIs are entities.
  if (out.triple.predicate.value() == vocab::kRdfType) {
    rewrite(out.triple.object, Category::Class);
  } else {
    rewrite(out.triple.object, Category::Entity);
  }
  rewrite(out.triple.subject, Category::Entity);
  return out;
}

RealignResult realign_subweb(const RuleRegistry& registry, rdf::TripleStore& store, const Subweb& w) {
  RealignResult result;
  for (const auto& source : store.sources()) {
    if (!subweb_contains(w, source)) continue;
    rdf::StorePattern originals;
    originals.source = source;
    originals.aligned = false;
    std::set<rdf::SourcedTriple> fresh;
    for (const auto& t : store.match(originals)) fresh.insert(align_triple(registry, t).triple);

    rdf::StorePattern current = originals;
    current.aligned = true;
    std::set<rdf::SourcedTriple> stale;
    for (auto& t : store.match(current)) {
      if (!fresh.erase(t)) stale.insert(std::move(t));
    }
    for (const auto& t : stale) store.retire(t);
    for (const auto& t : fresh) {
      if (store.insert(t)) {
        ++result.changed;
        result.added.push_back(t);
      }
    }
  }
  return result;
}

}  // namespace ltqp::align
