#include "doctest.h"

#include <functional>
#include <map>
#include <set>

#include "ltqp/align/registry.hpp"
#include "ltqp/rdf/turtle.hpp"
#include "ltqp/rdf/vocab.hpp"
#include "properties.hpp"

using namespace ltqp;
using align::RelationKind;
using rdf::Term;

namespace {

align::Subweb subweb(std::string id, std::set<std::string> prefixes) { return {std::move(id), std::move(prefixes)}; }

align::AlignmentRule rule(std::string from, std::string to, RelationKind kind = RelationKind::PredicateEquivalence) {
  align::AlignmentRule r;
  r.source = std::move(from);
  r.target = std::move(to);
  r.relation = kind;
  return r;
}

align::RuleSet rule_set(const std::string& prefix, std::vector<align::AlignmentRule> rules) {
  align::RuleSet rs;
  rs.location = prefix + "rules";
  rs.subweb = subweb(rs.location + "#sw", {prefix});
  rs.rules = std::move(rules);
  return rs;
}

rdf::SourcedTriple triple(const std::string& source, std::string p, std::string s = "http://pods.ex/x",
                          Term o = Term::literal("v")) {
  return {Term::iri(std::move(s)), Term::iri(std::move(p)), std::move(o), source, false};
}

rdf::Document rules_doc(const std::string& body) {
  const std::string text = "@prefix sm: <https://example.org/semmap#> .\n"
                           "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n" +
                           body;
  return rdf::parse_turtle(text, "http://pods.ex/ann/rules");
}

/// True when the per-category graph of (scope + issuer) edges has a cycle.
bool has_cycle(const align::RuleRegistry& reg) {
  std::set<std::string> scopes{""};
  for (const auto& w : reg.subwebs()) scopes.insert(w.id);
  for (const auto& scope : scopes) {
    for (int c = 0; c < 3; ++c) {
      std::multimap<std::string, std::string> edges;
      for (const auto& r : reg.rules()) {
        if (static_cast<int>(r.category()) != c) continue;
        if (r.scope.is_issuer() || r.scope.subweb_id() == scope) edges.emplace(r.source, r.target);
      }
      std::map<std::string, int> state;  // 1 on stack, 2 done
      std::function<bool(const std::string&)> dfs = [&](const std::string& v) {
        state[v] = 1;
        auto [lo, hi] = edges.equal_range(v);
        for (auto it = lo; it != hi; ++it) {
          if (state[it->second] == 1) return true;
          if (state[it->second] == 0 && dfs(it->second)) return true;
        }
        state[v] = 2;
        return false;
      };
      for (const auto& [v, _] : edges) {
        if (state[v] == 0 && dfs(v)) return true;
      }
    }
  }
  return false;
}

}  // namespace

TEST_CASE("subweb containment") {
  const auto w = subweb("http://pods.ex/ann/rules#sw", {"http://pods.ex/ann/"});
  CHECK(align::subweb_contains(w, "http://pods.ex/ann/posts"));
  CHECK_FALSE(align::subweb_contains(w, "http://pods.ex/bo/card"));
  CHECK(align::subweb_contains(w, "http://pods.ex/ann/"));
}

TEST_CASE("subweb overlap") {
  CHECK(align::subwebs_overlap(subweb("a", {"http://a/"}), subweb("b", {"http://a/sub/"})));
  CHECK(align::subwebs_overlap(subweb("b", {"http://a/sub/"}), subweb("a", {"http://a/"})));
  CHECK_FALSE(align::subwebs_overlap(subweb("a", {"http://a/"}), subweb("b", {"http://b/"})));
  CHECK(align::subwebs_overlap(subweb("a", {"http://a/", "http://c/"}), subweb("b", {"http://c/", "http://a/"})));
}

TEST_CASE("parse rule set documents") {
  SUBCASE("one prefix, one mapping") {
    const auto rs = align::parse_rule_set(rules_doc(R"(
<#sw> a sm:Subweb ; sm:iriPrefix "http://pods.ex/ann/" .
<#m1> a sm:Mapping ; sm:subjectId <http://schema.org/name> ; sm:mappingRelation owl:equivalentProperty ;
      sm:objectId <https://schema.org/name> ; sm:scope <#sw> .
)"));
    CHECK(rs.location == "http://pods.ex/ann/rules");
    CHECK(rs.subweb.id == "http://pods.ex/ann/rules#sw");
    CHECK(rs.subweb.prefixes == std::set<std::string>{"http://pods.ex/ann/"});
    REQUIRE(rs.rules.size() == 1);
    CHECK(rs.rules[0].source == "http://schema.org/name");
    CHECK(rs.rules[0].target == "https://schema.org/name");
    CHECK(rs.rules[0].relation == RelationKind::PredicateEquivalence);
    CHECK(rs.rules[0].scope.subweb_id() == rs.subweb.id);
  }
  SUBCASE("subweb without mappings") {
    const auto rs = align::parse_rule_set(rules_doc(R"(<#sw> a sm:Subweb ; sm:iriPrefix "http://pods.ex/ann/" .)"));
    CHECK(rs.rules.empty());
  }
  SUBCASE("malformed documents") {
    CHECK_THROWS_AS(align::parse_rule_set(rules_doc(R"(
<#sw> a sm:Subweb ; sm:iriPrefix "http://pods.ex/ann/" .
<#m1> a sm:Mapping ; sm:subjectId <http://schema.org/name> ; sm:mappingRelation owl:equivalentProperty ;
      sm:objectId "name" ; sm:scope <#sw> .
)")),
                    align::MalformedRuleSet);
    CHECK_THROWS_AS(align::parse_rule_set(rules_doc("<#x> sm:iriPrefix \"http://pods.ex/ann/\" .")),
                    align::MalformedRuleSet);
    CHECK_THROWS_AS(align::parse_rule_set(rules_doc("<#sw> a sm:Subweb ; sm:iriPrefix \"ann/\" .")),
                    align::MalformedRuleSet);
    CHECK_THROWS_AS(align::parse_rule_set(rules_doc(R"(
<#sw> a sm:Subweb ; sm:iriPrefix "http://pods.ex/ann/" .
<#m1> a sm:Mapping ; sm:subjectId <http://a> ; sm:mappingRelation <http://unknown/rel> ;
      sm:objectId <http://b> ; sm:scope <#sw> .
)")),
                    align::MalformedRuleSet);
  }
  CHECK(align::is_rule_set_document(rules_doc(R"(<#sw> a sm:Subweb ; sm:iriPrefix "http://pods.ex/ann/" .)")));
  CHECK_FALSE(align::is_rule_set_document(rules_doc("<#me> <http://schema.org/name> \"Ann\" .")));
}

TEST_CASE("issuer rule json") {
  const auto rules = align::parse_issuer_rules(nlohmann::json::parse(R"([
    {"subject": "http://a", "relation": "predicate-equivalence", "object": "http://b"},
    {"subject": "http://C", "relation": "http://www.w3.org/2000/01/rdf-schema#subClassOf", "object": "http://D"}
  ])"));
  REQUIRE(rules.size() == 2);
  CHECK(rules[1].relation == RelationKind::ClassSpecialization);
  CHECK(rules[1].scope.is_issuer());
  CHECK_THROWS_AS(align::parse_issuer_rules(nlohmann::json::object()), std::invalid_argument);
  CHECK_THROWS_AS(align::parse_issuer_rules(nlohmann::json::parse(R"([{"subject": "a", "relation": "entity-identity",
                                                                       "object": "http://b"}])")),
                  std::invalid_argument);
  CHECK_THROWS_AS(align::parse_issuer_rules(nlohmann::json::parse(R"([{"subject": "http://a", "relation": "nope",
                                                                       "object": "http://b"}])")),
                  std::invalid_argument);
}

TEST_CASE("register rule sets") {
  SUBCASE("disjoint prefixes are both accepted") {
    align::RuleRegistry reg;
    CHECK(reg.register_rule_set(rule_set("http://pods.ex/a/", {rule("http://p", "http://q")})).accepted());
    CHECK(reg.register_rule_set(rule_set("http://pods.ex/b/", {rule("http://p", "http://q")})).accepted());
    CHECK(reg.rules().size() == 2);
  }
  SUBCASE("an extending prefix is rejected as overlap") {
    align::RuleRegistry reg;
    reg.register_rule_set(rule_set("http://pods.ex/a/", {rule("http://p", "http://q")}));
    const auto d = reg.register_rule_set(rule_set("http://pods.ex/a/sub/", {rule("http://r", "http://s")}));
    CHECK(d.rejected == align::RejectReason::Overlap);
    CHECK(d.accepted_rule_count() == 0);
    CHECK(reg.rules().size() == 1);
    CHECK(reg.subwebs().size() == 1);
    REQUIRE(reg.rejections().size() == 1);
    CHECK(reg.rejections()[0].reason == align::RejectReason::Overlap);
  }
  SUBCASE("a cycle rejects only the closing rule") {
    align::RuleRegistry reg;
    const auto d =
        reg.register_rule_set(rule_set("http://pods.ex/a/", {rule("http://a", "http://b"), rule("http://b", "http://a")}));
    CHECK(d.accepted());
    REQUIRE(d.rules.size() == 2);
    CHECK(d.rules[0].accepted());
    CHECK(d.rules[1].rejected == align::RejectReason::Cycle);
    CHECK_FALSE(has_cycle(reg));
  }
  SUBCASE("remapping a term is malformed") {
    align::RuleRegistry reg;
    const auto d =
        reg.register_rule_set(rule_set("http://pods.ex/a/", {rule("http://a", "http://b"), rule("http://a", "http://c")}));
    CHECK(d.rules[1].rejected == align::RejectReason::Malformed);
  }
  SUBCASE("the same pair in different categories is not a cycle") {
    align::RuleRegistry reg;
    const auto d = reg.register_rule_set(rule_set(
        "http://pods.ex/a/", {rule("http://a", "http://b"), rule("http://b", "http://a", RelationKind::EntityIdentity)}));
    CHECK(d.accepted_rule_count() == 2);
  }
}

TEST_CASE("issuer rules") {
  SUBCASE("empty list changes nothing") {
    align::RuleRegistry reg;
    CHECK(reg.register_issuer_rules({}).empty());
    CHECK(reg.empty());
  }
  SUBCASE("applies inside and outside subwebs") {
    align::RuleRegistry reg;
    reg.register_rule_set(rule_set("http://pods.ex/a/", {}));
    const auto d = reg.register_issuer_rules({rule("http://x", "http://y")});
    REQUIRE(d.size() == 1);
    CHECK(d[0].accepted());
    for (const char* src : {"http://pods.ex/a/doc", "http://elsewhere/doc"}) {
      CHECK(align::align_triple(reg, triple(src, "http://x")).triple.predicate == Term::iri("http://y"));
    }
  }
  SUBCASE("closing a cycle with a subweb rule is rejected") {
    align::RuleRegistry reg;
    reg.register_rule_set(rule_set("http://pods.ex/a/", {rule("http://x", "http://y")}));
    const auto d = reg.register_issuer_rules({rule("http://y", "http://x")});
    CHECK(d[0].rejected == align::RejectReason::Cycle);
    CHECK_FALSE(has_cycle(reg));
  }
  SUBCASE("a later subweb rule conflicting with an issuer rule is rejected") {
    align::RuleRegistry reg;
    reg.register_issuer_rules({rule("http://y", "http://x")});
    const auto d = reg.register_rule_set(rule_set("http://pods.ex/a/", {rule("http://x", "http://y")}));
    CHECK(d.accepted());
    CHECK(d.rules[0].rejected == align::RejectReason::Cycle);
  }
}

TEST_CASE("align triple") {
  align::RuleRegistry reg;
  reg.register_rule_set(rule_set("http://pods.ex/ann/", {rule("http://schema.org/name", "https://schema.org/name")}));

  SUBCASE("http to https within the subweb") {
    const auto out = align::align_triple(reg, triple("http://pods.ex/ann/card", "http://schema.org/name"));
    CHECK(out.triple.predicate == Term::iri("https://schema.org/name"));
    CHECK(out.triple.source == "http://pods.ex/ann/card");
    CHECK(out.triple.aligned);
    CHECK(out.trace.size() == 1);
  }
  SUBCASE("no applicable rules gives an identical copy") {
    const auto t = triple("http://pods.ex/ann/card", "http://schema.org/knows");
    const auto out = align::align_triple(reg, t);
    auto expected = t;
    expected.aligned = true;
    CHECK(out.triple == expected);
    CHECK(out.trace.empty());
  }
  SUBCASE("outside every subweb") {
    const auto out = align::align_triple(reg, triple("http://pods.ex/bo/card", "http://schema.org/name"));
    CHECK(out.triple.predicate == Term::iri("http://schema.org/name"));
  }
  SUBCASE("chains follow to the fixpoint") {
    align::RuleRegistry chain;
    chain.register_rule_set(rule_set("http://pods.ex/c/", {rule("http://a", "http://b"), rule("http://b", "http://c")}));
    const auto out = align::align_triple(chain, triple("http://pods.ex/c/doc", "http://a"));
    CHECK(out.triple.predicate == Term::iri("http://c"));
    CHECK(out.trace.size() == 2);
  }
  SUBCASE("class rules touch rdf:type objects, entity rules touch subjects and objects") {
    align::RuleRegistry r2;
    r2.register_rule_set(rule_set("http://pods.ex/c/", {rule("http://C1", "http://C2", RelationKind::ClassEquivalence),
                                                        rule("http://e1", "http://e2", RelationKind::EntityIdentity)}));
    const auto typed = align::align_triple(
        r2, triple("http://pods.ex/c/doc", std::string(vocab::kRdfType), "http://e1", Term::iri("http://C1")));
    CHECK(typed.triple.subject == Term::iri("http://e2"));
    CHECK(typed.triple.object == Term::iri("http://C2"));
    const auto linked =
        align::align_triple(r2, triple("http://pods.ex/c/doc", "http://p", "http://x", Term::iri("http://e1")));
    CHECK(linked.triple.object == Term::iri("http://e2"));
    const auto not_a_class =
        align::align_triple(r2, triple("http://pods.ex/c/doc", "http://p", "http://x", Term::iri("http://C1")));
    CHECK(not_a_class.triple.object == Term::iri("http://C1"));
  }
}

TEST_CASE("overlap outcome depends on registration order") {
  const auto first = rule_set("http://pods.ex/a/", {rule("http://p", "http://q")});
  const auto second = rule_set("http://pods.ex/a/x/", {rule("http://p", "http://r")});
  align::RuleRegistry forward;
  CHECK(forward.register_rule_set(first).accepted());
  CHECK_FALSE(forward.register_rule_set(second).accepted());
  align::RuleRegistry backward;
  CHECK(backward.register_rule_set(second).accepted());
  CHECK_FALSE(backward.register_rule_set(first).accepted());
}

TEST_CASE("realign subweb") {
  rdf::TripleStore store;
  align::RuleRegistry reg;
  const std::string prefix = "http://pods.ex/w/";
  std::vector<rdf::SourcedTriple> originals;
  for (int i = 0; i < 5; ++i) {
    const bool old_vocab = i < 3;
    originals.push_back(triple(prefix + "doc", old_vocab ? "http://schema.org/name" : "http://ex.org/other",
                               "http://pods.ex/w/s" + std::to_string(i)));
  }
  for (const auto& t : originals) {
    store.insert(t);
    store.insert(align::align_triple(reg, t).triple);
  }
  const auto rs = rule_set(prefix, {rule("http://schema.org/name", "https://schema.org/name")});
  reg.register_rule_set(rs);
  const auto first = align::realign_subweb(reg, store, rs.subweb);
  CHECK(first.changed == 3);
  CHECK(first.added.size() == 3);
  CHECK(align::realign_subweb(reg, store, rs.subweb).changed == 0);
  CHECK(align::realign_subweb(reg, store, subweb("empty", {"http://pods.ex/none/"})).changed == 0);

  rdf::StorePattern stale;
  stale.predicate = Term::iri("http://schema.org/name");
  stale.aligned = true;
  CHECK(store.match(stale).empty());
  stale.aligned = false;
  CHECK(store.match(stale).size() == 3);
}

TEST_CASE("randomized admission keeps graphs acyclic and traces bounded") {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    testing::Rng rng(seed);
    align::RuleRegistry reg;
    auto random_rule = [&] {
      const auto kind = static_cast<RelationKind>(rng.below(5));
      const std::size_t a = rng.below(4);
      std::size_t b = rng.below(3);
      if (b >= a) ++b;
      return rule("http://t/" + std::to_string(a), "http://t/" + std::to_string(b), kind);
    };
    for (int step = 0; step < 6; ++step) {
      if (rng.chance(30)) {
        reg.register_issuer_rules({random_rule()});
      } else {
        const std::string prefix = "http://w" + std::to_string(rng.below(3)) + ".ex/" + (rng.chance(30) ? "x/" : "");
        std::vector<align::AlignmentRule> rules;
        for (std::size_t i = rng.below(4); i > 0; --i) rules.push_back(random_rule());
        reg.register_rule_set(rule_set(prefix, rules));
      }
    }
    CHECK_FALSE(has_cycle(reg));
    for (std::size_t i = 0; i < reg.subwebs().size(); ++i) {
      for (std::size_t j = i + 1; j < reg.subwebs().size(); ++j) {
        CHECK_FALSE(align::subwebs_overlap(reg.subwebs()[i], reg.subwebs()[j]));
      }
    }
    for (int n = 0; n < 5; ++n) {
      const std::string src = "http://w" + std::to_string(rng.below(4)) + ".ex/x/doc";
      const auto t = triple(src, "http://t/" + std::to_string(rng.below(4)), "http://t/" + std::to_string(rng.below(4)),
                            Term::iri("http://t/" + std::to_string(rng.below(4))));
      const auto out = align::align_triple(reg, t);
      // Each position walks an acyclic chain, so a rule fires at most once per
      // position; entity rules may fire for both subject and object.
      std::map<std::uint64_t, int> fired;
      for (const auto& r : out.trace) ++fired[r.ordinal];
      for (const auto& [ordinal, n] : fired) CHECK(n <= 2);
      CHECK(out.trace.size() <= 2 * reg.rules().size());
      auto again = out.triple;
      again.aligned = false;
      CHECK(align::align_triple(reg, again).triple == out.triple);
    }
  }
}

TEST_CASE("scoping property (120 random registries)") {
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    const auto failure = testing::scoping_case(seed);
    CHECK_MESSAGE(!failure, failure.value_or(""));
  }
}
