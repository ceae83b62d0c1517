#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ltqp/align/rules.hpp"
#include "ltqp/fixture/fixture.hpp"
#include "ltqp/rdf/vocab.hpp"

namespace ltqp::fixture {

std::string_view to_string(Configuration c) noexcept {
  return c == Configuration::Base ? "base" : "heterogeneous";
}

std::optional<Configuration> parse_configuration(std::string_view text) noexcept {
  if (text == "base") return Configuration::Base;
  if (text == "heterogeneous") return Configuration::Heterogeneous;
  return std::nullopt;
}

void FixtureConfig::validate() const {
  if (pod_count == 0) throw std::invalid_argument("podCount must be positive");
  if (posts_per_pod == 0) throw std::invalid_argument("postsPerPod must be positive");
  if (tag_vocabulary_size == 0) throw std::invalid_argument("tagVocabularySize must be positive");
  if (forum_count == 0) throw std::invalid_argument("forumCount must be positive");
  if (!(variant_fraction >= 0.0 && variant_fraction <= 1.0)) {
    throw std::invalid_argument("variantFraction must lie in [0, 1]");
  }
}

double FixtureConfig::effective_variant_fraction() const noexcept {
  return configuration == Configuration::Base ? 0.0 : variant_fraction;
}

std::size_t FixtureConfig::variant_count() const noexcept {
  return static_cast<std::size_t>(std::llround(effective_variant_fraction() * static_cast<double>(pod_count)));
}

FixtureConfig base_config(std::uint64_t seed) {
  FixtureConfig c;
  c.configuration = Configuration::Base;
  c.variant_fraction = 0.0;
  c.random_seed = seed;
  return c;
}

FixtureConfig heterogeneous_config(std::uint64_t seed) {
  FixtureConfig c;
  c.configuration = Configuration::Heterogeneous;
  c.variant_fraction = 0.5;
  c.random_seed = seed;
  return c;
}

std::vector<std::size_t> variant_pods(const FixtureConfig& cfg) {
  std::vector<std::size_t> order;
  for (std::size_t i = 1; i < cfg.pod_count; i += 2) order.push_back(i);
  for (std::size_t i = 2; i < cfg.pod_count; i += 2) order.push_back(i);
  order.push_back(0);
  order.resize(std::min(cfg.variant_count(), cfg.pod_count));
  std::sort(order.begin(), order.end());
  return order;
}

const NamedQuery* FixtureSet::query(std::string_view name) const {
  for (const auto& q : queries) {
    if (q.name == name) return &q;
  }
  return nullptr;
}

std::vector<std::string> FixtureSet::rule_set_documents() const {
  std::vector<std::string> out;
  const std::string marker = "<" + std::string(vocab::kSemmapSubweb) + ">";
  for (const auto& [iri, text] : documents) {
    if (text.find(marker) != std::string::npos) out.push_back(iri);
  }
  return out;
}

std::string FixtureSet::pod_prefix(std::size_t i) const {
  return base + "u" + std::to_string(i) + "/";
}

namespace {

constexpr std::string_view kSchema = "http://schema.org/";
constexpr std::string_view kForum = "http://vocab.example.org/forum#";
constexpr std::string_view kFoaf = "http://xmlns.com/foaf/0.1/";
constexpr std::string_view kAlt = "http://alt.example.org/vocab#";

enum class Variant { Canonical, Https, Renamed };

struct VocabTerm {
  std::string_view key;
  std::string canonical;
  std::string renamed;  // equal to canonical when V2 keeps the term
  align::RelationKind v2_relation;
  bool is_class;
};

std::string cat(std::string_view a, std::string_view b) { return std::string(a) + std::string(b); }

const std::vector<VocabTerm>& vocabulary() {
  using align::RelationKind;
  static const std::vector<VocabTerm> terms = {
      {"name", cat(kSchema, "name"), cat(kFoaf, "name"), RelationKind::PredicateEquivalence, false},
      {"email", cat(kSchema, "email"), cat(kAlt, "emailAddress"), RelationKind::PredicateEquivalence, false},
      {"knows", cat(kSchema, "knows"), cat(kFoaf, "knows"), RelationKind::PredicateEquivalence, false},
      {"author", cat(kSchema, "author"), cat(kAlt, "createdBy"), RelationKind::PredicateEquivalence, false},
      {"text", cat(kSchema, "text"), cat(kAlt, "body"), RelationKind::PredicateEquivalence, false},
      {"keywords", cat(kSchema, "keywords"), cat(kAlt, "primaryTag"), RelationKind::PredicateSpecialization, false},
      {"inForum", cat(kForum, "inForum"), cat(kAlt, "postedIn"), RelationKind::PredicateEquivalence, false},
      {"likes", cat(kForum, "likes"), cat(kAlt, "favourite"), RelationKind::PredicateEquivalence, false},
      {"postIndex", cat(kForum, "postIndex"), cat(kForum, "postIndex"), RelationKind::PredicateEquivalence, false},
      {"likeIndex", cat(kForum, "likeIndex"), cat(kForum, "likeIndex"), RelationKind::PredicateEquivalence, false},
      {"Person", cat(kSchema, "Person"), cat(kFoaf, "Person"), RelationKind::ClassEquivalence, true},
      {"Post", cat(kForum, "Post"), cat(kAlt, "BlogPost"), RelationKind::ClassSpecialization, true},
      {"Comment", cat(kForum, "Comment"), cat(kAlt, "Reply"), RelationKind::ClassEquivalence, true},
  };
  return terms;
}

std::string https_form(const std::string& iri) { return "https://" + iri.substr(7); }

std::string term_iri(std::string_view key, Variant v) {
  for (const auto& t : vocabulary()) {
    if (t.key != key) continue;
    switch (v) {
      case Variant::Canonical: return t.canonical;
      case Variant::Https: return https_form(t.canonical);
      case Variant::Renamed: return t.renamed;
    }
  }
  throw std::logic_error("unknown vocabulary key");
}

std::string iri(std::string_view value) { return "<" + std::string(value) + ">"; }

std::string literal(std::string_view value) { return "\"" + std::string(value) + "\""; }

/// Turtle writer with full IRIs; one subject block at a time.
class TurtleText {
public:
  void statement(const std::string& subject, const std::vector<std::pair<std::string, std::string>>& po) {
    out_ << subject;
    for (std::size_t i = 0; i < po.size(); ++i) {
      out_ << (i == 0 ? " " : " ;\n    ") << po[i].first << ' ' << po[i].second;
    }
    out_ << " .\n";
  }
  std::string str() const { return out_.str(); }

private:
  std::ostringstream out_;
};

struct Post {
  std::size_t forum;
  std::vector<std::size_t> tags;
  bool comment;
};

struct Pod {
  std::vector<std::size_t> knows;
  std::vector<Post> posts;
  std::set<std::pair<std::size_t, std::size_t>> likes;  // (pod, post)
  Variant variant = Variant::Canonical;
};

}  // namespace

FixtureSet generate(const FixtureConfig& cfg) {
  cfg.validate();
  FixtureSet fx;
  fx.config = cfg;
  fx.vocabulary_namespaces = {std::string(kSchema), https_form(std::string(kSchema)), std::string(kForum),
                              https_form(std::string(kForum)), std::string(kFoaf), std::string(kAlt)};

  const std::size_t n = cfg.pod_count;
  std::mt19937_64 rng(cfg.random_seed);
  // Raw engine output is fully specified by the standard, distributions are not.
  auto pick = [&](std::size_t bound) { return static_cast<std::size_t>(rng() % bound); };

  std::vector<Pod> pods(n);
  {
    std::size_t round_robin = 0;
    for (std::size_t i : variant_pods(cfg)) {
      pods[i].variant = (round_robin++ % 2 == 0) ? Variant::Https : Variant::Renamed;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    Pod& pod = pods[i];
    std::set<std::size_t> friends;
    if (n > 1) friends.insert((i + 1) % n);
    if (n > 2) friends.insert((i + 2) % n);
    const std::size_t extra = pick(n);
    if (extra != i) friends.insert(extra);
    pod.knows.assign(friends.begin(), friends.end());

    for (std::size_t k = 0; k < cfg.posts_per_pod; ++k) {
      Post post;
      post.forum = pick(cfg.forum_count);
      post.tags.push_back(pick(cfg.tag_vocabulary_size));
      if (pick(3) == 0) {
        const std::size_t second = pick(cfg.tag_vocabulary_size);
        if (second != post.tags.front()) post.tags.push_back(second);
      }
      post.comment = k % 4 == 3;
      pod.posts.push_back(std::move(post));
    }
    if (n > 1) {
      for (std::size_t l = 0; l < cfg.likes_per_pod; ++l) {
        std::size_t j = pick(n - 1);
        if (j >= i) ++j;
        pod.likes.emplace(j, pick(cfg.posts_per_pod));
      }
    }
  }

  const std::string semmap_location = iri(vocab::kSemmapRuleSetLocation);
  const std::string rdf_type = iri(vocab::kRdfType);
  auto me = [&](std::size_t i) { return fx.pod_prefix(i) + "card#me"; };
  auto post_iri = [&](std::size_t i, std::size_t k) { return fx.pod_prefix(i) + "posts#p" + std::to_string(k); };
  auto forum_iri = [&](std::size_t f) { return fx.base + "forums#f" + std::to_string(f); };
  auto alias_iri = [&](std::size_t i, std::size_t f) {
    return fx.pod_prefix(i) + "aliases#f" + std::to_string(f);
  };
  auto tag = [](std::size_t t) { return "tag" + std::string(t < 10 ? "0" : "") + std::to_string(t); };

  {
    TurtleText forums;
    for (std::size_t f = 0; f < cfg.forum_count; ++f) {
      forums.statement(iri(forum_iri(f)), {{rdf_type, iri(cat(kForum, "Forum"))},
                                           {iri(cat(kSchema, "name")), literal("Forum " + std::to_string(f))}});
    }
    fx.documents[fx.base + "forums"] = forums.str();
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Pod& pod = pods[i];
    const Variant v = pod.variant;
    auto P = [&](std::string_view key) { return iri(term_iri(key, v)); };
    const std::string prefix = fx.pod_prefix(i);

    TurtleText card;
    std::vector<std::pair<std::string, std::string>> po = {
        {rdf_type, P("Person")},
        {P("name"), literal("User " + std::to_string(i))},
        {P("email"), literal("user" + std::to_string(i) + "@pods.ex")}};
    for (std::size_t j : pod.knows) po.emplace_back(P("knows"), iri(me(j)));
    po.emplace_back(P("postIndex"), iri(prefix + "posts"));
    po.emplace_back(P("likeIndex"), iri(prefix + "likes"));
    card.statement(iri(me(i)), po);
    if (v != Variant::Canonical) card.statement(iri(prefix + "card"), {{semmap_location, iri(prefix + "rules")}});
    fx.documents[prefix + "card"] = card.str();

    TurtleText posts;
    std::set<std::size_t> aliased;
    for (std::size_t k = 0; k < pod.posts.size(); ++k) {
      const Post& post = pod.posts[k];
      std::string forum = forum_iri(post.forum);
      if (v == Variant::Renamed) {
        forum = alias_iri(i, post.forum);
        aliased.insert(post.forum);
      }
      std::vector<std::pair<std::string, std::string>> props = {
          {rdf_type, P(post.comment ? "Comment" : "Post")},
          {P("author"), iri(me(i))},
          {P("text"), literal("Message " + std::to_string(k) + " from user " + std::to_string(i))},
          {P("inForum"), iri(forum)}};
      for (std::size_t t : post.tags) props.emplace_back(P("keywords"), literal(tag(t)));
      posts.statement(iri(post_iri(i, k)), props);
    }
    fx.documents[prefix + "posts"] = posts.str();

    TurtleText likes;
    for (const auto& [j, k] : pod.likes) likes.statement(iri(me(i)), {{P("likes"), iri(post_iri(j, k))}});
    fx.documents[prefix + "likes"] = likes.str();

    if (v == Variant::Canonical) continue;

    if (!aliased.empty()) {
      TurtleText aliases;
      for (std::size_t f : aliased) {
        aliases.statement(iri(alias_iri(i, f)),
                          {{iri(cat(vocab::kRdfs, "label")), literal("alias of forum " + std::to_string(f))}});
      }
      fx.documents[prefix + "aliases"] = aliases.str();
    }

    const std::string rules_doc = prefix + "rules";
    const std::string subweb = iri(rules_doc + "#subweb");
    TurtleText rules;
    rules.statement(subweb, {{rdf_type, iri(vocab::kSemmapSubweb)}, {iri(vocab::kSemmapIriPrefix), literal(prefix)}});
    std::size_t m = 0;
    auto mapping = [&](const std::string& from, align::RelationKind kind, const std::string& to) {
      rules.statement(iri(rules_doc + "#m" + std::to_string(++m)),
                      {{rdf_type, iri(vocab::kSemmapMapping)},
                       {iri(vocab::kSemmapSubjectId), iri(from)},
                       {iri(vocab::kSemmapMappingRelation), iri(align::relation_iri(kind))},
                       {iri(vocab::kSemmapObjectId), iri(to)},
                       {iri(vocab::kSemmapScope), subweb}});
    };
    for (const auto& t : vocabulary()) {
      const std::string variant_term = term_iri(t.key, v);
      if (variant_term == t.canonical) continue;
      const auto kind = v == Variant::Https ? (t.is_class ? align::RelationKind::ClassEquivalence
                                                          : align::RelationKind::PredicateEquivalence)
                                            : t.v2_relation;
      mapping(variant_term, kind, t.canonical);
    }
    for (std::size_t f : aliased) mapping(alias_iri(i, f), align::RelationKind::EntityIdentity, forum_iri(f));
    fx.documents[rules_doc] = rules.str();
  }

  fx.queries = canonical_queries(fx.base);
  recompute_oracles(fx);
  return fx;
}

std::vector<NamedQuery> canonical_queries(std::string_view base) {
  const std::string b(base);
  const std::string prologue =
      "PREFIX s: <" + std::string(kSchema) + ">\nPREFIX f: <" + std::string(kForum) + ">\n";
  const std::string u0 = "<" + b + "u0/card#me>";
  const std::string u1 = "<" + b + "u1/card#me>";
  const std::string seed0 = b + "u0/card";
  const std::string seed1 = b + "u1/card";
  return {
      {"Messages of liked users",
       prologue + "SELECT ?creator ?message WHERE {\n  " + u0 +
           " f:likes ?liked .\n  ?liked s:author ?creator .\n"
           "  { ?message a f:Post } UNION { ?message a f:Comment }\n"
           "  ?message s:author ?creator .\n}\n",
       {seed0}},
      {"Forums a user posted",
       prologue + "SELECT DISTINCT ?forum ?title WHERE {\n  ?post s:author " + u0 +
           " ;\n    f:inForum ?forum .\n  ?forum s:name ?title .\n}\n",
       {seed0}},
      {"User information",
       prologue + "SELECT ?name ?email ?friendName WHERE {\n  " + u0 +
           " s:name ?name ;\n    s:email ?email ;\n    s:knows ?friend .\n  ?friend s:name ?friendName .\n}\n",
       {seed0}},
      {"Posts of a user",
       prologue + "SELECT ?post ?content WHERE {\n  ?post s:author " + u1 + " ;\n    s:text ?content .\n}\n",
       {seed1}},
      {"Tag distribution",
       prologue + "SELECT ?tag (COUNT(?post) AS ?count) WHERE {\n  " + u0 +
           " s:knows ?friend .\n  ?post s:author ?friend ;\n    s:keywords ?tag .\n}\nGROUP BY ?tag\n",
       {seed0}},
  };
}

}  // namespace ltqp::fixture
