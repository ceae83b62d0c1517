#include "doctest.h"

#include <algorithm>

#include "ltqp/rdf/triple_store.hpp"
#include "ltqp/rdf/vocab.hpp"
#include "ltqp/sparql/evaluator.hpp"
#include "ltqp/sparql/query.hpp"
#include "ltqp/sparql/results.hpp"
#include "properties.hpp"

using namespace ltqp;
using rdf::Term;
using sparql::BindingRow;

namespace {

const char* const kNameQuery = "SELECT ?n WHERE { ?p <http://schema.org/name> ?n }";

rdf::SourcedTriple aligned(std::string s, std::string p, Term o, std::string source = "http://pods.ex/d") {
  return {Term::iri(std::move(s)), Term::iri(std::move(p)), std::move(o), std::move(source), true};
}

sparql::ResultTable run(const std::string& text, const rdf::TripleStore& store) {
  return sparql::evaluate(sparql::parse_query(text), sparql::AlignedView(store.snapshot()));
}

Term integer(int n) { return Term::literal(std::to_string(n), std::string(vocab::kXsdInteger)); }

}  // namespace

TEST_CASE("parse: examples") {
  const auto q = sparql::parse_query(kNameQuery);
  CHECK(q.projection == std::vector<std::string>{"n"});
  const auto* bgp = std::get_if<sparql::Bgp>(&q.pattern->node);
  REQUIRE(bgp);
  CHECK(bgp->patterns.size() == 1);

  const auto u = sparql::parse_query("SELECT * WHERE { { ?s <http://p> ?o } UNION { ?s <http://q> ?o } }");
  const auto* node = std::get_if<sparql::Union>(&u.pattern->node);
  REQUIRE(node);
  CHECK(std::holds_alternative<sparql::Bgp>(node->left->node));
  CHECK(std::holds_alternative<sparql::Bgp>(node->right->node));

  const auto agg = sparql::parse_query(
      "PREFIX s: <http://schema.org/> SELECT ?t (COUNT(?m) AS ?c) WHERE { ?m s:keywords ?t } GROUP BY ?t LIMIT 5");
  REQUIRE(agg.count);
  CHECK(agg.count->counted == "m");
  CHECK(agg.count->alias == "c");
  CHECK(agg.group_by == "t");
  CHECK(agg.limit == 5u);
  CHECK(agg.columns() == std::vector<std::string>{"t", "c"});
}

TEST_CASE("parse: filters, prefixes and the a keyword") {
  const auto q = sparql::parse_query(
      "PREFIX e: <http://ex.org/> SELECT DISTINCT ?x WHERE { ?x a e:C ; e:p ?y . FILTER(?y != \"v\"@en) }");
  CHECK(q.distinct);
  const auto patterns = sparql::all_triple_patterns(*q.pattern);
  REQUIRE(patterns.size() == 2);
  CHECK(std::get<Term>(patterns[0].predicate) == Term::iri(std::string(vocab::kRdfType)));
  CHECK(sparql::pattern_variables(*q.pattern) == std::vector<std::string>{"x", "y"});
}

TEST_CASE("parse: rejects what the fragment does not cover") {
  CHECK_THROWS_AS(sparql::parse_query("SELECT ?x WHERE { ?x OPTIONAL { ?x <http://p> ?y } }"),
                  sparql::UnsupportedFeature);
  CHECK_THROWS_AS(sparql::parse_query("SELECT ?x WHERE { ?x <http://p>/<http://q> ?y }"), sparql::UnsupportedFeature);
  CHECK_THROWS_AS(sparql::parse_query("SELECT ?x WHERE { { SELECT ?x WHERE { ?x ?p ?o } } }"),
                  sparql::UnsupportedFeature);
  CHECK_THROWS_AS(sparql::parse_query("SELECT ?x WHERE { ?x ?p ?o } ORDER BY ?x"), sparql::UnsupportedFeature);
  CHECK_THROWS_AS(sparql::parse_query("SELECT ?x WHERE { ?x ?p ?o "), sparql::QueryParseError);
  CHECK_THROWS_AS(sparql::parse_query("SELECT WHERE { ?x ?p ?o }"), sparql::QueryParseError);
  CHECK_THROWS_AS(sparql::parse_query("SELECT ?x WHERE { ?x u:p ?o }"), sparql::QueryParseError);
  try {
    sparql::parse_query("SELECT ?x WHERE { ?x <http://p> }");
    FAIL("expected QueryParseError");
  } catch (const sparql::QueryParseError& e) {
    CHECK(e.position() > 20);
  }
}

TEST_CASE("evaluate: examples") {
  rdf::TripleStore store;
  store.insert(aligned("http://pods.ex/a", "http://schema.org/name", Term::literal("Ann")));
  store.insert(aligned("http://pods.ex/b", "http://schema.org/name", Term::literal("Bo")));

  const auto table = run(kNameQuery, store);
  CHECK(table.variables == std::vector<std::string>{"n"});
  CHECK(table.rows == std::vector<BindingRow>{{{"n", Term::literal("Ann")}}, {{"n", Term::literal("Bo")}}});

  CHECK(run("SELECT ?x WHERE { ?x <http://schema.org/name> \"Ann\" . ?x <http://schema.org/name> \"Bo\" }", store)
            .rows.empty());

  rdf::TripleStore empty;
  CHECK(run(kNameQuery, empty).rows.empty());
}

TEST_CASE("evaluate: group by counts tags") {
  rdf::TripleStore store;
  const std::string kw = "http://schema.org/keywords";
  store.insert(aligned("http://pods.ex/m1", kw, Term::literal("t1")));
  store.insert(aligned("http://pods.ex/m2", kw, Term::literal("t1")));
  store.insert(aligned("http://pods.ex/m3", kw, Term::literal("t1")));
  store.insert(aligned("http://pods.ex/m4", kw, Term::literal("t2")));
  const auto table = run("SELECT ?t (COUNT(?m) AS ?c) WHERE { ?m <" + kw + "> ?t } GROUP BY ?t", store);
  CHECK(table.rows == std::vector<BindingRow>{{{"t", Term::literal("t1")}, {"c", integer(3)}},
                                             {{"t", Term::literal("t2")}, {"c", integer(1)}}});

  rdf::TripleStore empty;
  CHECK(run("SELECT (COUNT(?m) AS ?c) WHERE { ?m <" + kw + "> ?t }", empty).rows ==
        std::vector<BindingRow>{{{"c", integer(0)}}});
}

TEST_CASE("evaluate: only aligned triples are visible, deduplicated across sources") {
  rdf::TripleStore store;
  auto original = aligned("http://pods.ex/a", "http://schema.org/name", Term::literal("Ann"));
  original.aligned = false;
  store.insert(original);
  CHECK(run(kNameQuery, store).rows.empty());
  store.insert(aligned("http://pods.ex/a", "http://schema.org/name", Term::literal("Ann"), "http://pods.ex/d1"));
  store.insert(aligned("http://pods.ex/a", "http://schema.org/name", Term::literal("Ann"), "http://pods.ex/d2"));
  CHECK(run(kNameQuery, store).rows.size() == 1);
}

TEST_CASE("evaluate: limit applies after canonical ordering") {
  rdf::TripleStore store;
  for (const char* n : {"d", "b", "a", "c"}) {
    store.insert(aligned(std::string("http://pods.ex/") + n, "http://schema.org/name", Term::literal(n)));
  }
  const auto table = run("SELECT ?n WHERE { ?p <http://schema.org/name> ?n } LIMIT 2", store);
  CHECK(table.rows == std::vector<BindingRow>{{{"n", Term::literal("a")}}, {{"n", Term::literal("b")}}});
}

TEST_CASE("evaluate: join order independence") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    testing::Rng rng(seed);
    rdf::TripleStore store;
    for (auto t : testing::random_triples(rng, 30)) {
      t.aligned = true;
      store.insert(t);
    }
    testing::GenQuery q = testing::random_query(rng, 3);
    while (q.where.triples.size() < 2 || !q.where.unions.empty()) q = testing::random_query(rng, 3);
    std::vector<std::string> lines;
    for (const auto& t : q.where.triples) {
      std::string line;
      for (const auto* slot : {&t.s, &t.p, &t.o}) {
        const auto* v = std::get_if<std::string>(slot);
        line += (v ? "?" + *v : rdf::to_ntriples(std::get<Term>(*slot))) + " ";
      }
      lines.push_back(line + ". ");
    }
    std::sort(lines.begin(), lines.end());
    std::vector<BindingRow> reference;
    bool first = true;
    do {
      std::string text = "SELECT * WHERE { ";
      for (const auto& l : lines) text += l;
      text += "}";
      auto rows = testing::as_multiset(run(text, store).rows);
      if (first) {
        reference = rows;
        first = false;
      } else {
        CHECK_MESSAGE(rows == reference, text);
      }
    } while (std::next_permutation(lines.begin(), lines.end()));
  }
}

TEST_CASE("evaluate: distinct is idempotent and monotonicity holds") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    testing::Rng rng(seed);
    auto triples = testing::random_triples(rng, 30);
    auto q = testing::random_query(rng, 3);
    if (q.counted) continue;  // aggregates are not monotone in row content

    rdf::TripleStore store;
    const std::size_t half = triples.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
      triples[i].aligned = true;
      store.insert(triples[i]);
    }
    const auto parsed = sparql::parse_query(q.text);
    const auto before = sparql::evaluate(parsed, sparql::AlignedView(store.snapshot()));
    for (std::size_t i = half; i < triples.size(); ++i) {
      triples[i].aligned = true;
      store.insert(triples[i]);
    }
    const auto after = sparql::evaluate(parsed, sparql::AlignedView(store.snapshot()));

    if (!q.where.filter || q.where.filter->equal) {
      // No negation: every earlier row survives (as a multiset for non-DISTINCT queries).
      auto remaining = testing::as_multiset(after.rows);
      for (const auto& row : before.rows) {
        const auto it = std::find(remaining.begin(), remaining.end(), row);
        CHECK_MESSAGE(it != remaining.end(), q.text);
        if (it != remaining.end()) remaining.erase(it);
      }
    }

    auto once = sparql::parse_query(q.text);
    once.distinct = true;
    const auto distinct_rows = sparql::evaluate(once, sparql::AlignedView(store.snapshot())).rows;
    std::vector<BindingRow> twice = distinct_rows;
    twice.erase(std::unique(twice.begin(), twice.end()), twice.end());
    CHECK(twice == distinct_rows);
  }
}

TEST_CASE("evaluate agrees with brute force (200 random cases)") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto failure = testing::evaluator_case(seed);
    CHECK_MESSAGE(!failure, failure.value_or(""));
  }
}

TEST_CASE("results: json and csv") {
  sparql::ResultTable table;
  table.variables = {"s", "n"};
  table.rows = {{{"s", Term::iri("http://a")}, {"n", Term::lang_literal("x", "en")}},
                {{"s", Term::blank("b1")}},
                {{"n", integer(3)}}};
  const auto json = sparql::to_sparql_json(table);
  CHECK(json["head"]["vars"] == nlohmann::json::array({"s", "n"}));
  CHECK(json["results"]["bindings"][0]["n"]["xml:lang"] == "en");
  CHECK(json["results"]["bindings"][1]["s"]["type"] == "bnode");
  CHECK(sparql::from_sparql_json(json) == table);

  const std::string csv = sparql::to_csv(table);
  CHECK(csv.starts_with("s,n\r\n"));
  CHECK(csv.find("http://a,x\r\n") != std::string::npos);
  CHECK(!sparql::to_text_table(table).empty());
}
