#include "random.hpp"

#include "ltqp/rdf/vocab.hpp"

namespace ltqp::testing {

using rdf::Term;

std::vector<Term> subject_pool() {
  return {Term::iri("http://ex.org/a"), Term::iri("http://ex.org/b"), Term::iri("http://ex.org/c"),
          Term::iri("http://ex.org/d"), Term::blank("n1")};
}

std::vector<Term> predicate_pool() {
  return {Term::iri("http://ex.org/p"), Term::iri("http://ex.org/q"), Term::iri("http://ex.org/r")};
}

std::vector<Term> object_pool() {
  auto pool = subject_pool();
  pool.push_back(Term::literal("x"));
  pool.push_back(Term::literal("y"));
  pool.push_back(Term::lang_literal("x", "en"));
  pool.push_back(Term::literal("1", std::string(vocab::kXsdInteger)));
  return pool;
}

std::vector<std::string> source_pool() {
  return {"http://pods.ex/a/doc", "http://pods.ex/b/doc", "http://pods.ex/c/doc"};
}

rdf::SourcedTriple random_triple(Rng& rng) {
  static const auto subjects = subject_pool();
  static const auto predicates = predicate_pool();
  static const auto objects = object_pool();
  static const auto sources = source_pool();
  return rdf::SourcedTriple{rng.pick(subjects), rng.pick(predicates), rng.pick(objects), rng.pick(sources),
                            rng.chance(50)};
}

std::vector<rdf::SourcedTriple> random_triples(Rng& rng, std::size_t max_count) {
  std::vector<rdf::SourcedTriple> out;
  const std::size_t n = rng.below(max_count + 1);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_triple(rng));
  return out;
}

}  // namespace ltqp::testing
