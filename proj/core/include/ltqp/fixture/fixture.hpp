#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltqp/sparql/evaluator.hpp"
#include "ltqp/traversal/engine.hpp"

namespace ltqp::fixture {

inline constexpr std::string_view kDefaultBase = "http://pods.ex/";

enum class Configuration : std::uint8_t { Base, Heterogeneous };

std::string_view to_string(Configuration c) noexcept;
std::optional<Configuration> parse_configuration(std::string_view text) noexcept;

struct FixtureConfig {
  std::size_t pod_count = 8;
  std::size_t posts_per_pod = 20;
  std::size_t likes_per_pod = 10;
  std::size_t tag_vocabulary_size = 12;
  std::size_t forum_count = 6;
  double variant_fraction = 0.5;
  std::uint64_t random_seed = 7;
  Configuration configuration = Configuration::Heterogeneous;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
  /// variant_fraction as applied: zero for the base configuration.
  double effective_variant_fraction() const noexcept;
  std::size_t variant_count() const noexcept;
};

FixtureConfig base_config(std::uint64_t seed = 7);
FixtureConfig heterogeneous_config(std::uint64_t seed = 7);

/// Pod indices that use an alternative vocabulary: odd indices first, then
/// even ones, u0 last.
std::vector<std::size_t> variant_pods(const FixtureConfig& cfg);

struct NamedQuery {
  std::string name;
  std::string text;
  std::vector<std::string> seeds;
};

struct FixtureSet {
  FixtureConfig config;
  std::string base{kDefaultBase};
  std::map<std::string, std::string> documents;  // IRI -> Turtle
  std::vector<NamedQuery> queries;
  std::map<std::string, sparql::ResultTable> oracle_on;
  std::map<std::string, sparql::ResultTable> oracle_off;
  /// Vocabulary namespaces used by the documents; never dereferenced.
  std::vector<std::string> vocabulary_namespaces;

  const NamedQuery* query(std::string_view name) const;
  /// Documents declaring a subweb.
  std::vector<std::string> rule_set_documents() const;
  std::string pod_prefix(std::size_t i) const;
};

/// Deterministic in `cfg` (byte-identical document texts for equal configs).
/// Oracle tables are filled in.
FixtureSet generate(const FixtureConfig& cfg);

/// The five named queries, in canonical vocabulary, for pods under `base`.
std::vector<NamedQuery> canonical_queries(std::string_view base = kDefaultBase);

/// Merges every data document into one store, optionally rewrites with all
/// rule sets applied globally until nothing changes, then evaluates.
sparql::ResultTable centralized_oracle(const FixtureSet& fx, const sparql::Query& query, bool alignment);

/// Recomputes both oracle maps from the documents.
void recompute_oracles(FixtureSet& fx);

/// Moves every pod IRI from fx.base to `new_base` (documents, seeds, query
/// texts, oracle terms, subweb prefixes).
FixtureSet rebase(const FixtureSet& fx, std::string_view new_base);

/// Traversal settings for a named query: its seeds and a skip list extended
/// with the fixture's vocabulary namespaces.
traversal::TraversalConfig traversal_config(const FixtureSet& fx, const NamedQuery& q);

nlohmann::json to_bundle(const FixtureSet& fx);
FixtureSet from_bundle(const nlohmann::json& bundle);

/// Writes manifest.json, fixture.json and one Turtle file per document.
void export_directory(const FixtureSet& fx, const std::filesystem::path& dir);

/// Loads either a fixture directory or a JSON bundle file.
/// Throws std::runtime_error when neither form can be read.
FixtureSet load(const std::filesystem::path& path);

}  // namespace ltqp::fixture
