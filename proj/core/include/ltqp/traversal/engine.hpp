#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltqp/align/registry.hpp"
#include "ltqp/source/source.hpp"
#include "ltqp/sparql/evaluator.hpp"

namespace ltqp::traversal {

enum class Policy : std::uint8_t { FollowAll, MatchDriven };

std::string_view to_string(Policy p) noexcept;
std::optional<Policy> parse_policy(std::string_view text) noexcept;

/// RDF, RDFS, OWL, XSD and semmap namespaces.
std::set<std::string> default_skip_list();

struct TraversalConfig {
  std::vector<std::string> seeds;
  Policy policy = Policy::FollowAll;
  std::size_t max_documents = 1000;
  std::chrono::milliseconds timeout{180'000};
  bool deterministic = true;
  bool alignment_enabled = true;
  std::set<std::string> namespace_skip_list = default_skip_list();
  std::size_t workers = 4;  // ignored in deterministic mode
  std::vector<align::AlignmentRule> issuer_rules;

  /// Throws std::invalid_argument when seeds are missing or relative, or
  /// max_documents is zero.
  void validate() const;
};

enum class Priority : std::uint8_t { RuleSet = 0, Data = 1 };

/// Pending IRIs in two classes; rule sets always dequeue first. Deterministic
/// frontiers dequeue the lexicographically smallest IRI of a class, others
/// are FIFO. Each fragmentless IRI is accepted at most once.
class Frontier {
public:
  explicit Frontier(bool deterministic) : deterministic_(deterministic) {}

  /// False when the IRI was enqueued before (in any class).
  bool enqueue(std::string_view iri, Priority priority);
  std::optional<std::pair<std::string, Priority>> dequeue();

  bool seen(std::string_view iri) const;
  bool empty() const noexcept { return pending() == 0; }
  std::size_t pending() const noexcept;

private:
  bool deterministic_;
  std::set<std::string> ordered_[2];
  std::deque<std::string> fifo_[2];
  std::unordered_set<std::string> seen_;
};

/// IRIs worth dereferencing from newly aligned triples: subjects and objects,
/// minus skip-listed namespaces, rule-set locations (those are followed only
/// through the dedicated predicate), and IRIs the frontier has already seen.
/// Match-driven keeps only triples unifiable with some query pattern.
std::set<std::string> policy_candidates(std::span<const rdf::SourcedTriple> aligned,
                                        const TraversalConfig& cfg, const sparql::Query& query,
                                        const Frontier* frontier = nullptr);

/// True when the triple could instantiate the pattern.
bool unifiable(const sparql::TriplePattern& pattern, const rdf::SourcedTriple& t);

enum class TerminationCause : std::uint8_t { FrontierExhausted, MaxDocuments, Timeout };

std::string_view to_string(TerminationCause c) noexcept;

struct FetchedDocument {
  std::string iri;
  std::size_t triple_count = 0;
  std::chrono::microseconds duration{0};
  bool rule_set = false;
  bool ok = true;
};

struct DiscoveredRuleSet {
  std::string location;
  std::string subweb;
  std::vector<std::string> prefixes;
  std::size_t accepted_rule_count = 0;
  bool accepted = true;
  std::vector<align::AlignmentRule> accepted_rules;
};

struct RejectedEntry {
  std::string subject;  // rule description or rule-set location
  std::string reason;   // overlap | cycle | malformed
  std::string detail;
};

struct DocumentError {
  std::string iri;
  std::string kind;
  std::string detail;
};

struct ExecutionReport {
  sparql::ResultTable results;
  std::vector<FetchedDocument> documents_fetched;
  std::vector<DiscoveredRuleSet> rule_sets_discovered;
  std::vector<RejectedEntry> rules_rejected;
  std::vector<DocumentError> errors;
  std::size_t realigned_triples = 0;
  std::chrono::microseconds total_duration{0};
  TerminationCause termination = TerminationCause::FrontierExhausted;
  bool alignment_enabled = true;
  bool deterministic = true;
  Policy policy = Policy::FollowAll;
};

/// Durations are integer milliseconds.
nlohmann::json to_json(const ExecutionReport& report);

/// Copy of a report JSON with every duration field set to zero.
nlohmann::json without_timings(nlohmann::json report);

/// Progress callbacks; invoked from the thread that processes the document.
class ExecutionObserver {
public:
  virtual ~ExecutionObserver() = default;
  virtual void document_fetched(const FetchedDocument&) {}
  virtual void rule_set_discovered(const DiscoveredRuleSet&) {}
  virtual void rule_rejected(const RejectedEntry&) {}
  virtual void realigned(const std::string& /*subweb*/, std::size_t /*changed*/) {}
};

/// One link-traversal execution: owns its store, registry and frontier.
class TraversalEngine {
public:
  TraversalEngine(sparql::Query query, TraversalConfig cfg, std::shared_ptr<source::DocumentSource> src,
                  ExecutionObserver* observer = nullptr);

  /// Fetches and ingests the next document. Returns false when traversal is
  /// over (frontier empty, document budget spent, or timed out).
  bool step();

  /// Runs traversal to completion, then evaluates over the aligned snapshot.
  ExecutionReport run();

  /// Immutable view of the aligned triples ingested so far.
  sparql::AlignedView snapshot_for_evaluation() const;

  const rdf::TripleStore& store() const noexcept { return store_; }
  const align::RuleRegistry& registry() const noexcept { return registry_; }
  const Frontier& frontier() const noexcept { return frontier_; }
  const ExecutionReport& report() const noexcept { return report_; }

private:
  struct Claim {
    std::string iri;
    Priority priority;
  };

  std::optional<Claim> claim_locked();
  void ingest_locked(const Claim& claim, source::FetchOutcome outcome, std::chrono::microseconds took);
  void ingest_rule_set(const std::string& location, const rdf::Document& doc);
  void ingest_data(const rdf::Document& doc);
  void enqueue_candidates(std::span<const rdf::SourcedTriple> aligned);
  void reject(RejectedEntry entry);
  bool timed_out() const;
  void run_parallel();

  sparql::Query query_;
  TraversalConfig cfg_;
  std::shared_ptr<source::DocumentSource> src_;
  ExecutionObserver* observer_;

  rdf::TripleStore store_;
  align::RuleRegistry registry_;
  Frontier frontier_;
  ExecutionReport report_;
  std::size_t claimed_ = 0;
  std::size_t in_flight_ = 0;
  std::optional<TerminationCause> stopped_;
  std::chrono::steady_clock::time_point started_;

  std::mutex mutex_;
  std::condition_variable idle_;
};

/// Runs a full execution of `query` under `cfg`.
ExecutionReport execute(const sparql::Query& query, const TraversalConfig& cfg,
                        std::shared_ptr<source::DocumentSource> src,
                        ExecutionObserver* observer = nullptr);

}  // namespace ltqp::traversal
