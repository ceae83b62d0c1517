#include "ltqp/traversal/engine.hpp"

#include <stdexcept>
#include <thread>

#include "ltqp/rdf/iri.hpp"
#include "ltqp/rdf/vocab.hpp"

namespace ltqp::traversal {

using Clock = std::chrono::steady_clock;
using std::chrono::duration_cast;
using std::chrono::microseconds;

std::string_view to_string(Policy p) noexcept {
  return p == Policy::FollowAll ? "follow-all" : "match-driven";
}

std::optional<Policy> parse_policy(std::string_view text) noexcept {
  if (text == "follow-all") return Policy::FollowAll;
  if (text == "match-driven") return Policy::MatchDriven;
  return std::nullopt;
}

std::string_view to_string(TerminationCause c) noexcept {
  switch (c) {
    case TerminationCause::FrontierExhausted: return "frontier-exhausted";
    case TerminationCause::MaxDocuments: return "max-documents";
    case TerminationCause::Timeout: return "timeout";
  }
  return "frontier-exhausted";
}

std::set<std::string> default_skip_list() {
  return {std::string(vocab::kRdf), std::string(vocab::kRdfs), std::string(vocab::kOwl),
          std::string(vocab::kXsd), std::string(vocab::kSemmap)};
}

void TraversalConfig::validate() const {
  if (seeds.empty()) throw std::invalid_argument("at least one seed IRI is required");
  for (const auto& s : seeds) {
    if (!rdf::is_absolute_iri(s)) throw std::invalid_argument("seed is not an absolute IRI: " + s);
  }
  if (max_documents == 0) throw std::invalid_argument("maxDocuments must be at least 1");
  if (timeout.count() <= 0) throw std::invalid_argument("timeout must be positive");
}

// ---------------------------------------------------------------- frontier

bool Frontier::enqueue(std::string_view iri, Priority priority) {
  std::string key = rdf::strip_fragment(iri);
  if (!seen_.insert(key).second) return false;
  const auto cls = static_cast<std::size_t>(priority);
  if (deterministic_) {
    ordered_[cls].insert(std::move(key));
  } else {
    fifo_[cls].push_back(std::move(key));
  }
  return true;
}

std::optional<std::pair<std::string, Priority>> Frontier::dequeue() {
  for (std::size_t cls = 0; cls < 2; ++cls) {
    const auto priority = static_cast<Priority>(cls);
    if (deterministic_ && !ordered_[cls].empty()) {
      auto node = ordered_[cls].extract(ordered_[cls].begin());
      return std::pair{std::move(node.value()), priority};
    }
    if (!deterministic_ && !fifo_[cls].empty()) {
      std::string iri = std::move(fifo_[cls].front());
      fifo_[cls].pop_front();
      return std::pair{std::move(iri), priority};
    }
  }
  return std::nullopt;
}

bool Frontier::seen(std::string_view iri) const {
  return seen_.contains(rdf::strip_fragment(iri));
}

std::size_t Frontier::pending() const noexcept {
  return ordered_[0].size() + ordered_[1].size() + fifo_[0].size() + fifo_[1].size();
}

// ------------------------------------------------------------------ policy

namespace {

bool matches_constant(const sparql::PatternTerm& slot, const rdf::Term& term) {
  const auto* constant = std::get_if<rdf::Term>(&slot);
  return constant == nullptr || *constant == term;
}

bool followable(const rdf::Term& term, const TraversalConfig& cfg) {
  if (!term.is_iri()) return false;
  const std::string& v = term.value();
  if (!v.starts_with("http://") && !v.starts_with("https://")) return false;
  for (const auto& prefix : cfg.namespace_skip_list) {
    if (v.starts_with(prefix)) return false;
  }
  return true;
}

}  // namespace

bool unifiable(const sparql::TriplePattern& pattern, const rdf::SourcedTriple& t) {
  if (!matches_constant(pattern.subject, t.subject) || !matches_constant(pattern.predicate, t.predicate) ||
      !matches_constant(pattern.object, t.object)) {
    return false;
  }
  // A variable repeated inside the pattern must bind one term.
  std::map<std::string, const rdf::Term*> bound;
  const std::pair<const sparql::PatternTerm*, const rdf::Term*> slots[] = {
      {&pattern.subject, &t.subject}, {&pattern.predicate, &t.predicate}, {&pattern.object, &t.object}};
  for (const auto& [slot, term] : slots) {
    const auto* var = std::get_if<sparql::Variable>(slot);
    if (var == nullptr) continue;
    const auto [it, inserted] = bound.emplace(var->name, term);
    if (!inserted && *it->second != *term) return false;
  }
  return true;
}

std::set<std::string> policy_candidates(std::span<const rdf::SourcedTriple> aligned,
                                        const TraversalConfig& cfg, const sparql::Query& query,
                                        const Frontier* frontier) {
  std::vector<sparql::TriplePattern> patterns;
  if (cfg.policy == Policy::MatchDriven && query.pattern) {
    patterns = sparql::all_triple_patterns(*query.pattern);
  }
  std::set<std::string> out;
  auto consider = [&](const rdf::Term& term) {
    if (!followable(term, cfg)) return;
    std::string key = rdf::strip_fragment(term.value());
    if (frontier != nullptr && frontier->seen(key)) return;
    out.insert(std::move(key));
  };
  for (const auto& t : aligned) {
    if (cfg.policy == Policy::MatchDriven &&
        std::none_of(patterns.begin(), patterns.end(),
                     [&](const sparql::TriplePattern& p) { return unifiable(p, t); })) {
      continue;
    }
    consider(t.subject);
    if (t.predicate.value() != vocab::kSemmapRuleSetLocation) consider(t.object);
  }
  return out;
}

// ------------------------------------------------------------------ engine

TraversalEngine::TraversalEngine(sparql::Query query, TraversalConfig cfg,
                                 std::shared_ptr<source::DocumentSource> src, ExecutionObserver* observer)
    : query_(std::move(query)),
      cfg_(std::move(cfg)),
      src_(std::move(src)),
      observer_(observer),
      frontier_(cfg_.deterministic) {
  cfg_.validate();
  if (!src_) throw std::invalid_argument("a document source is required");
  started_ = Clock::now();
  report_.alignment_enabled = cfg_.alignment_enabled;
  report_.deterministic = cfg_.deterministic;
  report_.policy = cfg_.policy;

  if (cfg_.alignment_enabled && !cfg_.issuer_rules.empty()) {
    for (const auto& d : registry_.register_issuer_rules(cfg_.issuer_rules)) {
      if (d.rejected) reject({d.rule.describe(), std::string(align::to_string(*d.rejected)), d.detail});
    }
  }
  for (const auto& seed : cfg_.seeds) frontier_.enqueue(seed, Priority::Data);
}

bool TraversalEngine::timed_out() const {
  return Clock::now() - started_ >= cfg_.timeout;
}

void TraversalEngine::reject(RejectedEntry entry) {
  report_.rules_rejected.push_back(entry);
  if (observer_) observer_->rule_rejected(report_.rules_rejected.back());
}

std::optional<TraversalEngine::Claim> TraversalEngine::claim_locked() {
  if (stopped_) return std::nullopt;
  if (timed_out()) {
    stopped_ = TerminationCause::Timeout;
    return std::nullopt;
  }
  if (claimed_ >= cfg_.max_documents) {
    if (!frontier_.empty()) stopped_ = TerminationCause::MaxDocuments;
    else if (in_flight_ == 0) stopped_ = TerminationCause::FrontierExhausted;
    return std::nullopt;
  }
  auto next = frontier_.dequeue();
  if (!next) {
    if (in_flight_ == 0) stopped_ = TerminationCause::FrontierExhausted;
    return std::nullopt;
  }
  ++claimed_;
  return Claim{std::move(next->first), next->second};
}

void TraversalEngine::ingest_locked(const Claim& claim, source::FetchOutcome outcome, microseconds took) {
  FetchedDocument fetched{claim.iri, 0, took, claim.priority == Priority::RuleSet, true};
  if (const auto* err = std::get_if<source::FetchError>(&outcome)) {
    fetched.ok = false;
    report_.documents_fetched.push_back(fetched);
    report_.errors.push_back({claim.iri, std::string(source::to_string(err->kind)), err->detail});
    if (observer_) observer_->document_fetched(fetched);
    return;
  }
  const auto& doc = std::get<rdf::Document>(outcome);
  fetched.triple_count = doc.triples.size();
  report_.documents_fetched.push_back(fetched);
  if (observer_) observer_->document_fetched(fetched);

  if (claim.priority == Priority::RuleSet) {
    ingest_rule_set(claim.iri, doc);
  } else {
    ingest_data(doc);
  }
}

void TraversalEngine::ingest_rule_set(const std::string& location, const rdf::Document& doc) {
  align::RuleSet rs;
  try {
    rs = align::parse_rule_set(doc);
  } catch (const align::MalformedRuleSet& e) {
    reject({location, "malformed", e.what()});
    return;
  }
  const align::RuleSetDecision decision = registry_.register_rule_set(rs);

  DiscoveredRuleSet found;
  found.location = location;
  found.subweb = rs.subweb.id;
  found.prefixes.assign(rs.subweb.prefixes.begin(), rs.subweb.prefixes.end());
  found.accepted = decision.accepted();
  for (const auto& d : decision.rules) {
    if (d.accepted()) found.accepted_rules.push_back(d.rule);
  }
  found.accepted_rule_count = found.accepted_rules.size();
  report_.rule_sets_discovered.push_back(found);
  if (observer_) observer_->rule_set_discovered(report_.rule_sets_discovered.back());

  if (!decision.accepted()) {
    reject({location, std::string(align::to_string(*decision.rejected)), decision.detail});
    return;
  }
  for (const auto& d : decision.rules) {
    if (d.rejected) reject({d.rule.describe(), std::string(align::to_string(*d.rejected)), d.detail});
  }

  const auto* accepted = registry_.subweb_for(*rs.subweb.prefixes.begin());
  const align::Subweb& w = accepted != nullptr ? *accepted : rs.subweb;
  align::RealignResult r = align::realign_subweb(registry_, store_, w);
  report_.realigned_triples += r.changed;
  if (observer_) observer_->realigned(w.id, r.changed);
  enqueue_candidates(r.added);
}

void TraversalEngine::ingest_data(const rdf::Document& doc) {
  std::vector<rdf::SourcedTriple> aligned;
  aligned.reserve(doc.triples.size());
  for (const auto& original : doc.triples) {
    rdf::SourcedTriple t = original;
    t.aligned = false;
    t.source = doc.iri;
    rdf::SourcedTriple a = cfg_.alignment_enabled ? align::align_triple(registry_, t).triple : t;
    a.aligned = true;
    if (cfg_.alignment_enabled) {
      // Rule sets are reachable through the original or the aligned predicate.
      for (const auto* candidate : {&t, &a}) {
        if (candidate->predicate.value() == vocab::kSemmapRuleSetLocation && candidate->object.is_iri()) {
          frontier_.enqueue(candidate->object.value(), Priority::RuleSet);
        }
      }
    }
    store_.insert(std::move(t));
    store_.insert(a);
    aligned.push_back(std::move(a));
  }
  enqueue_candidates(aligned);
}

void TraversalEngine::enqueue_candidates(std::span<const rdf::SourcedTriple> aligned) {
  for (const auto& iri : policy_candidates(aligned, cfg_, query_, &frontier_)) {
    frontier_.enqueue(iri, Priority::Data);
  }
}

bool TraversalEngine::step() {
  std::optional<Claim> claim;
  {
    std::lock_guard lock(mutex_);
    claim = claim_locked();
  }
  if (!claim) return false;
  const auto t0 = Clock::now();
  source::FetchOutcome outcome = src_->fetch(claim->iri);
  const auto took = duration_cast<microseconds>(Clock::now() - t0);
  std::lock_guard lock(mutex_);
  ingest_locked(*claim, std::move(outcome), took);
  return true;
}

void TraversalEngine::run_parallel() {
  auto worker = [this] {
    std::unique_lock lock(mutex_);
    for (;;) {
      std::optional<Claim> claim = claim_locked();
      if (!claim) {
        if (stopped_) {
          idle_.notify_all();
          return;
        }
        // Nothing pending yet; an in-flight fetch may still add work.
        idle_.wait_for(lock, std::chrono::milliseconds(50));
        continue;
      }
      ++in_flight_;
      lock.unlock();
      const auto t0 = Clock::now();
      source::FetchOutcome outcome = src_->fetch(claim->iri);
      const auto took = duration_cast<microseconds>(Clock::now() - t0);
      lock.lock();
      ingest_locked(*claim, std::move(outcome), took);
      --in_flight_;
      idle_.notify_all();
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t i = 0; i < cfg_.workers; ++i) pool.emplace_back(worker);
}

ExecutionReport TraversalEngine::run() {
  if (!cfg_.deterministic && cfg_.workers > 1) {
    run_parallel();
  } else {
    while (step()) {
    }
  }
  report_.termination = stopped_.value_or(TerminationCause::FrontierExhausted);
  report_.results = sparql::evaluate(query_, snapshot_for_evaluation());
  report_.total_duration = duration_cast<microseconds>(Clock::now() - started_);
  return report_;
}

sparql::AlignedView TraversalEngine::snapshot_for_evaluation() const {
  return sparql::AlignedView(store_.snapshot());
}

ExecutionReport execute(const sparql::Query& query, const TraversalConfig& cfg,
                        std::shared_ptr<source::DocumentSource> src, ExecutionObserver* observer) {
  TraversalEngine engine(query, cfg, std::move(src), observer);
  return engine.run();
}

}  // namespace ltqp::traversal
