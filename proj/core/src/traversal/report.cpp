#include "ltqp/sparql/results.hpp"
#include "ltqp/traversal/engine.hpp"

namespace ltqp::traversal {

namespace {

std::int64_t millis(std::chrono::microseconds d) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(d).count();
}

}  // namespace

nlohmann::json to_json(const ExecutionReport& report) {
  using nlohmann::json;
  json docs = json::array();
  for (const auto& d : report.documents_fetched) {
    docs.push_back({{"iri", d.iri},
                    {"tripleCount", d.triple_count},
                    {"durationMs", millis(d.duration)},
                    {"ruleSet", d.rule_set},
                    {"ok", d.ok}});
  }
  json sets = json::array();
  for (const auto& s : report.rule_sets_discovered) {
    json rules = json::array();
    for (const auto& r : s.accepted_rules) rules.push_back(align::to_json(r));
    sets.push_back({{"location", s.location},
                    {"subweb", s.subweb},
                    {"subwebPrefixes", s.prefixes},
                    {"acceptedRuleCount", s.accepted_rule_count},
                    {"accepted", s.accepted},
                    {"rules", std::move(rules)}});
  }
  json rejected = json::array();
  for (const auto& r : report.rules_rejected) {
    rejected.push_back({{"rule", r.subject}, {"reason", r.reason}, {"detail", r.detail}});
  }
  json errors = json::array();
  for (const auto& e : report.errors) {
    errors.push_back({{"iri", e.iri}, {"kind", e.kind}, {"detail", e.detail}});
  }
  return {{"results", sparql::to_sparql_json(report.results)},
          {"documentsFetched", std::move(docs)},
          {"ruleSetsDiscovered", std::move(sets)},
          {"rulesRejected", std::move(rejected)},
          {"errors", std::move(errors)},
          {"realignedTriples", report.realigned_triples},
          {"totalDurationMs", millis(report.total_duration)},
          {"terminationCause", std::string(to_string(report.termination))},
          {"alignmentEnabled", report.alignment_enabled},
          {"deterministic", report.deterministic},
          {"policy", std::string(to_string(report.policy))}};
}

nlohmann::json without_timings(nlohmann::json report) {
  if (report.is_object()) {
    for (auto& [key, value] : report.items()) {
      if (key == "durationMs" || key == "totalDurationMs") {
        value = 0;
      } else {
        value = without_timings(std::move(value));
      }
    }
  } else if (report.is_array()) {
    for (auto& value : report) value = without_timings(std::move(value));
  }
  return report;
}

}  // namespace ltqp::traversal
