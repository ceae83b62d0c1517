// Acceptance run: one PASS/FAIL line per primary criterion.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "ltqp/api/service.hpp"
#include "ltqp/fixture/fixture.hpp"
#include "ltqp/rdf/turtle.hpp"
#include "ltqp/sparql/query.hpp"
#include "ltqp/sparql/results.hpp"
#include "ltqp/traversal/engine.hpp"
#include "properties.hpp"

using namespace ltqp;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (!pass) detail << "; ";
    else detail.str("");
    pass = false;
    detail << why;
  }
};

int failures = 0;

void report(const std::string& name, const std::function<void(Verdict&)>& check) {
  Verdict v;
  try {
    check(v);
  } catch (const std::exception& e) {
    v.fail(std::string("exception: ") + e.what());
  }
  if (!v.pass) ++failures;
  std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail.str() << std::endl;
}

std::vector<sparql::BindingRow> sorted(std::vector<sparql::BindingRow> rows) {
  std::sort(rows.begin(), rows.end());
  return rows;
}

bool multiset_subset(std::vector<sparql::BindingRow> small, std::vector<sparql::BindingRow> big) {
  std::sort(small.begin(), small.end());
  std::sort(big.begin(), big.end());
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

traversal::ExecutionReport run(const fixture::FixtureSet& fx, const fixture::NamedQuery& q, bool alignment,
                               std::shared_ptr<source::DocumentSource> src = nullptr) {
  auto cfg = fixture::traversal_config(fx, q);
  cfg.alignment_enabled = alignment;
  cfg.deterministic = true;
  if (!src) src = std::make_shared<source::InMemorySource>(fx.documents);
  return traversal::execute(sparql::parse_query(q.text), cfg, source::with_cache(std::move(src)));
}

double ms(std::chrono::microseconds us) { return static_cast<double>(us.count()) / 1000.0; }

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  if (from.empty()) return text;
  for (std::size_t pos = 0; (pos = text.find(from, pos)) != std::string::npos; pos += to.size()) {
    text.replace(pos, from.size(), to);
  }
  return text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::pair<int, std::string> spawn(const std::string& cmd) {
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) return {-1, ""};
  std::string out;
  char buf[4096];
  while (const std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::set<std::tuple<rdf::Term, rdf::Term, rdf::Term>> statements(const rdf::Document& doc) {
  std::set<std::tuple<rdf::Term, rdf::Term, rdf::Term>> out;
  for (const auto& t : doc.triples) out.emplace(t.subject, t.predicate, t.object);
  return out;
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

const char* const kRulesPrologue = "@prefix sm: <https://example.org/semmap#> .\n";

std::string mapping(const std::string& id, const std::string& from, const std::string& to, const std::string& scope) {
  return "<#" + id + "> a sm:Mapping ; sm:subjectId <" + from +
         "> ; sm:mappingRelation <http://www.w3.org/2002/07/owl#equivalentProperty> ; sm:objectId <" + to +
         "> ; sm:scope <" + scope + "> .\n";
}

// ------------------------------------------------------------------ criteria

void completeness(Verdict& v, const fixture::FixtureSet& fx) {
  double slowest = 0;
  for (const auto& q : fx.queries) {
    const auto query = sparql::parse_query(q.text);
    const auto oracle_on = fixture::centralized_oracle(fx, query, true);
    const auto started = Clock::now();
    const auto on = run(fx, q, true);
    const double took = std::chrono::duration<double>(Clock::now() - started).count();
    slowest = std::max(slowest, took);
    if (sorted(on.results.rows) != sorted(oracle_on.rows)) v.fail(q.name + ": alignment-on result differs from oracle");
    if (took >= 10.0) v.fail(q.name + " took " + std::to_string(took) + " s");
    const auto off = run(fx, q, false);
    v.detail << q.name << " on=" << on.results.rows.size() << "/" << oracle_on.rows.size()
             << " off=" << off.results.rows.size() << "; ";
    if (q.name == "User information" || q.name == "Posts of a user") {
      if (off.results.rows.size() >= on.results.rows.size()) v.fail(q.name + ": alignment-off is not strictly smaller");
      if (!multiset_subset(off.results.rows, on.results.rows)) v.fail(q.name + ": alignment-off is not a subset");
    }
  }
  if (v.pass) v.detail << "slowest " << slowest << " s";
}

void base_invariance(Verdict& v, const fixture::FixtureSet& base) {
  std::size_t rule_sets = 0;
  for (const auto& q : base.queries) {
    const auto on = run(base, q, true);
    const auto off = run(base, q, false);
    rule_sets += on.rule_sets_discovered.size();
    if (on.results != off.results) v.fail(q.name + ": on and off differ");
    v.detail << q.name << " rows=" << on.results.rows.size() << "; ";
  }
  if (rule_sets != 0) v.fail(std::to_string(rule_sets) + " rule sets discovered on the base network");
  if (v.pass) v.detail << "0 rule sets discovered";
}

void overhead(Verdict& v, const fixture::FixtureSet& base) {
  constexpr int kRuns = 10;
  for (const auto& q : base.queries) {
    run(base, q, true);  // warm-up
    std::vector<double> on_ms;
    std::vector<double> off_ms;
    for (int i = 0; i < kRuns; ++i) {
      on_ms.push_back(ms(run(base, q, true).total_duration));
      off_ms.push_back(ms(run(base, q, false).total_duration));
    }
    std::sort(on_ms.begin(), on_ms.end());
    std::sort(off_ms.begin(), off_ms.end());
    const double on = (on_ms[kRuns / 2 - 1] + on_ms[kRuns / 2]) / 2;
    const double off = (off_ms[kRuns / 2 - 1] + off_ms[kRuns / 2]) / 2;
    char line[200];
    std::snprintf(line, sizeof line, "%s on=%.2fms off=%.2fms delta=%+.2fms; ", q.name.c_str(), on, off, on - off);
    v.detail << line;
    if (on > 2.0 * off) v.fail(q.name + ": median on exceeds 2x median off");
  }
}

void rejection_policy(Verdict& v) {
  const std::string a = "http://x.ex/a/";
  // Two rule sets announced by one card; the second's subweb nests inside the first.
  std::map<std::string, std::string> overlap{
      {a + "card", "<#me> <http://old.ex/name> \"A\" ; <http://ex.org/link> <b/data> .\n"
                   "<> <https://example.org/semmap#ruleSetLocation> <rules1>, <rules2> .\n"},
      {a + "b/data", "<#x> <http://old.ex/name> \"B\" ; <http://alt.ex/title> \"T\" .\n"},
      {a + "rules1", std::string(kRulesPrologue) + "<#sw> a sm:Subweb ; sm:iriPrefix \"" + a + "\" .\n" +
                         mapping("m", "http://old.ex/name", "http://schema.org/name", a + "rules1#sw")},
      {a + "rules2", std::string(kRulesPrologue) + "<#sw> a sm:Subweb ; sm:iriPrefix \"" + a + "b/\" .\n" +
                         mapping("m", "http://alt.ex/title", "http://schema.org/name", a + "rules2#sw")},
  };
  traversal::TraversalConfig cfg;
  cfg.seeds = {a + "card"};
  const auto query = sparql::parse_query("SELECT ?n WHERE { ?s <http://schema.org/name> ?n }");
  const auto r1 = traversal::execute(query, cfg, std::make_shared<source::InMemorySource>(overlap));
  if (r1.rule_sets_discovered.size() != 2) {
    v.fail("expected 2 discovered rule sets, got " + std::to_string(r1.rule_sets_discovered.size()));
  } else {
    if (!r1.rule_sets_discovered[0].accepted || r1.rule_sets_discovered[0].location != a + "rules1") {
      v.fail("first rule set not accepted");
    }
    if (r1.rule_sets_discovered[1].accepted) v.fail("overlapping rule set accepted");
  }
  if (r1.rules_rejected.size() != 1 || r1.rules_rejected[0].reason != "overlap") v.fail("no overlap rejection recorded");
  std::vector<std::string> names;
  for (const auto& row : r1.results.rows) names.push_back(row.at("n").value());
  if (names != std::vector<std::string>{"A", "B"}) v.fail("results used rules beyond the first set");
  v.detail << "overlap: first accepted, second rejected{overlap}, names=" << names.size() << "; ";

  std::map<std::string, std::string> cyclic{
      {a + "card", "<#me> <http://p.ex/a> \"v\" .\n<> <https://example.org/semmap#ruleSetLocation> <rules> .\n"},
      {a + "rules", std::string(kRulesPrologue) + "<#sw> a sm:Subweb ; sm:iriPrefix \"" + a + "\" .\n" +
                        mapping("m1", "http://p.ex/a", "http://p.ex/b", a + "rules#sw") +
                        mapping("m2", "http://p.ex/b", "http://p.ex/a", a + "rules#sw")},
  };
  cfg.timeout = std::chrono::milliseconds(5000);
  const auto started = Clock::now();
  const auto r2 = traversal::execute(sparql::parse_query("SELECT ?o WHERE { ?s <http://p.ex/b> ?o }"), cfg,
                                     std::make_shared<source::InMemorySource>(cyclic));
  const double took = std::chrono::duration<double>(Clock::now() - started).count();
  if (r2.rules_rejected.size() != 1 || r2.rules_rejected[0].reason != "cycle") v.fail("cycle rule not rejected alone");
  if (r2.rule_sets_discovered.size() != 1 || r2.rule_sets_discovered[0].accepted_rule_count != 1) {
    v.fail("expected exactly one accepted rule in the cyclic set");
  }
  if (r2.termination == traversal::TerminationCause::Timeout) v.fail("cyclic execution timed out");
  if (took >= 5.0) v.fail("cyclic execution took " + std::to_string(took) + " s");
  if (r2.results.rows.size() != 1) v.fail("cyclic execution lost the rewritten row");
  v.detail << "cycle: 1 of 2 rules accepted, terminated " << traversal::to_string(r2.termination) << " in " << took
           << " s";
}

void scoping(Verdict& v) {
  constexpr int kCases = 200;
  for (std::uint64_t seed = 1; seed <= kCases; ++seed) {
    if (const auto failure = testing::scoping_case(seed)) {
      v.fail(*failure);
      return;
    }
  }
  v.detail << kCases << " randomized registries";
}

void evaluator(Verdict& v) {
  constexpr int kCases = 200;
  for (std::uint64_t seed = 1; seed <= kCases; ++seed) {
    if (const auto failure = testing::evaluator_case(seed)) {
      v.fail(*failure);
      return;
    }
  }
  v.detail << kCases << " randomized instances";
}

void round_trip(Verdict& v, const std::vector<const fixture::FixtureSet*>& fixtures) {
  std::size_t docs = 0;
  for (const auto* fx : fixtures) {
    for (const auto& [iri, text] : fx->documents) {
      const auto first = rdf::parse_turtle(text, iri);
      const auto again = rdf::parse_turtle(rdf::serialize_ntriples(first.triples), iri);
      if (statements(first) != statements(again)) {
        v.fail(iri + " changed under parse/serialize/parse");
      }
      ++docs;
    }
  }
  v.detail << docs << " documents";
}

void cli_determinism(Verdict& v, const fs::path& fixture_dir, const std::vector<fixture::NamedQuery>& queries) {
  const fs::path scratch = fixture_dir.parent_path();
  for (const auto& q : queries) {
    std::string outs[2];
    std::string reports[2];
    for (int i = 0; i < 2; ++i) {
      const fs::path report = scratch / ("report" + std::to_string(i) + ".json");
      const auto [code, out] = spawn(quote(LTQP_CLI_PATH) + " query --fixture " + quote(fixture_dir.string()) +
                                     " --query-name " + quote(q.name) + " --deterministic --report " +
                                     quote(report.string()));
      if (code != 0) v.fail(q.name + ": exit code " + std::to_string(code));
      outs[i] = out;
      reports[i] = traversal::without_timings(nlohmann::json::parse(slurp(report))).dump();
    }
    if (outs[0] != outs[1]) v.fail(q.name + ": stdout differs");
    if (reports[0] != reports[1]) v.fail(q.name + ": reports differ after zeroing timings");
    if (outs[0].empty()) v.fail(q.name + ": empty stdout");
  }
  if (v.pass) v.detail << queries.size() << " queries x 2 runs byte-identical";
}

void backend_equivalence(Verdict& v, const fixture::FixtureSet& fx, const fs::path& fixture_dir) {
  api::Service service({{"heterogeneous", fx}});
  service.start();
  const fixture::FixtureSet& hosted = *service.network("heterogeneous");
  const std::string hosted_base = hosted.base;

  auto fetched_set = [](const traversal::ExecutionReport& r, const std::string& from, const std::string& to) {
    std::set<std::string> out;
    for (const auto& d : r.documents_fetched) out.insert(replace_all(d.iri, from, to));
    return out;
  };
  for (std::size_t i = 0; i < fx.queries.size(); ++i) {
    const auto& q = fx.queries[i];
    const auto memory = run(fx, q, true);
    const auto directory = run(fx, q, true, std::make_shared<source::DirectorySource>(fixture_dir / "manifest.json"));
    const auto http = run(hosted, hosted.queries[i], true, std::make_shared<source::HttpSource>());

    const std::string memory_rows = sparql::to_sparql_json(memory.results).dump();
    if (sparql::to_sparql_json(directory.results).dump() != memory_rows) v.fail(q.name + ": directory results differ");
    if (replace_all(sparql::to_sparql_json(http.results).dump(), hosted_base, fx.base) != memory_rows) {
      v.fail(q.name + ": http results differ");
    }
    const auto iris = fetched_set(memory, "", "");
    if (fetched_set(directory, "", "") != iris) v.fail(q.name + ": directory fetched a different IRI set");
    if (fetched_set(http, hosted_base, fx.base) != iris) v.fail(q.name + ": http fetched a different IRI set");
    v.detail << q.name << " rows=" << memory.results.rows.size() << " docs=" << iris.size() << "; ";
  }
  service.stop();
}

}  // namespace

int main() {
  const fixture::FixtureSet heterogeneous = fixture::generate(fixture::heterogeneous_config(7));
  const fixture::FixtureSet base = fixture::generate(fixture::base_config(7));

  const fs::path scratch = fs::temp_directory_path() / ("ltqp_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(scratch);
  fs::create_directories(scratch);
  const fs::path fixture_dir = scratch / "heterogeneous";
  fixture::export_directory(heterogeneous, fixture_dir);

  report("completeness recovery", [&](Verdict& v) { completeness(v, heterogeneous); });
  report("base-network invariance", [&](Verdict& v) { base_invariance(v, base); });
  report("overhead bound", [&](Verdict& v) { overhead(v, base); });
  report("rejection policy", [&](Verdict& v) { rejection_policy(v); });
  report("scoping", [&](Verdict& v) { scoping(v); });
  report("evaluator oracle", [&](Verdict& v) { evaluator(v); });
  report("parser round trip", [&](Verdict& v) { round_trip(v, {&base, &heterogeneous}); });
  report("cli determinism", [&](Verdict& v) { cli_determinism(v, fixture_dir, heterogeneous.queries); });
  report("backend equivalence", [&](Verdict& v) { backend_equivalence(v, heterogeneous, fixture_dir); });

  fs::remove_all(scratch);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
