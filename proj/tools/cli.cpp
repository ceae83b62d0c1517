#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "ltqp/api/service.hpp"
#include "ltqp/fixture/fixture.hpp"
#include "ltqp/rdf/iri.hpp"
#include "ltqp/sparql/results.hpp"

namespace ltqp::cli {

namespace {

namespace fs = std::filesystem;

struct GenerateArgs {
  std::size_t pods = 8;
  std::string config = "heterogeneous";
  std::uint64_t seed = 7;
  std::size_t posts = 20;
  std::size_t likes = 10;
  std::size_t tags = 12;
  std::optional<double> variant_fraction;
  std::string out;
  std::string bundle;
};

struct QueryArgs {
  std::string fixture;
  std::vector<std::string> seeds;
  std::string query_file;
  std::string query_name;
  std::string alignment = "on";
  std::string policy = "follow-all";
  std::size_t max_docs = 1000;
  std::int64_t timeout_ms = 180'000;
  bool deterministic = false;
  std::size_t workers = 4;
  std::string format = "json";
  std::string report;
  std::string issuer_rules;
  std::int64_t http_timeout_ms = 10'000;
};

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string base_fixture;
  std::string heterogeneous_fixture;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int generate(const GenerateArgs& a, std::ostream& out) {
  fixture::FixtureConfig cfg;
  const auto conf = fixture::parse_configuration(a.config);
  if (!conf) throw UsageError("--config must be base or heterogeneous");
  cfg = *conf == fixture::Configuration::Base ? fixture::base_config(a.seed) : fixture::heterogeneous_config(a.seed);
  cfg.pod_count = a.pods;
  cfg.posts_per_pod = a.posts;
  cfg.likes_per_pod = a.likes;
  cfg.tag_vocabulary_size = a.tags;
  if (a.variant_fraction) cfg.variant_fraction = *a.variant_fraction;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const fixture::FixtureSet fx = fixture::generate(cfg);
  if (!a.out.empty()) {
    fixture::export_directory(fx, a.out);
    out << "wrote " << fx.documents.size() << " documents to " << a.out << "\n";
  }
  if (!a.bundle.empty()) {
    std::ofstream b(a.bundle, std::ios::binary);
    if (!b) throw std::runtime_error("cannot write " + a.bundle);
    b << fixture::to_bundle(fx).dump(2) << "\n";
    out << "wrote bundle " << a.bundle << "\n";
  }
  return kOk;
}

int query(const QueryArgs& a, std::ostream& out, std::ostream& err) {
  if (a.query_file.empty() == a.query_name.empty()) {
    throw UsageError("exactly one of --query-file or --query-name is required");
  }
  if (a.fixture.empty() && a.seeds.empty() && !a.query_file.empty()) {
    throw UsageError("--query-file needs --fixture or at least one --seed");
  }
  if (a.alignment != "on" && a.alignment != "off") throw UsageError("--alignment must be on or off");
  const auto policy = traversal::parse_policy(a.policy);
  if (!policy) throw UsageError("--policy must be follow-all or match-driven");
  if (a.format != "json" && a.format != "csv" && a.format != "table") {
    throw UsageError("--format must be json, csv or table");
  }

  std::optional<fixture::FixtureSet> fx;
  std::shared_ptr<source::DocumentSource> src;
  if (!a.fixture.empty()) {
    try {
      fx = fixture::load(a.fixture);
    } catch (const std::exception& e) {
      throw UsageError(std::string("cannot load fixture: ") + e.what());
    }
    if (fs::is_directory(a.fixture)) {
      src = std::make_shared<source::DirectorySource>(fs::path(a.fixture) / "manifest.json");
    } else {
      src = std::make_shared<source::InMemorySource>(fx->documents);
    }
  } else {
    source::HttpOptions http;
    http.timeout = std::chrono::milliseconds(a.http_timeout_ms);
    src = std::make_shared<source::HttpSource>(http);
  }
  src = source::with_cache(src);

  fixture::NamedQuery q;
  if (!a.query_name.empty()) {
    const std::vector<fixture::NamedQuery> known = fx ? fx->queries : fixture::canonical_queries();
    const auto it = std::find_if(known.begin(), known.end(), [&](const auto& k) { return k.name == a.query_name; });
    if (it == known.end()) throw UsageError("unknown query name '" + a.query_name + "'");
    q = *it;
  } else {
    q.name = a.query_file;
    q.text = read_file(a.query_file);
    if (fx) q.seeds = {fx->pod_prefix(0) + "card"};
  }
  if (!a.seeds.empty()) q.seeds = a.seeds;

  sparql::Query parsed;
  try {
    parsed = sparql::parse_query(q.text);
  } catch (const sparql::QueryParseError& e) {
    throw UsageError(std::string("query: ") + e.what());
  }

  traversal::TraversalConfig cfg = fx ? fixture::traversal_config(*fx, q) : traversal::TraversalConfig{};
  cfg.seeds = q.seeds;
  cfg.policy = *policy;
  cfg.alignment_enabled = a.alignment == "on";
  cfg.max_documents = a.max_docs;
  cfg.timeout = std::chrono::milliseconds(a.timeout_ms);
  cfg.deterministic = a.deterministic;
  cfg.workers = a.deterministic ? 1 : a.workers;
  if (!a.issuer_rules.empty()) {
    try {
      cfg.issuer_rules = align::parse_issuer_rules(nlohmann::json::parse(read_file(a.issuer_rules)));
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("--issuer-rules: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--issuer-rules: ") + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const traversal::ExecutionReport report = traversal::execute(parsed, cfg, src);

  if (!a.report.empty()) {
    std::ofstream r(a.report, std::ios::binary);
    if (!r) throw std::runtime_error("cannot write report " + a.report);
    r << traversal::to_json(report).dump(2) << "\n";
  }

  std::set<std::string> seeds;
  for (const auto& s : cfg.seeds) seeds.insert(rdf::strip_fragment(s));
  const bool seed_reached = std::any_of(report.documents_fetched.begin(), report.documents_fetched.end(),
                                        [&](const auto& d) { return d.ok && seeds.contains(d.iri); });
  if (!seed_reached) {
    for (const auto& e : report.errors) err << "error: " << e.iri << ": " << e.kind << ": " << e.detail << "\n";
    err << "error: no seed document could be fetched\n";
    return kFatal;
  }

  if (a.format == "json") {
    out << sparql::to_sparql_json(report.results).dump(2) << "\n";
  } else if (a.format == "csv") {
    out << sparql::to_csv(report.results);
  } else {
    out << sparql::to_text_table(report.results);
  }
  if (report.termination == traversal::TerminationCause::Timeout) {
    err << "warning: timed out after " << a.timeout_ms << " ms; results are partial\n";
    return kTimeout;
  }
  return kOk;
}

int serve(const ServeArgs& a, std::ostream& err) {
  std::map<std::string, fixture::FixtureSet> networks;
  networks["base"] = a.base_fixture.empty() ? fixture::generate(fixture::base_config())
                                            : fixture::load(a.base_fixture);
  networks["heterogeneous"] = a.heterogeneous_fixture.empty()
                                  ? fixture::generate(fixture::heterogeneous_config())
                                  : fixture::load(a.heterogeneous_fixture);
  api::ServiceOptions opts;
  opts.host = a.host;
  opts.port = a.port;
  api::Service service(std::move(networks), opts);
  err << "serving on http://" << a.host << ":" << a.port << "\n";
  service.run();
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Link-traversal SPARQL over decentralized pods with online schema alignment", "ltqp"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a deterministic pod-network fixture");
  g->add_option("--pods", gen.pods, "Number of pods")->check(CLI::PositiveNumber);
  g->add_option("--config", gen.config, "base or heterogeneous")->check(CLI::IsMember({"base", "heterogeneous"}));
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--posts", gen.posts, "Posts per pod")->check(CLI::PositiveNumber);
  g->add_option("--likes", gen.likes, "Likes per pod");
  g->add_option("--tags", gen.tags, "Tag vocabulary size")->check(CLI::PositiveNumber);
  g->add_option("--variant-fraction", gen.variant_fraction, "Share of pods with alternative vocabularies")
      ->check(CLI::Range(0.0, 1.0));
  g->add_option("--out", gen.out, "Fixture directory to write");
  g->add_option("--bundle", gen.bundle, "Also write a single JSON bundle");

  QueryArgs qa;
  auto* q = app.add_subcommand("query", "Run a query by link traversal");
  q->add_option("--fixture", qa.fixture, "Fixture directory or JSON bundle");
  q->add_option("--seed", qa.seeds, "Seed IRI (repeatable)");
  q->add_option("--query-file", qa.query_file, "File with the SPARQL query");
  q->add_option("--query-name", qa.query_name, "Named canonical query");
  q->add_option("--alignment", qa.alignment, "on or off")->check(CLI::IsMember({"on", "off"}));
  q->add_option("--policy", qa.policy, "follow-all or match-driven");
  q->add_option("--max-docs", qa.max_docs, "Document budget")->check(CLI::PositiveNumber);
  q->add_option("--timeout-ms", qa.timeout_ms, "Execution timeout")->check(CLI::PositiveNumber);
  q->add_flag("--deterministic", qa.deterministic, "Single worker, lexicographic frontier");
  q->add_option("--workers", qa.workers, "Fetch workers")->check(CLI::PositiveNumber);
  q->add_option("--format", qa.format, "json, csv or table");
  q->add_option("--report", qa.report, "Write the JSON execution report here");
  q->add_option("--issuer-rules", qa.issuer_rules, "JSON file with issuer alignment rules");
  q->add_option("--http-timeout-ms", qa.http_timeout_ms, "Per-request timeout for live HTTP")
      ->check(CLI::PositiveNumber);

  ServeArgs sa;
  auto* s = app.add_subcommand("serve", "Host fixtures and the execution API");
  s->add_option("--host", sa.host, "Bind address");
  s->add_option("--port", sa.port, "Port")->check(CLI::Range(1, 65535));
  s->add_option("--base-fixture", sa.base_fixture, "Base network fixture (generated when absent)");
  s->add_option("--heterogeneous-fixture", sa.heterogeneous_fixture,
                "Heterogeneous network fixture (generated when absent)");

  std::vector<const char*> argv{"ltqp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (g->parsed()) {
      if (gen.out.empty() && gen.bundle.empty()) throw UsageError("generate needs --out or --bundle");
      return generate(gen, out);
    }
    if (q->parsed()) return query(qa, out, err);
    return serve(sa, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFatal;
  }
}

}  // namespace ltqp::cli
