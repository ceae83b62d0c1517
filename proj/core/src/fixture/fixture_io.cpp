#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ltqp/align/rules.hpp"
#include "ltqp/fixture/fixture.hpp"
#include "ltqp/rdf/turtle.hpp"
#include "ltqp/rdf/vocab.hpp"
#include "ltqp/sparql/results.hpp"

namespace ltqp::fixture {

namespace {

using nlohmann::json;

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
  if (from.empty()) return text;
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

rdf::Term rebase_term(const rdf::Term& t, std::string_view from, std::string_view to) {
  switch (t.kind()) {
    case rdf::TermKind::Iri: return rdf::Term::iri(replace_all(t.value(), from, to));
    case rdf::TermKind::BlankNode: return t;
    case rdf::TermKind::Literal:
      if (!t.language().empty()) return rdf::Term::lang_literal(replace_all(t.value(), from, to), t.language());
      return rdf::Term::literal(replace_all(t.value(), from, to), t.datatype());
  }
  return t;
}

sparql::ResultTable rebase_table(const sparql::ResultTable& table, std::string_view from, std::string_view to) {
  sparql::ResultTable out{table.variables, {}};
  for (const auto& row : table.rows) {
    sparql::BindingRow r;
    for (const auto& [var, term] : row) r.emplace(var, rebase_term(term, from, to));
    out.rows.push_back(std::move(r));
  }
  sparql::sort_canonically(out);
  return out;
}

/// Rewrites every triple to its fixpoint under all rules, ignoring scopes.
/// Deliberately separate from align_triple: one global rule map per
/// category, applied one step per pass until a pass changes nothing.
void rewrite_globally(std::vector<rdf::SourcedTriple>& triples, const std::vector<align::AlignmentRule>& rules) {
  std::map<std::string, std::string> maps[3];
  for (const auto& r : rules) maps[static_cast<std::size_t>(r.category())].emplace(r.source, r.target);
  auto step = [&](rdf::Term& term, align::Category c) {
    if (!term.is_iri()) return false;
    const auto& m = maps[static_cast<std::size_t>(c)];
    const auto it = m.find(term.value());
    if (it == m.end()) return false;
    term = rdf::Term::iri(it->second);
    return true;
  };
  for (std::size_t pass = 0; pass <= rules.size(); ++pass) {
    bool changed = false;
    for (auto& t : triples) {
      changed |= step(t.predicate, align::Category::Predicate);
      const bool typing = t.predicate.value() == vocab::kRdfType;
      changed |= step(t.object, typing ? align::Category::Class : align::Category::Entity);
      changed |= step(t.subject, align::Category::Entity);
    }
    if (!changed) return;
  }
}

json config_to_json(const FixtureConfig& c) {
  return {{"podCount", c.pod_count},
          {"postsPerPod", c.posts_per_pod},
          {"likesPerPod", c.likes_per_pod},
          {"tagVocabularySize", c.tag_vocabulary_size},
          {"forumCount", c.forum_count},
          {"variantFraction", c.variant_fraction},
          {"randomSeed", c.random_seed},
          {"configuration", std::string(to_string(c.configuration))}};
}

FixtureConfig config_from_json(const json& j) {
  FixtureConfig c;
  c.pod_count = j.at("podCount").get<std::size_t>();
  c.posts_per_pod = j.at("postsPerPod").get<std::size_t>();
  c.likes_per_pod = j.at("likesPerPod").get<std::size_t>();
  c.tag_vocabulary_size = j.at("tagVocabularySize").get<std::size_t>();
  c.forum_count = j.value("forumCount", c.forum_count);
  c.variant_fraction = j.at("variantFraction").get<double>();
  c.random_seed = j.at("randomSeed").get<std::uint64_t>();
  const auto conf = parse_configuration(j.at("configuration").get<std::string>());
  if (!conf) throw std::runtime_error("unknown fixture configuration");
  c.configuration = *conf;
  return c;
}

json metadata_to_json(const FixtureSet& fx) {
  json queries = json::array();
  for (const auto& q : fx.queries) queries.push_back({{"name", q.name}, {"text", q.text}, {"seeds", q.seeds}});
  json on = json::object();
  json off = json::object();
  for (const auto& [name, table] : fx.oracle_on) on[name] = sparql::to_sparql_json(table);
  for (const auto& [name, table] : fx.oracle_off) off[name] = sparql::to_sparql_json(table);
  return {{"format", "ltqp-fixture"},
          {"version", 1},
          {"base", fx.base},
          {"config", config_to_json(fx.config)},
          {"vocabularyNamespaces", fx.vocabulary_namespaces},
          {"queries", std::move(queries)},
          {"oracle", {{"on", std::move(on)}, {"off", std::move(off)}}}};
}

FixtureSet metadata_from_json(const json& j) {
  if (j.value("format", "") != "ltqp-fixture") throw std::runtime_error("not a fixture description");
  FixtureSet fx;
  fx.base = j.at("base").get<std::string>();
  fx.config = config_from_json(j.at("config"));
  fx.vocabulary_namespaces = j.at("vocabularyNamespaces").get<std::vector<std::string>>();
  for (const auto& q : j.at("queries")) {
    fx.queries.push_back({q.at("name").get<std::string>(), q.at("text").get<std::string>(),
                          q.at("seeds").get<std::vector<std::string>>()});
  }
  for (const auto& [name, table] : j.at("oracle").at("on").items()) {
    fx.oracle_on[name] = sparql::from_sparql_json(table);
  }
  for (const auto& [name, table] : j.at("oracle").at("off").items()) {
    fx.oracle_off[name] = sparql::from_sparql_json(table);
  }
  return fx;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string percent_decode(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '%' && i + 2 < text.size()) {
      out += static_cast<char>(std::stoi(std::string(text.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += text[i];
    }
  }
  return out;
}

}  // namespace

sparql::ResultTable centralized_oracle(const FixtureSet& fx, const sparql::Query& query, bool alignment) {
  std::vector<rdf::SourcedTriple> data;
  std::vector<align::AlignmentRule> rules;
  for (const auto& [iri, text] : fx.documents) {
    rdf::Document doc = rdf::parse_turtle(text, iri);
    if (align::is_rule_set_document(doc)) {
      auto rs = align::parse_rule_set(doc);
      rules.insert(rules.end(), rs.rules.begin(), rs.rules.end());
      continue;
    }
    data.insert(data.end(), doc.triples.begin(), doc.triples.end());
  }
  if (alignment) rewrite_globally(data, rules);
  rdf::TripleStore store;
  for (auto& t : data) {
    t.aligned = true;
    store.insert(std::move(t));
  }
  return sparql::evaluate(query, sparql::AlignedView(store.snapshot()));
}

void recompute_oracles(FixtureSet& fx) {
  fx.oracle_on.clear();
  fx.oracle_off.clear();
  for (const auto& q : fx.queries) {
    const sparql::Query parsed = sparql::parse_query(q.text);
    fx.oracle_on[q.name] = centralized_oracle(fx, parsed, true);
    fx.oracle_off[q.name] = centralized_oracle(fx, parsed, false);
  }
}

FixtureSet rebase(const FixtureSet& fx, std::string_view new_base) {
  FixtureSet out = fx;
  const std::string from = fx.base;
  out.base = std::string(new_base);
  out.documents.clear();
  for (const auto& [iri, text] : fx.documents) {
    out.documents[replace_all(iri, from, new_base)] = replace_all(text, from, new_base);
  }
  for (auto& q : out.queries) {
    q.text = replace_all(q.text, from, new_base);
    for (auto& s : q.seeds) s = replace_all(s, from, new_base);
  }
  for (auto& [name, table] : out.oracle_on) table = rebase_table(table, from, new_base);
  for (auto& [name, table] : out.oracle_off) table = rebase_table(table, from, new_base);
  return out;
}

traversal::TraversalConfig traversal_config(const FixtureSet& fx, const NamedQuery& q) {
  traversal::TraversalConfig cfg;
  cfg.seeds = q.seeds;
  cfg.namespace_skip_list.insert(fx.vocabulary_namespaces.begin(), fx.vocabulary_namespaces.end());
  return cfg;
}

nlohmann::json to_bundle(const FixtureSet& fx) {
  json j = metadata_to_json(fx);
  j["documents"] = fx.documents;
  return j;
}

FixtureSet from_bundle(const nlohmann::json& bundle) {
  FixtureSet fx = metadata_from_json(bundle);
  fx.documents = bundle.at("documents").get<std::map<std::string, std::string>>();
  return fx;
}

void export_directory(const FixtureSet& fx, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::map<std::string, std::string> manifest{{fx.base, "_root"}};
  for (std::size_t i = 0; i < fx.config.pod_count; ++i) manifest[fx.pod_prefix(i)] = "u" + std::to_string(i);

  for (const auto& [iri, text] : fx.documents) {
    const std::pair<const std::string, std::string>* best = nullptr;
    for (const auto& entry : manifest) {
      if (iri.starts_with(entry.first) && (!best || entry.first.size() > best->first.size())) best = &entry;
    }
    if (!best) throw std::runtime_error("document outside the fixture base: " + iri);
    const fs::path folder = dir / best->second;
    fs::create_directories(folder);
    write_text(folder / (source::percent_encode(iri.substr(best->first.size())) + ".ttl"), text);
  }
  write_text(dir / "manifest.json", json(manifest).dump(2) + "\n");
  write_text(dir / "fixture.json", metadata_to_json(fx).dump(2) + "\n");
}

FixtureSet load(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(path)) {
    try {
      return from_bundle(read_json(path));
    } catch (const json::exception& e) {
      throw std::runtime_error("invalid fixture bundle " + path.string() + ": " + e.what());
    }
  }
  FixtureSet fx;
  try {
    fx = metadata_from_json(read_json(path / "fixture.json"));
  } catch (const json::exception& e) {
    throw std::runtime_error("invalid fixture description: " + std::string(e.what()));
  }
  const json manifest = read_json(path / "manifest.json");
  for (const auto& [prefix, folder] : manifest.items()) {
    const fs::path dir = path / folder.get<std::string>();
    if (!fs::is_directory(dir)) continue;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() != ".ttl") continue;
      std::ifstream in(entry.path(), std::ios::binary);
      std::ostringstream body;
      body << in.rdbuf();
      fx.documents[prefix + percent_decode(entry.path().stem().string())] = body.str();
    }
  }
  return fx;
}

}  // namespace ltqp::fixture
