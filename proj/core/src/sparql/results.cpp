#include "ltqp/sparql/results.hpp"

#include <algorithm>
#include <stdexcept>

#include "ltqp/rdf/vocab.hpp"

namespace ltqp::sparql {

namespace {

nlohmann::json term_json(const rdf::Term& t) {
  nlohmann::json j;
  switch (t.kind()) {
    case rdf::TermKind::Iri:
      j["type"] = "uri";
      j["value"] = t.value();
      break;
    case rdf::TermKind::BlankNode:
      j["type"] = "bnode";
      j["value"] = t.value();
      break;
    case rdf::TermKind::Literal:
      j["type"] = "literal";
      j["value"] = t.value();
      if (!t.language().empty()) {
        j["xml:lang"] = t.language();
      } else if (t.datatype() != vocab::kXsdString) {
        j["datatype"] = t.datatype();
      }
      break;
  }
  return j;
}

rdf::Term term_from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  auto value = j.at("value").get<std::string>();
  if (type == "uri") return rdf::Term::iri(std::move(value));
  if (type == "bnode") return rdf::Term::blank(std::move(value));
  if (type == "literal" || type == "typed-literal") {
    if (j.contains("xml:lang")) {
      return rdf::Term::lang_literal(std::move(value), j["xml:lang"].get<std::string>());
    }
    return rdf::Term::literal(std::move(value), j.value("datatype", std::string{}));
  }
  throw std::invalid_argument("unknown term type '" + type + "'");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_value(const rdf::Term& t) {
  if (t.is_blank()) return "_:" + t.value();
  return t.value();
}

}  // namespace

nlohmann::json to_sparql_json(const ResultTable& table) {
  nlohmann::json bindings = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json b = nlohmann::json::object();
    for (const auto& v : table.variables) {
      if (const auto it = row.find(v); it != row.end()) b[v] = term_json(it->second);
    }
    bindings.push_back(std::move(b));
  }
  return {{"head", {{"vars", table.variables}}}, {"results", {{"bindings", std::move(bindings)}}}};
}

ResultTable from_sparql_json(const nlohmann::json& json) {
  ResultTable table;
  table.variables = json.at("head").at("vars").get<std::vector<std::string>>();
  for (const auto& b : json.at("results").at("bindings")) {
    BindingRow row;
    for (const auto& [var, term] : b.items()) row.emplace(var, term_from_json(term));
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string to_csv(const ResultTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.variables.size(); ++i) {
    if (i) out += ',';
    out += csv_field(table.variables[i]);
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < table.variables.size(); ++i) {
      if (i) out += ',';
      if (const auto it = row.find(table.variables[i]); it != row.end()) {
        out += csv_field(csv_value(it->second));
      }
    }
    out += "\r\n";
  }
  return out;
}

std::string to_text_table(const ResultTable& table) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> widths;
  for (const auto& v : table.variables) widths.push_back(v.size() + 1);
  for (const auto& row : table.rows) {
    auto& line = cells.emplace_back();
    for (std::size_t i = 0; i < table.variables.size(); ++i) {
      const auto it = row.find(table.variables[i]);
      line.push_back(it == row.end() ? std::string{} : rdf::to_display(it->second));
      widths[i] = std::max(widths[i], line.back().size());
    }
  }
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(s.size(), w), ' ');
    return s;
  };
  std::string out;
  for (std::size_t i = 0; i < table.variables.size(); ++i) {
    out += (i ? " | " : "") + pad("?" + table.variables[i], widths[i]);
  }
  out += '\n';
  for (std::size_t i = 0; i < table.variables.size(); ++i) {
    out += (i ? "-+-" : "") + std::string(widths[i], '-');
  }
  out += '\n';
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) out += (i ? " | " : "") + pad(line[i], widths[i]);
    out += '\n';
  }
  out += "(" + std::to_string(table.rows.size()) + " rows)\n";
  return out;
}

}  // namespace ltqp::sparql
