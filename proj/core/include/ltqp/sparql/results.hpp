#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "ltqp/sparql/evaluator.hpp"

namespace ltqp::sparql {

/// SPARQL 1.1 JSON results shape: {"head":{"vars":[...]},"results":{"bindings":[...]}}.
nlohmann::json to_sparql_json(const ResultTable& table);
ResultTable from_sparql_json(const nlohmann::json& json);

/// SPARQL CSV results: header row of variable names, CRLF line endings.
std::string to_csv(const ResultTable& table);

/// Fixed-width text table for terminals.
std::string to_text_table(const ResultTable& table);

}  // namespace ltqp::sparql
