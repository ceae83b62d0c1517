#include "ltqp/source/source.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ltqp/rdf/iri.hpp"

namespace ltqp::source {

std::string_view to_string(FetchErrorKind kind) noexcept {
  switch (kind) {
    case FetchErrorKind::NotFound: return "not-found";
    case FetchErrorKind::Timeout: return "timeout";
    case FetchErrorKind::Parse: return "parse";
    case FetchErrorKind::RedirectLoop: return "redirect-loop";
    case FetchErrorKind::Io: return "io";
  }
  return "io";
}

FetchOutcome parse_document(std::string_view iri, std::string_view body) {
  try {
    return rdf::parse_turtle(body, iri);
  } catch (const rdf::ParseError& e) {
    return FetchError{std::string(iri), FetchErrorKind::Parse, e.what(),
                      ParseErrorInfo{e.line(), e.column(), e.message()}};
  }
}

FetchOutcome InMemorySource::fetch(std::string_view iri) {
  const std::string key = rdf::strip_fragment(iri);
  const auto it = documents_.find(key);
  if (it == documents_.end()) {
    return FetchError{key, FetchErrorKind::NotFound, "no such document", std::nullopt};
  }
  return parse_document(key, it->second);
}

std::string percent_encode(std::string_view text) {
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
      out += static_cast<char>(c);
    } else {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", static_cast<unsigned>(c));
      out += buf;
    }
  }
  return out;
}

DirectorySource::DirectorySource(const std::filesystem::path& manifest)
    : root_(manifest.parent_path()) {
  std::ifstream in(manifest);
  if (!in) throw std::runtime_error("cannot open manifest " + manifest.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("invalid manifest " + manifest.string() + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("manifest must map IRI prefixes to folders");
  for (const auto& [prefix, folder] : j.items()) {
    prefixes_[prefix] = folder.get<std::string>();
  }
}

std::optional<std::filesystem::path> DirectorySource::path_for(std::string_view iri) const {
  const std::string key = rdf::strip_fragment(iri);
  const std::pair<const std::string, std::filesystem::path>* best = nullptr;
  for (const auto& entry : prefixes_) {
    if (key.starts_with(entry.first) && (!best || entry.first.size() > best->first.size())) {
      best = &entry;
    }
  }
  if (!best) return std::nullopt;
  return root_ / best->second / (percent_encode(key.substr(best->first.size())) + ".ttl");
}

FetchOutcome DirectorySource::fetch(std::string_view iri) {
  const std::string key = rdf::strip_fragment(iri);
  const auto path = path_for(key);
  if (!path) return FetchError{key, FetchErrorKind::NotFound, "no manifest prefix matches", {}};
  std::ifstream in(*path, std::ios::binary);
  if (!in) return FetchError{key, FetchErrorKind::NotFound, "missing file " + path->string(), {}};
  std::ostringstream body;
  body << in.rdbuf();
  if (in.bad()) return FetchError{key, FetchErrorKind::Io, "read failed: " + path->string(), {}};
  return parse_document(key, body.str());
}

FetchOutcome CachingSource::fetch(std::string_view iri) {
  const std::string key = rdf::strip_fragment(iri);
  {
    std::shared_lock lock(mutex_);
    if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  ++backend_calls_;
  FetchOutcome outcome = inner_->fetch(key);
  std::unique_lock lock(mutex_);
  const auto [it, inserted] = cache_.emplace(key, std::move(outcome));
  return it->second;
}

}  // namespace ltqp::source
