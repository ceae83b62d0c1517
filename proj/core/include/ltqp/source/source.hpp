#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>

#include "ltqp/rdf/turtle.hpp"

namespace ltqp::source {

enum class FetchErrorKind : std::uint8_t { NotFound, Timeout, Parse, RedirectLoop, Io };

std::string_view to_string(FetchErrorKind kind) noexcept;

struct ParseErrorInfo {
  std::size_t line = 0;
  std::size_t column = 0;
  std::string message;
};

struct FetchError {
  std::string iri;
  FetchErrorKind kind = FetchErrorKind::Io;
  std::string detail;
  std::optional<ParseErrorInfo> parse;  // set iff kind == Parse
};

using FetchOutcome = std::variant<rdf::Document, FetchError>;

inline bool succeeded(const FetchOutcome& o) noexcept {
  return std::holds_alternative<rdf::Document>(o);
}

/// Turtle parse of `body` wrapped as a fetch outcome.
FetchOutcome parse_document(std::string_view iri, std::string_view body);

/// Fetches RDF documents by IRI. The fragment is stripped before lookup, and
/// the fragmentless IRI (after redirects) is the document identity.
class DocumentSource {
public:
  virtual ~DocumentSource() = default;
  virtual FetchOutcome fetch(std::string_view iri) = 0;
};

/// Serves Turtle text held in memory.
class InMemorySource final : public DocumentSource {
public:
  InMemorySource() = default;
  explicit InMemorySource(std::map<std::string, std::string> documents)
      : documents_(std::move(documents)) {}

  void put(std::string iri, std::string turtle) { documents_[std::move(iri)] = std::move(turtle); }
  FetchOutcome fetch(std::string_view iri) override;

private:
  std::map<std::string, std::string> documents_;
};

/// Percent-encodes every byte outside [A-Za-z0-9-._~].
std::string percent_encode(std::string_view text);

/// Folder layout described by a JSON manifest mapping IRI prefixes to
/// folders relative to the manifest. A document lives at
/// <folder>/<percent-encoded IRI suffix>.ttl; the longest matching prefix wins.
class DirectorySource final : public DocumentSource {
public:
  /// Throws std::runtime_error when the manifest cannot be read.
  explicit DirectorySource(const std::filesystem::path& manifest);

  FetchOutcome fetch(std::string_view iri) override;

  /// Path a document IRI maps to, if any prefix matches.
  std::optional<std::filesystem::path> path_for(std::string_view iri) const;

private:
  std::filesystem::path root_;
  std::map<std::string, std::filesystem::path> prefixes_;
};

struct HttpOptions {
  std::chrono::milliseconds timeout{10'000};
  int max_redirects = 5;
};

/// GET with Accept: text/turtle. Requests to the same host are serialized.
class HttpSource final : public DocumentSource {
public:
  explicit HttpSource(HttpOptions options = {}) : options_(options) {}

  FetchOutcome fetch(std::string_view iri) override;
  std::size_t requests() const noexcept { return requests_.load(); }

private:
  std::mutex& host_lock(const std::string& origin);

  HttpOptions options_;
  std::mutex hosts_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> host_locks_;
  std::atomic<std::size_t> requests_{0};
};

/// Memoizes outcomes (errors included) per fragmentless IRI. The first
/// completed fetch for an IRI wins.
class CachingSource final : public DocumentSource {
public:
  explicit CachingSource(std::shared_ptr<DocumentSource> inner) : inner_(std::move(inner)) {}

  FetchOutcome fetch(std::string_view iri) override;
  std::size_t backend_calls() const noexcept { return backend_calls_.load(); }

private:
  std::shared_ptr<DocumentSource> inner_;
  std::shared_mutex mutex_;
  std::unordered_map<std::string, FetchOutcome> cache_;
  std::atomic<std::size_t> backend_calls_{0};
};

inline std::shared_ptr<DocumentSource> with_cache(std::shared_ptr<DocumentSource> src) {
  return std::make_shared<CachingSource>(std::move(src));
}

}  // namespace ltqp::source
