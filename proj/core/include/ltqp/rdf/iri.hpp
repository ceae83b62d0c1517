#pragma once

#include <string>
#include <string_view>

namespace ltqp::rdf {

/// True when `iri` starts with a URI scheme followed by ':'.
bool is_absolute_iri(std::string_view iri) noexcept;

/// RFC 3986 reference resolution of `reference` against the absolute `base`.
std::string resolve_iri(std::string_view base, std::string_view reference);

/// Drops a trailing "#fragment" if present.
std::string strip_fragment(std::string_view iri);

/// Scheme + authority, e.g. "http://pods.ex:8080". Empty when `iri` has none.
std::string iri_origin(std::string_view iri);

}  // namespace ltqp::rdf
