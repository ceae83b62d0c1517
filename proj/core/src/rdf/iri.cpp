#include "ltqp/rdf/iri.hpp"

#include <cctype>
#include <optional>

namespace ltqp::rdf {

namespace {

struct IriParts {
  std::optional<std::string_view> scheme;
  std::optional<std::string_view> authority;
  std::string_view path;
  std::optional<std::string_view> query;
  std::optional<std::string_view> fragment;
};

std::size_t scheme_length(std::string_view s) noexcept {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) {
    return 0;
  }
  for (std::size_t i = 1; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c == ':') {
      return i;
    }
    if (!std::isalnum(c) && c != '+' && c != '-' && c != '.') {
      return 0;
    }
  }
  return 0;
}

IriParts split(std::string_view s) {
  IriParts parts;
  if (const auto n = scheme_length(s); n > 0) {
    parts.scheme = s.substr(0, n);
    s.remove_prefix(n + 1);
  }
  if (const auto hash = s.find('#'); hash != std::string_view::npos) {
    parts.fragment = s.substr(hash + 1);
    s = s.substr(0, hash);
  }
  if (const auto q = s.find('?'); q != std::string_view::npos) {
    parts.query = s.substr(q + 1);
    s = s.substr(0, q);
  }
  if (s.starts_with("//")) {
    s.remove_prefix(2);
    const auto slash = s.find('/');
    parts.authority = s.substr(0, slash);
    s = slash == std::string_view::npos ? std::string_view{} : s.substr(slash);
  }
  parts.path = s;
  return parts;
}

std::string remove_dot_segments(std::string_view input) {
  std::string in(input);
  std::string out;
  while (!in.empty()) {
    if (in.starts_with("../")) {
      in.erase(0, 3);
    } else if (in.starts_with("./")) {
      in.erase(0, 2);
    } else if (in.starts_with("/./")) {
      in.replace(0, 3, "/");
    } else if (in == "/.") {
      in = "/";
    } else if (in.starts_with("/../") || in == "/..") {
      in = in.size() == 3 ? std::string("/") : "/" + in.substr(4);
      const auto last = out.rfind('/');
      out.erase(last == std::string::npos ? 0 : last);
    } else if (in == "." || in == "..") {
      in.clear();
    } else {
      const auto start = in[0] == '/' ? 1 : 0;
      const auto next = in.find('/', start);
      out += in.substr(0, next);
      in.erase(0, next == std::string::npos ? in.size() : next);
    }
  }
  return out;
}

std::string merge_paths(const IriParts& base, std::string_view ref_path) {
  if (base.authority && base.path.empty()) {
    return "/" + std::string(ref_path);
  }
  const auto slash = base.path.rfind('/');
  if (slash == std::string_view::npos) {
    return std::string(ref_path);
  }
  return std::string(base.path.substr(0, slash + 1)) + std::string(ref_path);
}

std::string recompose(std::string_view scheme, const std::optional<std::string>& authority,
                      const std::string& path, const std::optional<std::string_view>& query,
                      const std::optional<std::string_view>& fragment) {
  std::string out(scheme);
  out += ':';
  if (authority) {
    out += "//";
    out += *authority;
  }
  out += path;
  if (query) {
    out += '?';
    out += *query;
  }
  if (fragment) {
    out += '#';
    out += *fragment;
  }
  return out;
}

}  // namespace

bool is_absolute_iri(std::string_view iri) noexcept { return scheme_length(iri) > 0; }

std::string resolve_iri(std::string_view base, std::string_view reference) {
  const IriParts ref = split(reference);
  if (ref.scheme) {
    return recompose(*ref.scheme,
                     ref.authority ? std::optional<std::string>(std::string(*ref.authority))
                                   : std::nullopt,
                     remove_dot_segments(ref.path), ref.query, ref.fragment);
  }
  const IriParts b = split(base);
  const std::string_view scheme = b.scheme.value_or("");
  std::optional<std::string> authority;
  std::string path;
  std::optional<std::string_view> query;
  if (ref.authority) {
    authority = std::string(*ref.authority);
    path = remove_dot_segments(ref.path);
    query = ref.query;
  } else {
    if (b.authority) {
      authority = std::string(*b.authority);
    }
    if (ref.path.empty()) {
      path = std::string(b.path);
      query = ref.query ? ref.query : b.query;
    } else {
      path = ref.path.starts_with('/') ? remove_dot_segments(ref.path)
                                       : remove_dot_segments(merge_paths(b, ref.path));
      query = ref.query;
    }
  }
  return recompose(scheme, authority, path, query, ref.fragment);
}

std::string strip_fragment(std::string_view iri) {
  return std::string(iri.substr(0, iri.find('#')));
}

std::string iri_origin(std::string_view iri) {
  const IriParts p = split(iri);
  if (!p.scheme || !p.authority) {
    return {};
  }
  return std::string(*p.scheme) + "://" + std::string(*p.authority);
}

}  // namespace ltqp::rdf
