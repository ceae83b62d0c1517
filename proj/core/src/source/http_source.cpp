#include <set>

#include <httplib.h>

#include "ltqp/rdf/iri.hpp"
#include "ltqp/source/source.hpp"

namespace ltqp::source {

std::mutex& HttpSource::host_lock(const std::string& origin) {
  std::lock_guard guard(hosts_mutex_);
  auto& slot = host_locks_[origin];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

FetchOutcome HttpSource::fetch(std::string_view iri) {
  const std::string requested = rdf::strip_fragment(iri);
  std::string current = requested;
  std::set<std::string> visited;

  for (int hop = 0;; ++hop) {
    const std::string origin = rdf::iri_origin(current);
    if (origin.empty() || !(current.starts_with("http://") || current.starts_with("https://"))) {
      return FetchError{requested, FetchErrorKind::Io, "not an http(s) IRI: " + current, {}};
    }
    std::string target = current.substr(origin.size());
    if (target.empty()) target = "/";

    httplib::Result res{nullptr, httplib::Error::Unknown};
    {
      std::lock_guard per_host(host_lock(origin));
      httplib::Client client(origin);
      const auto seconds = options_.timeout.count() / 1000;
      const auto micros = (options_.timeout.count() % 1000) * 1000;
      client.set_connection_timeout(seconds, micros);
      client.set_read_timeout(seconds, micros);
      client.set_write_timeout(seconds, micros);
      client.set_follow_location(false);
      ++requests_;
      res = client.Get(target, httplib::Headers{{"Accept", "text/turtle"}});
    }

    if (!res) {
      const auto err = res.error();
      const bool timed_out = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
      return FetchError{requested, timed_out ? FetchErrorKind::Timeout : FetchErrorKind::Io,
                        httplib::to_string(err), {}};
    }
    const int status = res->status;
    if (status == 301 || status == 302 || status == 303 || status == 307 || status == 308) {
      if (!res->has_header("Location")) {
        return FetchError{requested, FetchErrorKind::Io, "redirect without Location", {}};
      }
      visited.insert(current);
      const std::string next =
          rdf::strip_fragment(rdf::resolve_iri(current, res->get_header_value("Location")));
      if (hop + 1 > options_.max_redirects || visited.contains(next)) {
        return FetchError{requested, FetchErrorKind::RedirectLoop,
                          "gave up after " + std::to_string(hop + 1) + " redirects", {}};
      }
      current = next;
      continue;
    }
    if (status == 404 || status == 410) {
      return FetchError{requested, FetchErrorKind::NotFound, "HTTP " + std::to_string(status), {}};
    }
    if (status < 200 || status >= 300) {
      return FetchError{requested, FetchErrorKind::Io, "HTTP " + std::to_string(status), {}};
    }
    return parse_document(current, res->body);
  }
}

}  // namespace ltqp::source
