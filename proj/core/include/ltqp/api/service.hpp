#pragma once

#include <atomic>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltqp/fixture/fixture.hpp"

namespace httplib {
class Server;
}

namespace ltqp::api {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks a free port
  std::size_t payload_limit = 64 * 1024;
};

/// Append-only event log of one execution with blocking readers.
class EventLog {
public:
  void append(nlohmann::json event);
  /// Events from index `from` on; waits up to `wait` for at least one when
  /// none are buffered yet. `closed` reports whether a terminal event exists.
  std::vector<nlohmann::json> read(std::size_t from, std::chrono::milliseconds wait, bool& closed) const;
  std::vector<nlohmann::json> all() const;

private:
  mutable std::mutex mutex_;
  mutable std::condition_variable grew_;
  std::vector<nlohmann::json> events_;
  bool closed_ = false;
};

struct Execution {
  std::string id;
  std::atomic<int> status{0};  // 0 running, 1 done, 2 failed
  EventLog events;
  std::mutex mutex;
  nlohmann::json report;  // set once done
};

std::string_view status_name(int status) noexcept;

/// Hosts fixture networks under /pods/<network>/ and runs executions under
/// /api/. Hosted fixtures are rebased onto the service's own origin.
class Service {
public:
  /// `networks` maps a network name (base, heterogeneous) to its fixture.
  Service(std::map<std::string, fixture::FixtureSet> networks, ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves on a background thread; returns the bound port.
  /// Throws std::runtime_error when binding fails.
  int start();
  /// Binds and serves on the calling thread until stop().
  void run();
  void stop();

  std::string origin() const;
  int port() const noexcept { return port_; }
  /// The fixture as hosted (rebased onto this service).
  const fixture::FixtureSet* network(const std::string& name) const;
  std::string network_base(const std::string& name) const;

  /// Starts an execution from a request body; returns the HTTP status and
  /// the response body. Exposed for in-process tests.
  std::pair<int, nlohmann::json> submit(const nlohmann::json& request);
  std::shared_ptr<Execution> execution(const std::string& id) const;

private:
  void bind();
  void routes();

  std::map<std::string, fixture::FixtureSet> original_;
  std::map<std::string, fixture::FixtureSet> hosted_;
  ServiceOptions options_;
  std::unique_ptr<httplib::Server> server_;
  int port_ = -1;
  std::thread listener_;
  std::atomic<bool> stopping_{false};

  mutable std::mutex executions_mutex_;
  std::map<std::string, std::shared_ptr<Execution>> executions_;
  std::vector<std::thread> workers_;
  std::uint64_t next_id_ = 1;
};

}  // namespace ltqp::api
