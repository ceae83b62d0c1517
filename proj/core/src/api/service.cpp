#include "ltqp/api/service.hpp"

#include <stdexcept>

#include <httplib.h>

#include "ltqp/sparql/results.hpp"

namespace ltqp::api {

using nlohmann::json;

void EventLog::append(json event) {
  {
    std::lock_guard lock(mutex_);
    const std::string kind = event.value("kind", "");
    events_.push_back(std::move(event));
    if (kind == "done" || kind == "error") closed_ = true;
  }
  grew_.notify_all();
}

std::vector<json> EventLog::read(std::size_t from, std::chrono::milliseconds wait, bool& closed) const {
  std::unique_lock lock(mutex_);
  grew_.wait_for(lock, wait, [&] { return events_.size() > from || closed_; });
  closed = closed_;
  if (from >= events_.size()) return {};
  return {events_.begin() + static_cast<std::ptrdiff_t>(from), events_.end()};
}

std::vector<json> EventLog::all() const {
  std::lock_guard lock(mutex_);
  return events_;
}

std::string_view status_name(int status) noexcept {
  switch (status) {
    case 1: return "done";
    case 2: return "failed";
    default: return "running";
  }
}

namespace {

json event(std::string_view kind, json payload) {
  return {{"kind", kind}, {"payload", std::move(payload)}};
}

std::int64_t millis(std::chrono::microseconds d) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(d).count();
}

class StreamingObserver final : public traversal::ExecutionObserver {
public:
  explicit StreamingObserver(EventLog& log) : log_(log) {}

  void document_fetched(const traversal::FetchedDocument& d) override {
    log_.append(event("documentFetched", {{"iri", d.iri},
                                          {"tripleCount", d.triple_count},
                                          {"durationMs", millis(d.duration)},
                                          {"ruleSet", d.rule_set},
                                          {"ok", d.ok}}));
  }
  void rule_set_discovered(const traversal::DiscoveredRuleSet& s) override {
    json rules = json::array();
    for (const auto& r : s.accepted_rules) rules.push_back(align::to_json(r));
    log_.append(event("ruleSetDiscovered", {{"location", s.location},
                                            {"subweb", s.subweb},
                                            {"subwebPrefixes", s.prefixes},
                                            {"acceptedRuleCount", s.accepted_rule_count},
                                            {"accepted", s.accepted},
                                            {"rules", std::move(rules)}}));
  }
  void rule_rejected(const traversal::RejectedEntry& r) override {
    log_.append(event("ruleRejected", {{"rule", r.subject}, {"reason", r.reason}, {"detail", r.detail}}));
  }
  void realigned(const std::string& subweb, std::size_t changed) override {
    log_.append(event("realigned", {{"subweb", subweb}, {"changed", changed}}));
  }

private:
  EventLog& log_;
};

json error_body(std::string message) { return {{"error", std::move(message)}}; }

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

Service::Service(std::map<std::string, fixture::FixtureSet> networks, ServiceOptions options)
    : original_(std::move(networks)), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {}

Service::~Service() { stop(); }

std::string Service::origin() const {
  return "http://" + options_.host + ":" + std::to_string(port_);
}

std::string Service::network_base(const std::string& name) const {
  return origin() + "/pods/" + name + "/";
}

const fixture::FixtureSet* Service::network(const std::string& name) const {
  const auto it = hosted_.find(name);
  return it == hosted_.end() ? nullptr : &it->second;
}

void Service::bind() {
  if (options_.port == 0) {
    port_ = server_->bind_to_any_port(options_.host);
  } else {
    port_ = server_->bind_to_port(options_.host, options_.port) ? options_.port : -1;
  }
  if (port_ < 0) {
    throw std::runtime_error("cannot bind " + options_.host + ":" + std::to_string(options_.port));
  }
  for (const auto& [name, fx] : original_) hosted_[name] = fixture::rebase(fx, network_base(name));
  routes();
}

int Service::start() {
  bind();
  listener_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void Service::run() {
  bind();
  server_->listen_after_bind();
}

void Service::stop() {
  stopping_ = true;
  if (server_) server_->stop();
  if (listener_.joinable()) listener_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(executions_mutex_);
    workers.swap(workers_);
  }
  for (auto& w : workers) {
    if (w.joinable()) w.join();
  }
}

std::shared_ptr<Execution> Service::execution(const std::string& id) const {
  std::lock_guard lock(executions_mutex_);
  const auto it = executions_.find(id);
  return it == executions_.end() ? nullptr : it->second;
}

std::pair<int, json> Service::submit(const json& request) {
  if (!request.is_object()) return {400, error_body("request body must be a JSON object")};

  const std::string network_name = request.value("network", "heterogeneous");
  const fixture::FixtureSet* fx = network(network_name);
  if (fx == nullptr) return {409, error_body("network '" + network_name + "' is not hosted")};

  std::string text;
  std::vector<std::string> seeds;
  if (request.contains("queryName") && request["queryName"].is_string()) {
    const auto* q = fx->query(request["queryName"].get<std::string>());
    if (q == nullptr) return {400, error_body("unknown queryName '" + request["queryName"].get<std::string>() + "'")};
    text = q->text;
    seeds = q->seeds;
  } else if (request.contains("queryText") && request["queryText"].is_string()) {
    text = request["queryText"].get<std::string>();
    seeds = {fx->pod_prefix(0) + "card"};
  } else {
    return {400, error_body("one of queryText or queryName is required")};
  }
  if (request.contains("seeds")) {
    if (!request["seeds"].is_array()) return {400, error_body("seeds must be an array of IRIs")};
    seeds.clear();
    for (const auto& s : request["seeds"]) {
      if (!s.is_string()) return {400, error_body("seeds must be an array of IRIs")};
      seeds.push_back(s.get<std::string>());
    }
  }

  sparql::Query query;
  try {
    query = sparql::parse_query(text);
  } catch (const sparql::QueryParseError& e) {
    return {400, {{"error", e.what()}, {"position", e.position()}, {"message", e.message()}}};
  }

  traversal::TraversalConfig cfg = fixture::traversal_config(*fx, fixture::NamedQuery{"", text, seeds});
  try {
    cfg.alignment_enabled = request.value("alignment", true);
    cfg.deterministic = request.value("deterministic", true);
    const auto policy = traversal::parse_policy(request.value("policy", std::string("follow-all")));
    if (!policy) return {400, error_body("policy must be follow-all or match-driven")};
    cfg.policy = *policy;
    if (request.contains("timeoutMs")) cfg.timeout = std::chrono::milliseconds(request["timeoutMs"].get<std::int64_t>());
    if (request.contains("maxDocuments")) cfg.max_documents = request["maxDocuments"].get<std::size_t>();
    if (request.contains("issuerRules")) cfg.issuer_rules = align::parse_issuer_rules(request["issuerRules"]);
    cfg.validate();
  } catch (const json::exception& e) {
    return {400, error_body(std::string("bad field type: ") + e.what())};
  } catch (const std::invalid_argument& e) {
    return {400, error_body(e.what())};
  }

  auto exec = std::make_shared<Execution>();
  {
    std::lock_guard lock(executions_mutex_);
    if (stopping_) return {503, error_body("service is stopping")};
    exec->id = "x" + std::to_string(next_id_++);
    executions_[exec->id] = exec;
    auto src = std::make_shared<source::InMemorySource>(fx->documents);
    workers_.emplace_back([exec, query, cfg, src] {
      StreamingObserver observer(exec->events);
      try {
        traversal::ExecutionReport report = traversal::execute(query, cfg, src, &observer);
        json report_json = traversal::to_json(report);
        exec->events.append(event("resultTable", report_json["results"]));
        {
          std::lock_guard lock(exec->mutex);
          exec->report = report_json;
        }
        exec->status = 1;
        exec->events.append(event("done", report_json));
      } catch (const std::exception& e) {
        exec->status = 2;
        exec->events.append(event("error", {{"message", e.what()}}));
      }
    });
  }
  return {202, {{"id", exec->id}}};
}

void Service::routes() {
  httplib::Server& svr = *server_;
  svr.set_payload_max_length(options_.payload_limit);

  svr.Get(R"(/pods/([^/]+)/(.*))", [this](const httplib::Request& req, httplib::Response& res) {
    const fixture::FixtureSet* fx = network(req.matches[1]);
    if (fx == nullptr) {
      res.status = 404;
      return;
    }
    const auto it = fx->documents.find(network_base(req.matches[1]) + std::string(req.matches[2]));
    if (it == fx->documents.end()) {
      res.status = 404;
      res.set_content("not found\n", "text/plain");
      return;
    }
    res.set_content(it->second, "text/turtle");
  });

  svr.Post("/api/executions", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception& e) {
      reply(res, 400, error_body(std::string("invalid JSON: ") + e.what()));
      return;
    }
    const auto [status, out] = submit(body);
    reply(res, status, out);
  });

  svr.Get(R"(/api/executions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const auto exec = execution(req.matches[1]);
    if (!exec) {
      reply(res, 404, error_body("unknown execution"));
      return;
    }
    json report;
    {
      std::lock_guard lock(exec->mutex);
      report = exec->report;
    }
    reply(res, 200, {{"id", exec->id}, {"status", status_name(exec->status)}, {"report", report}});
  });

  svr.Get(R"(/api/executions/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
    const auto exec = execution(req.matches[1]);
    if (!exec) {
      reply(res, 404, error_body("unknown execution"));
      return;
    }
    auto cursor = std::make_shared<std::size_t>(0);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream", [this, exec, cursor](std::size_t, httplib::DataSink& sink) {
          while (!stopping_) {
            bool closed = false;
            const auto batch = exec->events.read(*cursor, std::chrono::milliseconds(200), closed);
            for (const auto& e : batch) {
              const std::string frame = "data: " + e.dump() + "\n\n";
              if (!sink.write(frame.data(), frame.size())) return false;
            }
            *cursor += batch.size();
            if (closed && batch.empty()) {
              sink.done();
              return true;
            }
            if (!batch.empty()) return true;
          }
          sink.done();
          return true;
        });
  });

  svr.Get("/api/queries", [this](const httplib::Request& req, httplib::Response& res) {
    std::string name = req.has_param("network") ? req.get_param_value("network") : "heterogeneous";
    const fixture::FixtureSet* fx = network(name);
    if (fx == nullptr && !hosted_.empty()) fx = &hosted_.begin()->second;
    json out = json::array();
    const auto queries = fx ? fx->queries : fixture::canonical_queries();
    for (const auto& q : queries) out.push_back({{"name", q.name}, {"text", q.text}, {"seeds", q.seeds}});
    reply(res, 200, out);
  });

  svr.Get("/api/networks", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& [name, fx] : hosted_) {
      out.push_back({{"name", name},
                     {"base", fx.base},
                     {"configuration", std::string(fixture::to_string(fx.config.configuration))},
                     {"podCount", fx.config.pod_count},
                     {"documentCount", fx.documents.size()},
                     {"ruleSetDocuments", fx.rule_set_documents()}});
    }
    reply(res, 200, out);
  });
}

}  // namespace ltqp::api
