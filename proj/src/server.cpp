#include "ontolink/server.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include <httplib.h>

#include "ontolink/errors.hpp"

namespace ontolink {

namespace {

using nlohmann::json;

// Carries an HTTP status and machine-readable code out of a handler.
struct HttpError {
  int status;
  std::string code;
  std::string message;
  json details = nullptr;
};

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const HttpError& e) {
  json body = {{"code", e.code}, {"message", e.message}};
  if (!e.details.is_null()) body["details"] = e.details;
  send(res, e.status, {{"error", std::move(body)}});
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const HttpError& e) {
      send_error(res, e);
    } catch (const SessionBusy& e) {
      send_error(res, {503, "busy", e.what()});
    } catch (const json::exception& e) {
      send_error(res, {400, "bad_request", e.what()});
    } catch (const std::exception& e) {
      send_error(res, {500, "internal", e.what()});
    }
  };
}

std::size_t size_param(const httplib::Request& req, const std::string& key, std::size_t fallback,
                       std::size_t max = 1000000) {
  if (!req.has_param(key)) return fallback;
  const std::string text = req.get_param_value(key);
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value > max) {
    throw HttpError{400, "bad_request", "parameter " + key + " must be an integer in [0, " + std::to_string(max) + "]"};
  }
  return value;
}

std::string required_param(const httplib::Request& req, const std::string& key) {
  if (!req.has_param(key) || req.get_param_value(key).empty()) {
    throw HttpError{400, "bad_request", "missing parameter " + key};
  }
  return req.get_param_value(key);
}

NodeId node_or_404(const Session& s, const std::string& iri) {
  if (auto id = s.nodes().find(iri)) return *id;
  throw HttpError{404, "unknown_node", "unknown node: " + iri, {{"node", iri}}};
}

json candidate_json(const Session& s, const ScoredCandidate& c) {
  return {{"u", s.nodes().name(c.u)}, {"v", s.nodes().name(c.v)}, {"score", c.score}, {"kind", to_string(c.kind)}};
}

std::vector<NodePair> edge_list(const Session& s, const json& body, const char* key, json& unknown) {
  std::vector<NodePair> out;
  if (!body.contains(key)) return out;
  const json& list = body.at(key);
  if (!list.is_array()) throw HttpError{400, "bad_request", std::string(key) + " must be an array of {u, v}"};
  for (const auto& item : list) {
    if (!item.is_object() || !item.contains("u") || !item.contains("v") || !item["u"].is_string() ||
        !item["v"].is_string()) {
      throw HttpError{400, "bad_request", std::string(key) + " entries must be {\"u\": iri, \"v\": iri}"};
    }
    const auto u = s.nodes().find(item["u"].get<std::string>());
    const auto v = s.nodes().find(item["v"].get<std::string>());
    if (!u) unknown.push_back(item["u"]);
    if (!v) unknown.push_back(item["v"]);
    if (u && v) out.push_back({*u, *v});
  }
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    if (end > start) out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

void routes(httplib::Server& http, Session& s) {
  http.Get("/stats", guarded([&s](const httplib::Request&, httplib::Response& res) {
    const auto st = s.state();
    const auto& e = *st->embedding;
    send(res, 200,
         {{"nodes", st->graph.node_count()},
          {"edges", st->graph.edge_count()},
          {"snapshot_edges", s.snapshot().edge_count()},
          {"revision", st->revision},
          {"stale", st->stale()},
          {"reembedding", s.reembedding()},
          {"reembed_error", s.last_reembed_error() ? json(*s.last_reembed_error()) : json(nullptr)},
          {"journal_entries", s.journal().size()},
          {"embedding",
           {{"nodes", e.node_count()}, {"features", e.feature_count()}, {"nnz", e.nnz()}, {"params", to_json(e.params)}}}});
  }));

  http.Get("/nodes", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    const std::string q = lower(req.get_param_value("q"));
    const std::size_t offset = size_param(req, "offset", 0);
    const std::size_t limit = size_param(req, "limit", 50, 1000);
    const auto st = s.state();
    json nodes = json::array();
    std::size_t total = 0;
    if (!q.empty()) {
      for (NodeId id = 0; id < s.nodes().size(); ++id) {
        const auto& name = s.nodes().name(id);
        if (lower(name).find(q) == std::string::npos) continue;
        if (total >= offset && nodes.size() < limit) nodes.push_back({{"id", name}, {"degree", st->graph.degree(id)}});
        ++total;
      }
    }
    send(res, 200, {{"query", req.get_param_value("q")}, {"total", total}, {"offset", offset}, {"limit", limit},
                    {"nodes", std::move(nodes)}});
  }));

  http.Get("/candidates", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    CandidateKind kind;
    try {
      kind = parse_candidate_kind(req.has_param("kind") ? req.get_param_value("kind") : "missing");
    } catch (const Error& e) {
      throw HttpError{400, "bad_request", e.what()};
    }
    const std::size_t k = size_param(req, "k", 10);
    std::optional<std::vector<NodeId>> subset;
    if (req.has_param("nodes") && !req.get_param_value("nodes").empty()) {
      subset.emplace();
      for (const auto& iri : split_commas(req.get_param_value("nodes"))) subset->push_back(node_or_404(s, iri));
    }
    const auto st = s.state();
    const auto lists = s.candidates(kind, k, subset);
    json items = json::array();
    for (const auto& c : kind == CandidateKind::Missing ? lists.missing : lists.redundant) {
      items.push_back(candidate_json(s, c));
    }
    send(res, 200, {{"kind", to_string(kind)},
                    {"k", k},
                    {"mode", subset ? "subset" : "full"},
                    {"stale", st->stale()},
                    {"revision", st->revision},
                    {"warnings", lists.warnings},
                    {"candidates", std::move(items)}});
  }));

  http.Get("/explain/local", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    const NodeId u = node_or_404(s, required_param(req, "u"));
    const NodeId v = node_or_404(s, required_param(req, "v"));
    const std::size_t bins = size_param(req, "bins", 10, 1000);
    if (bins == 0) throw HttpError{400, "bad_request", "bins must be at least 1"};
    const auto st = s.state();
    const auto& names = st->embedding->feature_names;
    auto e = explain_local(*st->embedding, u, v);
    json body = to_json(e, names);
    body["score"] = snore_score(*st->embedding, u, v);
    body["stale"] = st->stale();
    body["histogram"] = to_json(contribution_histogram(e, static_cast<int>(bins)));
    send(res, 200, body);
  }));

  http.Get("/explain/global", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    const std::size_t top = size_param(req, "top", 10);
    const auto st = s.state();
    std::shared_ptr<const GlobalExplanation> g;
    try {
      g = s.global_explanation();
    } catch (const Error& e) {
      throw HttpError{422, "explanation_unavailable", e.what()};
    }
    json body = to_json(*g, st->embedding->feature_names, top);
    body["top"] = top;
    body["stale"] = st->stale();
    send(res, 200, body);
  }));

  http.Post("/feedback", guarded([&s](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception& e) {
      throw HttpError{400, "bad_request", std::string("malformed JSON: ") + e.what()};
    }
    if (!body.is_object()) throw HttpError{400, "bad_request", "body must be an object with accept/reject arrays"};
    json unknown = json::array();
    const auto accept = edge_list(s, body, "accept", unknown);
    const auto reject = edge_list(s, body, "reject", unknown);
    if (!unknown.empty()) throw HttpError{404, "unknown_node", "unknown node IRI in feedback", {{"nodes", unknown}}};

    const auto outcome = s.feedback(accept, reject);
    json applied = json::array();
    for (const auto& e : outcome.applied) applied.push_back(s.journal_json(e));
    json reply = {{"applied", std::move(applied)}, {"revision", outcome.revision}, {"stale", s.state()->stale()}};
    if (outcome.errors.empty()) {
      send(res, 200, reply);
      return;
    }
    json errors = json::array();
    for (const auto& e : outcome.errors) {
      errors.push_back({{"u", s.nodes().name(e.edge.u)},
                        {"v", s.nodes().name(e.edge.v)},
                        {"action", e.accepted ? "accept" : "reject"},
                        {"reason", e.reason}});
    }
    reply["errors"] = errors;
    send(res, 409, {{"error", {{"code", "feedback_conflict"},
                               {"message", std::to_string(outcome.errors.size()) + " edge(s) violate preconditions"},
                               {"details", std::move(reply)}}}});
  }));

  http.Post("/reembed", guarded([&s](const httplib::Request&, httplib::Response& res) {
    if (!s.start_reembed()) throw SessionBusy();
    send(res, 202, {{"status", "started"}});
  }));

  http.Get("/journal", guarded([&s](const httplib::Request&, httplib::Response& res) {
    json entries = json::array();
    for (const auto& e : s.journal()) entries.push_back(s.journal_json(e));
    send(res, 200, {{"entries", std::move(entries)}});
  }));
}

}  // namespace

Server::Server(Session& session, ServerOptions options)
    : session_(session), options_(std::move(options)), http_(std::make_unique<httplib::Server>()) {
  routes(*http_, session_);
  if (options_.static_dir) {
    if (!http_->set_mount_point("/", options_.static_dir->string())) {
      throw Error("static directory not found: " + options_.static_dir->string());
    }
  }
  http_->set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) send_error(res, {res.status, res.status == 404 ? "not_found" : "http_error", "no such route"});
  });
}

Server::~Server() { stop(); }

int Server::bind() {
  if (options_.port == 0) {
    const int port = http_->bind_to_any_port(options_.host);
    if (port < 0) throw Error("cannot bind " + options_.host);
    return port;
  }
  if (!http_->bind_to_port(options_.host, options_.port)) {
    throw Error("cannot bind " + options_.host + ":" + std::to_string(options_.port));
  }
  return options_.port;
}

void Server::serve() { http_->listen_after_bind(); }

void Server::stop() {
  if (http_) http_->stop();
}

}  // namespace ontolink
