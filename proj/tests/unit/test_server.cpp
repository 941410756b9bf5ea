#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "ontolink/errors.hpp"
#include "ontolink/server.hpp"
#include "ontolink/session.hpp"
#include "schema_check.hpp"
#include "synthetic.hpp"

// After Eigen: resolv.h, pulled in by httplib, defines a `_res` macro.
#include <httplib.h>

using namespace ontolink;
using nlohmann::json;

namespace {

struct Fixture {
  CollapsedGraph graph;
  SparseEmbedding embedding;
};

Fixture fixture(std::size_t block_size = 30) {
  Fixture f{testing_support::named(testing_support::block_model(2, block_size, 0.3, 0.03, 8)), {}};
  SnoreParams p;
  p.walks_per_node = 256;
  f.embedding = snore_fit(f.graph.graph, p, f.graph.nodes.names());
  return f;
}

std::unique_ptr<Session> make_session(SessionConfig config = {}, std::size_t block_size = 30) {
  auto f = fixture(block_size);
  config.threads = 2;
  return std::make_unique<Session>(f.graph.graph, f.graph.nodes, std::move(f.embedding), config);
}

std::filesystem::path temp_file(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("ontolink_session_" + name);
  std::filesystem::remove(p);
  return p;
}

CandidateLists recompute(const Session& s, std::size_t k) {
  CandidateOptions o;
  o.k = k;
  o.only = CandidateKind::Missing;
  const auto st = s.state();
  return candidates(*st->embedding, st->graph, o);
}

// A running server on a free port.
struct Live {
  std::unique_ptr<Session> session;
  std::unique_ptr<Server> server;
  std::thread thread;
  int port = 0;

  explicit Live(SessionConfig config = {}) : session(make_session(config)) {
    server = std::make_unique<Server>(*session, ServerOptions{"127.0.0.1", 0, std::nullopt});
    port = server->bind();
    thread = std::thread([this] { server->serve(); });
  }
  ~Live() {
    server->stop();
    thread.join();
    session->wait_for_reembed();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(30, 0);
    return c;
  }
};

json body(const httplib::Result& r) {
  REQUIRE(r);
  return json::parse(r->body);
}

const testing_support::SchemaCheck& schema() {
  static const testing_support::SchemaCheck s(ONTOLINK_API_SCHEMA);
  return s;
}

void conforms(const json& doc, const std::string& def) {
  const auto errors = schema().errors(doc, def);
  for (const auto& e : errors) FAIL_CHECK(e);
}

std::string iri(NodeId id) { return "http://example.org/n" + std::to_string(id); }

}  // namespace

TEST_SUITE("session") {
  TEST_CASE("fresh session is clean") {
    const auto s = make_session();
    const auto st = s->state();
    CHECK(st->revision == 0);
    CHECK_FALSE(st->stale());
    CHECK(st->graph == s->snapshot());
    CHECK(s->journal().empty());
  }

  TEST_CASE("cached candidates equal a full recompute after feedback") {
    SessionConfig c;
    c.cache_floor = 50;
    const auto s = make_session(c);
    const auto top = s->candidates(CandidateKind::Missing, 10, std::nullopt).missing;
    CHECK(top == recompute(*s, 10).missing);

    const auto edges = s->state()->graph.edges();
    std::vector<NodePair> accept{{top[0].u, top[0].v}, {top[3].u, top[3].v}};
    std::vector<NodePair> reject{edges[0], edges[5]};
    const auto out = s->feedback(accept, reject);
    CHECK(out.errors.empty());
    CHECK(out.revision == 1);
    CHECK(s->state()->stale());
    for (std::size_t k : {1u, 10u, 40u}) CHECK(s->candidates(CandidateKind::Missing, k, std::nullopt).missing ==
                                              recompute(*s, k).missing);
    // Beyond the cache the session falls back to a full ranking.
    CHECK(s->candidates(CandidateKind::Missing, 200, std::nullopt).missing == recompute(*s, 200).missing);
    const auto again = s->candidates(CandidateKind::Missing, 10, std::nullopt).missing;
    for (const auto& c2 : again) CHECK_FALSE((c2.u == top[0].u && c2.v == top[0].v));
  }

  TEST_CASE("undoing feedback clears staleness") {
    const auto s = make_session();
    const auto e = s->state()->graph.edges()[2];
    std::vector<NodePair> one{e};
    s->feedback({}, one);
    CHECK(s->state()->stale());
    s->feedback(one, {});
    CHECK_FALSE(s->state()->stale());
    CHECK(s->state()->revision == 2);
    CHECK(s->journal().size() == 2);
  }

  TEST_CASE("rejected batch entries do not bump the revision") {
    const auto s = make_session();
    const auto e = s->state()->graph.edges()[0];
    std::vector<NodePair> bad{e};
    const auto out = s->feedback(bad, {});
    CHECK(out.applied.empty());
    CHECK(out.errors.size() == 1);
    CHECK(out.revision == 0);
  }

  TEST_CASE("journal replays on restart") {
    const auto path = temp_file("journal.ndjson");
    SessionConfig c;
    c.journal_path = path;
    SimpleGraph after;
    {
      const auto s = make_session(c);
      const auto top = s->candidates(CandidateKind::Missing, 1, std::nullopt).missing;
      std::vector<NodePair> accept{{top[0].u, top[0].v}};
      std::vector<NodePair> reject{s->state()->graph.edges()[1]};
      s->feedback(accept, reject);
      after = s->state()->graph;
    }
    std::ifstream in(path);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
      const auto j = json::parse(line);
      CHECK(j.contains("timestamp"));
      ++lines;
    }
    CHECK(lines == 2);
    const auto restored = make_session(c);
    CHECK(restored->state()->graph == after);
    CHECK(restored->state()->stale());
    CHECK(restored->journal().size() == 2);
  }

  TEST_CASE("a journal that does not replay is an error") {
    const auto path = temp_file("bad.ndjson");
    {
      std::ofstream out(path);
      out << R"({"timestamp":"t","action":"reject","u":"http://example.org/n0","v":"http://example.org/n0"})" << '\n';
    }
    SessionConfig c;
    c.journal_path = path;
    CHECK_THROWS_AS(make_session(c), Error);
  }

  TEST_CASE("reembedding refits on the working graph") {
    const auto s = make_session();
    std::vector<NodePair> reject{s->state()->graph.edges()[0]};
    s->feedback({}, reject);
    REQUIRE(s->start_reembed());
    s->wait_for_reembed();
    const auto st = s->state();
    CHECK_FALSE(s->reembedding());
    CHECK_FALSE(st->stale());
    CHECK(*st->embedded_graph == st->graph);
    CHECK(st->revision == 2);
    CHECK_FALSE(s->last_reembed_error().has_value());
    CHECK(s->candidates(CandidateKind::Missing, 10, std::nullopt).missing == recompute(*s, 10).missing);
  }

  TEST_CASE("feedback during a reembed is refused") {
    SessionConfig c;
    const auto s = make_session(c, 300);
    REQUIRE(s->start_reembed());
    CHECK_FALSE(s->start_reembed());
    std::vector<NodePair> reject{s->state()->graph.edges()[0]};
    CHECK_THROWS_AS(s->feedback({}, reject), SessionBusy);
    s->wait_for_reembed();
    CHECK(s->feedback({}, reject).applied.size() == 1);
  }

  TEST_CASE("global explanation is cached per embedding") {
    SessionConfig c;
    c.global.fit.ridge = 1e-2;
    const auto s = make_session(c);
    const auto a = s->global_explanation();
    CHECK(a == s->global_explanation());
    CHECK_FALSE(a->features.empty());
  }
}

TEST_SUITE("server") {
  TEST_CASE("stats") {
    Live live;
    auto c = live.client();
    const auto r = c.Get("/stats");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(r->get_header_value("Content-Type") == "application/json");
    const auto j = body(r);
    conforms(j, "Stats");
    CHECK(j["nodes"] == 60);
    CHECK(j["stale"] == false);
  }

  TEST_CASE("node search") {
    Live live;
    auto c = live.client();
    auto j = body(c.Get("/nodes?q=N1&limit=5"));
    conforms(j, "NodeSearch");
    // n1, n10..n19: 11 matches, case-insensitive.
    CHECK(j["total"] == 11);
    CHECK(j["nodes"].size() == 5);
    j = body(c.Get("/nodes?q=n1&offset=10&limit=5"));
    CHECK(j["nodes"].size() == 1);
    j = body(c.Get("/nodes?q="));
    CHECK(j["total"] == 0);
    const auto bad = c.Get("/nodes?q=n&limit=x");
    CHECK(bad->status == 400);
    conforms(body(bad), "Error");
  }

  TEST_CASE("candidates in full and subset mode") {
    Live live;
    auto c = live.client();
    auto j = body(c.Get("/candidates?kind=missing&k=5"));
    conforms(j, "Candidates");
    CHECK(j["candidates"].size() == 5);
    CHECK(j["mode"] == "full");
    j = body(c.Get("/candidates?kind=redundant&k=3&nodes=" + iri(4) + "," + iri(40)));
    conforms(j, "Candidates");
    CHECK(j["mode"] == "subset");
    for (const auto& cand : j["candidates"]) {
      const bool touches = cand["u"] == iri(4) || cand["v"] == iri(4) || cand["u"] == iri(40) || cand["v"] == iri(40);
      CHECK(touches);
    }
    j = body(c.Get("/candidates"));
    CHECK(j["k"] == 10);
    CHECK(j["kind"] == "missing");
  }

  TEST_CASE("candidate errors") {
    Live live;
    auto c = live.client();
    auto r = c.Get("/candidates?kind=sideways");
    CHECK(r->status == 400);
    conforms(body(r), "Error");
    r = c.Get("/candidates?nodes=http://nowhere");
    CHECK(r->status == 404);
    const auto j = body(r);
    conforms(j, "Error");
    CHECK(j["error"]["code"] == "unknown_node");
    r = c.Get("/candidates?k=-1");
    CHECK(r->status == 400);
  }

  TEST_CASE("local explanation sums to the score") {
    Live live;
    auto c = live.client();
    const auto j = body(c.Get("/explain/local?u=" + iri(1) + "&v=" + iri(2) + "&bins=4"));
    conforms(j, "LocalExplanation");
    double sum = 0;
    for (const auto& part : j["contributions"]) sum += part["value"].get<double>();
    CHECK(sum == doctest::Approx(j["score"].get<double>()).epsilon(1e-9));
    CHECK(j["total"] == j["score"]);
    CHECK(j["histogram"]["counts"].size() == 4);
    CHECK(c.Get("/explain/local?u=" + iri(1))->status == 400);
    CHECK(c.Get("/explain/local?u=" + iri(1) + "&v=x")->status == 404);
    CHECK(c.Get("/explain/local?u=" + iri(1) + "&v=" + iri(2) + "&bins=0")->status == 400);
  }

  TEST_CASE("global explanation") {
    SessionConfig config;
    config.global.fit.ridge = 1e-2;
    Live live(config);
    auto c = live.client();
    const auto j = body(c.Get("/explain/global?top=4"));
    conforms(j, "GlobalExplanation");
    CHECK(j["features"].size() <= 4);
    for (std::size_t i = 1; i < j["features"].size(); ++i) {
      CHECK(j["features"][i - 1]["abs_t"].get<double>() >= j["features"][i]["abs_t"].get<double>());
    }
  }

  TEST_CASE("global explanation failure is reported") {
    SessionConfig config;
    config.global.fit.ridge = 0.0;
    config.global.fit.max_iterations = 1;
    Live live(config);
    auto c = live.client();
    const auto r = c.Get("/explain/global");
    CHECK(r->status == 422);
    conforms(body(r), "Error");
  }

  TEST_CASE("accepting the top candidate removes it and marks the view stale") {
    Live live;
    auto c = live.client();
    const auto first = body(c.Get("/candidates?k=3"))["candidates"][0];
    json request = {{"accept", {{{"u", first["u"]}, {"v", first["v"]}}}}};
    const auto r = c.Post("/feedback", request.dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == 200);
    const auto reply = body(r);
    conforms(reply, "FeedbackReply");
    CHECK(reply["stale"] == true);
    CHECK(reply["revision"] == 1);
    const auto next = body(c.Get("/candidates?k=3"));
    CHECK(next["stale"] == true);
    for (const auto& cand : next["candidates"]) CHECK_FALSE((cand["u"] == first["u"] && cand["v"] == first["v"]));
    const auto journal = body(c.Get("/journal"));
    conforms(journal, "Journal");
    CHECK(journal["entries"].size() == 1);
    CHECK(journal["entries"][0]["action"] == "accept");
  }

  TEST_CASE("conflicting feedback reports each pair") {
    Live live;
    auto c = live.client();
    const auto st = live.session->state();
    const auto e = st->graph.edges()[0];
    json request = {{"accept", {{{"u", iri(e.u)}, {"v", iri(e.v)}}}},
                    {"reject", {{{"u", iri(e.u)}, {"v", iri(e.v)}}, {{"u", iri(0)}, {"v", iri(0)}}}}};
    const auto r = c.Post("/feedback", request.dump(), "application/json");
    CHECK(r->status == 409);
    const auto j = body(r);
    conforms(j, "Error");
    conforms(j["error"]["details"], "FeedbackConflictDetails");
    CHECK(j["error"]["details"]["errors"].size() == 2);
    CHECK(j["error"]["details"]["applied"].size() == 1);
  }

  TEST_CASE("malformed feedback") {
    Live live;
    auto c = live.client();
    CHECK(c.Post("/feedback", "{not json", "application/json")->status == 400);
    CHECK(c.Post("/feedback", "[1,2]", "application/json")->status == 400);
    CHECK(c.Post("/feedback", R"({"accept": {"u": "a"}})", "application/json")->status == 400);
    CHECK(c.Post("/feedback", R"({"accept": [{"u": 1, "v": 2}]})", "application/json")->status == 400);
    const auto r = c.Post("/feedback", R"({"accept": [{"u": "x:y", "v": "http://example.org/n1"}]})", "application/json");
    CHECK(r->status == 404);
    const auto j = body(r);
    conforms(j, "Error");
    CHECK(j["error"]["details"]["nodes"][0] == "x:y");
  }

  TEST_CASE("reembed clears staleness") {
    Live live;
    auto c = live.client();
    const auto e = live.session->state()->graph.edges()[0];
    json request = {{"reject", {{{"u", iri(e.u)}, {"v", iri(e.v)}}}}};
    c.Post("/feedback", request.dump(), "application/json");
    CHECK(body(c.Get("/stats"))["stale"] == true);
    const auto r = c.Post("/reembed", "", "application/json");
    CHECK(r->status == 202);
    conforms(body(r), "ReembedStarted");
    live.session->wait_for_reembed();
    const auto stats = body(c.Get("/stats"));
    CHECK(stats["stale"] == false);
    CHECK(stats["reembedding"] == false);
    CHECK(stats["revision"] == 2);
  }

  TEST_CASE("unknown route") {
    Live live;
    auto c = live.client();
    const auto r = c.Get("/nope");
    CHECK(r->status == 404);
    const auto j = body(r);
    conforms(j, "Error");
    CHECK(j["error"]["code"] == "not_found");
  }

  TEST_CASE("the schema lists every route") {
    for (const char* route : {"GET /stats", "GET /nodes", "GET /candidates", "GET /explain/local", "GET /explain/global",
                              "POST /feedback", "POST /reembed", "GET /journal"}) {
      CHECK(schema().root()["endpoints"].contains(route));
    }
  }

  TEST_CASE("static files are served next to the API") {
    const auto dir = std::filesystem::temp_directory_path() / "ontolink_static";
    std::filesystem::create_directories(dir);
    {
      std::ofstream(dir / "index.html") << "<html></html>";
    }
    auto session = make_session();
    Server server(*session, {"127.0.0.1", 0, dir});
    const int port = server.bind();
    std::thread t([&] { server.serve(); });
    httplib::Client c("127.0.0.1", port);
    const auto r = c.Get("/index.html");
    CHECK(r->status == 200);
    CHECK(r->body == "<html></html>");
    CHECK(c.Get("/stats")->status == 200);
    server.stop();
    t.join();
    CHECK_THROWS_AS(Server(*session, {"127.0.0.1", 0, dir / "missing"}), Error);
  }
}
