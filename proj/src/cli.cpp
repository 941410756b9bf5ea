#include "ontolink/cli.hpp"

#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ontolink/benchmark.hpp"
#include "ontolink/embedding_io.hpp"
#include "ontolink/errors.hpp"
#include "ontolink/explain.hpp"
#include "ontolink/graph_io.hpp"
#include "ontolink/projection.hpp"
#include "ontolink/recommend.hpp"
#include "ontolink/scorers.hpp"
#include "ontolink/server.hpp"
#include "ontolink/session.hpp"
#include "ontolink/snore.hpp"
#include "ontolink/triples.hpp"

namespace ontolink {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  const char* env = std::getenv("ONTOLINK_SEED");
  if (!env || !*env) return 42;
  char* end = nullptr;
  const auto value = std::strtoull(env, &end, 10);
  if (*end != '\0') throw UsageError(std::string("ONTOLINK_SEED is not an integer: ") + env);
  return value;
}

std::string format_score(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Writes to `path`, or to `out` when the path is empty.
void emit(const std::string& content, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path);
  file << content;
  if (!file) throw Error("failed writing " + path);
}

LoadedGraph load_input(const fs::path& path, ProjectionMode mode, const std::string& node_map) {
  if (path.extension() == ".nt") {
    const auto store = load_ntriples(path);
    auto hetero = project(store, mode);
    auto collapsed = collapse(hetero);
    return {std::move(hetero), std::move(collapsed.graph), std::move(collapsed.nodes)};
  }
  return load_graph_tsv(path, node_map.empty() ? std::nullopt : std::optional<fs::path>(node_map));
}

SparseEmbedding load_or_fit(const std::string& path, const LoadedGraph& g, const SnoreParams& params,
                            std::ostream& err) {
  if (path.empty()) {
    err << "no --embedding given; fitting one\n";
    return snore_fit(g.graph, params, g.nodes.names());
  }
  auto e = read_embedding(fs::path(path));
  if (e.feature_names != g.nodes.names()) throw Error("embedding " + path + " was fitted on a different node set");
  return e;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "u,v" where either IRI may itself contain commas: take the split that names two known nodes.
NodePair parse_edge(const std::string& text, const NodeMap& nodes) {
  for (std::size_t at = text.find(','); at != std::string::npos; at = text.find(',', at + 1)) {
    const auto u = nodes.find(text.substr(0, at));
    const auto v = nodes.find(text.substr(at + 1));
    if (u && v) return {*u, *v};
  }
  throw Error("--edge does not name two known nodes: " + text);
}

struct Common {
  std::uint64_t seed = 42;
  unsigned threads = 0;
  std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c, std::initializer_list<std::string> formats) {
  cmd->add_option("--seed", c.seed, "Random seed (default 42, or ONTOLINK_SEED)");
  cmd->add_option("--threads", c.threads, "Worker threads, 0 = all cores");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember(std::vector<std::string>(formats)));
}

void add_snore_options(CLI::App* cmd, SnoreParams& p) {
  cmd->add_option("--walks", p.walks_per_node, "Walks per node")->check(CLI::PositiveNumber);
  cmd->add_option("--max-len", p.max_len, "Maximum walk length")->check(CLI::PositiveNumber);
  cmd->add_option("--threshold", p.threshold, "Smallest similarity kept")->check(CLI::NonNegativeNumber);
  cmd->add_option("--cap", p.nnz_cap_per_node, "Entries kept per row")->check(CLI::PositiveNumber);
}

std::string candidates_tsv(const std::vector<ScoredCandidate>& missing, const std::vector<ScoredCandidate>& redundant,
                           const NodeMap& nodes) {
  std::ostringstream out;
  out << "kind\tu\tv\tscore\n";
  for (const auto* list : {&missing, &redundant}) {
    for (const auto& c : *list) {
      out << to_string(c.kind) << '\t' << nodes.name(c.u) << '\t' << nodes.name(c.v) << '\t' << format_score(c.score)
          << '\n';
    }
  }
  return out.str();
}

json candidates_json(const std::vector<ScoredCandidate>& missing, const std::vector<ScoredCandidate>& redundant,
                     const NodeMap& nodes) {
  json items = json::array();
  for (const auto* list : {&missing, &redundant}) {
    for (const auto& c : *list) {
      items.push_back({{"kind", to_string(c.kind)}, {"u", nodes.name(c.u)}, {"v", nodes.name(c.v)}, {"score", c.score}});
    }
  }
  return items;
}

Server* running_server = nullptr;

extern "C" void stop_server(int) {
  if (running_server) running_server->stop();
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structure-only link analysis for ontologies", "ontolink"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file mirroring the command-line flags");

  Common common;
  common.seed = default_seed();
  SnoreParams snore;
  std::string mode_text = "rules";

  // convert
  std::string in_path, out_path, node_map, base;
  bool simple = false;
  auto* convert = app.add_subcommand("convert", "Project N-Triples to a graph TSV");
  convert->add_option("--in", in_path, "Input .nt file")->required();
  convert->add_option("--out", out_path, "Output graph TSV (stdout when omitted)");
  convert->add_option("--mode", mode_text, "Projection mode")->check(CLI::IsMember({"rules", "raw"}));
  convert->add_flag("--simple", simple, "Write undirected `u<TAB>v` ids plus a nodes.tsv sidecar");
  convert->add_option("--nodes-out", node_map, "Sidecar path for --simple (default: nodes.tsv next to --out)");
  convert->add_option("--base", base, "Base IRI for relative IRIs");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Triple-store statistics as JSON");
  stats_cmd->add_option("--in", in_path, "Input .nt file")->required();
  stats_cmd->add_option("--out", out_path, "Output file");
  stats_cmd->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"json", "tsv"}));

  // embed
  std::string graph_path, text_out;
  auto* embed = app.add_subcommand("embed", "Fit the sparse symbolic embedding");
  embed->add_option("--graph", graph_path, "Graph TSV or .nt file")->required();
  embed->add_option("--node-map", node_map, "nodes.tsv for two-column graphs");
  embed->add_option("--mode", mode_text, "Projection mode for .nt input")->check(CLI::IsMember({"rules", "raw"}));
  embed->add_option("--out", out_path, "Binary embedding file")->required();
  embed->add_option("--text", text_out, "Also write `node<TAB>feature<TAB>value` rows here");
  add_snore_options(embed, snore);
  embed->add_option("--seed", common.seed, "Random seed (default 42, or ONTOLINK_SEED)");
  embed->add_option("--threads", common.threads, "Worker threads, 0 = all cores");

  // benchmark
  std::string scorer_list = "snore,adamic,jaccard,pref,spectral,transe";
  std::vector<std::string> scorer_params;
  std::size_t folds = 5;
  bool timing = false;
  auto* bench = app.add_subcommand("benchmark", "Five-fold link-prediction benchmark");
  bench->add_option("--graph", graph_path, "Graph TSV or .nt file")->required();
  bench->add_option("--node-map", node_map, "nodes.tsv for two-column graphs");
  bench->add_option("--mode", mode_text, "Projection mode for .nt input")->check(CLI::IsMember({"rules", "raw"}));
  bench->add_option("--scorers", scorer_list, "Comma-separated scorer names");
  bench->add_option("--param", scorer_params, "Scorer parameter as scorer.key=value (repeatable)");
  bench->add_option("--folds", folds, "Number of folds")->check(CLI::Range(2, 100));
  bench->add_option("--out", out_path, "Report file");
  bench->add_flag("--timing", timing, "Include wall-clock timings in the JSON report");
  add_common(bench, common, {"json", "table"});

  // recommend
  std::size_t k = 100;
  std::string embedding_path, subset_path, kind_text = "both";
  auto* recommend = app.add_subcommand("recommend", "Rank missing and redundant edge candidates");
  recommend->add_option("--graph", graph_path, "Graph TSV or .nt file")->required();
  recommend->add_option("--node-map", node_map, "nodes.tsv for two-column graphs");
  recommend->add_option("--mode", mode_text, "Projection mode for .nt input")->check(CLI::IsMember({"rules", "raw"}));
  recommend->add_option("--embedding", embedding_path, "Embedding file (fitted when omitted)");
  recommend->add_option("--k", k, "Candidates per kind");
  recommend->add_option("--nodes", subset_path, "File of node IRIs, one per line: score only their rows");
  recommend->add_option("--kind", kind_text, "Which list")->check(CLI::IsMember({"missing", "redundant", "both"}));
  recommend->add_option("--out", out_path, "Candidate file");
  add_snore_options(recommend, snore);
  add_common(recommend, common, {"tsv", "json"});

  // temporal
  std::string t_path, t1_path, ks_text = "10,100,500", candidates_out;
  auto* temporal = app.add_subcommand("temporal", "Score candidates of version t against version t+1");
  temporal->add_option("--t", t_path, "Version t (.nt or graph TSV)")->required();
  temporal->add_option("--t1", t1_path, "Version t+1 (.nt or graph TSV)")->required();
  temporal->add_option("--ks", ks_text, "Comma-separated k values");
  temporal->add_option("--mode", mode_text, "Projection mode for .nt input")->check(CLI::IsMember({"rules", "raw"}));
  temporal->add_option("--out", out_path, "Report file");
  temporal->add_option("--candidates-out", candidates_out, "Also write the ranked candidates as TSV");
  add_snore_options(temporal, snore);
  temporal->add_option("--seed", common.seed, "Random seed (default 42, or ONTOLINK_SEED)");
  temporal->add_option("--threads", common.threads, "Worker threads, 0 = all cores");

  // explain
  std::string edge_text;
  bool global = false, weighted = false;
  std::size_t top = 10, max_features = 1000;
  int bins = 10;
  double ridge = 1e-6;
  auto* explain = app.add_subcommand("explain", "Local or global explanation of recommendations");
  explain->add_option("--graph", graph_path, "Graph TSV or .nt file")->required();
  explain->add_option("--node-map", node_map, "nodes.tsv for two-column graphs");
  explain->add_option("--mode", mode_text, "Projection mode for .nt input")->check(CLI::IsMember({"rules", "raw"}));
  explain->add_option("--embedding", embedding_path, "Embedding file (fitted when omitted)");
  auto* edge_opt = explain->add_option("--edge", edge_text, "u_iri,v_iri for a local explanation");
  auto* global_opt = explain->add_flag("--global", global, "Global feature importance");
  edge_opt->excludes(global_opt);
  explain->add_option("--top", top, "Features reported by --global");
  explain->add_option("--max-features", max_features, "Columns kept for the global fit");
  explain->add_option("--ridge", ridge, "Ridge added to X^T W X")->check(CLI::NonNegativeNumber);
  explain->add_flag("--weighted", weighted, "Scale local contributions by the global weights");
  explain->add_option("--bins", bins, "Histogram bins for local explanations")->check(CLI::PositiveNumber);
  explain->add_option("--out", out_path, "Output file");
  add_snore_options(explain, snore);
  add_common(explain, common, {"json", "tsv"});

  // serve
  ServerOptions server_options;
  std::string journal_path, static_dir;
  std::size_t cache = 1000;
  auto* serve = app.add_subcommand("serve", "HTTP annotation assistant");
  serve->add_option("--graph", graph_path, "Graph TSV or .nt file")->required();
  serve->add_option("--node-map", node_map, "nodes.tsv for two-column graphs");
  serve->add_option("--mode", mode_text, "Projection mode for .nt input")->check(CLI::IsMember({"rules", "raw"}));
  serve->add_option("--embedding", embedding_path, "Embedding file (fitted when omitted)");
  serve->add_option("--host", server_options.host, "Bind address");
  serve->add_option("--port", server_options.port, "Port, 0 for any free port")->check(CLI::Range(0, 65535));
  serve->add_option("--journal", journal_path, "Append-only feedback journal (NDJSON)");
  serve->add_option("--static", static_dir, "Directory served at /");
  serve->add_option("--cache", cache, "Missing candidates kept precomputed");
  add_snore_options(serve, snore);
  serve->add_option("--seed", common.seed, "Random seed (default 42, or ONTOLINK_SEED)");
  serve->add_option("--threads", common.threads, "Worker threads, 0 = all cores");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.back()->help());
    return kExitUsage;
  }

  const ProjectionMode mode = parse_projection_mode(mode_text);
  snore.seed = common.seed;
  snore.threads = common.threads;
  CLI::App* cmd = app.get_subcommands().front();
  if (cmd != convert && cmd != stats_cmd) err << "seed: " << common.seed << '\n';

  if (cmd == convert) {
    ParseOptions po;
    if (!base.empty()) po.base = base;
    const auto store = load_ntriples(in_path, po);
    ProjectionTally tally;
    const auto hetero = project(store, mode, &tally);
    const auto collapsed = collapse(hetero);
    std::ostringstream graph_out;
    if (simple) {
      write_simple_tsv(graph_out, collapsed.graph);
      if (out_path.empty() && node_map.empty()) throw UsageError("--simple to stdout needs --nodes-out");
      const fs::path sidecar = node_map.empty() ? fs::path(out_path).parent_path() / "nodes.tsv" : fs::path(node_map);
      std::ostringstream nodes_out;
      write_nodes_tsv(nodes_out, collapsed.nodes);
      emit(nodes_out.str(), sidecar.string(), out);
    } else {
      write_hetero_tsv(graph_out, hetero);
    }
    emit(graph_out.str(), out_path, out);
    const json summary = {{"mode", mode_text},
                          {"nodes", collapsed.nodes.size()},
                          {"hetero_edges", hetero.edges.size()},
                          {"edges", collapsed.graph.edge_count()},
                          {"tally", to_json(tally)}};
    (out_path.empty() ? err : out) << summary.dump(2) << '\n';
    return kExitOk;
  }

  if (cmd == stats_cmd) {
    const auto report = to_json(stats(load_ntriples(in_path)));
    if (common.format == "tsv") {
      std::ostringstream tsv;
      for (const auto& [key, value] : report.items()) {
        if (!value.is_object()) tsv << key << '\t' << value.dump() << '\n';
      }
      emit(tsv.str(), out_path, out);
    } else {
      emit(report.dump(2) + "\n", out_path, out);
    }
    return kExitOk;
  }

  if (cmd == embed) {
    const auto g = load_input(graph_path, mode, node_map);
    const auto start = std::chrono::steady_clock::now();
    const auto e = snore_fit(g.graph, snore, g.nodes.names());
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_embedding(fs::path(out_path), e);
    if (!text_out.empty()) {
      std::ofstream text(text_out);
      if (!text) throw Error("cannot write " + text_out);
      write_embedding_text(text, e);
    }
    err << "fitted in " << seconds << " s\n";
    out << json{{"nodes", e.node_count()}, {"nnz", e.nnz()}, {"params", to_json(e.params)}}.dump(2) << '\n';
    return kExitOk;
  }

  if (cmd == bench) {
    std::map<std::string, ScorerParams> params;
    for (const auto& p : scorer_params) {
      const auto dot = p.find('.'), eq = p.find('=');
      if (dot == std::string::npos || eq == std::string::npos || eq < dot) {
        throw UsageError("--param expects scorer.key=value, got " + p);
      }
      params[p.substr(0, dot)][p.substr(dot + 1, eq - dot - 1)] = p.substr(eq + 1);
    }
    const auto names = split(scorer_list, ',');
    if (names.empty()) throw UsageError("--scorers is empty");
    std::vector<std::unique_ptr<Scorer>> owned;
    for (const auto& name : names) {
      if (!is_known_scorer(name)) throw UsageError("unknown scorer: " + name);
      try {
        owned.push_back(make_scorer(name, params[name]));
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
    }
    for (const auto& [name, _] : params) {
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw UsageError("--param for scorer not in --scorers: " + name);
      }
    }
    const auto g = load_input(graph_path, mode, node_map);
    std::vector<Scorer*> scorers;
    for (auto& s : owned) scorers.push_back(s.get());
    BenchmarkOptions options;
    options.dataset = fs::path(graph_path).stem().string();
    options.seed = common.seed;
    options.threads = common.threads;
    options.folds = folds;
    const auto report = run_benchmark(g.graph, g.hetero ? &*g.hetero : nullptr, scorers, options);
    for (const auto& c : report.cells) {
      if (c.failed) err << c.scorer << " failed: " << c.error << '\n';
      else err << c.scorer << ": fit " << c.fit_seconds << " s, score " << c.score_seconds << " s\n";
    }
    if (common.format == "table") {
      emit(format_table(report), out_path, out);
    } else {
      auto j = to_json(report);
      if (!timing) {
        for (auto& cell : j["results"]) {
          cell.erase("fit_seconds");
          cell.erase("score_seconds");
        }
      }
      emit(j.dump(2) + "\n", out_path, out);
    }
    return kExitOk;
  }

  if (cmd == recommend) {
    const auto g = load_input(graph_path, mode, node_map);
    const auto e = load_or_fit(embedding_path, g, snore, err);
    CandidateOptions options;
    options.k = k;
    options.threads = common.threads;
    if (kind_text != "both") options.only = parse_candidate_kind(kind_text);
    if (!subset_path.empty()) {
      std::ifstream list(subset_path);
      if (!list) throw Error("cannot open " + subset_path);
      options.subset.emplace();
      std::string line;
      while (std::getline(list, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) options.subset->push_back(g.nodes.id(line));
      }
    }
    const auto lists = candidates(e, g.graph, options);
    for (const auto& w : lists.warnings) err << "warning: " << w << '\n';
    if (recommend->count("--format") && common.format == "json") {
      emit(candidates_json(lists.missing, lists.redundant, g.nodes).dump(2) + "\n", out_path, out);
    } else {
      emit(candidates_tsv(lists.missing, lists.redundant, g.nodes), out_path, out);
    }
    return kExitOk;
  }

  if (cmd == temporal) {
    std::vector<std::size_t> ks;
    for (const auto& item : split(ks_text, ',')) {
      try {
        ks.push_back(std::stoul(item));
      } catch (const std::exception&) {
        throw UsageError("--ks expects comma-separated integers, got " + ks_text);
      }
    }
    if (ks.empty()) throw UsageError("--ks is empty");
    const auto a = load_input(t_path, mode, "");
    const auto b = load_input(t1_path, mode, "");
    const CollapsedGraph t{a.graph, a.nodes}, t1{b.graph, b.nodes};
    const auto report = temporal_eval(t, t1, ks, snore);
    for (const auto& w : report.warnings) err << "warning: " << w << '\n';
    auto j = to_json(report, fs::path(t_path).stem().string(), fs::path(t1_path).stem().string());
    j["seed"] = common.seed;
    emit(j.dump(2) + "\n", out_path, out);
    if (!candidates_out.empty()) emit(candidates_tsv(report.missing, report.redundant, a.nodes), candidates_out, out);
    return kExitOk;
  }

  if (cmd == explain) {
    if (edge_text.empty() && !global) throw UsageError("explain needs --edge u,v or --global");
    const auto g = load_input(graph_path, mode, node_map);
    const auto e = load_or_fit(embedding_path, g, snore, err);
    GlobalOptions options;
    options.seed = common.seed;
    options.max_features = max_features;
    options.fit.ridge = ridge;
    std::ostringstream result;
    if (global) {
      const auto fit = explain_global(e, g.graph, options);
      if (common.format == "tsv") {
        result << "feature\tbeta\tse\tabs_t\n";
        for (std::size_t i = 0; i < std::min(top, fit.features.size()); ++i) {
          const auto& f = fit.features[i];
          result << e.feature_names[f.feature] << '\t' << format_score(f.beta) << '\t' << format_score(f.se) << '\t'
                 << format_score(std::abs(f.t)) << '\n';
        }
      } else {
        result << to_json(fit, e.feature_names, top).dump(2) << '\n';
      }
    } else {
      const auto edge = parse_edge(edge_text, g.nodes);
      const auto local = weighted ? explain_local_weighted(e, edge.u, edge.v, explain_global(e, g.graph, options))
                                  : explain_local(e, edge.u, edge.v);
      if (common.format == "tsv") {
        result << "feature\tvalue\n";
        for (const auto& c : local.contributions) {
          result << e.feature_names[c.feature] << '\t' << format_score(c.value) << '\n';
        }
      } else {
        auto j = to_json(local, e.feature_names);
        j["score"] = snore_score(e, edge.u, edge.v);
        j["histogram"] = to_json(contribution_histogram(local, bins));
        result << j.dump(2) << '\n';
      }
    }
    emit(result.str(), out_path, out);
    return kExitOk;
  }

  if (cmd == serve) {
    auto g = load_input(graph_path, mode, node_map);
    auto e = load_or_fit(embedding_path, g, snore, err);
    SessionConfig config;
    config.seed = common.seed;
    config.threads = common.threads;
    config.cache_floor = cache;
    if (!journal_path.empty()) config.journal_path = journal_path;
    if (!static_dir.empty()) server_options.static_dir = static_dir;
    Session session(std::move(g.graph), std::move(g.nodes), std::move(e), config);
    Server server(session, server_options);
    const int port = server.bind();
    err << "listening on http://" << server_options.host << ':' << port << '\n';
    running_server = &server;
    std::signal(SIGINT, stop_server);
    std::signal(SIGTERM, stop_server);
    server.serve();
    running_server = nullptr;
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace ontolink
