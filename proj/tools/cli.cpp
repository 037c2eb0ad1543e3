#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <fstream>
#include <optional>
#include <sstream>

#include "dlsgraph/csv.hpp"
#include "dlsgraph/error.hpp"
#include "dlsgraph/grammar.hpp"
#include "dlsgraph/query.hpp"
#include "dlsgraph/rebalance.hpp"
#include "dlsgraph/sssp.hpp"

namespace dlsgraph::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kCatalogVersion = 1;

std::optional<std::int64_t> as_integer(const std::string& text) {
  std::int64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::map<std::string, std::string> parse_options(const std::vector<std::string>& pairs) {
  std::map<std::string, std::string> out;
  for (const auto& p : pairs) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--option", "expected k=v, got '" + p + "'");
    out[p.substr(0, eq)] = p.substr(eq + 1);
  }
  return out;
}

bool truthy(const std::string& v) { return v == "1" || v == "true" || v == "yes" || v == "on"; }

template <class Fn>
void write_file(const fs::path& path, Fn&& fn) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  replace_file_atomically(path, fn);
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

std::string edge_ref(const Graph& graph, EdgeId e) {
  const auto alias = graph.edge_alias(e);
  return std::to_string(alias ? *alias : static_cast<std::int64_t>(e));
}

// empty when any node on the path lacks coordinates
std::string linestring(const Graph& graph, const std::vector<NodeId>& nodes) {
  std::string out = "LINESTRING(";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto c = graph.coords(nodes[i]);
    if (!c) return "";
    if (i) out += ", ";
    out += format_double(c->x) + " " + format_double(c->y);
  }
  return out + ")";
}

}  // namespace

// -- workspace ---------------------------------------------------------------

Workspace::Workspace(fs::path dir) : dir_(std::move(dir)) {
  const auto catalog = dir_ / "catalog.json";
  if (!fs::exists(catalog)) return;
  std::ifstream in(catalog);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("catalog " + catalog.string() + " is unreadable: " + e.what());
  }
  if (doc.value("version", 0) != kCatalogVersion) throw DataError("catalog " + catalog.string() + " has an unknown version");
  for (const auto& [name, g] : doc.at("graphs").items()) {
    GraphEntry e;
    e.plan = g.at("plan").get<std::string>();
    e.workers = g.at("workers").get<int>();
    e.graph_file = g.at("graph_file").get<std::string>();
    e.worker_files = g.at("worker_files").get<std::vector<std::string>>();
    e.nodes = g.at("nodes").get<std::size_t>();
    e.edges = g.at("edges").get<std::size_t>();
    e.duplicated = g.at("duplicated").get<std::size_t>();
    e.score = g.at("score").get<double>();
    e.options = g.value("options", std::map<std::string, std::string>{});
    graphs_.emplace(name, std::move(e));
  }
}

const GraphEntry& Workspace::entry(const std::string& name) const {
  const auto it = graphs_.find(name);
  if (it == graphs_.end()) throw DataError("unknown graph '" + name + "'");
  return it->second;
}

Graph Workspace::load_graph(const std::string& name) const {
  const auto path = dir_ / entry(name).graph_file;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return Graph::read(in);
}

std::vector<WorkerState> Workspace::load_workers(const std::string& name) const {
  std::vector<WorkerState> out;
  for (const auto& file : entry(name).worker_files) {
    std::ifstream in(dir_ / file, std::ios::binary);
    if (!in) throw DataError("cannot open " + (dir_ / file).string());
    out.push_back(WorkerState::read(in));
  }
  return out;
}

void Workspace::store(const std::string& name, const Graph& graph, const std::string& plan,
                      const PartitionAssignment& assignment, std::map<std::string, std::string> options) {
  GraphEntry e;
  e.plan = plan;
  e.workers = assignment.worker_count;
  e.graph_file = name + "/graph.dls";
  write_file(dir_ / e.graph_file, [&](std::ostream& os) { graph.write(os); });
  const auto workers = build_workers(graph, assignment);
  for (const auto& ws : workers) {
    e.worker_files.push_back(name + "/worker-" + std::to_string(ws.worker_id) + ".dls");
    write_file(dir_ / e.worker_files.back(), [&](std::ostream& os) { ws.write(os); });
  }
  // drop worker files left over from a wider partitioning
  for (int w = e.workers;; ++w) {
    const auto stale = dir_ / name / ("worker-" + std::to_string(w) + ".dls");
    if (!fs::remove(stale)) break;
  }
  const auto score = partition_score(assignment);
  e.nodes = graph.node_count();
  e.edges = graph.edge_count();
  e.duplicated = score.duplicated_total;
  e.score = score.score;
  e.options = std::move(options);
  graphs_[name] = std::move(e);
  save_catalog();
}

void Workspace::save_catalog() const {
  json doc;
  doc["version"] = kCatalogVersion;
  doc["graphs"] = json::object();
  for (const auto& [name, e] : graphs_) {
    doc["graphs"][name] = {{"plan", e.plan},
                           {"workers", e.workers},
                           {"graph_file", e.graph_file},
                           {"worker_files", e.worker_files},
                           {"nodes", e.nodes},
                           {"edges", e.edges},
                           {"duplicated", e.duplicated},
                           {"score", e.score},
                           {"options", e.options}};
  }
  write_file(dir_ / "catalog.json", [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
}

// -- node references ---------------------------------------------------------

NodeId resolve_node(const Graph& graph, const std::string& text) {
  if (const auto k = as_integer(text)) {
    if (const NodeId v = graph.find_by_key(*k); v != kNull) return v;
  }
  if (const NodeId v = graph.find_by_name(text); v != kNull) return v;
  if (const auto k = as_integer(text)) {
    const auto v = static_cast<NodeId>(*k);
    if (*k > 0 && *k <= graph.node_capacity() && graph.node_live(v) && !graph.has_key(v)) return v;
  }
  throw InvalidEntity("unknown node '" + text + "'");
}

std::string node_ref(const Graph& graph, NodeId v) {
  if (graph.has_key(v)) return std::to_string(graph.key(v));
  if (const auto name = graph.name(v)) return std::string(*name);
  return std::to_string(v);
}

void write_cost_csv(std::ostream& os, const Graph& graph, const std::vector<double>& costs) {
  write_csv_row(os, {"node", "cost"});
  for (NodeId v : graph.nodes()) {
    write_csv_row(os, {node_ref(graph, v), format_double(v < costs.size() ? costs[v] : kInfinity)});
  }
}

// -- commands ----------------------------------------------------------------

namespace {

struct CreateArgs {
  std::string graph, edges, nodes, identifiers, partition = "id-range";
  int workers = 4;
  bool strict = false, directed = false;
  double merge_tolerance = 0.0;
  std::vector<std::string> options;
};

struct SolveArgs {
  std::string graph, source, targets, pairs, out, paths, trace;
  bool wkt = false, parallel = false;
  std::optional<std::uint64_t> shuffle_seed;
  std::size_t max_rounds = 0;
  std::vector<std::string> options;
};

struct RepartitionArgs {
  std::string graph, source, export_dir;
  int workers = 4;
};

struct QueryArgs {
  std::string graph, from_label, to_label, from_nodes, to_nodes, out;
  int hops = 3;
  std::vector<std::string> restrict, tables, keys;
  std::optional<std::size_t> limit;
};

struct StatsArgs {
  std::string graph;
};

int cmd_create(Workspace& ws, const CreateArgs& a, std::ostream& out, std::ostream& err) {
  auto options = parse_options(a.options);
  if (ws.contains(a.graph) && !(options.count("recreate") && truthy(options["recreate"]))) {
    throw DataError("graph '" + a.graph + "' exists; pass --option recreate=true to replace it");
  }
  GraphRequest req;
  req.graph_name = a.graph;
  req.bindings = parse_bindings(a.identifiers);
  req.strict = a.strict;
  req.directed_default = a.directed;
  req.merge_tolerance = a.merge_tolerance;
  req.options = options;
  const auto normalized = validate_request(req);
  const CsvTable edges = read_csv_file(a.edges);
  std::optional<CsvTable> nodes;
  if (!a.nodes.empty()) nodes = read_csv_file(a.nodes);
  const BuildResult built = build_graph(normalized, edges, nodes ? &*nodes : nullptr);
  for (const auto& d : built.diagnostics) err << "warning: " << d.what() << '\n';

  const auto plan = PartitionPlan::parse(a.partition, a.workers);
  const ExplicitPartition explicit_input = explicit_partition(built);
  const auto assignment = partition_graph(built.graph, plan, &explicit_input);
  ws.store(a.graph, built.graph, plan.scheme_text(), assignment, options);

  const auto& e = ws.entry(a.graph);
  out << "graph " << a.graph << ": nodes " << e.nodes << " edges " << e.edges << " merged "
      << built.stats.merged_nodes << " rejected " << built.stats.rejected_rows << '\n';
  out << "partition " << e.plan << " workers " << e.workers << " duplicated " << e.duplicated << " score "
      << format_double(e.score) << '\n';
  return kOk;
}

OrchestrateOptions solve_options(const SolveArgs& a) {
  OrchestrateOptions o;
  auto opts = parse_options(a.options);
  o.parallel = a.parallel || (opts.count("parallel") && truthy(opts["parallel"]));
  o.shuffle_seed = a.shuffle_seed;
  if (a.max_rounds > 0) o.max_rounds = a.max_rounds;
  return o;
}

int cmd_solve(Workspace& ws, const SolveArgs& a, std::ostream& out) {
  if (a.source.empty() == a.pairs.empty()) throw CLI::ValidationError("solve", "give exactly one of --source or --pairs");
  if (!a.pairs.empty() && !a.trace.empty()) throw CLI::ValidationError("solve", "--trace needs --source");
  if (!a.targets.empty() && a.paths.empty()) throw CLI::ValidationError("solve", "--targets needs --paths");
  const Graph graph = ws.load_graph(a.graph);
  const DistributedGraph dg(ws.load_workers(a.graph));
  const auto options = solve_options(a);

  std::vector<std::string> header{"pair_id", "source", "target", "total_cost", "nodes"};
  if (a.wkt) header.push_back("wkt");
  header.push_back("error");
  auto path_row = [&](std::size_t id, NodeId s, NodeId t, const PathResult* p, const std::string& error) {
    std::vector<std::string> row{std::to_string(id), node_ref(graph, s), node_ref(graph, t)};
    std::vector<std::string> refs;
    if (p) {
      for (NodeId v : p->nodes) refs.push_back(node_ref(graph, v));
    }
    row.push_back(p ? format_double(p->total_cost) : "");
    row.push_back(join(refs, ' '));
    if (a.wkt) row.push_back(p ? linestring(graph, p->nodes) : "");
    row.push_back(error);
    return row;
  };

  const auto start = std::chrono::steady_clock::now();
  if (!a.pairs.empty()) {
    const CsvTable table = read_csv_file(a.pairs);
    const auto sc = table.column("source"), tc = table.column("target");
    if (!sc || !tc) throw DataError(a.pairs + " needs source and target columns");
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      try {
        pairs.emplace_back(resolve_node(graph, table.rows[r][*sc]), resolve_node(graph, table.rows[r][*tc]));
      } catch (const InvalidEntity& e) {
        throw DataError(e.what(), r + 1);
      }
    }
    std::size_t solves = 0;
    const auto results = batch_solve(dg, pairs, options, &solves);
    const auto millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    const fs::path target = a.paths.empty() ? fs::path(a.out) : fs::path(a.paths);
    if (target.empty()) throw CLI::ValidationError("solve", "--pairs needs --paths (or --out)");
    write_file(target, [&](std::ostream& os) {
      write_csv_row(os, header);
      for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        write_csv_row(os, path_row(i + 1, r.source, r.target, r.path ? &*r.path : nullptr, r.error));
      }
    });
    std::size_t failed = 0;
    for (const auto& r : results) failed += r.path ? 0 : 1;
    out << "pairs " << results.size() << " solves " << solves << " failed " << failed << '\n';
    out << "time_ms " << format_double(millis) << '\n';
    return kOk;
  }

  const NodeId source = resolve_node(graph, a.source);
  const SolveResult solved = distributed_sssp(dg, source, options);
  const auto costs = solved.costs(dg);
  std::vector<NodeId> targets;
  for (const auto& t : split(a.targets, ',')) targets.push_back(resolve_node(graph, t));
  std::vector<std::pair<std::optional<PathResult>, std::string>> paths;
  for (NodeId t : targets) {
    try {
      paths.emplace_back(aggregate_path(dg, solved, t), "");
    } catch (const NoPath& e) {
      paths.emplace_back(std::nullopt, e.what());
    }
  }
  const auto millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  if (!a.out.empty()) {
    write_file(a.out, [&](std::ostream& os) { write_cost_csv(os, graph, costs); });
  }
  if (!a.paths.empty()) {
    write_file(a.paths, [&](std::ostream& os) {
      write_csv_row(os, header);
      for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto& [p, error] = paths[i];
        write_csv_row(os, path_row(i + 1, source, targets[i], p ? &*p : nullptr, error));
      }
    });
  }
  if (!a.trace.empty()) {
    write_file(a.trace, [&](std::ostream& os) { write_trace_csv(os, solved.run.trace); });
  }
  std::size_t reached = 0;
  for (NodeId v : graph.nodes()) reached += v < costs.size() && costs[v] != kInfinity ? 1 : 0;
  out << "rounds " << solved.run.rounds << " deliveries " << solved.run.deliveries << " reached " << reached << '/'
      << graph.node_count() << '\n';
  out << "time_ms " << format_double(millis) << '\n';
  return kOk;
}

void print_counts(std::ostream& out, const PartitionAssignment& a) {
  const auto edges = a.owned_edge_counts();
  const auto nodes = a.homed_node_counts();
  const auto dup = a.duplicated_counts();
  out << "worker,nodes,edges,duplicated\n";
  for (int w = 0; w < a.worker_count; ++w) {
    out << w << ',' << nodes[w] << ',' << edges[w] << ',' << dup[w] << '\n';
  }
}

int cmd_repartition(Workspace& ws, const RepartitionArgs& a, std::ostream& out, std::ostream& err) {
  const auto& entry = ws.entry(a.graph);
  const Graph graph = ws.load_graph(a.graph);
  const auto current = recover_assignment(ws.load_workers(a.graph), graph.node_capacity(), graph.edge_capacity());
  RebalanceJob job;
  job.graph_name = a.graph;
  job.worker_count = a.workers;
  job.export_dir = a.export_dir.empty() ? ws.dir() / a.graph : fs::path(a.export_dir);
  if (!a.source.empty()) {
    const NodeId v = resolve_node(graph, a.source);
    job.source_key = graph.has_key(v) ? graph.key(v) : static_cast<std::int64_t>(v);
  }
  const auto report = rebalance(graph, current, job);
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  auto options = entry.options;
  ws.store(a.graph, report.graph, "id-range", report.assignment, std::move(options));

  out << "before duplicated " << report.before.duplicated_total << " score " << format_double(report.before.score)
      << " rounds " << report.rounds_before << '\n';
  out << "after duplicated " << report.after.duplicated_total << " score " << format_double(report.after.score)
      << " rounds " << report.rounds_after << '\n';
  out << "exported " << report.nodes_csv.string() << ' ' << report.edges_csv.string() << '\n';
  print_counts(out, report.assignment);
  return kOk;
}

NodeSelector selector(const Graph& graph, const std::string& label, const std::string& nodes, const char* side) {
  if (label.empty() == nodes.empty()) {
    throw CLI::ValidationError("query", std::string("give exactly one of --") + side + "-label or --" + side + "-nodes");
  }
  if (!label.empty()) return NodeSelector::by_label(label);
  std::vector<NodeId> ids;
  for (const auto& n : split(nodes, ',')) ids.push_back(resolve_node(graph, n));
  return NodeSelector::by_nodes(std::move(ids));
}

int cmd_query(Workspace& ws, const QueryArgs& a, std::ostream& out) {
  const Graph graph = ws.load_graph(a.graph);
  if (!a.keys.empty() && a.keys.size() != 1 && a.keys.size() != a.tables.size()) {
    throw CLI::ValidationError("query", "give one --key, or one per --table");
  }
  SideTables tables;
  for (std::size_t i = 0; i < a.tables.size(); ++i) {
    const auto eq = a.tables[i].find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--table", "expected node=file.csv or edge=file.csv");
    const auto scope_name = a.tables[i].substr(0, eq);
    if (scope_name != "node" && scope_name != "edge") throw CLI::ValidationError("--table", "scope must be node or edge");
    const std::string key = a.keys.empty() ? "id" : a.keys[a.keys.size() == 1 ? 0 : i];
    tables.add(scope_name == "node" ? Scope::kNode : Scope::kEdge, read_csv_file(a.tables[i].substr(eq + 1)), key);
  }
  QuerySpec spec;
  spec.sources = selector(graph, a.from_label, a.from_nodes, "from");
  spec.targets = selector(graph, a.to_label, a.to_nodes, "to");
  spec.max_hops = a.hops;
  spec.limit = a.limit;
  for (const auto& r : a.restrict) spec.restrictions.push_back(RestrictionPredicate::parse(r));
  const auto paths = query_paths(graph, spec, tables);
  write_file(a.out, [&](std::ostream& os) {
    write_csv_row(os, {"path_id", "source", "target", "hops", "nodes", "edges"});
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const auto& p = paths[i];
      std::vector<std::string> nodes, edges;
      for (NodeId v : p.nodes) nodes.push_back(node_ref(graph, v));
      for (EdgeId e : p.edges) edges.push_back(edge_ref(graph, e));
      write_csv_row(os, {std::to_string(i + 1), nodes.front(), nodes.back(), std::to_string(p.edges.size()),
                         join(nodes, ' '), join(edges, ' ')});
    }
  });
  out << "paths " << paths.size() << '\n';
  return kOk;
}

int cmd_stats(Workspace& ws, const StatsArgs& a, std::ostream& out) {
  if (a.graph.empty()) {
    out << "graph,plan,workers,nodes,edges,duplicated,score\n";
    for (const auto& [name, e] : ws.graphs()) {
      out << name << ',' << e.plan << ',' << e.workers << ',' << e.nodes << ',' << e.edges << ',' << e.duplicated
          << ',' << format_double(e.score) << '\n';
    }
    return kOk;
  }
  const auto& e = ws.entry(a.graph);
  const Graph graph = ws.load_graph(a.graph);
  const auto assignment = recover_assignment(ws.load_workers(a.graph), graph.node_capacity(), graph.edge_capacity());
  out << "graph " << a.graph << ": nodes " << e.nodes << " edges " << e.edges << " partition " << e.plan
      << " workers " << e.workers << " duplicated " << e.duplicated << " score " << format_double(e.score) << '\n';
  print_counts(out, assignment);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed graph engine: build, partition, solve and query graphs in a workspace", "dlsgraph"};
  app.require_subcommand(1);
  std::string workspace = "dlsgraph-workspace";
  app.add_option("--workspace,-w", workspace, "Workspace directory")->envname("DLSGRAPH_WORKSPACE");

  CreateArgs create;
  auto* c = app.add_subcommand("create", "Build a graph from CSV tables, partition and persist it");
  c->add_option("--graph", create.graph, "Graph name")->required();
  c->add_option("--edges", create.edges, "Edge table CSV")->required()->check(CLI::ExistingFile);
  c->add_option("--nodes", create.nodes, "Node table CSV")->check(CLI::ExistingFile);
  c->add_option("--identifiers", create.identifiers, "IDENTIFIER=column bindings, comma separated")->required();
  c->add_option("--partition", create.partition, "id-range | geo:NxM | random | explicit")->capture_default_str();
  c->add_option("--workers", create.workers, "Worker count")->capture_default_str()->check(CLI::PositiveNumber);
  c->add_flag("--strict", create.strict, "Fail on the first bad row");
  c->add_flag("--directed", create.directed, "Edges are directed unless EDGE_DIRECTION says otherwise");
  c->add_option("--merge-tolerance", create.merge_tolerance, "Snap distance for WKT endpoints")
      ->check(CLI::NonNegativeNumber);
  c->add_option("--option", create.options, "Extra k=v option (repeatable); recreate=true replaces a graph");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Distributed shortest paths from one source or over source/target pairs");
  s->add_option("--graph", solve.graph, "Graph name")->required();
  s->add_option("--source", solve.source, "Source node");
  s->add_option("--targets", solve.targets, "Comma separated target nodes for --paths");
  s->add_option("--pairs", solve.pairs, "CSV with source,target columns")->check(CLI::ExistingFile);
  s->add_option("--out", solve.out, "Cost CSV (node,cost)");
  s->add_option("--paths", solve.paths, "Path CSV");
  s->add_flag("--wkt", solve.wkt, "Add a WKT LINESTRING column to the path CSV");
  s->add_option("--trace", solve.trace, "Per-round worker trace CSV");
  s->add_flag("--parallel", solve.parallel, "Run workers of a round concurrently");
  s->add_option("--shuffle-seed", solve.shuffle_seed, "Shuffle worker order per round");
  s->add_option("--max-rounds", solve.max_rounds, "Abort after this many rounds");
  s->add_option("--option", solve.options, "Extra k=v option (repeatable)");

  RepartitionArgs repart;
  auto* r = app.add_subcommand("repartition", "Renumber nodes by cost from a source and re-split by id range");
  r->add_option("--graph", repart.graph, "Graph name")->required();
  r->add_option("--source", repart.source, "Source node (default: lowest key)");
  r->add_option("--workers", repart.workers, "Worker count")->capture_default_str()->check(CLI::PositiveNumber);
  r->add_option("--export-dir", repart.export_dir, "Where G.nodes.csv and G.edges.csv go");

  QueryArgs query;
  auto* q = app.add_subcommand("query", "Hop-limited paths between labelled node sets");
  q->add_option("--graph", query.graph, "Graph name")->required();
  q->add_option("--from-label", query.from_label, "Source label");
  q->add_option("--to-label", query.to_label, "Target label");
  q->add_option("--from-nodes", query.from_nodes, "Comma separated source nodes");
  q->add_option("--to-nodes", query.to_nodes, "Comma separated target nodes");
  q->add_option("--hops", query.hops, "Maximum edges per path")->capture_default_str()->check(CLI::PositiveNumber);
  q->add_option("--restrict", query.restrict, "node:attr<op>value or edge:attr<op>value (repeatable)");
  q->add_option("--table", query.tables, "node=file.csv or edge=file.csv (repeatable)");
  q->add_option("--key", query.keys, "Key column of each --table (one applies to all; default id)");
  q->add_option("--limit", query.limit, "Keep only the first N paths");
  q->add_option("--out", query.out, "Path CSV")->required();

  StatsArgs stats;
  auto* st = app.add_subcommand("stats", "List the catalog or show per-worker counts of one graph");
  st->add_option("--graph", stats.graph, "Graph name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    Workspace ws(workspace);
    if (*c) return cmd_create(ws, create, out, err);
    if (*s) return cmd_solve(ws, solve, out);
    if (*r) return cmd_repartition(ws, repart, out, err);
    if (*q) return cmd_query(ws, query, out);
    return cmd_stats(ws, stats, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const SolveAborted& e) {
    err << "error: " << e.what() << '\n';
    return kInternal;
  } catch (const Error& e) {
    // bad input, unknown graph or node, grammar mismatch, unreachable target
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace dlsgraph::cli
