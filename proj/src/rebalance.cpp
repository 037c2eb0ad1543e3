#include "dlsgraph/rebalance.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <system_error>
#include <unordered_map>
#include <unordered_set>

#include "dlsgraph/csv.hpp"
#include "dlsgraph/grammar.hpp"

namespace dlsgraph {

namespace {

std::string join_labels(const std::vector<std::string>& labels) {
  std::string out;
  for (const auto& l : labels) {
    if (!out.empty()) out += ',';
    out += l;
  }
  return out;
}

double parse_cost(const std::string& text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) throw DataError("bad cost '" + text + "'");
  return v;
}

std::int64_t parse_key(const std::string& text) {
  std::int64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) throw DataError("bad node id '" + text + "'");
  return v;
}

std::size_t column(const CsvTable& t, const std::string& name) {
  const auto c = t.column(name);
  if (!c) throw DataError("exported table lacks column '" + name + "'");
  return *c;
}

// Step 2: node table (id, cost, label, x, y, name) and edge table keyed by node id.
void export_tables(const Graph& g, const std::vector<double>& cost, const std::filesystem::path& nodes_csv,
                   const std::filesystem::path& edges_csv) {
  replace_file_atomically(nodes_csv, [&](std::ostream& os) {
    write_csv_row(os, {"id", "cost", "label", "x", "y", "name"});
    for (NodeId v : g.nodes()) {
      const auto c = g.coords(v);
      const auto n = g.name(v);
      write_csv_row(os, {std::to_string(g.key(v)), format_double(cost[v]), join_labels(g.node_label_names(v)),
                         c ? format_double(c->x) : "", c ? format_double(c->y) : "", n ? std::string(*n) : ""});
    }
  });
  replace_file_atomically(edges_csv, [&](std::ostream& os) {
    write_csv_row(os, {"edge_id", "node1", "node2", "direction", "weight", "label"});
    for (EdgeId e : g.edges()) {
      const auto alias = g.edge_alias(e);
      write_csv_row(os, {alias ? std::to_string(*alias) : "", std::to_string(g.key(g.node1(e))),
                         std::to_string(g.key(g.node2(e))),
                         std::to_string(static_cast<int>(g.direction(e))), format_double(g.weight(e)),
                         join_labels(g.edge_label_names(e))});
    }
  });
}

}  // namespace

std::int64_t RenumberMap::new_key(std::int64_t old_key) const {
  const auto it = std::find(old_of_new.begin(), old_of_new.end(), old_key);
  if (it == old_of_new.end()) throw InvalidEntity("node " + std::to_string(old_key) + " is not renumbered");
  return static_cast<std::int64_t>(it - old_of_new.begin()) + 1;
}

RenumberMap renumber_by_cost(std::span<const std::pair<std::int64_t, double>> key_costs) {
  std::vector<std::pair<std::int64_t, double>> sorted(key_costs.begin(), key_costs.end());
  // infinity compares greater than every finite cost, so the unreachable tail falls out of the sort
  std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second < y.second;
    return x.first < y.first;
  });
  RenumberMap map;
  map.old_of_new.reserve(sorted.size());
  for (const auto& [key, c] : sorted) map.old_of_new.push_back(key);
  return map;
}

RebalanceReport rebalance(const Graph& graph, const PartitionAssignment& current, const RebalanceJob& job) {
  if (graph.node_count() == 0) throw DataError("cannot rebalance an empty graph");
  {
    std::unordered_set<std::int64_t> seen;
    for (NodeId v : graph.nodes()) {
      if (!seen.insert(graph.key(v)).second) throw DataError("node keys are not unique; cannot renumber");
    }
  }

  RebalanceReport report;
  if (job.source_key) {
    report.source = graph.find_by_key(*job.source_key);
    if (report.source == kNull) {
      // graphs without explicit keys are addressed by internal id
      const auto v = static_cast<NodeId>(*job.source_key);
      if (*job.source_key > 0 && graph.node_live(v) && !graph.has_key(v)) report.source = v;
    }
    if (report.source == kNull) throw InvalidEntity("unknown source node " + std::to_string(*job.source_key));
  } else {
    const auto nodes = graph.nodes();
    report.source = *std::min_element(nodes.begin(), nodes.end(),
                                      [&](NodeId a, NodeId b) { return graph.key(a) < graph.key(b); });
  }
  report.before = partition_score(current);
  report.before_edges = current.owned_edge_counts();

  // step 1: solve without path aggregation
  const auto before_graph = DistributedGraph::partition(graph, current);
  const auto solved = distributed_sssp(before_graph, report.source);
  report.rounds_before = solved.run.rounds;
  std::vector<double> cost = solved.costs(before_graph);
  cost.resize(std::size_t{graph.node_capacity()} + 1, kInfinity);

  // step 2: export
  std::filesystem::create_directories(job.export_dir);
  report.nodes_csv = job.export_dir / (job.graph_name + ".nodes.csv");
  report.edges_csv = job.export_dir / (job.graph_name + ".edges.csv");
  export_tables(graph, cost, report.nodes_csv, report.edges_csv);

  // step 3: renumber from the exported node table
  CsvTable nodes = read_csv_file(report.nodes_csv.string());
  CsvTable edges = read_csv_file(report.edges_csv.string());
  const std::size_t id_col = column(nodes, "id");
  const std::size_t cost_col = column(nodes, "cost");
  std::vector<std::pair<std::int64_t, double>> key_costs;
  key_costs.reserve(nodes.rows.size());
  for (const auto& row : nodes.rows) key_costs.emplace_back(parse_key(row[id_col]), parse_cost(row[cost_col]));
  report.renumber = renumber_by_cost(key_costs);
  report.unreachable = static_cast<std::size_t>(
      std::count_if(key_costs.begin(), key_costs.end(), [](const auto& kc) { return kc.second == kInfinity; }));
  if (report.unreachable > 0) {
    report.warnings.push_back(std::to_string(report.unreachable) +
                              " node(s) unreachable from the source were numbered last");
  }

  // step 4: rebuild over the new ids
  std::unordered_map<std::int64_t, std::int64_t> new_of_old;
  for (std::size_t i = 0; i < report.renumber.size(); ++i) {
    new_of_old.emplace(report.renumber.old_of_new[i], static_cast<std::int64_t>(i) + 1);
  }
  auto remap = [&](std::string& cell) { cell = std::to_string(new_of_old.at(parse_key(cell))); };
  for (auto& row : nodes.rows) remap(row[id_col]);
  const std::size_t n1 = column(edges, "node1"), n2 = column(edges, "node2");
  for (auto& row : edges.rows) {
    remap(row[n1]);
    remap(row[n2]);
  }
  // node rows in new-id order so internal ids follow the new keys
  std::sort(nodes.rows.begin(), nodes.rows.end(),
            [&](const auto& a, const auto& b) { return parse_key(a[id_col]) < parse_key(b[id_col]); });

  GraphRequest req;
  req.graph_name = job.graph_name;
  req.strict = true;
  req.bindings = parse_bindings(
      "EDGE_ID=edge_id,EDGE_NODE1_ID=node1,EDGE_NODE2_ID=node2,EDGE_DIRECTION=direction,"
      "EDGE_WEIGHT_VALUESPECIFIED=weight,EDGE_LABEL=label,NODE_ID=id,NODE_X=x,NODE_Y=y,NODE_LABEL=label");
  BuildResult built = build_graph(validate_request(req), edges, &nodes);
  const std::size_t name_col = column(nodes, "name");
  for (const auto& row : nodes.rows) {
    if (!row[name_col].empty()) built.graph.set_name(built.graph.find_by_key(parse_key(row[id_col])), row[name_col]);
  }
  report.graph = std::move(built.graph);

  report.assignment = partition_graph(report.graph, PartitionPlan::parse("id-range", job.worker_count));
  report.after = partition_score(report.assignment);
  report.after_edges = report.assignment.owned_edge_counts();

  const auto after_graph = DistributedGraph::partition(report.graph, report.assignment);
  const NodeId new_source = report.graph.find_by_key(new_of_old.at(graph.key(report.source)));
  report.rounds_after = distributed_sssp(after_graph, new_source).run.rounds;
  return report;
}

void replace_file_atomically(const std::filesystem::path& path, const std::function<void(std::ostream&)>& write) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + tmp.string());
    write(os);
    os.flush();
    if (!os) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot replace " + path.string() + ": " + ec.message());
  }
}

}  // namespace dlsgraph
