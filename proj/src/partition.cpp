#include "dlsgraph/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dlsgraph {

namespace {

void require_workers(int workers) {
  if (workers < 1) throw DataError("worker count must be >= 1");
}

// node_homes and duplicated from edge owners plus optional forced homes.
void derive_homes(PartitionAssignment& out, std::span<const EdgeEnds> edges,
                  const std::map<NodeId, std::vector<WorkerId>>* forced = nullptr) {
  NodeId max_node = 0;
  for (const auto& e : edges) max_node = std::max({max_node, e.a, e.b});
  if (forced && !forced->empty()) max_node = std::max(max_node, forced->rbegin()->first);
  if (out.node_homes.size() < std::size_t{max_node} + 1) out.node_homes.resize(std::size_t{max_node} + 1);

  auto add_home = [&](NodeId v, WorkerId w) {
    auto& homes = out.node_homes[v];
    auto it = std::lower_bound(homes.begin(), homes.end(), w);
    if (it == homes.end() || *it != w) homes.insert(it, w);
  };
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].a == kNull) continue;
    add_home(edges[e].a, out.edge_owner[e]);
    add_home(edges[e].b, out.edge_owner[e]);
  }
  if (forced) {
    for (const auto& [v, workers] : *forced) {
      for (WorkerId w : workers) add_home(v, w);
    }
  }
  out.duplicated.clear();
  for (NodeId v = 1; v < out.node_homes.size(); ++v) {
    if (out.node_homes[v].size() >= 2) out.duplicated.push_back(v);
  }
}

}  // namespace

PartitionPlan PartitionPlan::parse(std::string_view scheme, int workers) {
  require_workers(workers);
  PartitionPlan plan;
  plan.worker_count = workers;
  if (scheme == "id-range") {
    plan.scheme = IdRange{};
  } else if (scheme == "random") {
    plan.scheme = RandomShard{};
  } else if (scheme == "explicit") {
    plan.scheme = Explicit{};
  } else if (scheme.starts_with("geo:")) {
    const auto dims = scheme.substr(4);
    const auto x = dims.find_first_of("xX");
    GeoLattice lattice;
    try {
      if (x == std::string_view::npos) throw std::invalid_argument("no x");
      std::size_t used = 0;
      const std::string cols(dims.substr(0, x));
      const std::string rows(dims.substr(x + 1));
      lattice.columns = std::stoi(cols, &used);
      if (used != cols.size()) throw std::invalid_argument("trailing");
      lattice.rows = std::stoi(rows, &used);
      if (used != rows.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw DataError("partition scheme '" + std::string(scheme) + "' must look like geo:NxM");
    }
    if (lattice.columns < 1 || lattice.rows < 1) throw DataError("geo lattice dimensions must be >= 1");
    if (lattice.columns * lattice.rows != workers) {
      throw DataError("geo:" + std::to_string(lattice.columns) + "x" + std::to_string(lattice.rows) + " needs " +
                      std::to_string(lattice.columns * lattice.rows) + " workers, got " + std::to_string(workers));
    }
    plan.scheme = lattice;
  } else {
    throw DataError("unknown partition scheme '" + std::string(scheme) + "'");
  }
  return plan;
}

std::string PartitionPlan::scheme_text() const {
  struct Visitor {
    std::string operator()(const IdRange&) const { return "id-range"; }
    std::string operator()(const RandomShard&) const { return "random"; }
    std::string operator()(const Explicit&) const { return "explicit"; }
    std::string operator()(const GeoLattice& g) const {
      return "geo:" + std::to_string(g.columns) + "x" + std::to_string(g.rows);
    }
  };
  return std::visit(Visitor{}, scheme);
}

std::vector<std::size_t> PartitionAssignment::owned_edge_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(worker_count), 0);
  for (WorkerId w : edge_owner) {
    if (w != kNoWorker) ++counts[static_cast<std::size_t>(w)];
  }
  return counts;
}

std::vector<std::size_t> PartitionAssignment::homed_node_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(worker_count), 0);
  for (const auto& homes : node_homes) {
    for (WorkerId w : homes) ++counts[static_cast<std::size_t>(w)];
  }
  return counts;
}

std::vector<std::size_t> PartitionAssignment::duplicated_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(worker_count), 0);
  for (NodeId v : duplicated) {
    for (WorkerId w : node_homes[v]) ++counts[static_cast<std::size_t>(w)];
  }
  return counts;
}

std::vector<WorkerId> assign_id_range(int workers, std::span<const std::int64_t> keys) {
  require_workers(workers);
  std::vector<WorkerId> out(keys.size(), 0);
  if (keys.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(keys.begin(), keys.end());
  const std::int64_t lo = *lo_it;
  const auto span = static_cast<std::uint64_t>(*hi_it - lo) + 1;
  const std::uint64_t w = static_cast<std::uint64_t>(workers);
  const std::uint64_t q = span / w;
  const std::uint64_t r = span % w;
  const std::uint64_t long_part = r * (q + 1);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto offset = static_cast<std::uint64_t>(keys[i] - lo);
    const std::uint64_t worker = offset < long_part ? offset / (q + 1) : r + (offset - long_part) / q;
    out[i] = static_cast<WorkerId>(worker);
  }
  return out;
}

Bounds bounding_box(std::span<const Point> points) {
  if (points.empty()) return {};
  Bounds b{points.front(), points.front()};
  for (const Point& p : points) {
    b.min.x = std::min(b.min.x, p.x);
    b.min.y = std::min(b.min.y, p.y);
    b.max.x = std::max(b.max.x, p.x);
    b.max.y = std::max(b.max.y, p.y);
  }
  return b;
}

namespace {
int axis_cell(double v, double lo, double hi, int cells) {
  if (!(hi > lo)) return 0;
  const double t = (v - lo) / (hi - lo) * cells;
  const int c = static_cast<int>(std::floor(t));
  return std::clamp(c, 0, cells - 1);
}
}  // namespace

std::pair<int, int> lattice_cell(const GeoLattice& lattice, const Bounds& box, Point p) {
  return {axis_cell(p.x, box.min.x, box.max.x, lattice.columns), axis_cell(p.y, box.min.y, box.max.y, lattice.rows)};
}

std::vector<WorkerId> assign_geo_lattice(const GeoLattice& lattice, std::span<const Point> points) {
  if (lattice.columns < 1 || lattice.rows < 1) throw DataError("geo lattice dimensions must be >= 1");
  const Bounds box = bounding_box(points);
  std::vector<WorkerId> out;
  out.reserve(points.size());
  for (const Point& p : points) {
    const auto [col, row] = lattice_cell(lattice, box, p);
    out.push_back(static_cast<WorkerId>(row * lattice.columns + col));
  }
  return out;
}

std::uint64_t stable_hash(std::int64_t key) {
  std::uint64_t z = static_cast<std::uint64_t>(key) + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<WorkerId> assign_random_shard(int workers, std::span<const std::int64_t> keys) {
  require_workers(workers);
  std::vector<WorkerId> out;
  out.reserve(keys.size());
  for (auto k : keys) out.push_back(static_cast<WorkerId>(stable_hash(k) % static_cast<std::uint64_t>(workers)));
  return out;
}

PartitionAssignment resolve_edge_ownership(int workers, std::span<const WorkerId> node_worker,
                                           std::span<const EdgeEnds> edges) {
  require_workers(workers);
  PartitionAssignment out;
  out.worker_count = workers;
  out.edge_owner.assign(edges.size(), kNoWorker);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [a, b] = edges[e];
    if (a == kNull) continue;
    if (a >= node_worker.size() || b >= node_worker.size() || node_worker[a] == kNoWorker ||
        node_worker[b] == kNoWorker) {
      throw InvalidEntity("edge " + std::to_string(e) + " has an unmapped end node");
    }
    out.edge_owner[e] = std::min(node_worker[a], node_worker[b]);
  }
  derive_homes(out, edges);
  return out;
}

ExplicitPartition explicit_partition(const BuildResult& built) {
  return {built.edge_partition, built.edge_row, built.boundary, built.boundary_row};
}

PartitionAssignment assign_explicit(int workers, std::span<const EdgeEnds> edges, const ExplicitPartition& input) {
  require_workers(workers);
  PartitionAssignment out;
  out.worker_count = workers;
  out.edge_owner.assign(edges.size(), kNoWorker);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].a == kNull) continue;
    const std::int64_t p = e < input.edge_partition.size() ? input.edge_partition[e] : -1;
    const std::size_t row = e < input.edge_row.size() ? input.edge_row[e] : 0;
    if (p < 0 || p >= workers) {
      throw DataError(p < 0 ? "edge has no EDGE_PARTITION value"
                            : "EDGE_PARTITION " + std::to_string(p) + " outside [0, " + std::to_string(workers) + ")",
                      row);
    }
    out.edge_owner[e] = static_cast<WorkerId>(p);
  }
  std::map<NodeId, std::vector<WorkerId>> forced;
  for (const auto& [v, list] : input.boundary) {
    const auto row_it = input.boundary_row.find(v);
    const std::size_t row = row_it == input.boundary_row.end() ? 0 : row_it->second;
    for (auto w : list) {
      if (w < 0 || w >= workers) {
        throw DataError("NODE_PARTITION_BOUNDARY " + std::to_string(w) + " outside [0, " + std::to_string(workers) +
                            ")",
                        row);
      }
      forced[v].push_back(static_cast<WorkerId>(w));
    }
  }
  derive_homes(out, edges, &forced);
  return out;
}

PartitionScore partition_score(const PartitionAssignment& assignment) {
  PartitionScore s;
  s.duplicated_total = assignment.duplicated.size();
  for (WorkerId w : assignment.edge_owner) s.graph_size += w != kNoWorker ? 1 : 0;
  s.score = s.graph_size == 0 ? 0.0 : static_cast<double>(s.duplicated_total) / static_cast<double>(s.graph_size);
  return s;
}

std::vector<EdgeEnds> edge_ends(const Graph& graph) {
  std::vector<EdgeEnds> ends(std::size_t{graph.edge_capacity()} + 1);
  for (EdgeId e : graph.edges()) ends[e] = {graph.node1(e), graph.node2(e)};
  return ends;
}

PartitionAssignment partition_graph(const Graph& graph, const PartitionPlan& plan,
                                    const ExplicitPartition* explicit_input) {
  const auto ends = edge_ends(graph);
  if (std::holds_alternative<Explicit>(plan.scheme)) {
    if (!explicit_input) throw DataError("explicit partitioning needs EDGE_PARTITION values");
    auto out = assign_explicit(plan.worker_count, ends, *explicit_input);
    out.node_homes.resize(std::size_t{graph.node_capacity()} + 1);
    return out;
  }

  const auto live = graph.nodes();
  std::vector<WorkerId> tentative;
  if (const auto* lattice = std::get_if<GeoLattice>(&plan.scheme)) {
    if (lattice->columns * lattice->rows != plan.worker_count) {
      throw DataError("geo lattice cell count must equal the worker count");
    }
    std::vector<Point> points;
    points.reserve(live.size());
    for (NodeId v : live) {
      const auto c = graph.coords(v);
      if (!c) throw DataError("geo partitioning needs coordinates; node " + std::to_string(graph.key(v)) + " has none");
      points.push_back(*c);
    }
    tentative = assign_geo_lattice(*lattice, points);
  } else {
    std::vector<std::int64_t> keys;
    keys.reserve(live.size());
    for (NodeId v : live) keys.push_back(graph.key(v));
    tentative = std::holds_alternative<IdRange>(plan.scheme) ? assign_id_range(plan.worker_count, keys)
                                                            : assign_random_shard(plan.worker_count, keys);
  }
  std::vector<WorkerId> node_worker(std::size_t{graph.node_capacity()} + 1, kNoWorker);
  for (std::size_t i = 0; i < live.size(); ++i) node_worker[live[i]] = tentative[i];
  auto out = resolve_edge_ownership(plan.worker_count, node_worker, ends);
  out.node_homes.resize(std::size_t{graph.node_capacity()} + 1);
  // isolated nodes live on their tentative worker
  for (NodeId v : live) {
    if (out.node_homes[v].empty()) out.node_homes[v] = {node_worker[v]};
  }
  return out;
}

}  // namespace dlsgraph
