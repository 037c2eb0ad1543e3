#include "dlsgraph/sssp.hpp"

#include <algorithm>
#include <cassert>
#include <queue>
#include <tuple>

namespace dlsgraph {

WorkerReply local_dijkstra(const WorkerState& worker, CostField& field, std::span<const CostUpdate> fronts) {
  using Entry = std::tuple<double, NodeId, NodeId>;  // cost, global id, local id
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  const Graph& g = worker.subgraph;

  for (const auto& f : fronts) {
    assert(f.cost >= 0.0 && f.cost < kInfinity);
    const NodeId l = worker.local(f.node);
    if (l == kNull) throw InvalidEntity("worker " + std::to_string(worker.worker_id) + " does not home node " +
                                        std::to_string(f.node));
    if (!(f.cost < field.d[l])) continue;
    field.d[l] = f.cost;
    field.pred_edge[l] = kNull;
    field.injected[l] = f.node == field.source && f.cost == 0.0 ? 0 : 1;
    heap.emplace(f.cost, f.node, l);
  }

  WorkerReply reply;
  std::vector<NodeId> lowered;
  while (!heap.empty()) {
    const auto [c, global, l] = heap.top();
    heap.pop();
    if (c > field.d[l]) continue;
    ++reply.nodes_settled;
    g.for_each_incident(l, [&](EdgeId e) {
      if (!g.traversable_from(e, l)) return;
      const NodeId u = g.opposite(e, l);
      const double w = g.weight(e);
      assert(w >= 0.0);
      const double nd = c + w;
      if (!(nd < field.d[u])) return;
      field.d[u] = nd;
      field.pred_edge[u] = e;
      field.injected[u] = 0;
      heap.emplace(nd, worker.global_of_local[u], u);
      if (worker.is_duplicated(u)) lowered.push_back(u);
    });
  }

  std::sort(lowered.begin(), lowered.end());
  lowered.erase(std::unique(lowered.begin(), lowered.end()), lowered.end());
  for (NodeId l : lowered) reply.improvements.push_back({worker.global_of_local[l], field.d[l]});
  std::sort(reply.improvements.begin(), reply.improvements.end(),
            [](const CostUpdate& x, const CostUpdate& y) { return x.node < y.node; });
  return reply;
}

DistributedGraph::DistributedGraph(std::vector<WorkerState> workers) : workers_(std::move(workers)) {
  for (std::size_t i = 0; i < workers_.size(); ++i) {
    if (workers_[i].worker_id != static_cast<WorkerId>(i)) throw Error("workers must be ordered by id");
  }
  homes_ = node_homes(workers_);
  for (const auto& [v, list] : homes_) max_node_ = std::max(max_node_, v);
}

DistributedGraph DistributedGraph::partition(const Graph& graph, const PartitionAssignment& assignment) {
  return DistributedGraph(build_workers(graph, assignment));
}

std::span<const WorkerId> DistributedGraph::homes(NodeId global) const {
  auto it = homes_.find(global);
  if (it == homes_.end()) return {};
  return it->second;
}

std::size_t DistributedGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& w : workers_) n += w.subgraph.edge_count();
  return n;
}

double SolveResult::cost(const DistributedGraph& graph, NodeId global) const {
  double best = kInfinity;
  for (WorkerId w : graph.homes(global)) {
    best = std::min(best, fields[w].d[graph.worker(w).local(global)]);
  }
  return best;
}

std::vector<double> SolveResult::costs(const DistributedGraph& graph) const {
  std::vector<double> out(std::size_t{graph.max_node()} + 1, kInfinity);
  for (const auto& ws : graph.workers()) {
    const auto& f = fields[ws.worker_id];
    for (NodeId l = 1; l < ws.global_of_local.size(); ++l) {
      auto& slot = out[ws.global_of_local[l]];
      slot = std::min(slot, f.d[l]);
    }
  }
  return out;
}

SolveResult distributed_sssp(const DistributedGraph& graph, NodeId source, const OrchestrateOptions& options) {
  const auto source_homes = graph.homes(source);
  if (source_homes.empty()) throw InvalidEntity("unknown source node " + std::to_string(source));

  SolveResult result;
  result.source = source;
  for (const auto& ws : graph.workers()) result.fields.emplace_back(ws.subgraph.node_capacity(), source);

  std::vector<std::vector<CostUpdate>> initial(static_cast<std::size_t>(graph.worker_count()));
  for (WorkerId w : source_homes) initial[w].push_back({source, 0.0});

  auto step = [&](WorkerId w, std::span<const CostUpdate> fronts) {
    return local_dijkstra(graph.worker(w), result.fields[w], fronts);
  };
  auto homes = [&](NodeId v) { return graph.homes(v); };
  result.run = orchestrate(graph.worker_count(), initial, homes, step, options);
  return result;
}

namespace {

// Worker side of a path probe: walk predecessors from `global` until the
// source or a node whose cost came from another worker.
PathSegment backtrack(const WorkerState& ws, const CostField& field, NodeId global, std::size_t& budget,
                      std::vector<double>& weights) {
  PathSegment seg;
  seg.worker = ws.worker_id;
  NodeId l = ws.local(global);
  seg.nodes.push_back(global);
  while (true) {
    const NodeId g = ws.global_of_local[l];
    if (g == field.source || field.injected[l]) break;
    const EdgeId e = field.pred_edge[l];
    if (e == kNull) throw Error("cost field has no predecessor for node " + std::to_string(g));
    if (budget-- == 0) throw Error("path aggregation did not terminate");
    weights.push_back(ws.subgraph.weight(e));
    l = ws.subgraph.opposite(e, l);
    seg.edges.push_back(ws.global_edge_of_local[e]);
    seg.nodes.push_back(ws.global_of_local[l]);
  }
  return seg;
}

}  // namespace

PathResult aggregate_path(const DistributedGraph& graph, const SolveResult& solved, NodeId target) {
  const auto target_homes = graph.homes(target);
  if (target_homes.empty()) throw InvalidEntity("unknown target node " + std::to_string(target));
  if (solved.cost(graph, target) == kInfinity) {
    throw NoPath("no path from " + std::to_string(solved.source) + " to " + std::to_string(target));
  }

  PathResult out;
  if (target == solved.source) {
    out.nodes = {target};
    out.segments.push_back({target_homes.front(), {target}, {}});
    return out;
  }

  const auto& ledger = solved.run.ledger;
  WorkerId w = target_homes.size() == 1 ? target_homes.front()
                                        : ledger.last_improver(target).value_or(target_homes.front());
  std::size_t budget = graph.edge_count() + 1;
  std::size_t handoffs = 0;
  NodeId at = target;
  std::vector<PathSegment> reversed;
  std::vector<double> weights;  // target -> source
  while (true) {
    PathSegment seg = backtrack(graph.worker(w), solved.fields[w], at, budget, weights);
    at = seg.nodes.back();
    reversed.push_back(std::move(seg));
    if (at == solved.source) break;
    const auto next = ledger.last_improver(at);
    if (!next || *next == w) throw Error("no handoff recorded for node " + std::to_string(at));
    if (++handoffs > graph.edge_count() + 1) throw Error("path aggregation did not terminate");
    w = *next;
  }

  for (auto it = reversed.rbegin(); it != reversed.rend(); ++it) {
    std::reverse(it->nodes.begin(), it->nodes.end());
    std::reverse(it->edges.begin(), it->edges.end());
    if (out.nodes.empty()) out.nodes.push_back(it->nodes.front());
    out.nodes.insert(out.nodes.end(), it->nodes.begin() + 1, it->nodes.end());
    out.edges.insert(out.edges.end(), it->edges.begin(), it->edges.end());
    out.segments.push_back(std::move(*it));
  }
  // sum in source -> target order, matching how the costs were accumulated
  for (auto it = weights.rbegin(); it != weights.rend(); ++it) out.total_cost += *it;
  return out;
}

std::vector<PairResult> batch_solve(const DistributedGraph& graph, std::span<const std::pair<NodeId, NodeId>> pairs,
                                    const OrchestrateOptions& options, std::size_t* solves) {
  std::vector<PairResult> out(pairs.size());
  std::vector<NodeId> order;
  std::unordered_map<NodeId, std::vector<std::size_t>> by_source;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out[i].source = pairs[i].first;
    out[i].target = pairs[i].second;
    auto [it, fresh] = by_source.try_emplace(pairs[i].first);
    if (fresh) order.push_back(pairs[i].first);
    it->second.push_back(i);
  }
  if (solves) *solves = 0;
  for (NodeId source : order) {
    std::optional<SolveResult> solved;
    std::string failure;
    try {
      solved = distributed_sssp(graph, source, options);
      if (solves) ++*solves;
    } catch (const SolveAborted&) {
      throw;
    } catch (const Error& e) {
      failure = e.what();
    }
    for (std::size_t i : by_source[source]) {
      if (!solved) {
        out[i].error = failure;
        continue;
      }
      try {
        out[i].path = aggregate_path(graph, *solved, out[i].target);
      } catch (const Error& e) {
        out[i].error = e.what();
      }
    }
  }
  return out;
}

}  // namespace dlsgraph
