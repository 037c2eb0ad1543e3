#pragma once

// Distributed single-source shortest paths. Each worker runs an incremental
// Dijkstra over its own edges; duplicated nodes carry the costs across
// workers, and the client keeps exchanging them until nothing improves.

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dlsgraph/runtime.hpp"

namespace dlsgraph {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Per-worker solve state, indexed by local node id.
struct CostField {
  NodeId source = kNull;  // global id
  std::vector<double> d;
  /// Local edge id reaching the node, kNull when seeded.
  std::vector<EdgeId> pred_edge;
  /// Set when the current d came from another worker.
  std::vector<std::uint8_t> injected;

  explicit CostField(NodeId node_capacity = 0, NodeId source_id = kNull)
      : source(source_id), d(std::size_t{node_capacity} + 1, kInfinity),
        pred_edge(std::size_t{node_capacity} + 1, kNull), injected(std::size_t{node_capacity} + 1, 0) {}
};

/// Lowers the fronts' costs into `field`, relaxes from them and returns the
/// duplicated nodes whose cost dropped through local edges, ascending by global id.
WorkerReply local_dijkstra(const WorkerState& worker, CostField& field, std::span<const CostUpdate> fronts);

/// Workers of one partitioned graph plus the node -> homes index.
class DistributedGraph {
 public:
  explicit DistributedGraph(std::vector<WorkerState> workers);
  static DistributedGraph partition(const Graph& graph, const PartitionAssignment& assignment);

  int worker_count() const { return static_cast<int>(workers_.size()); }
  const WorkerState& worker(WorkerId w) const { return workers_.at(static_cast<std::size_t>(w)); }
  const std::vector<WorkerState>& workers() const { return workers_; }
  /// Homes of a global node; empty when unknown.
  std::span<const WorkerId> homes(NodeId global) const;
  /// Largest global node id present.
  NodeId max_node() const { return max_node_; }
  std::size_t edge_count() const;

 private:
  std::vector<WorkerState> workers_;
  std::unordered_map<NodeId, std::vector<WorkerId>> homes_;
  NodeId max_node_ = kNull;
};

struct SolveResult {
  NodeId source = kNull;
  std::vector<CostField> fields;
  Orchestration run;

  /// Converged cost of a global node (minimum over its homes; they agree after convergence).
  double cost(const DistributedGraph& graph, NodeId global) const;
  /// Cost per global id, kInfinity for unknown or unreached nodes.
  std::vector<double> costs(const DistributedGraph& graph) const;
};

/// Seeds every home of `source` with 0 and runs rounds to convergence.
SolveResult distributed_sssp(const DistributedGraph& graph, NodeId source, const OrchestrateOptions& options = {});

struct PathResult {
  std::vector<NodeId> nodes;  // global ids, source first
  std::vector<EdgeId> edges;  // global ids
  double total_cost = 0.0;
  /// Per-worker pieces in source -> target order; a worker can appear more than once.
  std::vector<PathSegment> segments;
};

/// Backtracks predecessor edges from `target`, handing off to the worker that
/// last improved a node whenever its cost came from elsewhere. Throws NoPath.
PathResult aggregate_path(const DistributedGraph& graph, const SolveResult& solved, NodeId target);

struct PairResult {
  NodeId source = kNull;
  NodeId target = kNull;
  std::optional<PathResult> path;
  std::string error;
};

/// One solve per distinct source; results follow the input order. Per-pair failures are recorded, not thrown.
std::vector<PairResult> batch_solve(const DistributedGraph& graph, std::span<const std::pair<NodeId, NodeId>> pairs,
                                    const OrchestrateOptions& options = {}, std::size_t* solves = nullptr);

}  // namespace dlsgraph
