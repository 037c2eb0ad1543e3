#pragma once

// Client-orchestrated worker protocol. Workers never talk to each other: each
// round the client fans pending cost updates out to the workers homing the
// affected nodes, collects their replies and decides whether to go again.

#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "dlsgraph/partition.hpp"
#include "dlsgraph/topology.hpp"

namespace dlsgraph {

/// One worker's share of a partitioned graph. Node records are replicated on
/// every home; edges exist on their owner only.
struct WorkerState {
  WorkerId worker_id = 0;
  int worker_count = 1;
  Graph subgraph;
  std::unordered_map<NodeId, NodeId> local_of_global;
  /// Indexed by local id; [0] unused.
  std::vector<NodeId> global_of_local;
  std::vector<EdgeId> global_edge_of_local;
  /// Per local id: true when the node also lives on another worker.
  std::vector<std::uint8_t> duplicated_local;
  /// Other homes of each duplicated local node, sorted.
  std::map<NodeId, std::vector<WorkerId>> peer_homes;

  NodeId local(NodeId global) const {
    auto it = local_of_global.find(global);
    return it == local_of_global.end() ? kNull : it->second;
  }
  bool is_duplicated(NodeId local_id) const { return duplicated_local[local_id] != 0; }

  void write(std::ostream& os) const;
  static WorkerState read(std::istream& is);
};

/// Splits `graph` into one WorkerState per worker. Local ids follow ascending global ids.
std::vector<WorkerState> build_workers(const Graph& graph, const PartitionAssignment& assignment);

/// Homes per global node, recovered from the workers' maps.
std::unordered_map<NodeId, std::vector<WorkerId>> node_homes(std::span<const WorkerState> workers);

/// Assignment the workers were built from, sized for a graph with the given capacities.
PartitionAssignment recover_assignment(std::span<const WorkerState> workers, NodeId node_capacity,
                                       EdgeId edge_capacity);

// -- messages ----------------------------------------------------------------

struct CostUpdate {
  NodeId node = kNull;  // global id
  double cost = 0.0;
  friend bool operator==(const CostUpdate&, const CostUpdate&) = default;
};

struct SolveStart {
  NodeId source = kNull;
  std::vector<CostUpdate> fronts;
};
struct CostUpdates {
  std::vector<CostUpdate> updates;
};
struct RoundDone {
  std::size_t round = 0;
  WorkerId worker = 0;
  std::vector<CostUpdate> improvements;
  std::size_t nodes_settled = 0;
  double millis = 0.0;
};
struct PathProbe {
  NodeId node = kNull;
};
struct PathSegment {
  WorkerId worker = 0;
  std::vector<NodeId> nodes;
  std::vector<EdgeId> edges;
};
struct Abort {
  std::string reason;
};

using Message = std::variant<SolveStart, CostUpdates, RoundDone, PathProbe, PathSegment, Abort>;

/// Ordered in-process queue. One per endpoint; send order is delivery order.
class Mailbox {
 public:
  void send(Message m);
  std::optional<Message> receive();
  bool empty() const { return queue_.empty(); }
  std::size_t size() const { return queue_.size(); }
  void clear() { queue_.clear(); }

 private:
  std::deque<Message> queue_;
};

// -- ledger and trace --------------------------------------------------------

class RoundLedger {
 public:
  /// Records `cost` for `node` only when strictly below the best so far.
  bool record_improvement(NodeId node, double cost, WorkerId worker);

  struct Report {
    WorkerId worker;
    CostUpdate update;
  };
  /// Applies one round of reports sorted by (node, cost, worker), so equal
  /// costs go to the lowest worker whatever the arrival order. Returns the accepted ones.
  std::vector<Report> apply_round(std::vector<Report> reports);

  std::optional<double> best(NodeId node) const;
  std::optional<WorkerId> last_improver(NodeId node) const;
  const std::map<NodeId, std::pair<double, WorkerId>>& entries() const { return entries_; }

  std::size_t round = 0;

 private:
  std::map<NodeId, std::pair<double, WorkerId>> entries_;
};

struct TraceRow {
  std::size_t round = 0;
  WorkerId worker = 0;
  std::size_t updates_sent = 0;
  std::size_t nodes_settled = 0;
  double millis = 0.0;
};

void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows);

// -- orchestration -----------------------------------------------------------

/// What one worker did with one round's inbox.
struct WorkerReply {
  std::vector<CostUpdate> improvements;
  std::size_t nodes_settled = 0;
};

/// Runs one worker over the cost updates delivered to it this round.
using WorkerStep = std::function<WorkerReply(WorkerId, std::span<const CostUpdate>)>;

struct OrchestrateOptions {
  /// Run a round's active workers on separate threads.
  bool parallel = false;
  /// Checked at every round boundary.
  const std::atomic<bool>* abort = nullptr;
  /// When set, active workers are serviced in a shuffled order (results must not change).
  std::optional<std::uint64_t> shuffle_seed;
  std::size_t max_rounds = 1'000'000;
  /// Called after each round's fan-out.
  std::function<void(std::size_t round, const RoundLedger&)> on_round;
};

struct Orchestration {
  RoundLedger ledger;
  std::vector<TraceRow> trace;
  std::size_t rounds = 0;
  /// Number of CostUpdate entries delivered to workers after round 1.
  std::size_t deliveries = 0;
};

/// `initial` holds the first inbox per worker; `homes` maps a global node to its workers.
/// Throws SolveAborted on abort or when a worker step throws.
Orchestration orchestrate(int worker_count, const std::vector<std::vector<CostUpdate>>& initial,
                          const std::function<std::span<const WorkerId>(NodeId)>& homes, const WorkerStep& step,
                          const OrchestrateOptions& options = {});

}  // namespace dlsgraph
