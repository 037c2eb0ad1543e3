#pragma once

// Edge-exclusive partitioning with duplicated interface nodes.
//
// Every edge is owned by exactly one worker. A node is homed on every worker
// owning one of its edges; nodes with two or more homes are "duplicated" and
// are the only coupling points between workers. Implicit schemes first map
// nodes to a tentative worker and then give each edge to the lower-ranked
// worker of its two ends.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dlsgraph/grammar.hpp"
#include "dlsgraph/topology.hpp"

namespace dlsgraph {

using WorkerId = std::int32_t;
inline constexpr WorkerId kNoWorker = -1;

struct IdRange {
  friend bool operator==(const IdRange&, const IdRange&) = default;
};
/// `columns` cells along x, `rows` along y; worker = row * columns + column.
struct GeoLattice {
  int columns = 1;
  int rows = 1;
  friend bool operator==(const GeoLattice&, const GeoLattice&) = default;
};
struct RandomShard {
  friend bool operator==(const RandomShard&, const RandomShard&) = default;
};
struct Explicit {
  friend bool operator==(const Explicit&, const Explicit&) = default;
};

using PartitionScheme = std::variant<IdRange, GeoLattice, RandomShard, Explicit>;

struct PartitionPlan {
  PartitionScheme scheme = IdRange{};
  int worker_count = 4;

  /// Parses `id-range`, `geo:NxM`, `random` or `explicit`; checks the worker count against the scheme.
  static PartitionPlan parse(std::string_view scheme, int workers);
  std::string scheme_text() const;
};

struct Bounds {
  Point min;
  Point max;
};

/// End nodes per edge id; dead slots hold {kNull, kNull}.
struct EdgeEnds {
  NodeId a = kNull;
  NodeId b = kNull;
};

struct PartitionAssignment {
  int worker_count = 1;
  /// Owner per edge id; kNoWorker for dead slots and index 0.
  std::vector<WorkerId> edge_owner;
  /// Sorted homes per node id; empty for dead or isolated-and-unassigned nodes.
  std::vector<std::vector<WorkerId>> node_homes;
  /// Nodes with at least two homes, ascending.
  std::vector<NodeId> duplicated;

  std::vector<std::size_t> owned_edge_counts() const;
  std::vector<std::size_t> homed_node_counts() const;
  std::vector<std::size_t> duplicated_counts() const;
};

struct PartitionScore {
  std::size_t duplicated_total = 0;
  std::size_t graph_size = 0;
  double score = 0.0;
};

/// Contiguous, maximally even key ranges over [min, max]; the first
/// (span % workers) ranges are one key longer. Returns one worker per key.
std::vector<WorkerId> assign_id_range(int workers, std::span<const std::int64_t> keys);

/// Bounding box of `points`.
Bounds bounding_box(std::span<const Point> points);

/// Lattice cell (column, row) of `p`. Points on an interior cell edge fall in
/// the higher cell; the global maximum falls in the last cell.
std::pair<int, int> lattice_cell(const GeoLattice& lattice, const Bounds& box, Point p);

std::vector<WorkerId> assign_geo_lattice(const GeoLattice& lattice, std::span<const Point> points);

/// SplitMix64 finalizer; fixed so shard assignments are reproducible across runs and platforms.
std::uint64_t stable_hash(std::int64_t key);

std::vector<WorkerId> assign_random_shard(int workers, std::span<const std::int64_t> keys);

/// Edge (a, b) goes to min(worker(a), worker(b)). `node_worker` is indexed by node id.
PartitionAssignment resolve_edge_ownership(int workers, std::span<const WorkerId> node_worker,
                                           std::span<const EdgeEnds> edges);

struct ExplicitPartition {
  /// EDGE_PARTITION per edge id (-1 = unset) and the input row it came from.
  std::vector<std::int64_t> edge_partition;
  std::vector<std::size_t> edge_row;
  /// NODE_PARTITION_BOUNDARY workers per node id and their input rows.
  std::map<NodeId, std::vector<std::int64_t>> boundary;
  std::map<NodeId, std::size_t> boundary_row;
};

/// EDGE_PARTITION / NODE_PARTITION_BOUNDARY data captured while building.
ExplicitPartition explicit_partition(const BuildResult& built);

/// Owners taken verbatim; boundary nodes are additionally homed on their declared workers.
PartitionAssignment assign_explicit(int workers, std::span<const EdgeEnds> edges, const ExplicitPartition& input);

PartitionScore partition_score(const PartitionAssignment& assignment);

/// Runs `plan` over a live graph. Explicit plans need `explicit_input`.
PartitionAssignment partition_graph(const Graph& graph, const PartitionPlan& plan,
                                    const ExplicitPartition* explicit_input = nullptr);

/// End nodes of every edge slot in `graph`.
std::vector<EdgeEnds> edge_ends(const Graph& graph);

}  // namespace dlsgraph
