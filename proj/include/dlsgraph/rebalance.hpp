#pragma once

// Iso-cost rebalancing: solve from one source, export the graph with costs,
// renumber nodes by ascending cost and rebuild with id-range partitions, so
// each worker ends up with a contiguous band of the cost field.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dlsgraph/partition.hpp"
#include "dlsgraph/sssp.hpp"

namespace dlsgraph {

struct RebalanceJob {
  std::string graph_name = "graph";
  /// Source node key; the lowest key when unset.
  std::optional<std::int64_t> source_key;
  int worker_count = 4;
  /// Where `<graph_name>.nodes.csv` and `<graph_name>.edges.csv` are written.
  std::filesystem::path export_dir = ".";
};

/// old key -> new key, new keys 1..n.
struct RenumberMap {
  /// Old key of each new key; index 0 is new key 1.
  std::vector<std::int64_t> old_of_new;

  std::int64_t new_key(std::int64_t old_key) const;
  std::size_t size() const { return old_of_new.size(); }
};

/// New keys ordered by (cost ascending, old key); infinite costs come last.
RenumberMap renumber_by_cost(std::span<const std::pair<std::int64_t, double>> key_costs);

struct RebalanceReport {
  Graph graph;
  PartitionAssignment assignment;
  RenumberMap renumber;
  NodeId source = kNull;  // in the input graph
  PartitionScore before;
  PartitionScore after;
  std::vector<std::size_t> before_edges;
  std::vector<std::size_t> after_edges;
  /// Rounds to convergence from the same source, before and after.
  std::size_t rounds_before = 0;
  std::size_t rounds_after = 0;
  std::size_t unreachable = 0;
  std::vector<std::string> warnings;
  std::filesystem::path nodes_csv;
  std::filesystem::path edges_csv;
};

/// Runs the four steps against `graph` partitioned as `current`. Does not touch any stored graph;
/// callers swap the result in with replace_file_atomically.
RebalanceReport rebalance(const Graph& graph, const PartitionAssignment& current, const RebalanceJob& job);

/// Writes through a sibling temporary file and renames it over `path`.
void replace_file_atomically(const std::filesystem::path& path, const std::function<void(std::ostream&)>& write);

}  // namespace dlsgraph
