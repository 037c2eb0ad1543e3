#pragma once

// Graph grammar: table columns are annotated with component identifiers
// (NODE_ID, EDGE_NODE1_NAME, EDGE_WKTLINE, ...) and a registered combination
// of identifiers tells the builder how to turn each row into nodes and edges.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dlsgraph/csv.hpp"
#include "dlsgraph/topology.hpp"

namespace dlsgraph {

enum class Component { kNodes, kEdges, kWeights, kRestrictions };

enum class Identifier {
  kNodeId,
  kNodeX,
  kNodeY,
  kNodeName,
  kNodeWktPoint,
  kNodeLabel,
  kNodePartitionBoundary,
  kEdgeId,
  kEdgeNode1Id,
  kEdgeNode2Id,
  kEdgeNode1Name,
  kEdgeNode2Name,
  kEdgeNode1WktPoint,
  kEdgeNode2WktPoint,
  kEdgeWktLine,
  kEdgeDirection,
  kEdgeLabel,
  kEdgeWeightValueSpecified,
  kEdgePartition,
  kWeightsEdgeId,
  kWeightsValueSpecified,
  kRestrictionsNodeId,
  kRestrictionsEdgeId,
  kRestrictionsOnOffCompassed,
};

std::string_view identifier_name(Identifier id);
std::optional<Identifier> parse_identifier(std::string_view name);
Component component_of(Identifier id);

/// A column reference or, when `constant` is set, a literal value used for every row.
struct IdentifierBinding {
  Identifier identifier;
  std::string column;
  bool constant = false;
};

/// Parses `NAME=column` or `NAME='literal'`, comma separated.
std::vector<IdentifierBinding> parse_bindings(std::string_view text);

struct GraphRequest {
  std::string graph_name;
  std::vector<IdentifierBinding> bindings;
  double merge_tolerance = 0.0;
  bool directed_default = false;
  bool strict = false;
  std::map<std::string, std::string> options;
};

/// How edge endpoints are resolved.
enum class EdgeForm { kIds, kNames, kWktPoints, kWktLine };
/// How the optional node table is keyed.
enum class NodeForm { kNone, kIds, kNames };

struct NormalizedRequest {
  GraphRequest request;
  EdgeForm edge_form = EdgeForm::kIds;
  NodeForm node_form = NodeForm::kNone;
  std::map<Identifier, IdentifierBinding> edge_bindings;
  std::map<Identifier, IdentifierBinding> node_bindings;

  bool binds(Identifier id) const { return edge_bindings.count(id) || node_bindings.count(id); }
};

/// Matches each component's identifiers against the registered combinations.
/// Throws GrammarError naming the nearest combination on mismatch.
NormalizedRequest validate_request(const GraphRequest& request);

/// Registered edge combinations, without the optional extras.
const std::vector<std::vector<Identifier>>& edge_combinations();

/// Uniform-bin spatial hash snapping points within `tolerance` onto one node.
class NodeMergeIndex {
 public:
  explicit NodeMergeIndex(double tolerance);

  /// Node within tolerance of `p` (nearest, then lowest id), or kNull.
  NodeId find(Point p) const;
  void add(NodeId v, Point p);

  /// Returns the node `p` snaps to, inserting a new one into `graph` when none is close.
  /// `merged` is set when an existing node was reused.
  NodeId merge(Graph& graph, Point p, bool* merged = nullptr);

  double tolerance() const { return tolerance_; }

 private:
  struct Cell {
    std::int64_t i;
    std::int64_t j;
    friend bool operator==(const Cell&, const Cell&) = default;
  };
  struct CellHash {
    std::size_t operator()(const Cell& c) const noexcept;
  };
  struct Entry {
    NodeId node;
    Point at;
  };

  Cell cell_of(Point p) const;

  double tolerance_;
  std::unordered_map<Cell, std::vector<Entry>, CellHash> bins_;
};

struct BuildStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t merged_nodes = 0;
  std::size_t rows = 0;
  std::size_t rejected_rows = 0;
};

struct BuildResult {
  Graph graph;
  BuildStats stats;
  /// EDGE_PARTITION value per edge id (-1 when unbound), with its source row.
  std::vector<std::int64_t> edge_partition;
  std::vector<std::size_t> edge_row;
  /// NODE_PARTITION_BOUNDARY workers per node.
  std::map<NodeId, std::vector<std::int64_t>> boundary;
  std::map<NodeId, std::size_t> boundary_row;
  std::vector<DataError> diagnostics;
};

/// Builds a graph from an edge table and an optional node table.
/// Row errors are collected in `diagnostics`; with `strict` the first one is thrown.
BuildResult build_graph(const NormalizedRequest& request, const CsvTable& edges,
                        const CsvTable* nodes = nullptr);

}  // namespace dlsgraph
