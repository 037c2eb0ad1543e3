#pragma once

// Hop-limited many-to-many path enumeration with WHERE-style restrictions on
// node and edge side tables.

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

/// Nodes carrying `label`, or an explicit node list when no label is given.
struct NodeSelector {
  std::optional<std::string> label;
  std::vector<NodeId> nodes;

  static NodeSelector by_label(std::string label) { return {std::move(label), {}}; }
  static NodeSelector by_nodes(std::vector<NodeId> nodes) { return {std::nullopt, std::move(nodes)}; }
  std::vector<NodeId> resolve(const Graph& graph) const;
};

enum class Scope { kNode, kEdge };
enum class Comparator { kLess, kLessEqual, kEqual, kNotEqual, kGreaterEqual, kGreater };

struct RestrictionPredicate {
  Scope scope = Scope::kEdge;
  std::string attribute;
  Comparator op = Comparator::kEqual;
  std::string value;

  /// `edge:since>=2002`, `node:age < 30`, `edge:kind!=ferry`.
  static RestrictionPredicate parse(std::string_view text);
  /// Numeric comparison when both sides are numbers, string comparison otherwise.
  bool holds(std::string_view actual) const;
};

/// Attribute rows keyed by entity. Node rows match a node's key or its name;
/// edge rows match an edge's EDGE_ID alias, or its internal id when it has none.
class SideTables {
 public:
  /// Adds every non-key column of `table` as attributes of `scope`, keyed by `key_column`.
  void add(Scope scope, const CsvTable& table, const std::string& key_column);

  bool has_attribute(Scope scope, std::string_view attribute) const;
  std::optional<std::string_view> node_value(const Graph& graph, NodeId v, std::string_view attribute) const;
  std::optional<std::string_view> edge_value(const Graph& graph, EdgeId e, std::string_view attribute) const;

 private:
  using Rows = std::unordered_map<std::string, std::map<std::string, std::string, std::less<>>>;
  std::optional<std::string_view> lookup(const Rows& rows, const std::string& key, std::string_view attribute) const;

  Rows nodes_;
  Rows edges_;
  std::map<std::string, bool, std::less<>> node_columns_;
  std::map<std::string, bool, std::less<>> edge_columns_;
};

struct QuerySpec {
  NodeSelector sources;
  NodeSelector targets;
  int max_hops = 3;
  std::vector<RestrictionPredicate> restrictions;
  std::optional<std::size_t> limit;
};

struct QueryPath {
  std::vector<NodeId> nodes;
  std::vector<EdgeId> edges;
  friend auto operator<=>(const QueryPath&, const QueryPath&) = default;
};

/// Every simple path of 1..max_hops edges from a source to a target that passes
/// all restrictions (a missing side-table row fails). Sorted by node sequence,
/// then edge sequence; `limit` keeps the first paths of that order.
std::vector<QueryPath> query_paths(const Graph& graph, const QuerySpec& spec, const SideTables& tables = {});

}  // namespace dlsgraph
