#pragma once

// Double link structure (DLS) graph container.
//
// Every edge record holds exactly six integers: its two end nodes and, for
// each end, the previous and next edge in that node's chain of incident
// edges. A node stores only the id of one incident edge (the chain head), so
// topology storage is 6 x edge capacity regardless of degree distribution.
// Ids are 1-based; 0 is the null link. Deleted ids go to FIFO free lists and
// are reused before the containers grow.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dlsgraph/error.hpp"

namespace dlsgraph {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;
using LabelId = std::uint32_t;

inline constexpr std::uint32_t kNull = 0;

/// Traversal direction of an edge relative to its (node1, node2) order.
enum class Direction : std::int8_t {
  kBoth = 0,
  kForward = 1,    // node1 -> node2
  kBackward = -1,  // node2 -> node1
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// The six topology slots of one edge. Index 0 is the node1 side, 1 the node2 side.
struct EdgeLinks {
  NodeId node[2] = {kNull, kNull};
  EdgeId prev[2] = {kNull, kNull};
  EdgeId next[2] = {kNull, kNull};
};
static_assert(sizeof(EdgeLinks) == 6 * sizeof(std::uint32_t));

struct NodeInit {
  std::vector<std::string> labels;
  std::optional<Point> coords;
  std::optional<std::string> name;
  std::optional<std::int64_t> key;
};

struct Neighbor {
  NodeId node;
  EdgeId edge;
  double weight;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Read-only compressed sparse row snapshot. Row r holds node id r + 1.
struct Csr {
  std::vector<std::size_t> offsets;
  std::vector<NodeId> targets;
  std::vector<double> weights;
  std::vector<EdgeId> edges;

  std::span<const NodeId> row(NodeId v) const {
    return {targets.data() + offsets[v - 1], offsets[v] - offsets[v - 1]};
  }
};

class Graph {
 public:
  Graph();

  // -- mutation ------------------------------------------------------------

  NodeId insert_node(const NodeInit& init = {});
  EdgeId insert_edge(NodeId a, NodeId b, double weight, Direction dir = Direction::kBoth);
  void delete_edge(EdgeId e);
  /// Deletes every incident edge, then the node. Returns the deleted edges in walk order.
  std::vector<EdgeId> delete_node(NodeId v);

  void set_weight(EdgeId e, double weight);
  void set_direction(EdgeId e, Direction dir);
  void set_coords(NodeId v, Point p);
  void set_name(NodeId v, std::string_view name);
  void set_key(NodeId v, std::int64_t key);
  void add_node_label(NodeId v, std::string_view label);
  void add_edge_label(EdgeId e, std::string_view label);
  void set_edge_alias(EdgeId e, std::int64_t alias);

  // -- traversal -----------------------------------------------------------

  /// Incident edges of `v`, walking prev-links from the cached head edge.
  std::vector<EdgeId> adjacent_edges(NodeId v) const;
  std::vector<Neighbor> neighbors(NodeId v) const;

  /// Allocation-free walk of the chain of `v`; calls `f(edge_id)` per incident edge.
  template <class F>
  void for_each_incident(NodeId v, F&& f) const {
    EdgeId e = cached_[v];
    while (e != kNull) {
      const EdgeLinks& l = links_[e];
      const EdgeId prev = l.prev[side_of(l, v)];
      f(e);
      e = prev;
    }
  }

  Csr to_csr() const;

  // -- inspection ----------------------------------------------------------

  bool node_live(NodeId v) const { return v != kNull && v < node_live_.size() && node_live_[v]; }
  bool edge_live(EdgeId e) const { return e != kNull && e < links_.size() && links_[e].node[0] != kNull; }

  NodeId node_capacity() const { return static_cast<NodeId>(cached_.size() - 1); }
  EdgeId edge_capacity() const { return static_cast<EdgeId>(links_.size() - 1); }
  std::size_t node_count() const { return live_nodes_; }
  std::size_t edge_count() const { return live_edges_; }

  const EdgeLinks& links(EdgeId e) const;
  EdgeId cached_edge(NodeId v) const;
  NodeId node1(EdgeId e) const { return links(e).node[0]; }
  NodeId node2(EdgeId e) const { return links(e).node[1]; }
  NodeId opposite(EdgeId e, NodeId v) const;
  double weight(EdgeId e) const;
  Direction direction(EdgeId e) const;
  /// True when the edge may be traversed starting at `from`.
  bool traversable_from(EdgeId e, NodeId from) const;

  std::optional<Point> coords(NodeId v) const;
  std::optional<std::string_view> name(NodeId v) const;
  /// External integer key if one was assigned, otherwise the internal id.
  std::int64_t key(NodeId v) const;
  bool has_key(NodeId v) const;
  NodeId find_by_name(std::string_view name) const;
  NodeId find_by_key(std::int64_t key) const;

  std::optional<std::int64_t> edge_alias(EdgeId e) const;
  /// Live edges carrying `alias`, ascending. A multi-segment input row shares one alias.
  std::vector<EdgeId> find_edges_by_alias(std::int64_t alias) const;

  /// Sorted label ids.
  std::span<const LabelId> node_labels(NodeId v) const;
  std::span<const LabelId> edge_labels(EdgeId e) const;
  std::vector<std::string> node_label_names(NodeId v) const;
  std::vector<std::string> edge_label_names(EdgeId e) const;
  const std::string& label_name(LabelId id) const { return labels_.at(id); }
  /// Dictionary id of `label`, if it was ever interned.
  std::optional<LabelId> find_label(std::string_view label) const;
  bool node_has_label(NodeId v, std::string_view label) const;

  const std::deque<NodeId>& recycled_nodes() const { return free_nodes_; }
  const std::deque<EdgeId>& recycled_edges() const { return free_edges_; }

  /// Live node ids in ascending order.
  std::vector<NodeId> nodes() const;
  /// Live edge ids in ascending order.
  std::vector<EdgeId> edges() const;

  // -- persistence ---------------------------------------------------------

  /// Versioned little-endian dump; `read(write(g))` re-dumps to identical bytes.
  void write(std::ostream& os) const;
  static Graph read(std::istream& is);

  static constexpr std::uint32_t kMagic = 0x474C5344;  // "DSLG" little-endian
  static constexpr std::uint32_t kVersion = 1;

 private:
  static int side_of(const EdgeLinks& l, NodeId v) { return l.node[0] == v ? 0 : 1; }

  void require_node(NodeId v) const;
  void require_edge(EdgeId e) const;
  LabelId intern_label(std::string_view label);
  void rebuild_indexes();
  void drop_alias(EdgeId e);

  // node table (index 0 is a permanently dead sentinel)
  std::vector<EdgeId> cached_;
  std::vector<std::uint8_t> node_live_;
  std::vector<std::vector<LabelId>> node_labels_;
  std::vector<Point> coords_;
  std::vector<std::uint8_t> has_coords_;
  std::vector<std::uint32_t> name_of_;  // kNoName when unset
  std::vector<std::int64_t> key_;
  std::vector<std::uint8_t> has_key_;

  // edge table (index 0 is a permanently dead sentinel)
  std::vector<EdgeLinks> links_;
  std::vector<double> weights_;
  std::vector<std::int8_t> directions_;
  std::vector<std::vector<LabelId>> edge_labels_;
  std::vector<std::int64_t> alias_;
  std::vector<std::uint8_t> has_alias_;

  std::deque<NodeId> free_nodes_;
  std::deque<EdgeId> free_edges_;

  std::vector<std::string> labels_;
  std::vector<std::string> names_;

  std::size_t live_nodes_ = 0;
  std::size_t live_edges_ = 0;

  // derived; rebuilt on load
  std::unordered_map<std::string, LabelId> label_index_;
  std::unordered_map<std::string, std::uint32_t> name_index_;
  std::vector<NodeId> name_owner_;
  std::unordered_map<std::int64_t, NodeId> key_index_;
  std::unordered_map<std::int64_t, std::vector<EdgeId>> alias_index_;

  static constexpr std::uint32_t kNoName = 0xFFFFFFFFu;
};

}  // namespace dlsgraph
