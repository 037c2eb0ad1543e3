#include "dlsgraph/topology.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "dlsgraph/detail/binary_io.hpp"

namespace dlsgraph {

Graph::Graph()
    : cached_(1, kNull),
      node_live_(1, 0),
      node_labels_(1),
      coords_(1),
      has_coords_(1, 0),
      name_of_(1, kNoName),
      key_(1, 0),
      has_key_(1, 0),
      links_(1),
      weights_(1, 0.0),
      directions_(1, 0),
      edge_labels_(1),
      alias_(1, 0),
      has_alias_(1, 0) {}

void Graph::require_node(NodeId v) const {
  if (!node_live(v)) throw InvalidEntity("node " + std::to_string(v) + " is not live");
}

void Graph::require_edge(EdgeId e) const {
  if (!edge_live(e)) throw InvalidEntity("edge " + std::to_string(e) + " is not live");
}

NodeId Graph::insert_node(const NodeInit& init) {
  NodeId v;
  if (!free_nodes_.empty()) {
    v = free_nodes_.front();
    free_nodes_.pop_front();
  } else {
    v = static_cast<NodeId>(cached_.size());
    cached_.push_back(kNull);
    node_live_.push_back(0);
    node_labels_.emplace_back();
    coords_.emplace_back();
    has_coords_.push_back(0);
    name_of_.push_back(kNoName);
    key_.push_back(0);
    has_key_.push_back(0);
  }
  cached_[v] = kNull;
  node_live_[v] = 1;
  ++live_nodes_;
  for (const auto& label : init.labels) add_node_label(v, label);
  if (init.coords) set_coords(v, *init.coords);
  if (init.name) set_name(v, *init.name);
  if (init.key) set_key(v, *init.key);
  return v;
}

EdgeId Graph::insert_edge(NodeId a, NodeId b, double weight, Direction dir) {
  require_node(a);
  require_node(b);
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw InvalidEntity("edge weight must be finite and non-negative");
  }
  EdgeId e;
  if (!free_edges_.empty()) {
    e = free_edges_.front();
    free_edges_.pop_front();
  } else {
    e = static_cast<EdgeId>(links_.size());
    links_.emplace_back();
    weights_.push_back(0.0);
    directions_.push_back(0);
    edge_labels_.emplace_back();
    alias_.push_back(0);
    has_alias_.push_back(0);
  }
  EdgeLinks& rec = links_[e];
  rec = EdgeLinks{};
  rec.node[0] = a;
  rec.node[1] = b;
  const int sides = a == b ? 1 : 2;
  for (int s = 0; s < sides; ++s) {
    const NodeId v = rec.node[s];
    const EdgeId head = cached_[v];
    rec.prev[s] = head;
    if (head != kNull) {
      EdgeLinks& h = links_[head];
      h.next[side_of(h, v)] = e;
    }
    cached_[v] = e;
  }
  weights_[e] = weight;
  directions_[e] = static_cast<std::int8_t>(dir);
  ++live_edges_;
  return e;
}

void Graph::delete_edge(EdgeId e) {
  require_edge(e);
  const EdgeLinks rec = links_[e];
  const int sides = rec.node[0] == rec.node[1] ? 1 : 2;
  for (int s = 0; s < sides; ++s) {
    const NodeId v = rec.node[s];
    const EdgeId p = rec.prev[s];
    const EdgeId n = rec.next[s];
    if (p != kNull) links_[p].next[side_of(links_[p], v)] = n;
    if (n != kNull) links_[n].prev[side_of(links_[n], v)] = p;
    if (cached_[v] == e) cached_[v] = p != kNull ? p : n;
  }
  links_[e] = EdgeLinks{};
  weights_[e] = 0.0;
  directions_[e] = 0;
  edge_labels_[e].clear();
  if (has_alias_[e]) {
    drop_alias(e);
    has_alias_[e] = 0;
    alias_[e] = 0;
  }
  free_edges_.push_back(e);
  --live_edges_;
}

std::vector<EdgeId> Graph::delete_node(NodeId v) {
  require_node(v);
  std::vector<EdgeId> removed = adjacent_edges(v);
  for (EdgeId e : removed) delete_edge(e);
  node_live_[v] = 0;
  cached_[v] = kNull;
  node_labels_[v].clear();
  coords_[v] = Point{};
  has_coords_[v] = 0;
  if (name_of_[v] != kNoName) {
    name_owner_[name_of_[v]] = kNull;
    name_of_[v] = kNoName;
  }
  if (has_key_[v]) {
    key_index_.erase(key_[v]);
    has_key_[v] = 0;
    key_[v] = 0;
  }
  free_nodes_.push_back(v);
  --live_nodes_;
  return removed;
}

void Graph::set_weight(EdgeId e, double weight) {
  require_edge(e);
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw InvalidEntity("edge weight must be finite and non-negative");
  }
  weights_[e] = weight;
}

void Graph::set_direction(EdgeId e, Direction dir) {
  require_edge(e);
  directions_[e] = static_cast<std::int8_t>(dir);
}

void Graph::set_coords(NodeId v, Point p) {
  require_node(v);
  coords_[v] = p;
  has_coords_[v] = 1;
}

void Graph::set_name(NodeId v, std::string_view name) {
  require_node(v);
  std::string key(name);
  auto it = name_index_.find(key);
  std::uint32_t id;
  if (it == name_index_.end()) {
    id = static_cast<std::uint32_t>(names_.size());
    names_.push_back(key);
    name_owner_.push_back(kNull);
    name_index_.emplace(std::move(key), id);
  } else {
    id = it->second;
    if (name_owner_[id] != kNull && name_owner_[id] != v) {
      throw InvalidEntity("node name '" + names_[id] + "' already in use");
    }
  }
  if (name_of_[v] != kNoName) name_owner_[name_of_[v]] = kNull;
  name_of_[v] = id;
  name_owner_[id] = v;
}

void Graph::set_key(NodeId v, std::int64_t key) {
  require_node(v);
  auto it = key_index_.find(key);
  if (it != key_index_.end() && it->second != v) {
    throw InvalidEntity("node key " + std::to_string(key) + " already in use");
  }
  if (has_key_[v]) key_index_.erase(key_[v]);
  key_[v] = key;
  has_key_[v] = 1;
  key_index_[key] = v;
}

LabelId Graph::intern_label(std::string_view label) {
  std::string key(label);
  auto it = label_index_.find(key);
  if (it != label_index_.end()) return it->second;
  const auto id = static_cast<LabelId>(labels_.size());
  labels_.push_back(key);
  label_index_.emplace(std::move(key), id);
  return id;
}

namespace {
void insert_sorted(std::vector<LabelId>& set, LabelId id) {
  auto it = std::lower_bound(set.begin(), set.end(), id);
  if (it == set.end() || *it != id) set.insert(it, id);
}
}  // namespace

void Graph::add_node_label(NodeId v, std::string_view label) {
  require_node(v);
  insert_sorted(node_labels_[v], intern_label(label));
}

void Graph::add_edge_label(EdgeId e, std::string_view label) {
  require_edge(e);
  insert_sorted(edge_labels_[e], intern_label(label));
}

void Graph::set_edge_alias(EdgeId e, std::int64_t alias) {
  require_edge(e);
  if (has_alias_[e]) drop_alias(e);
  alias_[e] = alias;
  has_alias_[e] = 1;
  auto& ids = alias_index_[alias];
  ids.insert(std::lower_bound(ids.begin(), ids.end(), e), e);
}

void Graph::drop_alias(EdgeId e) {
  auto it = alias_index_.find(alias_[e]);
  if (it == alias_index_.end()) return;
  std::erase(it->second, e);
  if (it->second.empty()) alias_index_.erase(it);
}

std::vector<EdgeId> Graph::adjacent_edges(NodeId v) const {
  require_node(v);
  std::vector<EdgeId> out;
  for_each_incident(v, [&](EdgeId e) { out.push_back(e); });
  return out;
}

std::vector<Neighbor> Graph::neighbors(NodeId v) const {
  require_node(v);
  std::vector<Neighbor> out;
  for_each_incident(v, [&](EdgeId e) {
    const EdgeLinks& l = links_[e];
    out.push_back({l.node[0] == v ? l.node[1] : l.node[0], e, weights_[e]});
  });
  return out;
}

Csr Graph::to_csr() const {
  Csr csr;
  const NodeId cap = node_capacity();
  csr.offsets.assign(static_cast<std::size_t>(cap) + 1, 0);
  for (NodeId v = 1; v <= cap; ++v) {
    std::size_t degree = 0;
    if (node_live_[v]) for_each_incident(v, [&](EdgeId) { ++degree; });
    csr.offsets[v] = csr.offsets[v - 1] + degree;
  }
  csr.targets.resize(csr.offsets.back());
  csr.weights.resize(csr.offsets.back());
  csr.edges.resize(csr.offsets.back());
  for (NodeId v = 1; v <= cap; ++v) {
    if (!node_live_[v]) continue;
    std::size_t at = csr.offsets[v - 1];
    for_each_incident(v, [&](EdgeId e) {
      const EdgeLinks& l = links_[e];
      csr.targets[at] = l.node[0] == v ? l.node[1] : l.node[0];
      csr.weights[at] = weights_[e];
      csr.edges[at] = e;
      ++at;
    });
  }
  return csr;
}

const EdgeLinks& Graph::links(EdgeId e) const {
  if (e == kNull || e >= links_.size()) throw InvalidEntity("edge " + std::to_string(e) + " out of range");
  return links_[e];
}

EdgeId Graph::cached_edge(NodeId v) const {
  require_node(v);
  return cached_[v];
}

NodeId Graph::opposite(EdgeId e, NodeId v) const {
  require_edge(e);
  const EdgeLinks& l = links_[e];
  if (l.node[0] == v) return l.node[1];
  if (l.node[1] == v) return l.node[0];
  throw InvalidEntity("node " + std::to_string(v) + " is not an end of edge " + std::to_string(e));
}

double Graph::weight(EdgeId e) const {
  require_edge(e);
  return weights_[e];
}

Direction Graph::direction(EdgeId e) const {
  require_edge(e);
  return static_cast<Direction>(directions_[e]);
}

bool Graph::traversable_from(EdgeId e, NodeId from) const {
  const EdgeLinks& l = links_[e];
  switch (static_cast<Direction>(directions_[e])) {
    case Direction::kBoth:
      return true;
    case Direction::kForward:
      return l.node[0] == from;
    case Direction::kBackward:
      return l.node[1] == from;
  }
  return false;
}

std::optional<Point> Graph::coords(NodeId v) const {
  require_node(v);
  if (!has_coords_[v]) return std::nullopt;
  return coords_[v];
}

std::optional<std::string_view> Graph::name(NodeId v) const {
  require_node(v);
  if (name_of_[v] == kNoName) return std::nullopt;
  return std::string_view(names_[name_of_[v]]);
}

std::int64_t Graph::key(NodeId v) const {
  require_node(v);
  return has_key_[v] ? key_[v] : static_cast<std::int64_t>(v);
}

bool Graph::has_key(NodeId v) const {
  require_node(v);
  return has_key_[v] != 0;
}

NodeId Graph::find_by_name(std::string_view name) const {
  auto it = name_index_.find(std::string(name));
  return it == name_index_.end() ? kNull : name_owner_[it->second];
}

NodeId Graph::find_by_key(std::int64_t key) const {
  auto it = key_index_.find(key);
  return it == key_index_.end() ? kNull : it->second;
}

std::optional<std::int64_t> Graph::edge_alias(EdgeId e) const {
  require_edge(e);
  if (!has_alias_[e]) return std::nullopt;
  return alias_[e];
}

std::vector<EdgeId> Graph::find_edges_by_alias(std::int64_t alias) const {
  auto it = alias_index_.find(alias);
  return it == alias_index_.end() ? std::vector<EdgeId>{} : it->second;
}

std::span<const LabelId> Graph::node_labels(NodeId v) const {
  require_node(v);
  return node_labels_[v];
}

std::span<const LabelId> Graph::edge_labels(EdgeId e) const {
  require_edge(e);
  return edge_labels_[e];
}

std::vector<std::string> Graph::node_label_names(NodeId v) const {
  std::vector<std::string> out;
  for (LabelId id : node_labels(v)) out.push_back(labels_[id]);
  return out;
}

std::vector<std::string> Graph::edge_label_names(EdgeId e) const {
  std::vector<std::string> out;
  for (LabelId id : edge_labels(e)) out.push_back(labels_[id]);
  return out;
}

std::optional<LabelId> Graph::find_label(std::string_view label) const {
  auto it = label_index_.find(std::string(label));
  if (it == label_index_.end()) return std::nullopt;
  return it->second;
}

bool Graph::node_has_label(NodeId v, std::string_view label) const {
  const auto id = find_label(label);
  if (!id) return false;
  const auto set = node_labels(v);
  return std::binary_search(set.begin(), set.end(), *id);
}

std::vector<NodeId> Graph::nodes() const {
  std::vector<NodeId> out;
  out.reserve(live_nodes_);
  for (NodeId v = 1; v < node_live_.size(); ++v) {
    if (node_live_[v]) out.push_back(v);
  }
  return out;
}

std::vector<EdgeId> Graph::edges() const {
  std::vector<EdgeId> out;
  out.reserve(live_edges_);
  for (EdgeId e = 1; e < links_.size(); ++e) {
    if (links_[e].node[0] != kNull) out.push_back(e);
  }
  return out;
}

// -- persistence --------------------------------------------------------------

namespace {
void write_sets(detail::BinaryWriter& w, const std::vector<std::vector<LabelId>>& sets) {
  w.pod<std::uint64_t>(sets.size());
  for (const auto& s : sets) w.vec(s);
}

std::vector<std::vector<LabelId>> read_sets(detail::BinaryReader& r) {
  std::vector<std::vector<LabelId>> sets(r.length());
  for (auto& s : sets) s = r.vec<LabelId>();
  return sets;
}
}  // namespace

void Graph::write(std::ostream& os) const {
  detail::BinaryWriter w(os);
  w.pod(kMagic);
  w.pod(kVersion);
  w.pod<std::uint32_t>(node_capacity());
  w.pod<std::uint32_t>(edge_capacity());

  w.vec(cached_);
  w.vec(node_live_);
  write_sets(w, node_labels_);
  w.vec(coords_);
  w.vec(has_coords_);
  w.vec(name_of_);
  w.vec(key_);
  w.vec(has_key_);

  w.vec(links_);
  w.vec(directions_);
  write_sets(w, edge_labels_);
  w.vec(alias_);
  w.vec(has_alias_);

  w.deque(free_nodes_);
  w.deque(free_edges_);

  w.pod<std::uint64_t>(labels_.size());
  for (const auto& s : labels_) w.str(s);
  w.pod<std::uint64_t>(names_.size());
  for (const auto& s : names_) w.str(s);

  w.vec(weights_);
  if (!w.ok()) throw Error("persist: write failed");
}

Graph Graph::read(std::istream& is) {
  detail::BinaryReader r(is);
  if (r.pod<std::uint32_t>() != kMagic) throw Error("persist: bad magic, not a graph dump");
  const auto version = r.pod<std::uint32_t>();
  if (version != kVersion) throw Error("persist: unsupported graph dump version " + std::to_string(version));
  const auto node_cap = r.pod<std::uint32_t>();
  const auto edge_cap = r.pod<std::uint32_t>();

  Graph g;
  g.cached_ = r.vec<EdgeId>();
  g.node_live_ = r.vec<std::uint8_t>();
  g.node_labels_ = read_sets(r);
  g.coords_ = r.vec<Point>();
  g.has_coords_ = r.vec<std::uint8_t>();
  g.name_of_ = r.vec<std::uint32_t>();
  g.key_ = r.vec<std::int64_t>();
  g.has_key_ = r.vec<std::uint8_t>();

  g.links_ = r.vec<EdgeLinks>();
  g.directions_ = r.vec<std::int8_t>();
  g.edge_labels_ = read_sets(r);
  g.alias_ = r.vec<std::int64_t>();
  g.has_alias_ = r.vec<std::uint8_t>();

  g.free_nodes_ = r.deque<NodeId>();
  g.free_edges_ = r.deque<EdgeId>();

  g.labels_.resize(r.length());
  for (auto& s : g.labels_) s = r.str();
  g.names_.resize(r.length());
  for (auto& s : g.names_) s = r.str();

  g.weights_ = r.vec<double>();

  const std::size_t n = std::size_t{node_cap} + 1;
  const std::size_t m = std::size_t{edge_cap} + 1;
  const bool sizes_ok = g.cached_.size() == n && g.node_live_.size() == n && g.node_labels_.size() == n &&
                        g.coords_.size() == n && g.has_coords_.size() == n && g.name_of_.size() == n &&
                        g.key_.size() == n && g.has_key_.size() == n && g.links_.size() == m &&
                        g.directions_.size() == m && g.edge_labels_.size() == m && g.alias_.size() == m &&
                        g.has_alias_.size() == m && g.weights_.size() == m;
  if (!sizes_ok) throw Error("persist: section sizes disagree with header capacities");
  g.rebuild_indexes();
  return g;
}

void Graph::rebuild_indexes() {
  live_nodes_ = 0;
  live_edges_ = 0;
  for (NodeId v = 1; v < node_live_.size(); ++v) live_nodes_ += node_live_[v] ? 1 : 0;
  for (EdgeId e = 1; e < links_.size(); ++e) live_edges_ += links_[e].node[0] != kNull ? 1 : 0;

  label_index_.clear();
  for (LabelId i = 0; i < labels_.size(); ++i) label_index_.emplace(labels_[i], i);
  name_index_.clear();
  for (std::uint32_t i = 0; i < names_.size(); ++i) name_index_.emplace(names_[i], i);
  name_owner_.assign(names_.size(), kNull);
  key_index_.clear();
  for (NodeId v = 1; v < node_live_.size(); ++v) {
    if (!node_live_[v]) continue;
    if (name_of_[v] != kNoName) {
      if (name_of_[v] >= names_.size()) throw Error("persist: name index out of range");
      name_owner_[name_of_[v]] = v;
    }
    if (has_key_[v]) key_index_[key_[v]] = v;
  }
  alias_index_.clear();
  for (EdgeId e = 1; e < links_.size(); ++e) {
    if (links_[e].node[0] != kNull && has_alias_[e]) alias_index_[alias_[e]].push_back(e);
  }
}

}  // namespace dlsgraph
