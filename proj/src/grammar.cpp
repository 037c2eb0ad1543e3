#include "dlsgraph/grammar.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "dlsgraph/wkt.hpp"

namespace dlsgraph {

namespace {

struct IdentifierInfo {
  Identifier id;
  std::string_view name;
  Component component;
};

constexpr std::array kIdentifiers = {
    IdentifierInfo{Identifier::kNodeId, "NODE_ID", Component::kNodes},
    IdentifierInfo{Identifier::kNodeX, "NODE_X", Component::kNodes},
    IdentifierInfo{Identifier::kNodeY, "NODE_Y", Component::kNodes},
    IdentifierInfo{Identifier::kNodeName, "NODE_NAME", Component::kNodes},
    IdentifierInfo{Identifier::kNodeWktPoint, "NODE_WKTPOINT", Component::kNodes},
    IdentifierInfo{Identifier::kNodeLabel, "NODE_LABEL", Component::kNodes},
    IdentifierInfo{Identifier::kNodePartitionBoundary, "NODE_PARTITION_BOUNDARY", Component::kNodes},
    IdentifierInfo{Identifier::kEdgeId, "EDGE_ID", Component::kEdges},
    IdentifierInfo{Identifier::kEdgeNode1Id, "EDGE_NODE1_ID", Component::kEdges},
    IdentifierInfo{Identifier::kEdgeNode2Id, "EDGE_NODE2_ID", Component::kEdges},
    IdentifierInfo{Identifier::kEdgeNode1Name, "EDGE_NODE1_NAME", Component::kEdges},
    IdentifierInfo{Identifier::kEdgeNode2Name, "EDGE_NODE2_NAME", Component::kEdges},
    IdentifierInfo{Identifier::kEdgeNode1WktPoint, "EDGE_NODE1_WKTPOINT", Component::kEdges},
    IdentifierInfo{Identifier::kEdgeNode2WktPoint, "EDGE_NODE2_WKTPOINT", Component::kEdges},
    IdentifierInfo{Identifier::kEdgeWktLine, "EDGE_WKTLINE", Component::kEdges},
    IdentifierInfo{Identifier::kEdgeDirection, "EDGE_DIRECTION", Component::kEdges},
    IdentifierInfo{Identifier::kEdgeLabel, "EDGE_LABEL", Component::kEdges},
    IdentifierInfo{Identifier::kEdgeWeightValueSpecified, "EDGE_WEIGHT_VALUESPECIFIED", Component::kEdges},
    IdentifierInfo{Identifier::kEdgePartition, "EDGE_PARTITION", Component::kEdges},
    IdentifierInfo{Identifier::kWeightsEdgeId, "WEIGHTS_EDGE_ID", Component::kWeights},
    IdentifierInfo{Identifier::kWeightsValueSpecified, "WEIGHTS_VALUESPECIFIED", Component::kWeights},
    IdentifierInfo{Identifier::kRestrictionsNodeId, "RESTRICTIONS_NODE_ID", Component::kRestrictions},
    IdentifierInfo{Identifier::kRestrictionsEdgeId, "RESTRICTIONS_EDGE_ID", Component::kRestrictions},
    IdentifierInfo{Identifier::kRestrictionsOnOffCompassed, "RESTRICTIONS_ONOFFCOMPASSED",
                   Component::kRestrictions},
};

const IdentifierInfo& info(Identifier id) {
  for (const auto& i : kIdentifiers) {
    if (i.id == id) return i;
  }
  throw GrammarError("unregistered identifier");
}

// Optional on top of every edge combination.
constexpr std::array kEdgeExtras = {Identifier::kEdgeWeightValueSpecified, Identifier::kEdgePartition,
                                    Identifier::kEdgeLabel};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string join(const std::vector<Identifier>& ids) {
  std::string out;
  for (auto id : ids) {
    if (!out.empty()) out += ", ";
    out += identifier_name(id);
  }
  return out;
}

}  // namespace

std::string_view identifier_name(Identifier id) { return info(id).name; }

Component component_of(Identifier id) { return info(id).component; }

std::optional<Identifier> parse_identifier(std::string_view name) {
  for (const auto& i : kIdentifiers) {
    if (i.name == name) return i.id;
  }
  return std::nullopt;
}

std::vector<IdentifierBinding> parse_bindings(std::string_view text) {
  std::vector<std::string> parts;
  std::string current;
  bool in_quote = false;
  for (char c : text) {
    if (c == '\'') in_quote = !in_quote;
    if (c == ',' && !in_quote) {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (in_quote) throw GrammarError("unterminated quote in identifier list");
  parts.push_back(current);

  std::vector<IdentifierBinding> out;
  for (const auto& part : parts) {
    const std::string_view item = trim(part);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw GrammarError("binding '" + std::string(item) + "' must look like IDENTIFIER=column");
    }
    const std::string_view name = trim(item.substr(0, eq));
    std::string_view value = trim(item.substr(eq + 1));
    const auto id = parse_identifier(name);
    if (!id) throw GrammarError("unknown identifier " + std::string(name));
    IdentifierBinding b{*id, {}, false};
    if (value.size() >= 2 && value.front() == '\'' && value.back() == '\'') {
      b.constant = true;
      value = value.substr(1, value.size() - 2);
    } else if (value.empty()) {
      throw GrammarError("identifier " + std::string(name) + " has no column");
    }
    b.column = std::string(value);
    out.push_back(std::move(b));
  }
  return out;
}

const std::vector<std::vector<Identifier>>& edge_combinations() {
  using I = Identifier;
  static const std::vector<std::vector<Identifier>> rows = {
      {I::kEdgeId, I::kEdgeNode1Id, I::kEdgeNode2Id},
      {I::kEdgeId, I::kEdgeNode1Id, I::kEdgeNode2Id, I::kEdgeDirection},
      {I::kEdgeId, I::kEdgeNode1Name, I::kEdgeNode2Name},
      {I::kEdgeId, I::kEdgeNode1WktPoint, I::kEdgeNode2WktPoint},
      {I::kEdgeId, I::kEdgeWktLine},
      {I::kEdgeId, I::kEdgeWktLine, I::kEdgeDirection},
      {I::kEdgeNode1Id, I::kEdgeNode2Id},
      {I::kEdgeNode1Name, I::kEdgeNode2Name},
      {I::kEdgeNode1WktPoint, I::kEdgeNode2WktPoint},
      {I::kEdgeWktLine},
      {I::kEdgeWktLine, I::kEdgeDirection},
  };
  return rows;
}

NormalizedRequest validate_request(const GraphRequest& request) {
  using I = Identifier;
  if (!(request.merge_tolerance >= 0.0) || !std::isfinite(request.merge_tolerance)) {
    throw GrammarError("merge_tolerance must be a finite value >= 0");
  }
  NormalizedRequest out;
  out.request = request;
  for (const auto& b : request.bindings) {
    switch (component_of(b.identifier)) {
      case Component::kWeights:
        throw GrammarError(std::string(identifier_name(b.identifier)) +
                           ": the WEIGHTS component is not accepted when creating a graph; bind "
                           "EDGE_WEIGHT_VALUESPECIFIED instead");
      case Component::kRestrictions:
        throw GrammarError(std::string(identifier_name(b.identifier)) +
                           ": RESTRICTIONS apply at query time (query --restrict)");
      case Component::kNodes:
      case Component::kEdges: {
        auto& target = component_of(b.identifier) == Component::kNodes ? out.node_bindings : out.edge_bindings;
        if (!target.emplace(b.identifier, b).second) {
          throw GrammarError("identifier " + std::string(identifier_name(b.identifier)) + " bound twice");
        }
        break;
      }
    }
  }

  // EDGES
  if (out.edge_bindings.empty()) throw GrammarError("no EDGES identifiers bound");
  std::vector<I> core;
  for (const auto& [id, b] : out.edge_bindings) {
    if (std::find(kEdgeExtras.begin(), kEdgeExtras.end(), id) == kEdgeExtras.end()) core.push_back(id);
  }
  std::sort(core.begin(), core.end());
  const std::vector<I>* match = nullptr;
  const std::vector<I>* nearest = nullptr;
  std::size_t best_distance = std::numeric_limits<std::size_t>::max();
  for (const auto& row : edge_combinations()) {
    std::vector<I> sorted = row;
    std::sort(sorted.begin(), sorted.end());
    if (sorted == core) {
      match = &row;
      break;
    }
    std::vector<I> diff;
    std::set_symmetric_difference(sorted.begin(), sorted.end(), core.begin(), core.end(), std::back_inserter(diff));
    if (diff.size() < best_distance) {
      best_distance = diff.size();
      nearest = &row;
    }
  }
  if (match == nullptr) {
    throw GrammarError("EDGES identifiers {" + join(core) + "} form no registered combination; nearest is {" +
                       join(*nearest) + "}");
  }
  const auto has_edge = [&](I id) { return out.edge_bindings.count(id) != 0; };
  if (has_edge(I::kEdgeNode1Id)) {
    out.edge_form = EdgeForm::kIds;
  } else if (has_edge(I::kEdgeNode1Name)) {
    out.edge_form = EdgeForm::kNames;
  } else if (has_edge(I::kEdgeNode1WktPoint)) {
    out.edge_form = EdgeForm::kWktPoints;
  } else {
    out.edge_form = EdgeForm::kWktLine;
  }

  // NODES
  if (!out.node_bindings.empty()) {
    const auto has_node = [&](I id) { return out.node_bindings.count(id) != 0; };
    const bool by_id = has_node(I::kNodeId);
    const bool by_name = has_node(I::kNodeName);
    if (by_id == by_name) {
      throw GrammarError(by_id ? "NODES: bind NODE_ID or NODE_NAME, not both"
                               : "NODES identifiers need NODE_ID or NODE_NAME");
    }
    const bool xy = has_node(I::kNodeX) || has_node(I::kNodeY);
    if (xy && !(has_node(I::kNodeX) && has_node(I::kNodeY))) {
      throw GrammarError("NODES: NODE_X and NODE_Y must be bound together");
    }
    if (xy && has_node(I::kNodeWktPoint)) {
      throw GrammarError("NODES: NODE_WKTPOINT and NODE_X/NODE_Y are ambiguous together");
    }
    if (by_name && (xy || has_node(I::kNodeWktPoint))) {
      throw GrammarError("NODES: coordinates combine with NODE_ID only; nearest is {NODE_ID, NODE_X, NODE_Y}");
    }
    out.node_form = by_id ? NodeForm::kIds : NodeForm::kNames;
    const bool compatible = by_id ? out.edge_form != EdgeForm::kNames : out.edge_form == EdgeForm::kNames;
    if (!compatible) {
      throw GrammarError(by_id ? "NODE_ID cannot be joined with EDGE_NODE1_NAME/EDGE_NODE2_NAME edges"
                               : "NODE_NAME only joins EDGE_NODE1_NAME/EDGE_NODE2_NAME edges");
    }
  }
  return out;
}

// -- merge index --------------------------------------------------------------

NodeMergeIndex::NodeMergeIndex(double tolerance) : tolerance_(tolerance) {
  if (!(tolerance >= 0.0) || !std::isfinite(tolerance)) {
    throw GrammarError("merge_tolerance must be a finite value >= 0");
  }
}

std::size_t NodeMergeIndex::CellHash::operator()(const Cell& c) const noexcept {
  const auto h = static_cast<std::uint64_t>(c.i) * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint64_t>(c.j);
  return static_cast<std::size_t>(h ^ (h >> 29));
}

NodeMergeIndex::Cell NodeMergeIndex::cell_of(Point p) const {
  if (tolerance_ == 0.0) {
    // exact matching: the cell is the bit pattern itself (-0.0 folded into 0.0)
    return {std::bit_cast<std::int64_t>(p.x + 0.0), std::bit_cast<std::int64_t>(p.y + 0.0)};
  }
  const double fx = std::floor(p.x / tolerance_);
  const double fy = std::floor(p.y / tolerance_);
  constexpr double kLimit = 4.0e18;
  if (std::abs(fx) > kLimit || std::abs(fy) > kLimit) {
    throw DataError("coordinate too large for merge tolerance " + format_double(tolerance_));
  }
  return {static_cast<std::int64_t>(fx), static_cast<std::int64_t>(fy)};
}

NodeId NodeMergeIndex::find(Point p) const {
  const Cell c = cell_of(p);
  NodeId best = kNull;
  double best_dist = std::numeric_limits<double>::infinity();
  const int reach = tolerance_ == 0.0 ? 0 : 1;
  for (int di = -reach; di <= reach; ++di) {
    for (int dj = -reach; dj <= reach; ++dj) {
      auto it = bins_.find(Cell{c.i + di, c.j + dj});
      if (it == bins_.end()) continue;
      for (const Entry& e : it->second) {
        const double d = std::hypot(e.at.x - p.x, e.at.y - p.y);
        if (d > tolerance_) continue;
        if (d < best_dist || (d == best_dist && e.node < best)) {
          best = e.node;
          best_dist = d;
        }
      }
    }
  }
  return best;
}

void NodeMergeIndex::add(NodeId v, Point p) { bins_[cell_of(p)].push_back({v, p}); }

NodeId NodeMergeIndex::merge(Graph& graph, Point p, bool* merged) {
  if (const NodeId hit = find(p); hit != kNull) {
    if (merged) *merged = true;
    return hit;
  }
  if (merged) *merged = false;
  const NodeId v = graph.insert_node(NodeInit{.coords = p});
  add(v, p);
  return v;
}

// -- builder ------------------------------------------------------------------

namespace {

using Accessor = std::function<std::string_view(const std::vector<std::string>&)>;

Accessor accessor(const std::map<Identifier, IdentifierBinding>& bindings, Identifier id, const CsvTable& table,
                  std::string_view table_name) {
  auto it = bindings.find(id);
  if (it == bindings.end()) return nullptr;
  const IdentifierBinding& b = it->second;
  if (b.constant) {
    return [value = b.column](const std::vector<std::string>&) -> std::string_view { return value; };
  }
  const auto col = table.column(b.column);
  if (!col) {
    throw GrammarError(std::string(identifier_name(id)) + ": column '" + b.column + "' not found in " +
                       std::string(table_name));
  }
  return [i = *col](const std::vector<std::string>& row) -> std::string_view { return row[i]; };
}

std::int64_t parse_int(std::string_view text, std::string_view what) {
  text = trim(text);
  std::int64_t value = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty()) {
    throw DataError(std::string(what) + ": '" + std::string(text) + "' is not an integer");
  }
  return value;
}

double parse_real(std::string_view text, std::string_view what) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty() || !std::isfinite(value)) {
    throw DataError(std::string(what) + ": '" + std::string(text) + "' is not a finite number");
  }
  return value;
}

std::vector<std::string> split_labels(std::string_view text) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<std::int64_t> split_ints(std::string_view text, std::string_view what) {
  std::vector<std::int64_t> out;
  std::string token;
  auto flush = [&] {
    if (!token.empty()) out.push_back(parse_int(token, what));
    token.clear();
  };
  for (char c : text) {
    if (c == ';' || c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();
  return out;
}

class Builder {
 public:
  Builder(const NormalizedRequest& req, BuildResult& out) : req_(req), out_(out), index_(req.request.merge_tolerance) {}

  void nodes(const CsvTable& table) {
    using I = Identifier;
    const auto& nb = req_.node_bindings;
    const auto id = accessor(nb, I::kNodeId, table, "node table");
    const auto name = accessor(nb, I::kNodeName, table, "node table");
    const auto x = accessor(nb, I::kNodeX, table, "node table");
    const auto y = accessor(nb, I::kNodeY, table, "node table");
    const auto wkt = accessor(nb, I::kNodeWktPoint, table, "node table");
    const auto label = accessor(nb, I::kNodeLabel, table, "node table");
    const auto boundary = accessor(nb, I::kNodePartitionBoundary, table, "node table");

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      row_guard(r + 1, [&] {
        std::optional<Point> coords;
        // blank coordinate cells mean "no coordinates"
        if (x && !(trim(x(row)).empty() && trim(y(row)).empty())) {
          coords = Point{parse_real(x(row), "NODE_X"), parse_real(y(row), "NODE_Y")};
        }
        if (wkt && !trim(wkt(row)).empty()) coords = parse_wkt_point(wkt(row));
        const auto labels = label ? split_labels(label(row)) : std::vector<std::string>{};
        const auto workers = boundary ? split_ints(boundary(row), "NODE_PARTITION_BOUNDARY")
                                      : std::vector<std::int64_t>{};
        NodeId v;
        if (id) {
          const auto key = parse_int(id(row), "NODE_ID");
          v = out_.graph.find_by_key(key);
          if (v == kNull) v = out_.graph.insert_node(NodeInit{.key = key});
        } else {
          const std::string_view n = trim(name(row));
          if (n.empty()) throw DataError("NODE_NAME is empty");
          v = out_.graph.find_by_name(n);
          if (v == kNull) v = out_.graph.insert_node(NodeInit{.name = std::string(n)});
        }
        if (coords && !out_.graph.coords(v)) {
          out_.graph.set_coords(v, *coords);
          index_.add(v, *coords);
        }
        for (const auto& l : labels) out_.graph.add_node_label(v, l);
        if (boundary) {
          auto& list = out_.boundary[v];
          list.insert(list.end(), workers.begin(), workers.end());
          out_.boundary_row.emplace(v, r + 1);
        }
      });
    }
  }

  void edges(const CsvTable& table) {
    using I = Identifier;
    const auto& eb = req_.edge_bindings;
    const auto alias = accessor(eb, I::kEdgeId, table, "edge table");
    const auto id1 = accessor(eb, I::kEdgeNode1Id, table, "edge table");
    const auto id2 = accessor(eb, I::kEdgeNode2Id, table, "edge table");
    const auto name1 = accessor(eb, I::kEdgeNode1Name, table, "edge table");
    const auto name2 = accessor(eb, I::kEdgeNode2Name, table, "edge table");
    const auto pt1 = accessor(eb, I::kEdgeNode1WktPoint, table, "edge table");
    const auto pt2 = accessor(eb, I::kEdgeNode2WktPoint, table, "edge table");
    const auto line = accessor(eb, I::kEdgeWktLine, table, "edge table");
    const auto direction = accessor(eb, I::kEdgeDirection, table, "edge table");
    const auto label = accessor(eb, I::kEdgeLabel, table, "edge table");
    const auto weight = accessor(eb, I::kEdgeWeightValueSpecified, table, "edge table");
    const auto partition = accessor(eb, I::kEdgePartition, table, "edge table");

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      row_guard(r + 1, [&] {
        // parse everything before touching the graph so a bad row leaves no trace
        std::optional<std::int64_t> edge_alias;
        if (alias && !trim(alias(row)).empty()) edge_alias = parse_int(alias(row), "EDGE_ID");
        Direction dir = req_.request.directed_default ? Direction::kForward : Direction::kBoth;
        if (direction) {
          const auto d = parse_int(direction(row), "EDGE_DIRECTION");
          if (d < -1 || d > 1) throw DataError("EDGE_DIRECTION must be -1, 0 or 1");
          dir = static_cast<Direction>(d);
        }
        std::optional<double> given_weight;
        if (weight) {
          given_weight = parse_real(weight(row), "EDGE_WEIGHT_VALUESPECIFIED");
          if (*given_weight < 0.0) throw DataError("EDGE_WEIGHT_VALUESPECIFIED must be >= 0");
        }
        std::int64_t part = -1;
        if (partition) {
          part = parse_int(partition(row), "EDGE_PARTITION");
          if (part < 0) throw DataError("EDGE_PARTITION must be >= 0");
        }
        const auto labels = label ? split_labels(label(row)) : std::vector<std::string>{};

        std::vector<Segment> segments;
        switch (req_.edge_form) {
          case EdgeForm::kIds: {
            const auto k1 = parse_int(id1(row), "EDGE_NODE1_ID");
            const auto k2 = parse_int(id2(row), "EDGE_NODE2_ID");
            segments.push_back({node_by_key(k1), node_by_key(k2), given_weight.value_or(1.0)});
            break;
          }
          case EdgeForm::kNames: {
            const auto n1 = trim(name1(row));
            const auto n2 = trim(name2(row));
            if (n1.empty() || n2.empty()) throw DataError("edge node name is empty");
            segments.push_back({node_by_name(n1), node_by_name(n2), given_weight.value_or(1.0)});
            break;
          }
          case EdgeForm::kWktPoints: {
            const Point p1 = parse_wkt_point(pt1(row));
            const Point p2 = parse_wkt_point(pt2(row));
            const double len = std::hypot(p2.x - p1.x, p2.y - p1.y);
            const NodeId a = merge(p1);
            const NodeId b = merge(p2);
            if (a != b) segments.push_back({a, b, given_weight.value_or(len)});
            break;
          }
          case EdgeForm::kWktLine: {
            const auto points = parse_wkt_linestring(line(row));
            double total = 0.0;
            std::vector<double> lengths;
            for (std::size_t i = 0; i + 1 < points.size(); ++i) {
              lengths.push_back(std::hypot(points[i + 1].x - points[i].x, points[i + 1].y - points[i].y));
              total += lengths.back();
            }
            std::vector<NodeId> ids;
            for (const Point& p : points) ids.push_back(merge(p));
            for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
              if (ids[i] == ids[i + 1]) continue;
              const double w = given_weight ? *given_weight * (lengths[i] / total) : lengths[i];
              segments.push_back({ids[i], ids[i + 1], w});
            }
            break;
          }
        }
        for (const Segment& s : segments) {
          const EdgeId e = out_.graph.insert_edge(s.a, s.b, s.weight, dir);
          if (edge_alias) out_.graph.set_edge_alias(e, *edge_alias);
          for (const auto& l : labels) out_.graph.add_edge_label(e, l);
          if (out_.edge_partition.size() <= e) {
            out_.edge_partition.resize(e + 1, -1);
            out_.edge_row.resize(e + 1, 0);
          }
          out_.edge_partition[e] = part;
          out_.edge_row[e] = r + 1;
        }
      });
    }
  }

  void finish() {
    // when integer keys are in play, nodes created from geometry get fresh keys after the largest one
    const bool keyed = req_.node_form == NodeForm::kIds || req_.edge_form == EdgeForm::kIds;
    Graph& g = out_.graph;
    if (keyed) {
      std::int64_t next = 0;
      bool any = false;
      for (NodeId v : g.nodes()) {
        if (g.has_key(v)) {
          next = any ? std::max(next, g.key(v)) : g.key(v);
          any = true;
        }
      }
      next = any ? next + 1 : 1;
      for (NodeId v : g.nodes()) {
        if (!g.has_key(v)) g.set_key(v, next++);
      }
    }
    out_.edge_partition.resize(g.edge_capacity() + 1, -1);
    out_.edge_row.resize(g.edge_capacity() + 1, 0);
    out_.stats.nodes = g.node_count();
    out_.stats.edges = g.edge_count();
  }

 private:
  struct Segment {
    NodeId a;
    NodeId b;
    double weight;
  };

  template <class F>
  void row_guard(std::size_t row, F&& body) {
    ++out_.stats.rows;
    try {
      body();
    } catch (const DataError& e) {
      reject(DataError(e.what(), row));
    } catch (const ParseError& e) {
      reject(DataError(e.what(), row));
    } catch (const InvalidEntity& e) {
      reject(DataError(e.what(), row));
    }
  }

  void reject(DataError error) {
    ++out_.stats.rejected_rows;
    if (req_.request.strict) throw error;
    out_.diagnostics.push_back(std::move(error));
  }

  NodeId node_by_key(std::int64_t key) {
    NodeId v = out_.graph.find_by_key(key);
    return v != kNull ? v : out_.graph.insert_node(NodeInit{.key = key});
  }

  NodeId node_by_name(std::string_view name) {
    NodeId v = out_.graph.find_by_name(name);
    return v != kNull ? v : out_.graph.insert_node(NodeInit{.name = std::string(name)});
  }

  NodeId merge(Point p) {
    bool merged = false;
    const NodeId v = index_.merge(out_.graph, p, &merged);
    if (merged) ++out_.stats.merged_nodes;
    return v;
  }

  const NormalizedRequest& req_;
  BuildResult& out_;
  NodeMergeIndex index_;
};

}  // namespace

BuildResult build_graph(const NormalizedRequest& request, const CsvTable& edges, const CsvTable* nodes) {
  if (request.node_form != NodeForm::kNone && nodes == nullptr) {
    throw GrammarError("NODES identifiers are bound but no node table was given");
  }
  if (request.node_form == NodeForm::kNone && nodes != nullptr) {
    throw GrammarError("a node table was given but no NODES identifiers are bound");
  }
  BuildResult out;
  Builder builder(request, out);
  if (nodes) builder.nodes(*nodes);
  builder.edges(edges);
  builder.finish();
  return out;
}

}  // namespace dlsgraph
