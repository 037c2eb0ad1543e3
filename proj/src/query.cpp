#include "dlsgraph/query.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace dlsgraph {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> as_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || std::isnan(v)) return std::nullopt;
  return v;
}

template <class T>
bool compare(const T& a, const T& b, Comparator op) {
  switch (op) {
    case Comparator::kLess: return a < b;
    case Comparator::kLessEqual: return a <= b;
    case Comparator::kEqual: return a == b;
    case Comparator::kNotEqual: return a != b;
    case Comparator::kGreaterEqual: return a >= b;
    case Comparator::kGreater: return a > b;
  }
  return false;
}

}  // namespace

std::vector<NodeId> NodeSelector::resolve(const Graph& graph) const {
  std::vector<NodeId> out;
  if (label) {
    for (NodeId v : graph.nodes()) {
      if (graph.node_has_label(v, *label)) out.push_back(v);
    }
    return out;
  }
  for (NodeId v : nodes) {
    if (!graph.node_live(v)) throw InvalidEntity("selector names unknown node " + std::to_string(v));
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RestrictionPredicate RestrictionPredicate::parse(std::string_view text) {
  RestrictionPredicate p;
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw DataError("restriction '" + std::string(text) + "' needs a node: or edge: scope");
  const auto scope = trim(text.substr(0, colon));
  if (scope == "node") {
    p.scope = Scope::kNode;
  } else if (scope == "edge") {
    p.scope = Scope::kEdge;
  } else {
    throw DataError("restriction scope must be node or edge, got '" + std::string(scope) + "'");
  }
  const auto rest = text.substr(colon + 1);
  // longest operators first
  static constexpr std::pair<std::string_view, Comparator> kOps[] = {
      {"<=", Comparator::kLessEqual},  {">=", Comparator::kGreaterEqual}, {"!=", Comparator::kNotEqual},
      {"<>", Comparator::kNotEqual},   {"==", Comparator::kEqual},        {"≤", Comparator::kLessEqual},
      {"≥", Comparator::kGreaterEqual}, {"≠", Comparator::kNotEqual}, {"<", Comparator::kLess},
      {">", Comparator::kGreater},     {"=", Comparator::kEqual}};
  std::size_t at = std::string_view::npos, len = 0;
  for (const auto& [token, op] : kOps) {
    const auto pos = rest.find(token);
    if (pos != std::string_view::npos && (pos < at || (pos == at && token.size() > len))) {
      at = pos;
      len = token.size();
      p.op = op;
    }
  }
  if (at == std::string_view::npos) throw DataError("restriction '" + std::string(text) + "' has no comparator");
  p.attribute = std::string(trim(rest.substr(0, at)));
  p.value = std::string(trim(rest.substr(at + len)));
  if (p.value.size() >= 2 && (p.value.front() == '\'' || p.value.front() == '"') && p.value.back() == p.value.front()) {
    p.value = p.value.substr(1, p.value.size() - 2);
  }
  if (p.attribute.empty()) throw DataError("restriction '" + std::string(text) + "' has no attribute");
  return p;
}

bool RestrictionPredicate::holds(std::string_view actual) const {
  const auto a = as_number(actual);
  const auto b = as_number(value);
  if (a && b) return compare(*a, *b, op);
  return compare(trim(actual), std::string_view(value), op);
}

void SideTables::add(Scope scope, const CsvTable& table, const std::string& key_column) {
  const auto key = table.column(key_column);
  if (!key) throw DataError("side table has no key column '" + key_column + "'");
  Rows& rows = scope == Scope::kNode ? nodes_ : edges_;
  auto& columns = scope == Scope::kNode ? node_columns_ : edge_columns_;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c != *key) columns[table.header[c]] = true;
  }
  for (const auto& row : table.rows) {
    auto& attrs = rows[std::string(trim(row[*key]))];
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (c != *key) attrs[table.header[c]] = row[c];
    }
  }
}

bool SideTables::has_attribute(Scope scope, std::string_view attribute) const {
  const auto& columns = scope == Scope::kNode ? node_columns_ : edge_columns_;
  return columns.find(attribute) != columns.end();
}

std::optional<std::string_view> SideTables::lookup(const Rows& rows, const std::string& key,
                                                   std::string_view attribute) const {
  const auto it = rows.find(key);
  if (it == rows.end()) return std::nullopt;
  const auto a = it->second.find(attribute);
  if (a == it->second.end()) return std::nullopt;
  return std::string_view(a->second);
}

std::optional<std::string_view> SideTables::node_value(const Graph& graph, NodeId v, std::string_view attribute) const {
  if (auto hit = lookup(nodes_, std::to_string(graph.key(v)), attribute)) return hit;
  if (auto name = graph.name(v)) return lookup(nodes_, std::string(*name), attribute);
  return std::nullopt;
}

std::optional<std::string_view> SideTables::edge_value(const Graph& graph, EdgeId e, std::string_view attribute) const {
  const auto alias = graph.edge_alias(e);
  return lookup(edges_, std::to_string(alias ? *alias : static_cast<std::int64_t>(e)), attribute);
}

std::vector<QueryPath> query_paths(const Graph& graph, const QuerySpec& spec, const SideTables& tables) {
  if (spec.max_hops < 1) throw DataError("max_hops must be >= 1");
  for (const auto& r : spec.restrictions) {
    if (!tables.has_attribute(r.scope, r.attribute)) {
      throw DataError(std::string("unknown ") + (r.scope == Scope::kNode ? "node" : "edge") + " attribute '" +
                      r.attribute + "'");
    }
  }

  // evaluate every restriction once per entity
  std::vector<std::uint8_t> node_ok(std::size_t{graph.node_capacity()} + 1, 1);
  std::vector<std::uint8_t> edge_ok(std::size_t{graph.edge_capacity()} + 1, 1);
  for (const auto& r : spec.restrictions) {
    if (r.scope == Scope::kNode) {
      for (NodeId v : graph.nodes()) {
        if (!node_ok[v]) continue;
        const auto value = tables.node_value(graph, v, r.attribute);
        node_ok[v] = value && r.holds(*value);
      }
    } else {
      for (EdgeId e : graph.edges()) {
        if (!edge_ok[e]) continue;
        const auto value = tables.edge_value(graph, e, r.attribute);
        edge_ok[e] = value && r.holds(*value);
      }
    }
  }

  const auto sources = spec.sources.resolve(graph);
  const auto target_list = spec.targets.resolve(graph);
  std::vector<std::uint8_t> is_target(node_ok.size(), 0);
  for (NodeId t : target_list) is_target[t] = 1;

  std::vector<QueryPath> found;
  std::vector<std::uint8_t> on_path(node_ok.size(), 0);
  QueryPath current;

  auto dfs = [&](auto& self, NodeId u) -> void {
    if (!current.edges.empty() && is_target[u]) found.push_back(current);
    if (static_cast<int>(current.edges.size()) == spec.max_hops) return;
    std::vector<EdgeId> edges;
    graph.for_each_incident(u, [&](EdgeId e) { edges.push_back(e); });
    for (EdgeId e : edges) {
      if (!edge_ok[e] || !graph.traversable_from(e, u)) continue;
      const NodeId v = graph.opposite(e, u);
      if (on_path[v] || !node_ok[v]) continue;
      on_path[v] = 1;
      current.nodes.push_back(v);
      current.edges.push_back(e);
      self(self, v);
      current.edges.pop_back();
      current.nodes.pop_back();
      on_path[v] = 0;
    }
  };
  for (NodeId s : sources) {
    if (!node_ok[s]) continue;
    on_path[s] = 1;
    current.nodes = {s};
    current.edges.clear();
    dfs(dfs, s);
    on_path[s] = 0;
  }
  std::sort(found.begin(), found.end());
  if (spec.limit && found.size() > *spec.limit) found.resize(*spec.limit);
  return found;
}

}  // namespace dlsgraph
