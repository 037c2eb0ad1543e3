#include "dlsgraph/query.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "dlsgraph/grammar.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace dlsgraph;

namespace {

CsvTable csv(const std::string& text) {
  std::istringstream is(text);
  return read_csv(is);
}

// Who-knows-whom graph. Susan and Jane are FEMALE, Bill and Kim play chess;
// the Jane-Kim acquaintance (edge 5) predates 2002.
struct KnowsGraph {
  Graph graph;
  SideTables tables;

  KnowsGraph() {
    GraphRequest req;
    req.graph_name = "knows";
    req.bindings = parse_bindings("EDGE_NODE1_NAME=name1,EDGE_NODE2_NAME=name2,NODE_NAME=name,NODE_LABEL=label");
    const auto edges = csv(
        "name1,name2\n"
        "Susan,Tom\n"
        "Tom,Bill\n"
        "Susan,Kim\n"
        "Jane,Tom\n"
        "Jane,Kim\n");
    const auto nodes = csv(
        "name,label\n"
        "Susan,FEMALE\n"
        "Jane,FEMALE\n"
        "Tom,MALE\n"
        "Bill,\"MALE,chess\"\n"
        "Kim,chess\n");
    graph = build_graph(validate_request(req), edges, &nodes).graph;
    tables.add(Scope::kEdge, csv("id,since\n1,2005\n2,2010\n3,2003\n4,2004\n5,2001\n"), "id");
    tables.add(Scope::kNode, csv("name,age\nSusan,31\nJane,28\nTom,40\nBill,35\n"), "name");
  }

  std::string render(const QueryPath& p) const {
    std::string out;
    for (NodeId v : p.nodes) {
      if (!out.empty()) out += '-';
      out += std::string(*graph.name(v));
    }
    return out;
  }
};

QuerySpec female_to_chess(int hops) {
  QuerySpec spec;
  spec.sources = NodeSelector::by_label("FEMALE");
  spec.targets = NodeSelector::by_label("chess");
  spec.max_hops = hops;
  return spec;
}

std::vector<oracle::Edge> oracle_edges(const Graph& g) {
  std::vector<oracle::Edge> out;
  for (EdgeId e : g.edges()) {
    out.push_back({g.node1(e), g.node2(e), g.weight(e), static_cast<int>(g.direction(e))});
  }
  return out;
}

// Oracle paths use edge indices in g.edges() order (== edge id - 1 for fresh graphs).
std::vector<QueryPath> to_query_paths(const std::vector<oracle::SimplePath>& paths) {
  std::vector<QueryPath> out;
  for (const auto& p : paths) {
    QueryPath q;
    q.nodes.assign(p.nodes.begin(), p.nodes.end());
    for (auto i : p.edges) q.edges.push_back(i + 1);
    out.push_back(q);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Restriction, ParsesScopeOperatorAndValue) {
  const auto p = RestrictionPredicate::parse("edge:since>=2002");
  EXPECT_EQ(p.scope, Scope::kEdge);
  EXPECT_EQ(p.attribute, "since");
  EXPECT_EQ(p.op, Comparator::kGreaterEqual);
  EXPECT_EQ(p.value, "2002");
  const auto q = RestrictionPredicate::parse("node: kind != 'ferry'");
  EXPECT_EQ(q.scope, Scope::kNode);
  EXPECT_EQ(q.op, Comparator::kNotEqual);
  EXPECT_EQ(q.value, "ferry");
  EXPECT_EQ(RestrictionPredicate::parse("edge:w<3").op, Comparator::kLess);
  EXPECT_EQ(RestrictionPredicate::parse("edge:w=3").op, Comparator::kEqual);
  EXPECT_EQ(RestrictionPredicate::parse("edge:w≤3").op, Comparator::kLessEqual);
  EXPECT_THROW(RestrictionPredicate::parse("since>=2002"), DataError);
  EXPECT_THROW(RestrictionPredicate::parse("edge:since"), DataError);
  EXPECT_THROW(RestrictionPredicate::parse("path:x=1"), DataError);
}

TEST(Restriction, NumbersCompareNumericallyTextLexically) {
  const auto p = RestrictionPredicate::parse("edge:since>=2002");
  EXPECT_TRUE(p.holds("2002"));
  EXPECT_TRUE(p.holds("10000"));
  EXPECT_FALSE(p.holds("999"));
  EXPECT_FALSE(p.holds("abc") && false);
  const auto s = RestrictionPredicate::parse("node:name<m");
  EXPECT_TRUE(s.holds("alice"));
  EXPECT_FALSE(s.holds("zed"));
  // "10" vs "9": numeric, not lexical
  EXPECT_TRUE(RestrictionPredicate::parse("edge:x>9").holds("10"));
}

TEST(Query, KnowsGraphRestrictedToFourPaths) {
  KnowsGraph k;
  auto spec = female_to_chess(3);
  spec.restrictions.push_back(RestrictionPredicate::parse("edge:since>=2002"));
  const auto paths = query_paths(k.graph, spec, k.tables);
  std::vector<std::string> rendered;
  for (const auto& p : paths) rendered.push_back(k.render(p));
  EXPECT_EQ(std::set<std::string>(rendered.begin(), rendered.end()),
            (std::set<std::string>{"Susan-Tom-Bill", "Susan-Kim", "Jane-Tom-Bill", "Jane-Tom-Susan-Kim"}));
  EXPECT_EQ(std::count_if(rendered.begin(), rendered.end(), [](auto& r) { return r.starts_with("Susan"); }), 2);
  EXPECT_EQ(std::count_if(rendered.begin(), rendered.end(), [](auto& r) { return r.starts_with("Jane"); }), 2);

  const auto open = query_paths(k.graph, female_to_chess(3), k.tables);
  EXPECT_EQ(open.size(), 6u);
}

TEST(Query, OneHopSameSelectorGivesDirectEdges) {
  KnowsGraph k;
  QuerySpec spec;
  spec.sources = NodeSelector::by_label("MALE");
  spec.targets = NodeSelector::by_label("MALE");
  spec.max_hops = 1;
  const auto paths = query_paths(k.graph, spec);
  ASSERT_EQ(paths.size(), 2u);  // Tom-Bill both ways
  for (const auto& p : paths) EXPECT_EQ(p.edges, std::vector<EdgeId>{2});
}

TEST(Query, NodeRestrictionAndMissingRowsFail) {
  KnowsGraph k;
  auto spec = female_to_chess(3);
  spec.restrictions.push_back(RestrictionPredicate::parse("node:age<100"));
  // Kim has no age row, so every path ending at Kim is dropped
  std::vector<std::string> rendered;
  for (const auto& p : query_paths(k.graph, spec, k.tables)) rendered.push_back(k.render(p));
  EXPECT_EQ(rendered, (std::vector<std::string>{"Susan-Tom-Bill", "Jane-Tom-Bill"}));
}

TEST(Query, ErrorsAndEmptySelectors) {
  KnowsGraph k;
  auto spec = female_to_chess(3);
  spec.restrictions.push_back(RestrictionPredicate::parse("edge:color=red"));
  EXPECT_THROW(query_paths(k.graph, spec, k.tables), DataError);
  auto none = female_to_chess(3);
  none.sources = NodeSelector::by_label("nobody");
  EXPECT_TRUE(query_paths(k.graph, none, k.tables).empty());
  auto zero = female_to_chess(0);
  EXPECT_THROW(query_paths(k.graph, zero), DataError);
}

TEST(Query, LimitKeepsTheFirstPaths) {
  KnowsGraph k;
  auto spec = female_to_chess(3);
  const auto all = query_paths(k.graph, spec);
  spec.limit = 2;
  const auto some = query_paths(k.graph, spec);
  EXPECT_EQ(some, std::vector<QueryPath>(all.begin(), all.begin() + 2));
}

TEST(Query, SmallGraphsMatchExhaustiveEnumeration) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 60; ++round) {
    const std::size_t n = 4 + rng() % 9;  // 4..12 nodes
    const auto rnd = fixture::random_graph(n, n + rng() % (2 * n), rng(), round % 2 == 1);
    Graph g = fixture::from_edges(n, rnd.edges);
    // random labels and an edge attribute
    std::set<std::uint32_t> src, dst;
    std::ostringstream table;
    table << "id,level\n";
    std::vector<int> level(rnd.edges.size());
    for (std::uint32_t v = 1; v <= n; ++v) {
      if (rng() % 3 == 0) {
        g.add_node_label(v, "S");
        src.insert(v);
      }
      if (rng() % 3 == 0) {
        g.add_node_label(v, "T");
        dst.insert(v);
      }
    }
    for (std::size_t i = 0; i < rnd.edges.size(); ++i) {
      level[i] = static_cast<int>(rng() % 5);
      table << i + 1 << ',' << level[i] << '\n';
    }
    SideTables tables;
    tables.add(Scope::kEdge, csv(table.str()), "id");
    const int hops = 1 + static_cast<int>(rng() % 4);

    std::vector<oracle::Edge> edges = oracle_edges(g);
    // oracle node ids are graph ids; index 0 unused
    const auto expected_open = to_query_paths(oracle::enumerate_simple_paths(
        n + 1, edges, src, dst, hops, [](std::uint32_t) { return true; }, [](std::uint32_t) { return true; }));
    QuerySpec spec;
    spec.sources = NodeSelector::by_label("S");
    spec.targets = NodeSelector::by_label("T");
    spec.max_hops = hops;
    EXPECT_EQ(query_paths(g, spec, tables), expected_open) << "round " << round;

    const auto expected_restricted = to_query_paths(oracle::enumerate_simple_paths(
        n + 1, edges, src, dst, hops, [](std::uint32_t) { return true; },
        [&](std::uint32_t i) { return level[i] >= 2; }));
    spec.restrictions.push_back(RestrictionPredicate::parse("edge:level>=2"));
    EXPECT_EQ(query_paths(g, spec, tables), expected_restricted) << "round " << round;
  }
}

TEST(Query, MonotoneInHopsAndRestrictions) {
  const auto rnd = fixture::random_graph(30, 70, 9);
  Graph g = fixture::from_edges(rnd.n, rnd.edges);
  std::ostringstream table;
  table << "id,level\n";
  for (EdgeId e = 1; e <= rnd.edges.size(); ++e) table << e << ',' << e % 7 << '\n';
  SideTables tables;
  tables.add(Scope::kEdge, csv(table.str()), "id");
  for (NodeId v = 1; v <= 30; v += 4) g.add_node_label(v, "S");
  for (NodeId v = 2; v <= 30; v += 5) g.add_node_label(v, "T");
  QuerySpec spec;
  spec.sources = NodeSelector::by_label("S");
  spec.targets = NodeSelector::by_label("T");
  auto as_set = [](const std::vector<QueryPath>& v) { return std::set<QueryPath>(v.begin(), v.end()); };
  std::set<QueryPath> previous;
  for (int k = 1; k <= 5; ++k) {
    spec.max_hops = k;
    spec.restrictions.clear();
    const auto open = as_set(query_paths(g, spec, tables));
    EXPECT_TRUE(std::includes(open.begin(), open.end(), previous.begin(), previous.end())) << k;
    previous = open;
    std::set<QueryPath> narrower = open;
    for (const char* r : {"edge:level>0", "edge:level<6", "edge:level!=3"}) {
      spec.restrictions.push_back(RestrictionPredicate::parse(r));
      const auto now = as_set(query_paths(g, spec, tables));
      EXPECT_TRUE(std::includes(narrower.begin(), narrower.end(), now.begin(), now.end())) << r;
      narrower = now;
    }
  }
}

TEST(Query, ExplicitNodeListsAndDirection) {
  // 1 -> 2 -> 3, and 3 - 1 undirected
  const std::vector<oracle::Edge> edges{{0, 1, 1.0, 1}, {1, 2, 1.0, 1}, {2, 0, 1.0, 0}};
  const Graph g = fixture::from_edges(3, edges);
  QuerySpec spec;
  spec.sources = NodeSelector::by_nodes({2});
  spec.targets = NodeSelector::by_nodes({1});
  spec.max_hops = 3;
  const auto paths = query_paths(g, spec);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths[0].nodes, (std::vector<NodeId>{2, 3, 1}));
  spec.sources = NodeSelector::by_nodes({99});
  EXPECT_THROW(query_paths(g, spec), InvalidEntity);
}
