#include "cli.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "dlsgraph/csv.hpp"
#include "dlsgraph/grammar.hpp"
#include "dlsgraph/sssp.hpp"
#include "fixtures.hpp"

using namespace dlsgraph;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dlsgraph_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int call(std::vector<std::string> args) {
    args.insert(args.begin(), {"dlsgraph", "-w", (dir_ / "ws").string()});
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    out_ = out.str();
    err_ = err.str();
    return code;
  }

  std::string file(const std::string& name, const std::string& text) const {
    const auto path = dir_ / name;
    std::ofstream(path, std::ios::binary) << text;
    return path.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
  std::string out_, err_;
};

std::string edge_csv(const fixture::Random& r) {
  std::ostringstream os;
  os << "node1,node2,weight\n";
  for (const auto& e : r.edges) os << e.a << ',' << e.b << ',' << format_double(e.w) << '\n';
  return os.str();
}

const char* kIdBindings = "EDGE_NODE1_ID=node1,EDGE_NODE2_ID=node2,EDGE_WEIGHT_VALUESPECIFIED=weight";

std::size_t number_after(const std::string& text, const std::string& word) {
  const auto at = text.find(word + ' ');
  EXPECT_NE(at, std::string::npos) << word << " in " << text;
  return std::stoul(text.substr(at + word.size() + 1));
}

}  // namespace

TEST_F(Cli, StatsOnEmptyWorkspaceListsNothing) {
  EXPECT_EQ(call({"stats"}), 0);
  EXPECT_EQ(out_, "graph,plan,workers,nodes,edges,duplicated,score\n");
}

TEST_F(Cli, CreateReportsCountsAndScore) {
  const auto edges = file("e.csv", "a,b\nA,B\nB,C\nC,D\nD,E\nE,F\nF,G\nG,H\n");
  ASSERT_EQ(call({"create", "--graph", "one", "--edges", edges, "--identifiers", "EDGE_NODE1_NAME=a,EDGE_NODE2_NAME=b",
                  "--workers", "1"}),
            0)
      << err_;
  EXPECT_NE(out_.find("nodes 8 edges 7"), std::string::npos) << out_;
  EXPECT_NE(out_.find("workers 1 duplicated 0 score 0\n"), std::string::npos) << out_;

  ASSERT_EQ(call({"create", "--graph", "four", "--edges", edges, "--identifiers",
                  "EDGE_NODE1_NAME=a,EDGE_NODE2_NAME=b", "--workers", "4", "--partition", "id-range"}),
            0);
  // 8 keyless nodes by internal id over 4 ranges: 3 interfaces
  EXPECT_EQ(number_after(out_, "duplicated"), 3u);
  EXPECT_EQ(call({"stats"}), 0);
  EXPECT_NE(out_.find("four,id-range,4,8,7,3,"), std::string::npos) << out_;
}

TEST_F(Cli, StrictCreateNamesTheBadRow) {
  const auto edges = file("w.csv", "geom\n\"LINESTRING(0 0, 1 1)\"\n\"LINESTRING(1 1, 2\"\n");
  EXPECT_EQ(call({"create", "--graph", "g", "--edges", edges, "--identifiers", "EDGE_WKTLINE=geom", "--strict"}), 3);
  EXPECT_NE(err_.find("row 2"), std::string::npos) << err_;
  EXPECT_FALSE(fs::exists(dir_ / "ws" / "catalog.json"));
  // lenient mode keeps the good row and warns
  EXPECT_EQ(call({"create", "--graph", "g", "--edges", edges, "--identifiers", "EDGE_WKTLINE=geom"}), 0);
  EXPECT_NE(err_.find("row 2"), std::string::npos) << err_;
  EXPECT_NE(out_.find("edges 1"), std::string::npos) << out_;
}

TEST_F(Cli, ExistingGraphNeedsRecreate) {
  const auto edges = file("e.csv", "a,b\nx,y\n");
  const std::vector<std::string> args{"create", "--graph", "g", "--edges", edges, "--identifiers",
                                      "EDGE_NODE1_NAME=a,EDGE_NODE2_NAME=b", "--workers", "1"};
  ASSERT_EQ(call(args), 0);
  EXPECT_EQ(call(args), 3);
  auto again = args;
  again.insert(again.end(), {"--option", "recreate=true"});
  EXPECT_EQ(call(again), 0);
}

TEST_F(Cli, UsageAndDataErrorsHaveDistinctCodes) {
  EXPECT_EQ(call({}), 2);
  EXPECT_EQ(call({"solve"}), 2);
  EXPECT_EQ(call({"frobnicate"}), 2);
  EXPECT_EQ(call({"solve", "--graph", "missing", "--source", "1", "--out", path("c.csv")}), 3);
  const auto edges = file("e.csv", "a,b\nx,y\n");
  ASSERT_EQ(call({"create", "--graph", "g", "--edges", edges, "--identifiers", "EDGE_NODE1_NAME=a,EDGE_NODE2_NAME=b"}),
            0);
  EXPECT_EQ(call({"solve", "--graph", "g", "--source", "nobody", "--out", path("c.csv")}), 3);
  EXPECT_EQ(call({"solve", "--graph", "g", "--out", path("c.csv")}), 2);  // neither --source nor --pairs
  EXPECT_EQ(call({"create", "--graph", "h", "--edges", edges, "--identifiers", "EDGE_NODE1_NAME=a"}), 3);
  EXPECT_EQ(call({"create", "--graph", "h", "--edges", edges, "--identifiers", "EDGE_NODE1_NAME=a,EDGE_NODE2_NAME=b",
                  "--partition", "geo:2x3", "--workers", "4"}),
            3);
}

TEST_F(Cli, SolveWritesEveryNodeAndATrace) {
  const auto rnd = fixture::random_graph(60, 150, 21);
  const auto edges = file("e.csv", edge_csv(rnd));
  ASSERT_EQ(call({"create", "--graph", "g", "--edges", edges, "--identifiers", kIdBindings, "--workers", "3"}), 0)
      << err_;
  ASSERT_EQ(call({"solve", "--graph", "g", "--source", "0", "--out", path("c.csv"), "--trace", path("t.csv")}), 0)
      << err_;
  const auto costs = read_csv_file(path("c.csv"));
  ASSERT_EQ(costs.rows.size(), 60u);
  const auto expected = oracle::dijkstra(60, rnd.edges, 0);
  for (const auto& row : costs.rows) {
    EXPECT_NEAR(std::stod(row[1]), expected[std::stoul(row[0])], 1e-9 * (1 + expected[std::stoul(row[0])]));
  }
  const auto trace = read_csv_file(path("t.csv"));
  EXPECT_EQ(trace.header, (std::vector<std::string>{"round", "worker", "updates_sent", "nodes_settled", "millis"}));
  EXPECT_FALSE(trace.rows.empty());
  EXPECT_EQ(std::stoul(trace.rows.back()[0]), number_after(out_, "rounds"));
}

TEST_F(Cli, PairsBatchKeepsInputOrder) {
  const auto rnd = fixture::random_graph(80, 200, 22);
  const auto edges = file("e.csv", edge_csv(rnd));
  ASSERT_EQ(call({"create", "--graph", "g", "--edges", edges, "--identifiers", kIdBindings, "--partition", "random"}),
            0);
  std::mt19937_64 rng(3);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::ostringstream text;
  text << "source,target\n";
  for (int i = 0; i < 40; ++i) {
    pairs.emplace_back(static_cast<std::uint32_t>(rng() % 5), static_cast<std::uint32_t>(rng() % 80));
    text << pairs.back().first << ',' << pairs.back().second << '\n';
  }
  ASSERT_EQ(call({"solve", "--graph", "g", "--pairs", file("pairs.csv", text.str()), "--paths", path("p.csv"),
                  "--wkt"}),
            0)
      << err_;
  const auto rows = read_csv_file(path("p.csv"));
  ASSERT_EQ(rows.rows.size(), pairs.size());
  EXPECT_EQ(number_after(out_, "solves"), 5u);
  const auto cost_col = *rows.column("total_cost");
  const auto wkt_col = *rows.column("wkt");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& row = rows.rows[i];
    EXPECT_EQ(row[1], std::to_string(pairs[i].first));
    EXPECT_EQ(row[2], std::to_string(pairs[i].second));
    const double expected = oracle::dijkstra(80, rnd.edges, pairs[i].first)[pairs[i].second];
    EXPECT_NEAR(std::stod(row[cost_col]), expected, 1e-9 * (1 + expected));
    EXPECT_TRUE(row[wkt_col].empty());  // id-built graph has no coordinates
  }
}

TEST_F(Cli, PersistedSolveMatchesInMemorySolveBytes) {
  const auto rnd = fixture::random_graph(300, 1200, 23, true);
  const std::string edges_text = edge_csv(rnd);
  const auto edges = file("e.csv", edges_text);

  // solve before persisting
  GraphRequest req;
  req.graph_name = "g";
  req.bindings = parse_bindings(kIdBindings);
  std::istringstream is(edges_text);
  const auto built = build_graph(validate_request(req), read_csv(is));
  const auto dg = DistributedGraph::partition(built.graph, partition_graph(built.graph, PartitionPlan::parse("random", 4)));
  std::ostringstream before;
  cli::write_cost_csv(before, built.graph, distributed_sssp(dg, built.graph.find_by_key(0)).costs(dg));

  ASSERT_EQ(call({"create", "--graph", "g", "--edges", edges, "--identifiers", kIdBindings, "--partition", "random"}),
            0);
  ASSERT_EQ(call({"solve", "--graph", "g", "--source", "0", "--out", path("c.csv")}), 0) << err_;
  EXPECT_EQ(slurp(path("c.csv")), before.str());
}

TEST_F(Cli, RepeatedRunsWriteIdenticalFiles) {
  const auto rnd = fixture::random_graph(120, 400, 24);
  const auto edges = file("e.csv", edge_csv(rnd));
  std::string first_graph, first_costs, first_paths;
  for (int run = 0; run < 2; ++run) {
    ASSERT_EQ(call({"create", "--graph", "g", "--edges", edges, "--identifiers", kIdBindings, "--option",
                    "recreate=true"}),
              0);
    ASSERT_EQ(call({"solve", "--graph", "g", "--source", "5", "--targets", "7,90,119", "--out", path("c.csv"),
                    "--paths", path("p.csv"), "--parallel"}),
              0);
    const auto graph = slurp((dir_ / "ws" / "g" / "graph.dls").string());
    if (run == 0) {
      first_graph = graph;
      first_costs = slurp(path("c.csv"));
      first_paths = slurp(path("p.csv"));
    } else {
      EXPECT_EQ(graph, first_graph);
      EXPECT_EQ(slurp(path("c.csv")), first_costs);
      EXPECT_EQ(slurp(path("p.csv")), first_paths);
    }
  }
}

TEST_F(Cli, RepartitionImprovesAScrambledGrid) {
  const auto grid = fixture::grid(24, 24);
  std::vector<int> key(grid.n);
  std::iota(key.begin(), key.end(), 0);
  std::shuffle(key.begin(), key.end(), std::mt19937_64(8));
  std::ostringstream nodes, edges;
  nodes << "id,x,y\n";
  for (std::size_t i = 0; i < grid.n; ++i) nodes << key[i] << ',' << grid.coords[i].x << ',' << grid.coords[i].y << '\n';
  edges << "node1,node2\n";
  for (const auto& e : grid.edges) edges << key[e.a] << ',' << key[e.b] << '\n';
  ASSERT_EQ(call({"create", "--graph", "grid", "--edges", file("e.csv", edges.str()), "--nodes",
                  file("n.csv", nodes.str()), "--identifiers",
                  "EDGE_NODE1_ID=node1,EDGE_NODE2_ID=node2,NODE_ID=id,NODE_X=x,NODE_Y=y"}),
            0)
      << err_;
  ASSERT_EQ(call({"repartition", "--graph", "grid", "--workers", "4", "--export-dir", path("export")}), 0) << err_;
  const auto before = number_after(out_, "before duplicated");
  const auto after = number_after(out_, "after duplicated");
  EXPECT_LT(after, before);
  EXPECT_TRUE(fs::exists(dir_ / "export" / "grid.nodes.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "export" / "grid.edges.csv"));
  // the catalog now describes the rebalanced graph
  ASSERT_EQ(call({"stats", "--graph", "grid"}), 0);
  EXPECT_EQ(number_after(out_, "duplicated"), after);
  // coordinates survive, so paths carry geometry
  ASSERT_EQ(call({"solve", "--graph", "grid", "--source", "1", "--targets", "576", "--paths", path("p.csv"), "--wkt"}),
            0)
      << err_;
  const auto p = read_csv_file(path("p.csv"));
  EXPECT_EQ(p.rows.at(0)[*p.column("wkt")].rfind("LINESTRING(", 0), 0u);
}

TEST_F(Cli, QueryOnTwoNodes) {
  const auto edges = file("e.csv", "a,b\nx,y\n");
  ASSERT_EQ(call({"create", "--graph", "g", "--edges", edges, "--identifiers", "EDGE_NODE1_NAME=a,EDGE_NODE2_NAME=b"}),
            0);
  ASSERT_EQ(call({"query", "--graph", "g", "--from-nodes", "x", "--to-nodes", "y", "--hops", "1", "--out",
                  path("q.csv")}),
            0)
      << err_;
  EXPECT_EQ(out_, "paths 1\n");
  EXPECT_EQ(slurp(path("q.csv")), "path_id,source,target,hops,nodes,edges\n1,x,y,1,x y,1\n");
}

TEST_F(Cli, QueryWithLabelsAndSideTables) {
  const auto edges = file("e.csv", "a,b\nSusan,Tom\nTom,Bill\nSusan,Kim\nJane,Tom\nJane,Kim\n");
  const auto nodes = file("n.csv", "name,label\nSusan,FEMALE\nJane,FEMALE\nTom,MALE\nBill,\"MALE,chess\"\nKim,chess\n");
  ASSERT_EQ(call({"create", "--graph", "knows", "--edges", edges, "--nodes", nodes, "--identifiers",
                  "EDGE_NODE1_NAME=a,EDGE_NODE2_NAME=b,NODE_NAME=name,NODE_LABEL=label"}),
            0)
      << err_;
  const auto since = file("since.csv", "edge,since\n1,2005\n2,2010\n3,2003\n4,2004\n5,2001\n");
  ASSERT_EQ(call({"query", "--graph", "knows", "--from-label", "FEMALE", "--to-label", "chess", "--hops", "3",
                  "--restrict", "edge:since>=2002", "--table", "edge=" + since, "--key", "edge", "--out",
                  path("q.csv")}),
            0)
      << err_;
  EXPECT_EQ(out_, "paths 4\n");
  EXPECT_EQ(call({"query", "--graph", "knows", "--from-label", "FEMALE", "--to-label", "chess", "--restrict",
                  "edge:color=red", "--table", "edge=" + since, "--key", "edge", "--out", path("q.csv")}),
            3);
}
