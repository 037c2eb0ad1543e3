#include "dlsgraph/runtime.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "dlsgraph/partition.hpp"
#include "dlsgraph/sssp.hpp"
#include "fixtures.hpp"

using namespace dlsgraph;

namespace {

DistributedGraph partitioned(const Graph& g, const std::string& scheme, int workers) {
  return DistributedGraph::partition(g, partition_graph(g, PartitionPlan::parse(scheme, workers)));
}

}  // namespace

TEST(Ledger, FirstReportIsRecordedEqualIsIgnored) {
  RoundLedger ledger;
  EXPECT_TRUE(ledger.record_improvement(5, 3.0, 1));
  EXPECT_FALSE(ledger.record_improvement(5, 3.0, 0));
  EXPECT_EQ(ledger.last_improver(5), 1);
  EXPECT_FALSE(ledger.record_improvement(5, 4.0, 2));
  EXPECT_TRUE(ledger.record_improvement(5, 2.5, 2));
  EXPECT_EQ(ledger.last_improver(5), 2);
  EXPECT_EQ(ledger.best(5), 2.5);
  EXPECT_FALSE(ledger.best(6).has_value());
}

TEST(Ledger, RoundOutcomeIgnoresArrivalOrder) {
  const std::vector<RoundLedger::Report> reports{{3, {7, 2.0}}, {1, {7, 2.0}}, {2, {7, 1.5}}, {0, {8, 4.0}},
                                                 {1, {8, 4.0}}, {2, {9, 1.0}}};
  std::vector<RoundLedger::Report> shuffled = reports;
  std::reverse(shuffled.begin(), shuffled.end());
  RoundLedger a, b;
  a.apply_round(reports);
  b.apply_round(shuffled);
  EXPECT_EQ(a.entries(), b.entries());
  EXPECT_EQ(a.last_improver(7), 2);  // lower cost wins
  EXPECT_EQ(a.last_improver(8), 0);  // tie -> lower worker id
}

TEST(Mailbox, DeliversInSendOrder) {
  Mailbox box;
  box.send(CostUpdates{{{1, 1.0}}});
  box.send(PathProbe{4});
  box.send(Abort{"x"});
  EXPECT_EQ(box.size(), 3u);
  EXPECT_TRUE(std::holds_alternative<CostUpdates>(*box.receive()));
  EXPECT_TRUE(std::holds_alternative<PathProbe>(*box.receive()));
  EXPECT_TRUE(std::holds_alternative<Abort>(*box.receive()));
  EXPECT_FALSE(box.receive().has_value());
}

TEST(Orchestrate, SingleWorkerTakesOneRound) {
  const Graph g = fixture::from_edges(10, fixture::path_edges(10));
  const auto dg = partitioned(g, "id-range", 1);
  const auto solved = distributed_sssp(dg, 1);
  EXPECT_EQ(solved.run.rounds, 1u);
  ASSERT_EQ(solved.run.trace.size(), 1u);
  EXPECT_EQ(solved.run.trace[0].worker, 0);
  EXPECT_EQ(solved.run.trace[0].updates_sent, 0u);
  EXPECT_EQ(solved.run.trace[0].nodes_settled, 10u);
}

TEST(Orchestrate, TwoPartitionPathTakesTwoRounds) {
  // keys 0-4 on w0, 5-9 on w1; edge (4,5) goes to w0 so key 5 is duplicated
  const Graph g = fixture::from_edges(10, fixture::path_edges(10));
  const auto dg = partitioned(g, "id-range", 2);
  const auto solved = distributed_sssp(dg, 1);
  EXPECT_EQ(solved.run.rounds, 2u);
  ASSERT_EQ(solved.run.trace.size(), 2u);
  EXPECT_EQ(solved.run.trace[0].round, 1u);
  EXPECT_EQ(solved.run.trace[0].worker, 0);
  EXPECT_EQ(solved.run.trace[0].updates_sent, 1u);
  EXPECT_EQ(solved.run.trace[1].round, 2u);
  EXPECT_EQ(solved.run.trace[1].worker, 1);
  EXPECT_EQ(solved.run.trace[1].updates_sent, 0u);
}

TEST(Orchestrate, ChainOfPartitionsSweepsThenSettles) {
  // four partitions in a chain; diameter 3 -> at most 4 rounds
  const Graph g = fixture::from_edges(40, fixture::path_edges(40));
  const auto dg = partitioned(g, "id-range", 4);
  std::vector<std::size_t> finite_per_round;
  OrchestrateOptions opts;
  std::vector<CostField> fields;
  for (const auto& ws : dg.workers()) fields.emplace_back(ws.subgraph.node_capacity(), 1);
  opts.on_round = [&](std::size_t, const RoundLedger&) {
    std::size_t finite = 0;
    for (const auto& f : fields) finite += std::count_if(f.d.begin(), f.d.end(), [](double d) { return d < kInfinity; });
    finite_per_round.push_back(finite);
  };
  std::vector<std::vector<CostUpdate>> initial(4);
  initial[0].push_back({1, 0.0});
  const auto run = orchestrate(
      4, initial, [&](NodeId v) { return dg.homes(v); },
      [&](WorkerId w, std::span<const CostUpdate> fronts) { return local_dijkstra(dg.worker(w), fields[w], fronts); },
      opts);
  EXPECT_LE(run.rounds, 4u);
  std::vector<WorkerId> sweep;
  for (const auto& row : run.trace) sweep.push_back(row.worker);
  EXPECT_EQ(sweep, (std::vector<WorkerId>{0, 1, 2, 3}));
  EXPECT_TRUE(std::is_sorted(finite_per_round.begin(), finite_per_round.end()));
  ASSERT_FALSE(finite_per_round.empty());
  EXPECT_LT(finite_per_round.front(), finite_per_round.back());
}

TEST(Orchestrate, ShuffledServiceOrderGivesTheSameField) {
  const auto rnd = fixture::random_graph(300, 900, 21);
  const Graph g = fixture::from_edges(rnd.n, rnd.edges, &rnd.coords);
  for (const char* scheme : {"random", "geo:3x2"}) {
    const auto dg = partitioned(g, scheme, 6);
    const auto base = distributed_sssp(dg, 17).costs(dg);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      OrchestrateOptions opts;
      opts.shuffle_seed = seed;
      const auto solved = distributed_sssp(dg, 17, opts);
      EXPECT_EQ(solved.costs(dg), base) << scheme << " seed " << seed;
    }
    OrchestrateOptions par;
    par.parallel = true;
    EXPECT_EQ(distributed_sssp(dg, 17, par).costs(dg), base) << scheme;
  }
}

TEST(Orchestrate, RoundsBoundedByDuplicatedCount) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto rnd = fixture::random_graph(200, 500, seed);
    const Graph g = fixture::from_edges(rnd.n, rnd.edges, &rnd.coords);
    const auto assignment = partition_graph(g, PartitionPlan::parse("random", 5));
    const auto dg = DistributedGraph::partition(g, assignment);
    const auto solved = distributed_sssp(dg, 1);
    EXPECT_LE(solved.run.rounds, assignment.duplicated.size() + 1);
  }
}

TEST(Orchestrate, EveryAcceptedUpdateReachesEveryOtherHomeOnce) {
  const auto rnd = fixture::random_graph(150, 400, 3);
  const Graph g = fixture::from_edges(rnd.n, rnd.edges, &rnd.coords);
  const auto dg = partitioned(g, "random", 4);
  std::vector<CostField> fields;
  for (const auto& ws : dg.workers()) fields.emplace_back(ws.subgraph.node_capacity(), 1);

  std::size_t round = 0, received_after_start = 0;
  std::map<std::pair<NodeId, double>, std::multiset<WorkerId>> received;
  std::vector<std::vector<CostUpdate>> initial(4);
  for (WorkerId w : dg.homes(1)) initial[w].push_back({1, 0.0});
  OrchestrateOptions opts;
  opts.on_round = [&](std::size_t r, const RoundLedger&) { round = r; };
  const auto run = orchestrate(
      4, initial, [&](NodeId v) { return dg.homes(v); },
      [&](WorkerId w, std::span<const CostUpdate> fronts) {
        if (round > 0) {
          for (const auto& f : fronts) {
            const auto homes = dg.homes(f.node);
            EXPECT_TRUE(std::find(homes.begin(), homes.end(), w) != homes.end());
            received[std::make_pair(f.node, f.cost)].insert(w);
            ++received_after_start;
          }
        }
        return local_dijkstra(dg.worker(w), fields[w], fronts);
      },
      opts);
  EXPECT_EQ(received_after_start, run.deliveries);
  for (const auto& [update, workers] : received) {
    EXPECT_EQ(std::set<WorkerId>(workers.begin(), workers.end()).size(), workers.size()) << "duplicate delivery";
    // every home except the reporter
    EXPECT_EQ(workers.size() + 1, dg.homes(update.first).size());
  }
}

TEST(Orchestrate, AbortFlagStopsAtRoundBoundary) {
  const Graph g = fixture::from_edges(40, fixture::path_edges(40));
  const auto dg = partitioned(g, "id-range", 4);
  std::atomic<bool> stop{false};
  OrchestrateOptions opts;
  opts.abort = &stop;
  opts.on_round = [&](std::size_t r, const RoundLedger&) {
    if (r == 2) stop = true;
  };
  try {
    distributed_sssp(dg, 1, opts);
    FAIL() << "expected SolveAborted";
  } catch (const SolveAborted& e) {
    EXPECT_EQ(e.round(), 2u);
  }
}

TEST(Orchestrate, WorkerFailureAborts) {
  std::vector<std::vector<CostUpdate>> initial{{{1, 0.0}}, {{2, 0.0}}};
  const std::vector<WorkerId> none;
  for (bool parallel : {false, true}) {
    OrchestrateOptions opts;
    opts.parallel = parallel;
    EXPECT_THROW(orchestrate(
                     2, initial, [&](NodeId) { return std::span<const WorkerId>(none); },
                     [](WorkerId w, std::span<const CostUpdate>) -> WorkerReply {
                       if (w == 1) throw std::runtime_error("disk on fire");
                       return {};
                     },
                     opts),
                 SolveAborted);
  }
}

TEST(Trace, WritesCsvRows) {
  std::vector<TraceRow> rows{{1, 0, 3, 10, 0.5}, {2, 1, 0, 4, 0.25}};
  std::ostringstream os;
  write_trace_csv(os, rows);
  EXPECT_EQ(os.str(), "round,worker,updates_sent,nodes_settled,millis\n1,0,3,10,0.5\n2,1,0,4,0.25\n");
}

TEST(Workers, SubgraphsGlueBackToTheInput) {
  const auto rnd = fixture::random_graph(120, 300, 8);
  Graph g = fixture::from_edges(rnd.n, rnd.edges, &rnd.coords);
  g.add_node_label(5, "depot");
  g.add_edge_label(7, "bridge");
  const auto assignment = partition_graph(g, PartitionPlan::parse("geo:2x2", 4));
  const auto workers = build_workers(g, assignment);
  std::multiset<std::tuple<NodeId, NodeId, double>> glued;
  std::size_t edge_total = 0;
  for (const auto& ws : workers) {
    edge_total += ws.subgraph.edge_count();
    for (EdgeId le : ws.subgraph.edges()) {
      const EdgeId ge = ws.global_edge_of_local[le];
      EXPECT_EQ(ws.global_of_local[ws.subgraph.node1(le)], g.node1(ge));
      EXPECT_EQ(ws.global_of_local[ws.subgraph.node2(le)], g.node2(ge));
      EXPECT_EQ(ws.subgraph.weight(le), g.weight(ge));
      EXPECT_EQ(ws.subgraph.edge_label_names(le), g.edge_label_names(ge));
      glued.insert({g.node1(ge), g.node2(ge), g.weight(ge)});
    }
    for (NodeId l : ws.subgraph.nodes()) {
      const NodeId v = ws.global_of_local[l];
      EXPECT_EQ(ws.subgraph.key(l), g.key(v));
      EXPECT_EQ(ws.subgraph.coords(l), g.coords(v));
      EXPECT_EQ(ws.subgraph.node_label_names(l), g.node_label_names(v));
      EXPECT_EQ(ws.is_duplicated(l), assignment.node_homes[v].size() > 1);
    }
  }
  std::multiset<std::tuple<NodeId, NodeId, double>> original;
  for (EdgeId e : g.edges()) original.insert({g.node1(e), g.node2(e), g.weight(e)});
  EXPECT_EQ(glued, original);
  EXPECT_EQ(edge_total, g.edge_count());
}

TEST(Workers, PersistRoundTrip) {
  const auto rnd = fixture::random_graph(80, 200, 4);
  const Graph g = fixture::from_edges(rnd.n, rnd.edges, &rnd.coords);
  const auto workers = build_workers(g, partition_graph(g, PartitionPlan::parse("random", 3)));
  std::vector<WorkerState> loaded;
  for (const auto& ws : workers) {
    std::stringstream buf;
    ws.write(buf);
    loaded.push_back(WorkerState::read(buf));
    std::stringstream again;
    loaded.back().write(again);
    EXPECT_EQ(again.str(), buf.str());
  }
  const DistributedGraph a(workers), b(std::move(loaded));
  EXPECT_EQ(distributed_sssp(a, 3).costs(a), distributed_sssp(b, 3).costs(b));

  std::stringstream junk("not a worker");
  EXPECT_THROW(WorkerState::read(junk), Error);
}

TEST(Workers, AssignmentRecoveredFromWorkers) {
  const auto rnd = fixture::random_graph(120, 300, 8);
  const Graph g = fixture::from_edges(rnd.n, rnd.edges, &rnd.coords);
  for (const char* scheme : {"id-range", "random", "geo:2x2"}) {
    const auto assignment = partition_graph(g, PartitionPlan::parse(scheme, 4));
    const auto workers = build_workers(g, assignment);
    const auto back = recover_assignment(workers, g.node_capacity(), g.edge_capacity());
    EXPECT_EQ(back.worker_count, assignment.worker_count);
    EXPECT_EQ(back.edge_owner, assignment.edge_owner) << scheme;
    EXPECT_EQ(back.node_homes, assignment.node_homes) << scheme;
    EXPECT_EQ(back.duplicated, assignment.duplicated) << scheme;
  }
}
