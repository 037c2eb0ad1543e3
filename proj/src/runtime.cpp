#include "dlsgraph/runtime.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <future>
#include <ostream>
#include <random>

#include "dlsgraph/csv.hpp"
#include "dlsgraph/detail/binary_io.hpp"

namespace dlsgraph {

namespace {

constexpr std::uint32_t kWorkerMagic = 0x4B524F57;  // "WORK"
constexpr std::uint32_t kWorkerVersion = 1;

NodeInit node_record(const Graph& g, NodeId v) {
  NodeInit init;
  init.labels = g.node_label_names(v);
  init.coords = g.coords(v);
  if (auto n = g.name(v)) init.name = std::string(*n);
  if (g.has_key(v)) init.key = g.key(v);
  return init;
}

}  // namespace

std::vector<WorkerState> build_workers(const Graph& graph, const PartitionAssignment& assignment) {
  std::vector<WorkerState> workers(static_cast<std::size_t>(assignment.worker_count));
  for (int w = 0; w < assignment.worker_count; ++w) {
    workers[w].worker_id = w;
    workers[w].worker_count = assignment.worker_count;
    workers[w].global_of_local = {kNull};
    workers[w].global_edge_of_local = {kNull};
    workers[w].duplicated_local = {0};
  }
  for (NodeId v : graph.nodes()) {
    if (v >= assignment.node_homes.size()) continue;
    const auto& homes = assignment.node_homes[v];
    const NodeInit init = node_record(graph, v);
    for (WorkerId w : homes) {
      WorkerState& ws = workers[w];
      const NodeId local = ws.subgraph.insert_node(init);
      ws.local_of_global.emplace(v, local);
      ws.global_of_local.push_back(v);
      ws.duplicated_local.push_back(homes.size() > 1 ? 1 : 0);
      if (homes.size() > 1) {
        auto& peers = ws.peer_homes[v];
        for (WorkerId other : homes) {
          if (other != w) peers.push_back(other);
        }
      }
    }
  }
  for (EdgeId e : graph.edges()) {
    const WorkerId w = assignment.edge_owner.at(e);
    WorkerState& ws = workers[w];
    const NodeId a = ws.local(graph.node1(e));
    const NodeId b = ws.local(graph.node2(e));
    if (a == kNull || b == kNull) throw InvalidEntity("edge " + std::to_string(e) + " owner does not home its ends");
    const EdgeId local = ws.subgraph.insert_edge(a, b, graph.weight(e), graph.direction(e));
    for (const auto& label : graph.edge_label_names(e)) ws.subgraph.add_edge_label(local, label);
    if (auto alias = graph.edge_alias(e)) ws.subgraph.set_edge_alias(local, *alias);
    ws.global_edge_of_local.push_back(e);
  }
  return workers;
}

std::unordered_map<NodeId, std::vector<WorkerId>> node_homes(std::span<const WorkerState> workers) {
  std::unordered_map<NodeId, std::vector<WorkerId>> homes;
  for (const auto& ws : workers) {
    for (std::size_t l = 1; l < ws.global_of_local.size(); ++l) homes[ws.global_of_local[l]].push_back(ws.worker_id);
  }
  for (auto& [v, list] : homes) std::sort(list.begin(), list.end());
  return homes;
}

PartitionAssignment recover_assignment(std::span<const WorkerState> workers, NodeId node_capacity,
                                       EdgeId edge_capacity) {
  PartitionAssignment a;
  a.worker_count = static_cast<int>(workers.size());
  a.edge_owner.assign(std::size_t{edge_capacity} + 1, kNoWorker);
  a.node_homes.resize(std::size_t{node_capacity} + 1);
  for (const auto& ws : workers) {
    for (std::size_t l = 1; l < ws.global_edge_of_local.size(); ++l) {
      a.edge_owner.at(ws.global_edge_of_local[l]) = ws.worker_id;
    }
    for (std::size_t l = 1; l < ws.global_of_local.size(); ++l) {
      a.node_homes.at(ws.global_of_local[l]).push_back(ws.worker_id);
    }
  }
  for (NodeId v = 0; v < a.node_homes.size(); ++v) {
    auto& homes = a.node_homes[v];
    std::sort(homes.begin(), homes.end());
    if (homes.size() > 1) a.duplicated.push_back(v);
  }
  return a;
}

void WorkerState::write(std::ostream& os) const {
  detail::BinaryWriter out(os);
  out.pod(kWorkerMagic);
  out.pod(kWorkerVersion);
  out.pod<std::int32_t>(worker_id);
  out.pod<std::int32_t>(worker_count);
  out.vec(global_of_local);
  out.vec(global_edge_of_local);
  out.vec(duplicated_local);
  out.pod<std::uint64_t>(peer_homes.size());
  for (const auto& [v, peers] : peer_homes) {
    out.pod(v);
    out.vec(peers);
  }
  subgraph.write(os);
}

WorkerState WorkerState::read(std::istream& is) {
  detail::BinaryReader in(is);
  if (in.pod<std::uint32_t>() != kWorkerMagic) throw Error("persist: not a worker file");
  if (in.pod<std::uint32_t>() != kWorkerVersion) throw Error("persist: unsupported worker file version");
  WorkerState ws;
  ws.worker_id = in.pod<std::int32_t>();
  ws.worker_count = in.pod<std::int32_t>();
  ws.global_of_local = in.vec<NodeId>();
  ws.global_edge_of_local = in.vec<EdgeId>();
  ws.duplicated_local = in.vec<std::uint8_t>();
  const auto peers = in.length();
  for (std::uint64_t i = 0; i < peers; ++i) {
    const auto v = in.pod<NodeId>();
    ws.peer_homes[v] = in.vec<WorkerId>();
  }
  ws.subgraph = Graph::read(is);
  if (ws.global_of_local.size() != std::size_t{ws.subgraph.node_capacity()} + 1 ||
      ws.duplicated_local.size() != ws.global_of_local.size() ||
      ws.global_edge_of_local.size() != std::size_t{ws.subgraph.edge_capacity()} + 1) {
    throw Error("persist: worker maps do not match its subgraph");
  }
  for (NodeId l = 1; l < ws.global_of_local.size(); ++l) ws.local_of_global.emplace(ws.global_of_local[l], l);
  return ws;
}

void Mailbox::send(Message m) { queue_.push_back(std::move(m)); }

std::optional<Message> Mailbox::receive() {
  if (queue_.empty()) return std::nullopt;
  Message m = std::move(queue_.front());
  queue_.pop_front();
  return m;
}

bool RoundLedger::record_improvement(NodeId node, double cost, WorkerId worker) {
  auto [it, inserted] = entries_.try_emplace(node, cost, worker);
  if (inserted) return true;
  if (!(cost < it->second.first)) return false;
  it->second = {cost, worker};
  return true;
}

std::vector<RoundLedger::Report> RoundLedger::apply_round(std::vector<Report> reports) {
  std::sort(reports.begin(), reports.end(), [](const Report& x, const Report& y) {
    return std::tie(x.update.node, x.update.cost, x.worker) < std::tie(y.update.node, y.update.cost, y.worker);
  });
  std::vector<Report> accepted;
  for (const auto& r : reports) {
    if (record_improvement(r.update.node, r.update.cost, r.worker)) accepted.push_back(r);
  }
  return accepted;
}

std::optional<double> RoundLedger::best(NodeId node) const {
  auto it = entries_.find(node);
  if (it == entries_.end()) return std::nullopt;
  return it->second.first;
}

std::optional<WorkerId> RoundLedger::last_improver(NodeId node) const {
  auto it = entries_.find(node);
  if (it == entries_.end()) return std::nullopt;
  return it->second.second;
}

void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows) {
  write_csv_row(os, {"round", "worker", "updates_sent", "nodes_settled", "millis"});
  for (const auto& r : rows) {
    write_csv_row(os, {std::to_string(r.round), std::to_string(r.worker), std::to_string(r.updates_sent),
                       std::to_string(r.nodes_settled), format_double(r.millis)});
  }
}

Orchestration orchestrate(int worker_count, const std::vector<std::vector<CostUpdate>>& initial,
                          const std::function<std::span<const WorkerId>(NodeId)>& homes, const WorkerStep& step,
                          const OrchestrateOptions& options) {
  const auto n = static_cast<std::size_t>(worker_count);
  std::vector<Mailbox> inbox(n);
  Mailbox client;
  for (std::size_t w = 0; w < n && w < initial.size(); ++w) {
    if (!initial[w].empty()) inbox[w].send(SolveStart{kNull, initial[w]});
  }

  Orchestration run;
  std::mt19937_64 shuffler(options.shuffle_seed.value_or(0));

  auto abort_all = [&](const std::string& reason) {
    for (auto& box : inbox) {
      box.clear();
      box.send(Abort{reason});
    }
    throw SolveAborted(reason, run.rounds);
  };

  while (true) {
    if (options.abort && options.abort->load()) abort_all("solve aborted");

    // drain inboxes into per-worker fronts
    std::vector<WorkerId> active;
    std::vector<std::vector<CostUpdate>> fronts(n);
    for (std::size_t w = 0; w < n; ++w) {
      bool got = false;
      while (auto m = inbox[w].receive()) {
        if (auto* start = std::get_if<SolveStart>(&*m)) {
          fronts[w].insert(fronts[w].end(), start->fronts.begin(), start->fronts.end());
          got = true;
        } else if (auto* upd = std::get_if<CostUpdates>(&*m)) {
          fronts[w].insert(fronts[w].end(), upd->updates.begin(), upd->updates.end());
          got = true;
        }
      }
      if (got) active.push_back(static_cast<WorkerId>(w));
    }
    if (active.empty()) break;
    if (run.rounds >= options.max_rounds) abort_all("round limit reached");
    ++run.rounds;
    run.ledger.round = run.rounds;
    if (options.shuffle_seed) std::shuffle(active.begin(), active.end(), shuffler);

    auto service = [&](WorkerId w) {
      const auto t0 = std::chrono::steady_clock::now();
      WorkerReply reply = step(w, fronts[w]);
      const auto t1 = std::chrono::steady_clock::now();
      return RoundDone{run.rounds, w, std::move(reply.improvements), reply.nodes_settled,
                       std::chrono::duration<double, std::milli>(t1 - t0).count()};
    };

    std::vector<RoundDone> done(active.size());
    std::exception_ptr failure;
    WorkerId failed_worker = 0;
    if (options.parallel && active.size() > 1) {
      std::vector<std::future<RoundDone>> jobs;
      jobs.reserve(active.size());
      for (WorkerId w : active) jobs.push_back(std::async(std::launch::async, service, w));
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        try {
          done[i] = jobs[i].get();
        } catch (...) {
          if (!failure) {
            failure = std::current_exception();
            failed_worker = active[i];
          }
        }
      }
    } else {
      for (std::size_t i = 0; i < active.size() && !failure; ++i) {
        try {
          done[i] = service(active[i]);
        } catch (...) {
          failure = std::current_exception();
          failed_worker = active[i];
        }
      }
    }
    if (failure) {
      std::string what = "unknown failure";
      try {
        std::rethrow_exception(failure);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      abort_all("worker " + std::to_string(failed_worker) + " failed: " + what);
    }
    for (auto& d : done) client.send(std::move(d));

    // client side: collect, apply, fan out
    std::vector<RoundLedger::Report> reports;
    std::vector<TraceRow> rows;
    while (auto m = client.receive()) {
      auto& rd = std::get<RoundDone>(*m);
      rows.push_back({rd.round, rd.worker, rd.improvements.size(), rd.nodes_settled, rd.millis});
      for (const auto& u : rd.improvements) reports.push_back({rd.worker, u});
    }
    std::sort(rows.begin(), rows.end(), [](const TraceRow& x, const TraceRow& y) { return x.worker < y.worker; });
    run.trace.insert(run.trace.end(), rows.begin(), rows.end());

    std::vector<std::vector<CostUpdate>> pending(n);
    for (const auto& r : run.ledger.apply_round(std::move(reports))) {
      for (WorkerId h : homes(r.update.node)) {
        if (h == r.worker) continue;
        pending[h].push_back(r.update);
        ++run.deliveries;
      }
    }
    for (std::size_t w = 0; w < n; ++w) {
      if (!pending[w].empty()) inbox[w].send(CostUpdates{std::move(pending[w])});
    }
    if (options.on_round) options.on_round(run.rounds, run.ledger);
  }
  return run;
}

}  // namespace dlsgraph
