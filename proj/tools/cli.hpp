#pragma once

// Command-line front end over a workspace directory of persisted graphs.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dlsgraph/partition.hpp"
#include "dlsgraph/runtime.hpp"
#include "dlsgraph/topology.hpp"

namespace dlsgraph::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kInternal = 4 };

struct GraphEntry {
  std::string plan;
  int workers = 1;
  std::string graph_file;                 // relative to the workspace
  std::vector<std::string> worker_files;  // one per worker
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t duplicated = 0;
  double score = 0.0;
  std::map<std::string, std::string> options;
};

/// Directory holding catalog.json plus one folder per graph (full graph and per-worker files).
class Workspace {
 public:
  explicit Workspace(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  const std::map<std::string, GraphEntry>& graphs() const { return graphs_; }
  bool contains(const std::string& name) const { return graphs_.count(name) != 0; }
  /// Throws DataError for unknown names.
  const GraphEntry& entry(const std::string& name) const;

  Graph load_graph(const std::string& name) const;
  std::vector<WorkerState> load_workers(const std::string& name) const;

  /// Writes the graph and its workers, then swaps the catalog entry in.
  void store(const std::string& name, const Graph& graph, const std::string& plan,
             const PartitionAssignment& assignment, std::map<std::string, std::string> options);

 private:
  void save_catalog() const;

  std::filesystem::path dir_;
  std::map<std::string, GraphEntry> graphs_;
};

/// Node by key, then by name; keyless graphs also accept internal ids. Throws InvalidEntity.
NodeId resolve_node(const Graph& graph, const std::string& text);
/// Key when present, else name, else internal id.
std::string node_ref(const Graph& graph, NodeId v);

/// `node,cost` rows in internal id order; unreached nodes read `inf`.
void write_cost_csv(std::ostream& os, const Graph& graph, const std::vector<double>& costs);

/// Runs one command; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dlsgraph::cli
