#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vblap/types.hpp"

namespace vblap {

// Directed half-edge as stored in the adjacency lists.
struct Edge {
  int to = 0;
  double weight = 0.0;
};

struct EdgeTriple {
  int u = 0;
  int v = 0;
  double b = 0.0;
};

enum class ViolationKind {
  kSymmetry,       // b(x,y) != b(y,x)
  kDiagonal,       // b(x,x) != 0
  kRowSum,         // stored row sum disagrees with recomputation
  kMeasure,        // m(x) <= 0
  kNegativeWeight  // b(x,y) < 0
};

struct Violation {
  ViolationKind kind;
  int u = 0;
  int v = 0;
  std::string description;
};

using ValidationReport = std::vector<Violation>;

// Finite weighted graph: positive vertex measure m and nonnegative symmetric
// edge weight b, stored as per-vertex sorted adjacency with both directions
// materialized. Symmetry is validated, not assumed, so corrupt inputs are
// representable and detectable. Immutable after construction.
class WeightedGraph {
 public:
  // Normal path: each undirected edge listed once; both directions are
  // materialized. Duplicate edges (in either orientation) are an error.
  static WeightedGraph from_undirected(std::vector<double> measure,
                                       const std::vector<EdgeTriple>& edges);

  // Raw path: stores exactly the directed assignments given, including
  // asymmetric or diagonal ones. validate_graph reports on the result.
  static WeightedGraph from_directed_raw(std::vector<double> measure,
                                         const std::vector<EdgeTriple>& entries);

  int size() const { return static_cast<int>(m_.size()); }
  double measure(int x) const { return m_.at(x); }
  const std::vector<double>& measures() const { return m_; }
  const std::vector<Edge>& neighbors(int x) const { return adj_.at(x); }
  // Row sum computed once at construction, in adjacency order.
  double row_sum(int x) const { return row_sum_.at(x); }
  double edge_weight(int u, int v) const;  // 0 when not adjacent
  bool has_edge(int u, int v) const { return edge_weight(u, v) > 0.0; }
  int edge_count() const;  // undirected count

  // Canonical undirected edge list (u < v), sorted.
  std::vector<std::pair<int, int>> undirected_edges() const;

  std::uint64_t content_hash() const;

  // Empty placeholder; the factories are the only way to get a usable graph.
  WeightedGraph() = default;

 private:
  void check_vertex(int x) const;

  std::vector<double> m_;
  std::vector<std::vector<Edge>> adj_;
  std::vector<double> row_sum_;
};

// Checks axioms: b symmetric, zero diagonal, finite validated row sums,
// m positive. Violations are data, not failures; empty report means valid.
ValidationReport validate_graph(const WeightedGraph& g, double tol = 1e-12);

// True iff every vertex is reachable from vertex 0 through edges with b > 0.
bool is_connected(const WeightedGraph& g);

// Deg(x) = (1/m(x)) * sum_y b(x,y).
double weighted_degree(const WeightedGraph& g, int x);

}  // namespace vblap
