#include "vblap/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace vblap {

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t hash_double(std::uint64_t h, double x) {
  return fnv1a(h, &x, sizeof(x));
}

std::uint64_t hash_int(std::uint64_t h, std::uint64_t x) {
  return fnv1a(h, &x, sizeof(x));
}

}  // namespace

WeightedGraph WeightedGraph::from_undirected(std::vector<double> measure,
                                             const std::vector<EdgeTriple>& edges) {
  WeightedGraph g;
  const int n = static_cast<int>(measure.size());
  if (n == 0) throw argument_error("graph needs at least one vertex");
  g.m_ = std::move(measure);
  g.adj_.assign(n, {});

  std::set<std::pair<int, int>> seen;
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw argument_error("edge endpoint out of range");
    if (e.u == e.v) throw argument_error("loop edges are not allowed");
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert(key).second) {
      std::ostringstream os;
      os << "duplicate edge (" << key.first << "," << key.second << ")";
      throw argument_error(os.str());
    }
    if (e.b < 0.0) throw argument_error("negative edge weight");
    if (e.b == 0.0) continue;  // b = 0 means no edge
    g.adj_[e.u].push_back({e.v, e.b});
    g.adj_[e.v].push_back({e.u, e.b});
  }
  for (auto& list : g.adj_)
    std::sort(list.begin(), list.end(),
              [](const Edge& a, const Edge& b) { return a.to < b.to; });
  g.row_sum_.assign(n, 0.0);
  for (int x = 0; x < n; ++x)
    for (const auto& e : g.adj_[x]) g.row_sum_[x] += e.weight;
  return g;
}

WeightedGraph WeightedGraph::from_directed_raw(std::vector<double> measure,
                                               const std::vector<EdgeTriple>& entries) {
  WeightedGraph g;
  const int n = static_cast<int>(measure.size());
  if (n == 0) throw argument_error("graph needs at least one vertex");
  g.m_ = std::move(measure);
  g.adj_.assign(n, {});
  for (const auto& e : entries) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw argument_error("edge endpoint out of range");
    g.adj_[e.u].push_back({e.v, e.b});
  }
  for (auto& list : g.adj_)
    std::sort(list.begin(), list.end(),
              [](const Edge& a, const Edge& b) { return a.to < b.to; });
  g.row_sum_.assign(n, 0.0);
  for (int x = 0; x < n; ++x)
    for (const auto& e : g.adj_[x]) g.row_sum_[x] += e.weight;
  return g;
}

void WeightedGraph::check_vertex(int x) const {
  if (x < 0 || x >= size()) throw argument_error("vertex id out of range");
}

double WeightedGraph::edge_weight(int u, int v) const {
  check_vertex(u);
  check_vertex(v);
  const auto& list = adj_[u];
  auto it = std::lower_bound(list.begin(), list.end(), v,
                             [](const Edge& e, int to) { return e.to < to; });
  if (it != list.end() && it->to == v) return it->weight;
  return 0.0;
}

int WeightedGraph::edge_count() const {
  int total = 0;
  for (int x = 0; x < size(); ++x)
    for (const auto& e : adj_[x])
      if (e.to > x) ++total;
  return total;
}

std::vector<std::pair<int, int>> WeightedGraph::undirected_edges() const {
  std::vector<std::pair<int, int>> out;
  for (int x = 0; x < size(); ++x)
    for (const auto& e : adj_[x])
      if (e.to > x) out.emplace_back(x, e.to);
  return out;
}

std::uint64_t WeightedGraph::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = hash_int(h, static_cast<std::uint64_t>(size()));
  for (double v : m_) h = hash_double(h, v);
  for (int x = 0; x < size(); ++x)
    for (const auto& e : adj_[x]) {
      h = hash_int(h, static_cast<std::uint64_t>(x));
      h = hash_int(h, static_cast<std::uint64_t>(e.to));
      h = hash_double(h, e.weight);
    }
  return h;
}

ValidationReport validate_graph(const WeightedGraph& g, double tol) {
  ValidationReport report;
  const int n = g.size();
  for (int x = 0; x < n; ++x) {
    if (!(g.measure(x) > 0.0)) {
      std::ostringstream os;
      os << "m(" << x << ") = " << g.measure(x) << " is not positive";
      report.push_back({ViolationKind::kMeasure, x, x, os.str()});
    }
  }
  for (int x = 0; x < n; ++x) {
    for (const auto& e : g.neighbors(x)) {
      if (e.weight < 0.0) {
        std::ostringstream os;
        os << "b(" << x << "," << e.to << ") = " << e.weight << " is negative";
        report.push_back({ViolationKind::kNegativeWeight, x, e.to, os.str()});
      }
      if (e.to == x && e.weight != 0.0) {
        std::ostringstream os;
        os << "b(" << x << "," << x << ") = " << e.weight << " violates the zero diagonal";
        report.push_back({ViolationKind::kDiagonal, x, x, os.str()});
        continue;
      }
      if (e.to <= x) continue;  // check each unordered pair once
      const double back = g.edge_weight(e.to, x);
      const double scale = std::max({1.0, std::abs(e.weight), std::abs(back)});
      if (std::abs(e.weight - back) > tol * scale) {
        std::ostringstream os;
        os << "b(" << x << "," << e.to << ") = " << e.weight << " but b(" << e.to << ","
           << x << ") = " << back;
        report.push_back({ViolationKind::kSymmetry, x, e.to, os.str()});
      }
    }
  }
  // Reversed-order recomputation of the row sums against the stored ones.
  for (int x = 0; x < n; ++x) {
    double recomputed = 0.0;
    const auto& list = g.neighbors(x);
    for (auto it = list.rbegin(); it != list.rend(); ++it) recomputed += it->weight;
    const double scale = std::max(1.0, std::abs(g.row_sum(x)));
    if (std::abs(recomputed - g.row_sum(x)) > tol * scale) {
      std::ostringstream os;
      os << "row sum at " << x << ": stored " << g.row_sum(x) << ", recomputed "
         << recomputed;
      report.push_back({ViolationKind::kRowSum, x, x, os.str()});
    }
  }
  return report;
}

bool is_connected(const WeightedGraph& g) {
  const int n = g.size();
  std::vector<char> seen(n, 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int x = stack.back();
    stack.pop_back();
    for (const auto& e : g.neighbors(x)) {
      if (e.weight > 0.0 && !seen[e.to]) {
        seen[e.to] = 1;
        ++count;
        stack.push_back(e.to);
      }
    }
  }
  return count == n;
}

double weighted_degree(const WeightedGraph& g, int x) {
  if (x < 0 || x >= g.size()) throw argument_error("vertex id out of range");
  return g.row_sum(x) / g.measure(x);
}

}  // namespace vblap
