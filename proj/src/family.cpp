#include "vblap/family.hpp"

#include <algorithm>
#include <cmath>

namespace vblap {

double GenerationRule::operator()(int k) const {
  if (k < 0) throw argument_error("generation index must be nonnegative");
  return scale * std::pow(ratio, k) * std::pow(static_cast<double>(k + 1), power);
}

double GenerationRule::tail_sum(int k) const {
  if (scale == 0.0) return 0.0;
  if (ratio > 1.0) return kInf;
  if (ratio == 1.0) {
    if (power >= -1.0) return kInf;
    // p-series tail, converges for power < -1: sum to a cutoff plus an
    // integral remainder bound folded into the last term.
    double sum = 0.0;
    int j = k;
    for (; j < k + 200000; ++j) {
      const double term = (*this)(j);
      sum += term;
      if (term < 1e-16 * std::max(sum, 1.0)) break;
    }
    // remainder <= integral_{j+1}^inf scale * x^power dx
    const double q = -power;
    sum += scale * std::pow(static_cast<double>(j + 2), 1.0 - q) / (q - 1.0);
    return sum;
  }
  if (is_geometric()) return (*this)(k) / (1.0 - ratio);
  // ratio < 1 with a polynomial factor: sum until the geometric envelope
  // bounds the remainder below 1e-16 of the total.
  double sum = 0.0;
  for (int j = k;; ++j) {
    const double term = (*this)(j);
    sum += term;
    const double envelope = term * ratio / (1.0 - ratio) *
                            (power > 0.0 ? std::pow(2.0, power) : 1.0);
    if (envelope < 1e-16 * std::max(sum, 1e-300)) break;
    if (j > k + 1000000) break;
  }
  return sum;
}

FamilyKind family_kind_from_string(const std::string& s) {
  if (s == "ray") return FamilyKind::kRay;
  if (s == "binary-tree") return FamilyKind::kBinaryTree;
  if (s == "cycle-sequence") return FamilyKind::kCycleSequence;
  throw argument_error("unknown family kind: " + s);
}

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kRay: return "ray";
    case FamilyKind::kBinaryTree: return "binary-tree";
    case FamilyKind::kCycleSequence: return "cycle-sequence";
  }
  return "?";
}

namespace {

Truncation build_ray(const GraphFamily& f, int horizon) {
  std::vector<double> m;
  std::vector<EdgeTriple> edges;
  std::vector<int> gen;
  for (int k = 0; k <= horizon; ++k) {
    m.push_back(f.m_rule(k));
    gen.push_back(k);
    if (k < horizon) edges.push_back({k, k + 1, f.b_rule(k)});
  }
  Truncation t;
  t.graph = WeightedGraph::from_undirected(std::move(m), edges);
  t.generation = std::move(gen);
  t.frontier = {horizon};
  t.horizon = horizon;
  return t;
}

Truncation build_binary_tree(const GraphFamily& f, int horizon) {
  std::vector<double> m;
  std::vector<EdgeTriple> edges;
  std::vector<int> gen;
  m.push_back(f.m_rule(0));
  gen.push_back(0);
  std::vector<int> level = {0};
  for (int k = 1; k <= horizon; ++k) {
    std::vector<int> next;
    for (int parent : level) {
      for (int c = 0; c < 2; ++c) {
        const int id = static_cast<int>(m.size());
        m.push_back(f.m_rule(k));
        gen.push_back(k);
        edges.push_back({parent, id, f.b_rule(k - 1)});
        next.push_back(id);
      }
    }
    level = std::move(next);
  }
  Truncation t;
  t.graph = WeightedGraph::from_undirected(std::move(m), edges);
  t.generation = std::move(gen);
  t.frontier = std::move(level);
  t.horizon = horizon;
  return t;
}

// Cycles of length L chained at cut vertices. The root is the entry of the
// first cycle; the exit (cut) vertex sits opposite, floor(L/2) steps along
// the low-id arc. All vertices of cycle j carry generation j; the edges of
// cycle j use the rules at index j-1.
Truncation build_cycle_sequence(const GraphFamily& f, int horizon) {
  if (f.cycle_len < 3) throw argument_error("cycle_len must be at least 3");
  const int L = f.cycle_len;
  std::vector<double> m;
  std::vector<EdgeTriple> edges;
  std::vector<int> gen;
  m.push_back(f.m_rule(0));
  gen.push_back(0);
  int entry = 0;
  int cut = 0;
  for (int j = 1; j <= horizon; ++j) {
    // new vertices of this cycle, walked around from the entry
    std::vector<int> ring = {entry};
    for (int i = 1; i < L; ++i) {
      const int id = static_cast<int>(m.size());
      m.push_back(f.m_rule(j));
      gen.push_back(j);
      ring.push_back(id);
    }
    for (int i = 0; i < L; ++i)
      edges.push_back({ring[i], ring[(i + 1) % L], f.b_rule(j - 1)});
    cut = ring[L / 2];
    entry = cut;
  }
  Truncation t;
  t.graph = WeightedGraph::from_undirected(std::move(m), edges);
  t.generation = std::move(gen);
  t.frontier = {cut};
  t.horizon = horizon;
  return t;
}

}  // namespace

double Truncation::sigma(int u, int v) const {
  if (!graph.has_edge(u, v)) throw argument_error("sigma queried on a non-edge");
  // Rule index: min endpoint generation for tree-like kinds (edge k -> k+1
  // uses index k), cycle index minus one for cycle sequences.
  const int index = family.kind == FamilyKind::kCycleSequence
                        ? std::max(generation[u], generation[v]) - 1
                        : std::min(generation[u], generation[v]);
  return family.sigma_rule(index);
}

Truncation truncate(const GraphFamily& family, int horizon) {
  if (horizon < 1) throw argument_error("horizon must be at least 1");
  Truncation t;
  switch (family.kind) {
    case FamilyKind::kRay: t = build_ray(family, horizon); break;
    case FamilyKind::kBinaryTree: t = build_binary_tree(family, horizon); break;
    case FamilyKind::kCycleSequence: t = build_cycle_sequence(family, horizon); break;
  }
  t.family = family;
  return t;
}

A1Trace check_a1_along_ray(const GraphFamily& family, int horizon) {
  const Truncation t = truncate(family, horizon);
  const auto& g = t.graph;
  // Deterministic forward walk: always step to the smallest-id neighbor of
  // strictly larger generation.
  std::vector<double> ms;
  int x = 0;
  ms.push_back(g.measure(0));
  while (t.generation[x] < horizon) {
    int next = -1;
    for (const auto& e : g.neighbors(x)) {
      if (t.generation[e.to] > t.generation[x]) {
        next = e.to;
        break;  // neighbors sorted by id
      }
    }
    if (next < 0) break;
    x = next;
    ms.push_back(g.measure(x));
  }
  A1Trace trace;
  trace.partial_sums.resize(ms.size());
  double running = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    running += ms[i];
    trace.partial_sums[i] = running;
  }
  const std::size_t half = (ms.size() - 1) / 2;
  const double s_half = trace.partial_sums[half];
  const double s_full = trace.partial_sums.back();
  // Heuristic: a near-flat tail looks summable; anything else is consistent
  // with divergence, sublinear growth flagged separately.
  trace.divergence_consistent = (s_full - s_half) > 1e-3 * s_full;
  trace.slow_growth = trace.divergence_consistent && (s_full / s_half) < 1.5;
  return trace;
}

}  // namespace vblap
