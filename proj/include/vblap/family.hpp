#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vblap/graph.hpp"

namespace vblap {

// Closed-form per-generation rule: value(k) = scale * ratio^k * (k+1)^power.
// The (k+1) shift keeps power rules finite at the root; a harmonic measure
// is {power: -1}, a geometric one {ratio: r}.
struct GenerationRule {
  double scale = 1.0;
  double ratio = 1.0;
  double power = 0.0;

  double operator()(int k) const;
  bool is_geometric() const { return power == 0.0; }
  // Sum over generations >= k; +inf when divergent. Closed form for
  // geometric rules, summation with a remainder bound otherwise.
  double tail_sum(int k) const;
};

enum class FamilyKind { kRay, kBinaryTree, kCycleSequence };

FamilyKind family_kind_from_string(const std::string& s);
std::string to_string(FamilyKind kind);

// One-ended infinite family generated by per-generation rules; the library
// only ever materializes finite truncations of it.
struct GraphFamily {
  FamilyKind kind = FamilyKind::kRay;
  GenerationRule b_rule;      // weight of edges from generation k to k+1
  GenerationRule m_rule;      // measure of generation-k vertices
  GenerationRule sigma_rule;  // metric edge length, generation k to k+1
  int cycle_len = 4;          // cycle-sequence only, >= 3
};

// Finite piece of a family. Vertex ids are breadth-first, so the horizon-h
// vertex list is a prefix of the horizon-(h+1) list and shared vertices keep
// identical b, m. The frontier holds the vertices that have a neighbor
// beyond the horizon (for cycle sequences: the cut vertex only).
struct Truncation {
  WeightedGraph graph;
  std::vector<int> generation;   // per vertex
  std::vector<int> frontier;
  int horizon = 0;
  GraphFamily family;

  // sigma value for the in-truncation edge {u, v} under the family rule.
  double sigma(int u, int v) const;
};

// All vertices of generation <= horizon. horizon >= 1.
Truncation truncate(const GraphFamily& family, int horizon);

// Partial sums S_k of the measure along the canonical ray (the ray itself,
// the leftmost branch of a tree, or the low-id arc through a cycle
// sequence), plus a divergence heuristic. This is a desk-scale certificate,
// not a proof of anything about the infinite family.
struct A1Trace {
  std::vector<double> partial_sums;
  bool divergence_consistent = false;
  bool slow_growth = false;
};

A1Trace check_a1_along_ray(const GraphFamily& family, int horizon);

}  // namespace vblap
