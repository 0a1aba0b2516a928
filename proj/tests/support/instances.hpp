#pragma once

#include <cstdint>

#include "vblap/bundle.hpp"
#include "vblap/graph.hpp"
#include "vblap/rng.hpp"

namespace vblap::testing {

// Random connected weighted graph: spanning tree plus a few extra edges,
// b and m in [0.5, 2].
WeightedGraph random_connected_graph(Rng& rng, int min_n = 2, int max_n = 12);

Section random_section(Rng& rng, const Bundle& bundle);

// Hermitian part positive semidefinite: G G^*/d plus a skew-Hermitian part.
Potential random_accretive_potential(Rng& rng, const Bundle& bundle);

// Hermitian blocks, optionally shifted to W + shift I.
Potential random_selfadjoint_potential(Rng& rng, const Bundle& bundle,
                                       double shift = 0.0);

// Unstructured complex blocks (bounded entries).
Potential random_bounded_potential(Rng& rng, const Bundle& bundle);

enum class PotentialKind { kZero, kBounded, kAccretive, kSelfadjoint };

struct RandomInstance {
  WeightedGraph graph;
  Bundle bundle{std::vector<int>{1}};
  Connection connection;
  Potential potential;
};

RandomInstance random_instance(std::uint64_t seed, PotentialKind kind,
                               int max_n = 12, int max_dim = 3,
                               bool unit_measure = false);

// dim-1 fibers, identity connection, W = 0.
RandomInstance random_scalar_instance(std::uint64_t seed, int max_n = 12,
                                      bool unit_measure = false);

}  // namespace vblap::testing
