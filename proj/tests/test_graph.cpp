#include <doctest.h>

#include "support/instances.hpp"
#include "vblap/family.hpp"
#include "vblap/graph.hpp"

using namespace vblap;

namespace {

WeightedGraph path_graph(int n, double b = 1.0, double m = 1.0) {
  std::vector<EdgeTriple> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, b});
  return WeightedGraph::from_undirected(std::vector<double>(n, m), edges);
}

bool has_kind(const ValidationReport& report, ViolationKind kind) {
  for (const auto& v : report)
    if (v.kind == kind) return true;
  return false;
}

}  // namespace

TEST_CASE("valid two-vertex graph has an empty report") {
  const auto g = WeightedGraph::from_undirected({1.0, 1.0}, {{0, 1, 1.0}});
  CHECK(validate_graph(g).empty());
  CHECK(g.edge_weight(0, 1) == 1.0);
  CHECK(g.edge_weight(1, 0) == 1.0);
}

TEST_CASE("diagonal entry violates axiom (ii)") {
  const auto g = WeightedGraph::from_directed_raw({1.0}, {{0, 0, 1.0}});
  const auto report = validate_graph(g);
  CHECK(!report.empty());
  CHECK(has_kind(report, ViolationKind::kDiagonal));
}

TEST_CASE("asymmetric weights violate axiom (i)") {
  const auto g =
      WeightedGraph::from_directed_raw({1.0, 1.0}, {{0, 1, 1.0}, {1, 0, 2.0}});
  CHECK(has_kind(validate_graph(g), ViolationKind::kSymmetry));
}

TEST_CASE("nonpositive measure is reported") {
  const auto g = WeightedGraph::from_directed_raw({1.0, -2.0}, {{0, 1, 1.0}, {1, 0, 1.0}});
  CHECK(has_kind(validate_graph(g), ViolationKind::kMeasure));
}

TEST_CASE("duplicate undirected edges are rejected") {
  CHECK_THROWS_AS(
      WeightedGraph::from_undirected({1.0, 1.0}, {{0, 1, 1.0}, {1, 0, 2.0}}),
      argument_error);
}

TEST_CASE("connectivity") {
  CHECK(is_connected(path_graph(3)));
  const auto two_components =
      WeightedGraph::from_undirected({1, 1, 1, 1}, {{0, 1, 1.0}, {2, 3, 1.0}});
  CHECK(!is_connected(two_components));
  const auto singleton = WeightedGraph::from_undirected({1.0}, {});
  CHECK(is_connected(singleton));
}

TEST_CASE("weighted degree") {
  const auto path = path_graph(3);
  CHECK(weighted_degree(path, 1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(weighted_degree(path, 0) == doctest::Approx(1.0).epsilon(1e-15));

  const auto star =
      WeightedGraph::from_undirected({2.0, 1.0, 1.0}, {{0, 1, 1.0}, {0, 2, 1.0}});
  CHECK(weighted_degree(star, 0) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(weighted_degree(path, 7), argument_error);
  CHECK_THROWS_AS(weighted_degree(path, -1), argument_error);
}

TEST_CASE("degree agrees with the stored row sum") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto g = testing::random_connected_graph(rng);
    for (int x = 0; x < g.size(); ++x) {
      // same summation order reproduces the stored row sum bit for bit
      double forward = 0.0;
      for (const auto& e : g.neighbors(x)) forward += e.weight;
      CHECK(forward == g.row_sum(x));
      CHECK(weighted_degree(g, x) == g.row_sum(x) / g.measure(x));
      // permuted (reversed) summation stays within 1e-12 relative
      double reversed = 0.0;
      const auto& list = g.neighbors(x);
      for (auto it = list.rbegin(); it != list.rend(); ++it) reversed += it->weight;
      CHECK(std::abs(reversed - g.row_sum(x)) <= 1e-12 * std::max(1.0, g.row_sum(x)));
    }
  }
}

TEST_CASE("random graphs validate cleanly") {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    Rng rng(seed);
    const auto g = testing::random_connected_graph(rng);
    CHECK(validate_graph(g).empty());
    CHECK(is_connected(g));
  }
}
