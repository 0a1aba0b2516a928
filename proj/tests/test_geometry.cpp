#include <doctest.h>

#include <cmath>

#include "support/instances.hpp"
#include "vblap/geometry.hpp"
#include "vblap/operator.hpp"

using namespace vblap;

namespace {

GraphFamily incomplete_ray() {
  // sigma_k = 2^-k with b_k = 4^k / 3 keeps the path metric intrinsic
  // while the tail sum converges.
  GraphFamily family;
  family.kind = FamilyKind::kRay;
  family.b_rule = {1.0 / 3.0, 4.0, 0.0};
  family.sigma_rule = {1.0, 0.5, 0.0};
  return family;
}

}  // namespace

TEST_CASE("shortest paths") {
  SUBCASE("unit three-path") {
    const auto g =
        WeightedGraph::from_undirected({1, 1, 1}, {{0, 1, 1.0}, {1, 2, 1.0}});
    SigmaMap sigma;
    sigma.set(0, 1, 1.0);
    sigma.set(1, 2, 1.0);
    const RealVector d = shortest_paths(g, sigma, 0);
    CHECK(d[0] == 0.0);
    CHECK(d[2] == doctest::Approx(2.0));
  }
  SUBCASE("triangle routes around the heavy edge") {
    const auto g = WeightedGraph::from_undirected(
        {1, 1, 1}, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
    SigmaMap sigma;
    sigma.set(0, 1, 1.0);
    sigma.set(1, 2, 1.0);
    sigma.set(0, 2, 3.0);
    const Eigen::MatrixXd d = all_pairs_shortest_paths(g, sigma);
    CHECK(d(0, 2) == doctest::Approx(2.0));
    for (int x = 0; x < 3; ++x) CHECK(d(x, x) == 0.0);
  }
  SUBCASE("disconnected pairs are infinite") {
    const auto g =
        WeightedGraph::from_undirected({1, 1, 1, 1}, {{0, 1, 1.0}, {2, 3, 1.0}});
    SigmaMap sigma;
    sigma.set(0, 1, 1.0);
    sigma.set(2, 3, 1.0);
    const RealVector d = shortest_paths(g, sigma, 0);
    CHECK(std::isinf(d[2]));
  }
  SUBCASE("triangle inequality on sampled triples") {
    Rng rng(31);
    const auto g = testing::random_connected_graph(rng, 5, 12);
    const SigmaMap sigma = default_intrinsic_sigma(g);
    const Eigen::MatrixXd d = all_pairs_shortest_paths(g, sigma);
    for (int trial = 0; trial < 10000; ++trial) {
      const int a = rng.below(g.size());
      const int b = rng.below(g.size());
      const int c = rng.below(g.size());
      CHECK(d(a, c) <= d(a, b) + d(b, c) + 1e-12);
    }
  }
}

TEST_CASE("default intrinsic sigma") {
  SUBCASE("unit path hand values") {
    const auto g =
        WeightedGraph::from_undirected({1, 1, 1}, {{0, 1, 1.0}, {1, 2, 1.0}});
    const SigmaMap sigma = default_intrinsic_sigma(g);
    CHECK(sigma.value(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    const IntrinsicCheck check = intrinsic_check(g, sigma);
    CHECK(check.intrinsic);
    CHECK(check.vertex_values[1] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("single edge") {
    const auto g = WeightedGraph::from_undirected({1, 1}, {{0, 1, 1.0}});
    const SigmaMap sigma = default_intrinsic_sigma(g);
    CHECK(sigma.value(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(intrinsic_check(g, sigma).worst_value == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("star graph saturates at the center") {
    const int k = 7;
    std::vector<EdgeTriple> edges;
    for (int leaf = 1; leaf <= k; ++leaf) edges.push_back({0, leaf, 1.0});
    const auto g = WeightedGraph::from_undirected(std::vector<double>(k + 1, 1.0), edges);
    const IntrinsicCheck check = intrinsic_check(g, default_intrinsic_sigma(g));
    CHECK(check.intrinsic);
    CHECK(check.worst_value == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(check.worst_vertex == 0);
  }
  SUBCASE("sigma = 1 fails on the unit path") {
    const auto g =
        WeightedGraph::from_undirected({1, 1, 1}, {{0, 1, 1.0}, {1, 2, 1.0}});
    SigmaMap ones;
    ones.set(0, 1, 1.0);
    ones.set(1, 2, 1.0);
    const IntrinsicCheck check = intrinsic_check(g, ones);
    CHECK(!check.intrinsic);
    CHECK(check.worst_vertex == 1);
    CHECK(check.worst_value == doctest::Approx(2.0));
  }
  SUBCASE("random graphs always pass") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed);
      const auto g = testing::random_connected_graph(rng, 2, 12);
      const IntrinsicCheck check = intrinsic_check(g, default_intrinsic_sigma(g));
      CHECK(check.intrinsic);
      CHECK(check.worst_value <= 1.0 + 1e-12);
    }
  }
  SUBCASE("generated families always pass") {
    for (FamilyKind kind :
         {FamilyKind::kRay, FamilyKind::kBinaryTree, FamilyKind::kCycleSequence}) {
      GraphFamily family;
      family.kind = kind;
      family.b_rule = {1.5, 0.8, 0.0};
      const Truncation t = truncate(family, 5);
      CHECK(intrinsic_check(t.graph, default_intrinsic_sigma(t.graph)).intrinsic);
    }
  }
}

TEST_CASE("cauchy distance") {
  SUBCASE("geometric ray tail is exact") {
    const Truncation t = truncate(incomplete_ray(), 12);
    const auto d = cauchy_distance(t);
    for (int k = 0; k <= 12; ++k)
      CHECK(d[k] == doctest::Approx(std::pow(2.0, 1 - k)).epsilon(1e-12));
  }
  SUBCASE("divergent tails mark completeness") {
    GraphFamily family;
    family.kind = FamilyKind::kRay;  // sigma = 1
    const auto d = cauchy_distance(truncate(family, 10));
    for (double value : d) CHECK(std::isinf(value));
  }
  SUBCASE("binary tree with sigma = 3^-k") {
    GraphFamily family;
    family.kind = FamilyKind::kBinaryTree;
    family.sigma_rule = {1.0, 1.0 / 3.0, 0.0};
    const Truncation t = truncate(family, 8);
    const auto d = cauchy_distance(t);
    for (int x = 0; x < t.graph.size(); ++x) {
      const int k = t.generation[x];
      CHECK(d[x] == doctest::Approx(1.5 * std::pow(3.0, -k)).epsilon(1e-12));
    }
  }
  SUBCASE("cycle sequence crosses each cycle through the short arc") {
    GraphFamily family;
    family.kind = FamilyKind::kCycleSequence;
    family.cycle_len = 4;
    family.sigma_rule = {1.0, 0.5, 0.0};
    const auto d = cauchy_distance(truncate(family, 9));
    CHECK(d[0] == doctest::Approx(4.0).epsilon(1e-12));
  }
}

TEST_CASE("boundary geometry and the regularity probe") {
  SUBCASE("incomplete ray with eps = 1/8 has a single boundary vertex") {
    const Truncation t = truncate(incomplete_ray(), 12);
    const auto d = cauchy_distance(t);
    const BoundaryGeometry geometry = boundary_geometry(t, d, 0.125);
    CHECK(geometry.x_eps == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(geometry.boundary == std::vector<int>{4});

    const RegularityReport report = regularity_probe(t, 0.125);
    CHECK(report.geometry.boundary == std::vector<int>{4});
    CHECK(report.stabilized);
    CHECK(report.counts.back().count == 1);
  }
  SUBCASE("complete ray has an empty boundary") {
    GraphFamily family;
    family.kind = FamilyKind::kRay;
    const RegularityReport report = regularity_probe(truncate(family, 10), 0.5);
    CHECK(report.geometry.boundary.empty());
    CHECK(report.geometry.x_eps.size() == 11);
    CHECK(report.stabilized);
  }
  SUBCASE("incomplete binary tree boundary stabilizes below the horizon") {
    GraphFamily family;
    family.kind = FamilyKind::kBinaryTree;
    family.sigma_rule = {1.0, 1.0 / 3.0, 0.0};
    const Truncation t = truncate(family, 8);
    const double eps = 1.5 * std::pow(3.0, -5) * 0.99;
    const RegularityReport report = regularity_probe(t, eps);
    CHECK(report.max_boundary_generation == 5);
    CHECK(report.geometry.boundary.size() == 32);
    CHECK(report.stabilized);
  }
}

TEST_CASE("cutoff functions") {
  SUBCASE("f ramp values") {
    const double eps = 0.1, rho = 0.3;
    const std::vector<double> d = {0.05, 0.1, 0.2, 0.3, 0.65, 1.0, 2.0, kInf};
    const RealVector f = cutoff_f_eps(d, eps, rho);
    CHECK(f[0] == 0.0);                       // below eps
    CHECK(f[1] == 0.0);                       // at eps
    CHECK(f[2] == doctest::Approx(rho / 2));  // ramp midpoint
    CHECK(f[3] == doctest::Approx(rho));      // continuous at rho
    CHECK(f[4] == doctest::Approx(0.65));     // identity segment
    CHECK(f[5] == 1.0);
    CHECK(f[6] == 1.0);
    CHECK(f[7] == 1.0);
    CHECK_THROWS_AS(cutoff_f_eps(d, 0.3, 0.1), argument_error);
    CHECK_THROWS_AS(cutoff_f_eps(d, 0.2, 0.6), argument_error);
  }
  SUBCASE("g ball profile") {
    const int n = 7;
    std::vector<EdgeTriple> edges;
    for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
    const auto g = WeightedGraph::from_undirected(std::vector<double>(n, 1.0), edges);
    SigmaMap sigma;
    for (int i = 0; i + 1 < n; ++i) sigma.set(i, i + 1, 0.75);
    const double alpha = 0.5;  // thresholds at d = 2 and d = 4
    const RealVector values = cutoff_g_alpha(g, sigma, 0, alpha);
    CHECK(values[0] == 1.0);
    CHECK(values[1] == 1.0);                     // d = 0.75
    CHECK(values[2] == 1.0);                     // d = 1.5
    CHECK(values[3] == doctest::Approx(0.875));  // d = 2.25 -> 2 - 0.5 d
    CHECK(values[4] == doctest::Approx(0.5));    // d = 3, the ramp midpoint
    CHECK(values[6] == 0.0);                     // d = 4.5 beyond 2/alpha
    CHECK_THROWS_AS(cutoff_g_alpha(g, sigma, 0, 0.0), argument_error);
  }
}

TEST_CASE("lipschitz constants") {
  const Truncation t = truncate(incomplete_ray(), 12);
  const SigmaMap sigma = SigmaMap::from_truncation(t);

  SUBCASE("constants have zero slope") {
    CHECK(lipschitz_constant(t.graph, sigma, RealVector::Constant(13, 4.2)) == 0.0);
  }
  SUBCASE("distance functions are 1-Lipschitz") {
    const RealVector d0 = shortest_paths(t.graph, sigma, 0);
    CHECK(lipschitz_constant(t.graph, sigma, d0) <= 1.0 + 1e-12);
  }
  SUBCASE("cutoff products satisfy the slope bound on the schedule grid") {
    const auto d = cauchy_distance(t);
    for (const auto& point : default_agmon_schedule()) {
      const RealVector f = cutoff_f_eps(d, point.eps, point.rho);
      const RealVector g = cutoff_g_alpha(t.graph, sigma, 0, point.alpha);
      const RealVector product = f.cwiseProduct(g);
      const double bound = point.rho / (point.rho - point.eps) + point.alpha;
      CHECK(lipschitz_constant(t.graph, sigma, product) <= bound + 1e-12);

      // support containment in E_{eps,alpha} is exact
      const RealVector from_root = shortest_paths(t.graph, sigma, 0);
      for (int x = 0; x < t.graph.size(); ++x) {
        if (product[x] != 0.0) {
          CHECK(d[x] >= point.eps);
          CHECK(from_root[x] <= 2.0 / point.alpha);
        }
      }
    }
  }
}

TEST_CASE("spectral minorant hypothesis") {
  const Truncation t = truncate(incomplete_ray(), 10);
  const auto d = cauchy_distance(t);
  const Bundle bundle = Bundle::constant(t.graph.size(), 1);
  const auto conn = Connection::identity(t.graph, bundle);

  SUBCASE("equality case passes with zero margin") {
    const Potential w = minorant_equality_potential(bundle, d, 0.0);
    const AgmonHypothesis hyp =
        agmon_hypothesis_check(t.graph, bundle, conn, w, d, 0.0, 20, 5);
    CHECK(hyp.pointwise_ok);
    CHECK(std::abs(hyp.pointwise_margin) <= 1e-10);
    CHECK(hyp.form_ok);
    CHECK(hyp.lambda == doctest::Approx(-1.5));
  }
  SUBCASE("zero potential fails on the incomplete ray") {
    const AgmonHypothesis hyp =
        agmon_hypothesis_check(t.graph, bundle, conn, {}, d, 0.0, 5, 5);
    CHECK(!hyp.pointwise_ok);
    CHECK(hyp.pointwise_margin < -1.0);
  }
  SUBCASE("complete families pass with W = 0 and C = 0") {
    GraphFamily complete;
    complete.kind = FamilyKind::kRay;
    const Truncation tc = truncate(complete, 8);
    const auto dc = cauchy_distance(tc);
    const Bundle bc = Bundle::constant(tc.graph.size(), 1);
    const AgmonHypothesis hyp = agmon_hypothesis_check(
        tc.graph, bc, Connection::identity(tc.graph, bc), {}, dc, 0.0, 10, 2);
    CHECK(hyp.pointwise_ok);
    CHECK(hyp.pointwise_margin == 0.0);
  }
  SUBCASE("non-self-adjoint potentials are rejected") {
    Potential w = zero_potential(bundle);
    w[0](0, 0) = cplx(0.0, 1.0);
    CHECK_THROWS_AS(agmon_hypothesis_check(t.graph, bundle, conn, w, d, 0.0, 5, 5),
                    precondition_error);
  }
}

TEST_CASE("vanishing experiment") {
  const Truncation t = truncate(incomplete_ray(), 10);
  const auto d = cauchy_distance(t);
  const SigmaMap sigma = SigmaMap::from_truncation(t);
  const Bundle bundle = Bundle::constant(t.graph.size(), 1);
  const auto conn = Connection::identity(t.graph, bundle);
  const Potential w = minorant_equality_potential(bundle, d, 0.0);

  SUBCASE("zero section yields all-zero quantities") {
    const AgmonExperiment experiment = agmon_vanishing_experiment(
        t.graph, bundle, conn, w, -1.5, zero_section(bundle), d, sigma, 0,
        default_agmon_schedule());
    for (const auto& point : experiment.points) {
      CHECK(point.lhs == 0.0);
      CHECK(point.rhs_upper == 0.0);
      CHECK(point.sum_s == 0.0);
      CHECK(point.upper_ok);
      CHECK(point.lower_ok);
    }
    CHECK(experiment.final_bound == 0.0);
  }
  SUBCASE("nonzero residual violates the precondition") {
    Section v = zero_section(bundle);
    v[0][0] = 1.0;
    CHECK_THROWS_AS(
        agmon_vanishing_experiment(t.graph, bundle, conn, w, -1.5, v, d, sigma, 0,
                                   default_agmon_schedule()),
        precondition_error);
  }
  SUBCASE("upper bound holds for exact eigenpairs without the hypothesis") {
    // The schedule inequality chain needs only the eigen relation, the
    // intrinsic metric and unitarity, so an actual eigenpair of the
    // truncated operator must satisfy the upper display at every point.
    const auto op = assemble(t.graph, bundle, conn, w);
    const PencilEigen eigen = pencil_eigensolve(op);
    for (int index : {0, 3, t.graph.size() - 1}) {
      const Section v = unstack(bundle, eigen.eigenvectors.col(index));
      const AgmonExperiment experiment = agmon_vanishing_experiment(
          t.graph, bundle, conn, w, eigen.eigenvalues[index], v, d, sigma, 0,
          default_agmon_schedule(), 1e-6);
      for (const auto& point : experiment.points) CHECK(point.upper_ok);
    }
  }
}
