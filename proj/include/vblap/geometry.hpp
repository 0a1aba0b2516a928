#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "vblap/bundle.hpp"
#include "vblap/family.hpp"
#include "vblap/graph.hpp"

namespace vblap {

// Symmetric per-edge lengths; positive exactly on edges.
class SigmaMap {
 public:
  void set(int u, int v, double value);
  double value(int u, int v) const;  // throws when the edge carries no length
  bool has(int u, int v) const;
  static SigmaMap from_truncation(const Truncation& trunc);

 private:
  std::unordered_map<std::uint64_t, double> values_;
};

// sigma(x,y) = max(Deg(x), Deg(y))^{-1/2}; intrinsic by construction since
// (1/m) sum b sigma^2 <= (1/m) sum b / Deg(x) = 1.
SigmaMap default_intrinsic_sigma(const WeightedGraph& g);

// Single-source shortest paths under sigma; +inf marks unreachable vertices.
RealVector shortest_paths(const WeightedGraph& g, const SigmaMap& sigma, int source);
Eigen::MatrixXd all_pairs_shortest_paths(const WeightedGraph& g, const SigmaMap& sigma);

struct IntrinsicCheck {
  bool intrinsic = true;
  int worst_vertex = 0;
  double worst_value = 0.0;           // max over x of (1/m) sum b d^2
  std::vector<double> vertex_values;  // the per-vertex sums
};

IntrinsicCheck intrinsic_check(const WeightedGraph& g, const SigmaMap& sigma,
                               double tol = 1e-12);
// Same check with a full distance matrix, restricted to edges.
IntrinsicCheck intrinsic_check(const WeightedGraph& g, const Eigen::MatrixXd& distances,
                               double tol = 1e-12);

// Distance to the Cauchy boundary on a family truncation: multi-source
// shortest paths from the frontier, offset by the closed-form tail of the
// sigma rule beyond the horizon. Exact for the declared families; +inf
// everywhere when the tail diverges (metrically complete family).
std::vector<double> cauchy_distance(const Truncation& trunc);

struct BoundaryGeometry {
  double eps = 0.0;
  std::vector<int> x_eps;     // {x : D(x) >= eps}
  std::vector<int> boundary;  // members of x_eps with an in-truncation neighbor outside
};

BoundaryGeometry boundary_geometry(const Truncation& trunc,
                                   const std::vector<double>& d_values, double eps);

struct RegularityReport {
  BoundaryGeometry geometry;
  struct BallCount {
    double radius = 0.0;
    int count = 0;
  };
  std::vector<BallCount> counts;  // boundary members within d_sigma(root, .) <= radius
  // Within-horizon certificate, not a proof: the boundary set keeps a
  // two-generation buffer from the truncation frontier.
  bool stabilized = false;
  int max_boundary_generation = -1;
};

RegularityReport regularity_probe(const Truncation& trunc, double eps);

// f_eps(x) = F(D(x)) with F = 0 below eps, the linear ramp rho(s-eps)/(rho-eps)
// on [eps, rho], F(s) = s on [rho, 1] and 1 beyond; slope never exceeds
// rho/(rho-eps). Requires 0 < eps < rho < 1/2.
RealVector cutoff_f_eps(const std::vector<double>& d_values, double eps, double rho);

// g_alpha(x) = G(d_sigma(x0, x)) with G = 1 up to 1/alpha, 2 - alpha s on
// [1/alpha, 2/alpha], 0 beyond; support inside the closed 2/alpha ball.
RealVector cutoff_g_alpha(const WeightedGraph& g, const SigmaMap& sigma, int x0,
                          double alpha);

// max over edges of |phi(x) - phi(y)| / sigma(x,y).
double lipschitz_constant(const WeightedGraph& g, const SigmaMap& sigma,
                          const RealVector& phi);

// W(x) = (1/(2 D(x)^2) - C) I, the equality case of the spectral minorant.
Potential minorant_equality_potential(const Bundle& bundle,
                                      const std::vector<double>& d_values, double c);

struct AgmonHypothesis {
  bool pointwise_ok = true;
  int worst_vertex = -1;
  double pointwise_margin = 0.0;  // min over x of lambda_min(W) - (1/(2D^2) - C)
  bool form_ok = true;
  double worst_form_margin = 0.0;
  double form_scale = 1.0;
  double lambda = 0.0;  // -C - 3/2
};

// Pointwise spectral minorant for self-adjoint W plus the sampled form-level
// bound (u, (H - lambda)u) >= (1/2) sum max(1/D^2, 1) m |u|^2 + ||u||^2 at
// lambda = -C - 3/2.
AgmonHypothesis agmon_hypothesis_check(const WeightedGraph& g, const Bundle& bundle,
                                       const Connection& conn, const Potential& w,
                                       const std::vector<double>& d_values, double c,
                                       int samples, std::uint64_t seed);

struct AgmonSchedulePoint {
  double rho = 0.0, eps = 0.0, alpha = 0.0;
};

// rho in {0.4, 0.2, 0.1} crossed with alpha in {1, 0.5, 0.25}, eps = rho/2;
// coarse to fine.
std::vector<AgmonSchedulePoint> default_agmon_schedule();

struct AgmonPointReport {
  AgmonSchedulePoint point;
  double beta = 0.0;            // rho/(rho-eps) + alpha
  double lhs = 0.0;             // (f g v, (H - lambda)(f g v))
  double rhs_upper = 0.0;       // (beta^2 / 2) sum m |v|^2
  double sum_s = 0.0;           // sum over S_{rho,alpha} of m |v|^2
  double cutoff_norm_sq = 0.0;  // ||f g v||^2
  double cert_bound = 0.0;      // beta^2 ||v||^2 - 2 ||f g v||^2, bounds sum_s
  bool upper_ok = false;        // lhs <= rhs_upper + tol * scale
  bool lower_ok = false;        // lhs >= sum_s/2 + ||f g v||^2 - tol * scale
  double scale = 1.0;
};

struct AgmonExperiment {
  std::vector<AgmonPointReport> points;
  double residual = 0.0;
  double total_norm_sq = 0.0;
  double final_bound = 0.0;  // cert_bound at the finest schedule point
};

// Replays the cutoff inequality chain for a near-kernel section v of
// H - lambda. The residual precondition ||(H-lambda)v|| <= tol (1 + ||v||)
// is absolute: when the form-level bound holds with unit constant, nonzero
// relative residuals below 1 are impossible.
AgmonExperiment agmon_vanishing_experiment(
    const WeightedGraph& g, const Bundle& bundle, const Connection& conn,
    const Potential& w, double lambda, const Section& v,
    const std::vector<double>& d_values, const SigmaMap& sigma, int x0,
    const std::vector<AgmonSchedulePoint>& schedule, double residual_tol = 1e-10);

}  // namespace vblap
