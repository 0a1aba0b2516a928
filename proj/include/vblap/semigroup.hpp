#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vblap/family.hpp"
#include "vblap/operator.hpp"

namespace vblap {

// Default t / xi grid: 9 log-spaced points in [1e-2, 1e2].
std::vector<double> log_grid(double lo = 1e-2, double hi = 1e2, int points = 9);

struct SemigroupResult {
  double t = 0.0;
  Section output;
  std::string method = "pade-scaling-squaring";
  double error_estimate = 0.0;
};

// e^{-tA} as a dense matrix; requires the dense path.
Matrix heat_matrix(const BlockOperator& op, double t);

// e^{-tA} u; at t = 0 the input is returned exactly.
SemigroupResult heat_apply(const BlockOperator& op, double t, const Section& u);

// (xi + A)^{-1} as a dense matrix.
Matrix resolvent_matrix(const BlockOperator& op, double xi);

// Solves (xi + A) u = f by direct factorization; rejects solutions whose
// m-weighted relative residual exceeds 1e-10.
Section resolvent_apply(const BlockOperator& op, double xi, const Section& f);

struct ContractionCertificate {
  std::vector<double> p_values;
  int samples = 0;
  // max over samples/grid of ||e^{-tA}u||_p / ||u||_p and of
  // xi ||(xi+A)^{-1}f||_p / ||f||_p. One-sided by construction: sampled
  // ratios only witness violations, they cannot prove the operator norm.
  double max_semigroup_ratio = 0.0;
  double max_resolvent_ratio = 0.0;
  double worst_semigroup_t = 0.0, worst_semigroup_p = 0.0;
  double worst_resolvent_xi = 0.0, worst_resolvent_p = 0.0;

  bool contractive(double tol = 1e-10) const {
    return max_semigroup_ratio <= 1.0 + tol && max_resolvent_ratio <= 1.0 + tol;
  }
};

ContractionCertificate contraction_certificate(const BlockOperator& op,
                                               const std::vector<double>& p_values,
                                               const std::vector<double>& t_grid,
                                               const std::vector<double>& xi_grid,
                                               int samples, std::uint64_t seed);

struct PositivityResult {
  bool nonnegative = true;
  double min_entry = 0.0;
  double worst_xi = 0.0;
};

// Entrywise nonnegativity of (xi + Delta)^{-1} over the grid; only admits
// scalar operators with identity connection and zero potential.
PositivityResult positivity_check(const BlockOperator& op,
                                  const std::vector<double>& xi_grid);

struct MassConservationResult {
  double max_deviation = 0.0;
  std::vector<double> deviations;  // per grid point
};

// ||e^{-tA} 1 - 1||_inf across the t grid; scalar identity-connection
// operators only (a nonzero potential acts as a killing term and shows up
// as deviation).
MassConservationResult mass_conservation(const BlockOperator& op,
                                         const std::vector<double>& t_grid);

struct DominationResult {
  double max_violation = 0.0;  // max over (sample, t, x) of |e^{-tH}u|(x) - (e^{-tDelta}|u|)(x)
};

// Pointwise semigroup domination of the W = 0 bundle operator by the scalar
// heat semigroup on the same weighted graph.
DominationResult kato_domination(const BlockOperator& bundle_op,
                                 const BlockOperator& scalar_op,
                                 const std::vector<double>& t_grid, int samples,
                                 std::uint64_t seed);

struct TruncationOptions {
  int fiber_dim = 1;
  bool random_connection = false;  // per-edge seeded, stable across horizons
  std::uint64_t connection_seed = 0;
};

struct TruncationResult {
  std::vector<double> diffs;               // successive m-weighted core differences
  std::vector<Section> core_outputs;       // restricted to the smallest truncation
  std::vector<int> horizons;
};

// Dirichlet truncations of e^{-tH} on growing horizons, compared on the
// fixed core given by the smallest horizon. u0 (on the smallest truncation)
// must vanish on its frontier; defaults to the root indicator.
TruncationResult truncation_consistency(const GraphFamily& family,
                                        const TruncationOptions& options,
                                        const std::vector<int>& horizons, double t,
                                        const Section* u0 = nullptr);

}  // namespace vblap
