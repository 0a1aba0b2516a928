#pragma once

#include "vblap/bundle.hpp"
#include "vblap/graph.hpp"

namespace vblap {

// Three independent arithmetic routes to the same sesquilinear pairing:
// sum_x m <H_W u, v>, sum_x m <u, H_{W*} v>, and the explicit form
// (1/2) sum_{x,y} b <u(x)-Phi u(y), v(x)-Phi v(y)> + sum_x m <W u, v>.
// `scale` is 1 plus the sum of absolute values of every accumulated term;
// deviations are judged against it because the sums cancel heavily.
struct TripleReport {
  cplx pairing_left = 0.0;   // (H_W u, v)
  cplx pairing_right = 0.0;  // (u, H_{W*} v)
  cplx form_value = 0.0;
  double deviation = 0.0;
  double scale = 1.0;

  bool pass(double tol = 1e-10) const { return deviation <= tol * scale; }
};

TripleReport greens_formula_triple(const WeightedGraph& g, const Bundle& bundle,
                                   const Connection& conn, const Potential& w,
                                   const Section& u, const Section& v);

// gap(x) = Re<(Delta u)(x), u(x)> - |u(x)| (Delta |u|)(x); nonnegative for
// unitary connections up to rounding.
RealVector kato_gap(const WeightedGraph& g, const Bundle& bundle,
                    const Connection& conn, const Section& u);

struct GroundStateReport {
  cplx lhs = 0.0;      // ((H - lambda)(g u), g u)
  double rhs = 0.0;    // (1/2) sum b (g(x)-g(y))^2 Re<u(x), Phi u(y)>
  double deviation = 0.0;
  double scale = 1.0;
  double residual = 0.0;  // relative residual of (H - lambda) u = 0

  bool pass(double tol = 1e-10) const { return deviation <= tol * scale; }
};

// Requires self-adjoint W and (H - lambda) u = 0 within `residual_tol`
// relative residual; throws precondition_error otherwise.
GroundStateReport ground_state_identity(const WeightedGraph& g, const Bundle& bundle,
                                        const Connection& conn, const Potential& w,
                                        double lambda, const Section& u,
                                        const RealVector& g_fun,
                                        double residual_tol = 1e-10);

struct PairingResult {
  double value = 0.0;
  double scale = 1.0;
};

// Re sum_x m(x) <(H u)(x), u(x)|u(x)|^{p-2}>. Vertices with u(x) = 0
// contribute 0 for p < 2 (the limit convention).
PairingResult accretivity_pairing(const WeightedGraph& g, const Bundle& bundle,
                                  const Connection& conn, const Potential& w,
                                  const Section& u, double p);

// a^p + b^p - a b^{p-1} - b a^{p-1} for nonnegative a, b; nonnegative by
// Young's inequality, checked exactly in the scalar acceptance suite.
double young_slack(double a, double b, double p);

}  // namespace vblap
