#include "vblap/identities.hpp"

#include <cmath>

#include "vblap/operator.hpp"

namespace vblap {

namespace {

// <a, b> linear in the first slot.
cplx fiber_inner(const Vector& a, const Vector& b) { return b.dot(a); }

}  // namespace

TripleReport greens_formula_triple(const WeightedGraph& g, const Bundle& bundle,
                                   const Connection& conn, const Potential& w,
                                   const Section& u, const Section& v) {
  check_section(bundle, u);
  check_section(bundle, v);
  TripleReport report;
  double magnitudes = 0.0;

  const Section hu = schrodinger_apply(g, bundle, conn, w, u);
  for (int x = 0; x < g.size(); ++x) {
    const cplx term = g.measure(x) * fiber_inner(hu[x], v[x]);
    report.pairing_left += term;
    magnitudes += std::abs(term);
  }

  const Section hv = schrodinger_apply(g, bundle, conn, adjoint_potential(w), v);
  for (int x = 0; x < g.size(); ++x) {
    const cplx term = g.measure(x) * fiber_inner(u[x], hv[x]);
    report.pairing_right += term;
    magnitudes += std::abs(term);
  }

  for (int x = 0; x < g.size(); ++x) {
    for (const auto& e : g.neighbors(x)) {
      const Matrix phi = conn.map(e.to, x);
      const Vector du = u[x] - phi * u[e.to];
      const Vector dv = v[x] - phi * v[e.to];
      const cplx term = 0.5 * e.weight * fiber_inner(du, dv);
      report.form_value += term;
      magnitudes += std::abs(term);
    }
    if (!w.empty()) {
      const cplx term = g.measure(x) * fiber_inner(w[x] * u[x], v[x]);
      report.form_value += term;
      magnitudes += std::abs(term);
    }
  }

  report.scale = 1.0 + magnitudes;
  report.deviation = std::max({std::abs(report.pairing_left - report.pairing_right),
                               std::abs(report.pairing_left - report.form_value),
                               std::abs(report.pairing_right - report.form_value)});
  return report;
}

RealVector kato_gap(const WeightedGraph& g, const Bundle& bundle,
                    const Connection& conn, const Section& u) {
  const Section lap_u = bundle_laplacian_apply(g, bundle, conn, u);
  const RealVector norms = fiber_norms(bundle, u);
  Vector norms_c = norms.cast<cplx>();
  const Vector lap_norms = scalar_laplacian_apply(g, norms_c);
  RealVector gap(g.size());
  for (int x = 0; x < g.size(); ++x)
    gap[x] = fiber_inner(lap_u[x], u[x]).real() - norms[x] * lap_norms[x].real();
  return gap;
}

GroundStateReport ground_state_identity(const WeightedGraph& g, const Bundle& bundle,
                                        const Connection& conn, const Potential& w,
                                        double lambda, const Section& u,
                                        const RealVector& g_fun, double residual_tol) {
  check_section(bundle, u);
  if (g_fun.size() != g.size())
    throw argument_error("g function length does not match graph");
  if (!check_potential_selfadjoint(w))
    throw precondition_error("ground state identity needs a self-adjoint potential", 0.0);

  GroundStateReport report;
  {
    Section residual = schrodinger_apply(g, bundle, conn, w, u);
    for (int x = 0; x < g.size(); ++x) residual[x] -= lambda * u[x];
    const double r = lp_norm(bundle, residual, g, 2.0);
    const double unorm = lp_norm(bundle, u, g, 2.0);
    report.residual = unorm > 0.0 ? r / unorm : r;
    if (report.residual > residual_tol)
      throw precondition_error("(H - lambda) u = 0 fails the residual threshold",
                               report.residual);
  }

  Section gu(u.size());
  for (int x = 0; x < g.size(); ++x) gu[x] = g_fun[x] * u[x];
  Section h_gu = schrodinger_apply(g, bundle, conn, w, gu);
  for (int x = 0; x < g.size(); ++x) h_gu[x] -= lambda * gu[x];

  double magnitudes = 0.0;
  for (int x = 0; x < g.size(); ++x) {
    const cplx term = g.measure(x) * fiber_inner(h_gu[x], gu[x]);
    report.lhs += term;
    magnitudes += std::abs(term);
  }
  for (int x = 0; x < g.size(); ++x) {
    for (const auto& e : g.neighbors(x)) {
      const double dg = g_fun[x] - g_fun[e.to];
      const cplx pairing = fiber_inner(u[x], conn.map(e.to, x) * u[e.to]);
      const double term = 0.5 * e.weight * dg * dg * pairing.real();
      report.rhs += term;
      magnitudes += std::abs(term);
    }
  }
  report.scale = 1.0 + magnitudes;
  report.deviation = std::abs(report.lhs - report.rhs);
  return report;
}

PairingResult accretivity_pairing(const WeightedGraph& g, const Bundle& bundle,
                                  const Connection& conn, const Potential& w,
                                  const Section& u, double p) {
  if (p < 1.0) throw argument_error("accretivity pairing needs p >= 1");
  const Section hu = schrodinger_apply(g, bundle, conn, w, u);
  PairingResult result;
  double magnitudes = 0.0;
  for (int x = 0; x < g.size(); ++x) {
    const double norm = u[x].norm();
    if (norm == 0.0) continue;  // u |u|^{p-2} -> 0 as u -> 0 for p >= 1
    const double weight = std::pow(norm, p - 2.0);
    const double term = g.measure(x) * (fiber_inner(hu[x], u[x]).real() * weight);
    result.value += term;
    magnitudes += std::abs(term);
  }
  result.scale = 1.0 + magnitudes;
  return result;
}

double young_slack(double a, double b, double p) {
  if (a < 0.0 || b < 0.0) throw argument_error("young_slack needs nonnegative inputs");
  if (p < 1.0) throw argument_error("young_slack needs p >= 1");
  const auto pw = [p](double base) { return std::pow(base, p - 1.0); };
  return std::pow(a, p) + std::pow(b, p) - a * pw(b) - b * pw(a);
}

}  // namespace vblap
