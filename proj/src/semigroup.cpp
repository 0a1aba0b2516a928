#include "vblap/semigroup.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "vblap/expm.hpp"
#include "vblap/rng.hpp"

namespace vblap {

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1)
    throw argument_error("log grid needs 0 < lo <= hi and at least one point");
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  const double step = (std::log(hi) - std::log(lo)) / (points - 1);
  for (int i = 0; i < points; ++i) grid[i] = std::exp(std::log(lo) + i * step);
  return grid;
}

Matrix heat_matrix(const BlockOperator& op, double t) {
  if (t < 0.0) throw argument_error("heat semigroup needs t >= 0");
  return expm((-t) * op.dense());
}

SemigroupResult heat_apply(const BlockOperator& op, double t, const Section& u) {
  if (t < 0.0) throw argument_error("heat semigroup needs t >= 0");
  SemigroupResult result;
  result.t = t;
  if (t == 0.0) {
    result.output = u;
    result.error_estimate = 0.0;
    return result;
  }
  const ExpmResult e = expm_detailed((-t) * op.dense());
  result.output = unstack(op.bundle(), e.value * stack(op.bundle(), u));
  result.error_estimate = e.backward_error_estimate;
  return result;
}

Matrix resolvent_matrix(const BlockOperator& op, double xi) {
  if (!(xi > 0.0)) throw argument_error("resolvent needs xi > 0");
  const int n = op.total_dim();
  const Matrix shifted = xi * Matrix::Identity(n, n) + op.dense();
  Eigen::PartialPivLU<Matrix> lu(shifted);
  const Matrix inv = lu.solve(Matrix::Identity(n, n));
  const double residual = (shifted * inv - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-8))
    throw numerical_error("resolvent inversion lost accuracy", 1.0 / lu.rcond());
  return inv;
}

Section resolvent_apply(const BlockOperator& op, double xi, const Section& f) {
  if (!(xi > 0.0)) throw argument_error("resolvent needs xi > 0");
  const Vector rhs = stack(op.bundle(), f);
  const int n = op.total_dim();
  const Matrix shifted = xi * Matrix::Identity(n, n) + op.dense();
  Eigen::PartialPivLU<Matrix> lu(shifted);
  const Vector sol = lu.solve(rhs);
  const Section u = unstack(op.bundle(), sol);
  Section residual = unstack(op.bundle(), shifted * sol - rhs);
  const double fnorm = lp_norm(op.bundle(), f, op.measures(), 2.0);
  double r = lp_norm(op.bundle(), residual, op.measures(), 2.0);
  if (fnorm > 0.0) r /= fnorm;
  if (!(r <= 1e-10))
    throw numerical_error("resolvent solve exceeds the residual threshold",
                          1.0 / lu.rcond());
  return u;
}

ContractionCertificate contraction_certificate(const BlockOperator& op,
                                               const std::vector<double>& p_values,
                                               const std::vector<double>& t_grid,
                                               const std::vector<double>& xi_grid,
                                               int samples, std::uint64_t seed) {
  ContractionCertificate cert;
  cert.p_values = p_values;
  cert.samples = samples;

  std::vector<Section> draws(samples);
  for (int s = 0; s < samples; ++s) {
    Rng rng(mix_seed(seed, s));
    Section u(op.bundle().size());
    for (int x = 0; x < op.bundle().size(); ++x)
      u[x] = rng.normal_vector(op.bundle().dim(x));
    draws[s] = std::move(u);
  }

  for (double t : t_grid) {
    const Matrix e = heat_matrix(op, t);
    for (const Section& u : draws) {
      const Section eu = unstack(op.bundle(), e * stack(op.bundle(), u));
      for (double p : p_values) {
        const double denom = lp_norm(op.bundle(), u, op.measures(), p);
        if (denom == 0.0) continue;
        const double ratio = lp_norm(op.bundle(), eu, op.measures(), p) / denom;
        if (ratio > cert.max_semigroup_ratio) {
          cert.max_semigroup_ratio = ratio;
          cert.worst_semigroup_t = t;
          cert.worst_semigroup_p = p;
        }
      }
    }
  }
  for (double xi : xi_grid) {
    const Matrix r = resolvent_matrix(op, xi);
    for (const Section& f : draws) {
      const Section rf = unstack(op.bundle(), r * stack(op.bundle(), f));
      for (double p : p_values) {
        const double denom = lp_norm(op.bundle(), f, op.measures(), p);
        if (denom == 0.0) continue;
        const double ratio = xi * lp_norm(op.bundle(), rf, op.measures(), p) / denom;
        if (ratio > cert.max_resolvent_ratio) {
          cert.max_resolvent_ratio = ratio;
          cert.worst_resolvent_xi = xi;
          cert.worst_resolvent_p = p;
        }
      }
    }
  }
  return cert;
}

namespace {

void require_scalar_laplacian(const BlockOperator& op, bool require_zero_potential) {
  if (!op.scalar_fibers())
    throw argument_error("this check needs one-dimensional fibers");
  if (!op.identity_connection())
    throw argument_error("this check needs the identity connection");
  if (require_zero_potential && !op.zero_potential())
    throw argument_error("this check needs a zero potential");
}

}  // namespace

PositivityResult positivity_check(const BlockOperator& op,
                                  const std::vector<double>& xi_grid) {
  require_scalar_laplacian(op, true);
  PositivityResult result;
  result.min_entry = kInf;
  for (double xi : xi_grid) {
    const Matrix inv = resolvent_matrix(op, xi);
    const double entry = inv.real().minCoeff();
    if (entry < result.min_entry) {
      result.min_entry = entry;
      result.worst_xi = xi;
    }
  }
  result.nonnegative = result.min_entry >= -1e-12;
  return result;
}

MassConservationResult mass_conservation(const BlockOperator& op,
                                         const std::vector<double>& t_grid) {
  require_scalar_laplacian(op, false);
  MassConservationResult result;
  const int n = op.total_dim();
  const Vector ones = Vector::Ones(n);
  for (double t : t_grid) {
    const Vector heated = heat_matrix(op, t) * ones;
    const double deviation = (heated - ones).cwiseAbs().maxCoeff();
    result.deviations.push_back(deviation);
    result.max_deviation = std::max(result.max_deviation, deviation);
  }
  return result;
}

DominationResult kato_domination(const BlockOperator& bundle_op,
                                 const BlockOperator& scalar_op,
                                 const std::vector<double>& t_grid, int samples,
                                 std::uint64_t seed) {
  if (!bundle_op.zero_potential())
    throw argument_error("domination check needs W = 0 on the bundle side");
  require_scalar_laplacian(scalar_op, true);
  if (bundle_op.graph_hash() != scalar_op.graph_hash())
    throw argument_error("domination check needs both operators on one graph");

  const Bundle& bundle = bundle_op.bundle();
  DominationResult result;
  result.max_violation = -kInf;
  for (double t : t_grid) {
    const Matrix eb = heat_matrix(bundle_op, t);
    const Matrix es = heat_matrix(scalar_op, t);
    for (int s = 0; s < samples; ++s) {
      Rng rng(mix_seed(seed, s));
      Section u(bundle.size());
      for (int x = 0; x < bundle.size(); ++x) u[x] = rng.normal_vector(bundle.dim(x));
      const Section heated = unstack(bundle, eb * stack(bundle, u));
      const RealVector norms = fiber_norms(bundle, u);
      const Vector heated_norms = es * norms.cast<cplx>().eval();
      for (int x = 0; x < bundle.size(); ++x) {
        const double violation = heated[x].norm() - heated_norms[x].real();
        result.max_violation = std::max(result.max_violation, violation);
      }
    }
  }
  return result;
}

TruncationResult truncation_consistency(const GraphFamily& family,
                                        const TruncationOptions& options,
                                        const std::vector<int>& horizons, double t,
                                        const Section* u0) {
  if (horizons.size() < 2) throw argument_error("need at least two horizons");
  for (std::size_t i = 1; i < horizons.size(); ++i)
    if (horizons[i] <= horizons[i - 1])
      throw argument_error("horizons must be strictly increasing");
  if (t < 0.0) throw argument_error("heat semigroup needs t >= 0");

  const Truncation smallest = truncate(family, horizons.front());
  const int core = smallest.graph.size();
  Bundle core_bundle = Bundle::constant(core, options.fiber_dim);

  Section base;
  if (u0 != nullptr) {
    check_section(core_bundle, *u0);
    base = *u0;
  } else {
    base = zero_section(core_bundle);
    base[0][0] = 1.0;
  }
  for (int x : smallest.frontier)
    if (base[x].norm() != 0.0)
      throw argument_error("initial section must vanish on the core frontier");

  TruncationResult result;
  result.horizons = horizons;
  for (int h : horizons) {
    const Truncation trunc = truncate(family, h);
    const int n = trunc.graph.size();
    Bundle bundle = Bundle::constant(n, options.fiber_dim);
    const Connection conn =
        options.random_connection
            ? Connection::random_unitary(trunc.graph, bundle, options.connection_seed)
            : Connection::identity(trunc.graph, bundle);
    const BlockOperator op = assemble(trunc.graph, bundle, conn, {});
    Section u = zero_section(bundle);
    for (int x = 0; x < core; ++x) u[x] = base[x];
    const Section out = heat_apply(op, t, u).output;
    result.core_outputs.emplace_back(out.begin(), out.begin() + core);
  }
  for (std::size_t i = 1; i < result.core_outputs.size(); ++i) {
    Section diff(core);
    for (int x = 0; x < core; ++x)
      diff[x] = result.core_outputs[i][x] - result.core_outputs[i - 1][x];
    result.diffs.push_back(
        lp_norm(core_bundle, diff, smallest.graph.measures(), 2.0));
  }
  return result;
}

}  // namespace vblap
