#include "vblap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "vblap/operator.hpp"
#include "vblap/rng.hpp"

namespace vblap {

namespace {

std::uint64_t edge_key(int u, int v) {
  const int a = std::min(u, v), b = std::max(u, v);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

// Label-setting shortest paths from multiple sources with initial offsets.
RealVector dijkstra(const WeightedGraph& g, const SigmaMap& sigma,
                    const std::vector<std::pair<int, double>>& sources) {
  RealVector dist = RealVector::Constant(g.size(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (auto [v, d0] : sources) {
    if (d0 < dist[v]) {
      dist[v] = d0;
      queue.push({d0, v});
    }
  }
  while (!queue.empty()) {
    auto [d, x] = queue.top();
    queue.pop();
    if (d > dist[x]) continue;
    for (const auto& e : g.neighbors(x)) {
      const double len = sigma.value(x, e.to);
      if (!(len > 0.0)) throw argument_error("sigma must be positive on edges");
      const double candidate = d + len;
      if (candidate < dist[e.to]) {
        dist[e.to] = candidate;
        queue.push({candidate, e.to});
      }
    }
  }
  return dist;
}

}  // namespace

void SigmaMap::set(int u, int v, double value) {
  if (u == v) throw argument_error("sigma on a loop");
  if (!(value > 0.0)) throw argument_error("sigma must be positive on edges");
  values_[edge_key(u, v)] = value;
}

double SigmaMap::value(int u, int v) const {
  const auto it = values_.find(edge_key(u, v));
  if (it == values_.end()) throw argument_error("edge carries no sigma value");
  return it->second;
}

bool SigmaMap::has(int u, int v) const {
  return values_.find(edge_key(u, v)) != values_.end();
}

SigmaMap SigmaMap::from_truncation(const Truncation& trunc) {
  SigmaMap sigma;
  for (auto [u, v] : trunc.graph.undirected_edges()) sigma.set(u, v, trunc.sigma(u, v));
  return sigma;
}

SigmaMap default_intrinsic_sigma(const WeightedGraph& g) {
  SigmaMap sigma;
  for (auto [u, v] : g.undirected_edges()) {
    const double deg = std::max(weighted_degree(g, u), weighted_degree(g, v));
    sigma.set(u, v, 1.0 / std::sqrt(deg));
  }
  return sigma;
}

RealVector shortest_paths(const WeightedGraph& g, const SigmaMap& sigma, int source) {
  if (source < 0 || source >= g.size()) throw argument_error("source out of range");
  return dijkstra(g, sigma, {{source, 0.0}});
}

Eigen::MatrixXd all_pairs_shortest_paths(const WeightedGraph& g, const SigmaMap& sigma) {
  Eigen::MatrixXd out(g.size(), g.size());
  for (int x = 0; x < g.size(); ++x) out.row(x) = shortest_paths(g, sigma, x);
  return out;
}

namespace {

IntrinsicCheck intrinsic_from_values(const WeightedGraph& g,
                                     const std::vector<double>& edge_sq, double tol) {
  // edge_sq holds d(x,y)^2 in adjacency order, flattened per vertex.
  IntrinsicCheck check;
  check.vertex_values.resize(g.size());
  std::size_t cursor = 0;
  for (int x = 0; x < g.size(); ++x) {
    double sum = 0.0;
    for (const auto& e : g.neighbors(x)) sum += e.weight * edge_sq[cursor++];
    sum /= g.measure(x);
    check.vertex_values[x] = sum;
    if (x == 0 || sum > check.worst_value) {
      check.worst_value = sum;
      check.worst_vertex = x;
    }
  }
  check.intrinsic = check.worst_value <= 1.0 + tol;
  return check;
}

}  // namespace

IntrinsicCheck intrinsic_check(const WeightedGraph& g, const SigmaMap& sigma, double tol) {
  std::vector<double> edge_sq;
  for (int x = 0; x < g.size(); ++x)
    for (const auto& e : g.neighbors(x)) {
      const double d = sigma.value(x, e.to);
      edge_sq.push_back(d * d);
    }
  return intrinsic_from_values(g, edge_sq, tol);
}

IntrinsicCheck intrinsic_check(const WeightedGraph& g, const Eigen::MatrixXd& distances,
                               double tol) {
  if (distances.rows() != g.size() || distances.cols() != g.size())
    throw argument_error("distance matrix does not match graph");
  std::vector<double> edge_sq;
  for (int x = 0; x < g.size(); ++x)
    for (const auto& e : g.neighbors(x)) {
      const double d = distances(x, e.to);
      edge_sq.push_back(d * d);
    }
  return intrinsic_from_values(g, edge_sq, tol);
}

std::vector<double> cauchy_distance(const Truncation& trunc) {
  const GraphFamily& family = trunc.family;
  double tail = family.sigma_rule.tail_sum(trunc.horizon);
  if (family.kind == FamilyKind::kCycleSequence)
    tail *= static_cast<double>(family.cycle_len / 2);
  const int n = trunc.graph.size();
  if (std::isinf(tail)) return std::vector<double>(n, kInf);

  const SigmaMap sigma = SigmaMap::from_truncation(trunc);
  std::vector<std::pair<int, double>> sources;
  for (int f : trunc.frontier) sources.emplace_back(f, tail);
  const RealVector dist = dijkstra(trunc.graph, sigma, sources);
  return std::vector<double>(dist.data(), dist.data() + n);
}

BoundaryGeometry boundary_geometry(const Truncation& trunc,
                                   const std::vector<double>& d_values, double eps) {
  if (static_cast<int>(d_values.size()) != trunc.graph.size())
    throw argument_error("D values do not match graph");
  if (!(eps > 0.0)) throw argument_error("eps must be positive");
  BoundaryGeometry geometry;
  geometry.eps = eps;
  std::vector<char> inside(trunc.graph.size(), 0);
  for (int x = 0; x < trunc.graph.size(); ++x) {
    if (d_values[x] >= eps) {
      inside[x] = 1;
      geometry.x_eps.push_back(x);
    }
  }
  for (int x : geometry.x_eps) {
    for (const auto& e : trunc.graph.neighbors(x)) {
      if (!inside[e.to]) {
        geometry.boundary.push_back(x);
        break;
      }
    }
  }
  return geometry;
}

RegularityReport regularity_probe(const Truncation& trunc, double eps) {
  RegularityReport report;
  const std::vector<double> d_values = cauchy_distance(trunc);
  report.geometry = boundary_geometry(trunc, d_values, eps);

  const SigmaMap sigma = SigmaMap::from_truncation(trunc);
  const RealVector from_root = shortest_paths(trunc.graph, sigma, 0);
  double dmax = 0.0;
  for (int x = 0; x < trunc.graph.size(); ++x)
    if (std::isfinite(from_root[x])) dmax = std::max(dmax, from_root[x]);
  for (double fraction : {0.25, 0.5, 0.75, 1.0}) {
    RegularityReport::BallCount ball;
    ball.radius = fraction * dmax;
    for (int x : report.geometry.boundary)
      if (from_root[x] <= ball.radius) ++ball.count;
    report.counts.push_back(ball);
  }
  for (int x : report.geometry.boundary)
    report.max_boundary_generation =
        std::max(report.max_boundary_generation, trunc.generation[x]);
  report.stabilized = report.max_boundary_generation <= trunc.horizon - 2;
  return report;
}

RealVector cutoff_f_eps(const std::vector<double>& d_values, double eps, double rho) {
  if (!(0.0 < eps && eps < rho && rho < 0.5))
    throw argument_error("cutoff needs 0 < eps < rho < 1/2");
  RealVector f(static_cast<Eigen::Index>(d_values.size()));
  for (std::size_t x = 0; x < d_values.size(); ++x) {
    const double s = d_values[x];
    double value = 0.0;
    if (s >= 1.0)
      value = 1.0;
    else if (s >= rho)
      value = s;
    else if (s > eps)
      value = rho * (s - eps) / (rho - eps);
    f[static_cast<Eigen::Index>(x)] = value;
  }
  return f;
}

RealVector cutoff_g_alpha(const WeightedGraph& g, const SigmaMap& sigma, int x0,
                          double alpha) {
  if (!(alpha > 0.0)) throw argument_error("alpha must be positive");
  const RealVector dist = shortest_paths(g, sigma, x0);
  RealVector out(g.size());
  for (int x = 0; x < g.size(); ++x) {
    const double s = dist[x];
    double value = 0.0;
    if (s <= 1.0 / alpha)
      value = 1.0;
    else if (s <= 2.0 / alpha)
      value = 2.0 - alpha * s;
    out[x] = value;
  }
  return out;
}

double lipschitz_constant(const WeightedGraph& g, const SigmaMap& sigma,
                          const RealVector& phi) {
  if (phi.size() != g.size()) throw argument_error("function length does not match graph");
  double worst = 0.0;
  for (auto [u, v] : g.undirected_edges())
    worst = std::max(worst, std::abs(phi[u] - phi[v]) / sigma.value(u, v));
  return worst;
}

Potential minorant_equality_potential(const Bundle& bundle,
                                      const std::vector<double>& d_values, double c) {
  Potential w(bundle.size());
  for (int x = 0; x < bundle.size(); ++x) {
    const double bound = 0.5 / (d_values[x] * d_values[x]) - c;
    w[x] = bound * Matrix::Identity(bundle.dim(x), bundle.dim(x));
  }
  return w;
}

AgmonHypothesis agmon_hypothesis_check(const WeightedGraph& g, const Bundle& bundle,
                                       const Connection& conn, const Potential& w,
                                       const std::vector<double>& d_values, double c,
                                       int samples, std::uint64_t seed) {
  if (!check_potential_selfadjoint(w))
    throw precondition_error("hypothesis check needs a self-adjoint potential", 0.0);
  if (static_cast<int>(d_values.size()) != g.size())
    throw argument_error("D values do not match graph");

  AgmonHypothesis hypothesis;
  hypothesis.lambda = -c - 1.5;
  for (int x = 0; x < g.size(); ++x) {
    double lambda_min = 0.0;
    if (!w.empty() && w[x].size() != 0) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (w[x] + w[x].adjoint()),
                                               Eigen::EigenvaluesOnly);
      lambda_min = es.eigenvalues().minCoeff();
    }
    const double bound = 0.5 / (d_values[x] * d_values[x]) - c;
    const double margin = lambda_min - bound;
    if (hypothesis.worst_vertex < 0 || margin < hypothesis.pointwise_margin) {
      hypothesis.worst_vertex = x;
      hypothesis.pointwise_margin = margin;
    }
  }
  hypothesis.pointwise_ok = hypothesis.pointwise_margin >= -1e-10;

  bool first = true;
  for (int s = 0; s < samples; ++s) {
    Rng rng(mix_seed(seed, s));
    Section u(bundle.size());
    for (int x = 0; x < bundle.size(); ++x) u[x] = rng.normal_vector(bundle.dim(x));
    Section hu = schrodinger_apply(g, bundle, conn, w, u);
    for (int x = 0; x < bundle.size(); ++x) hu[x] -= hypothesis.lambda * u[x];
    const double lhs = inner_product(bundle, u, hu, g).real();
    double weighted = 0.0;
    double norm_sq = 0.0;
    for (int x = 0; x < g.size(); ++x) {
      const double sq = u[x].squaredNorm() * g.measure(x);
      weighted += std::max(1.0 / (d_values[x] * d_values[x]), 1.0) * sq;
      norm_sq += sq;
    }
    const double rhs = 0.5 * weighted + norm_sq;
    const double scale = 1.0 + std::abs(lhs) + std::abs(rhs);
    const double margin = lhs - rhs;
    if (first || margin / scale < hypothesis.worst_form_margin / hypothesis.form_scale) {
      hypothesis.worst_form_margin = margin;
      hypothesis.form_scale = scale;
      first = false;
    }
  }
  hypothesis.form_ok = hypothesis.worst_form_margin >= -1e-8 * hypothesis.form_scale;
  return hypothesis;
}

std::vector<AgmonSchedulePoint> default_agmon_schedule() {
  std::vector<AgmonSchedulePoint> schedule;
  for (double rho : {0.4, 0.2, 0.1})
    for (double alpha : {1.0, 0.5, 0.25})
      schedule.push_back({rho, rho / 2.0, alpha});
  return schedule;
}

AgmonExperiment agmon_vanishing_experiment(
    const WeightedGraph& g, const Bundle& bundle, const Connection& conn,
    const Potential& w, double lambda, const Section& v,
    const std::vector<double>& d_values, const SigmaMap& sigma, int x0,
    const std::vector<AgmonSchedulePoint>& schedule, double residual_tol) {
  check_section(bundle, v);
  if (!check_potential_selfadjoint(w))
    throw precondition_error("vanishing experiment needs a self-adjoint potential", 0.0);

  AgmonExperiment experiment;
  {
    Section residual = schrodinger_apply(g, bundle, conn, w, v);
    for (int x = 0; x < g.size(); ++x) residual[x] -= lambda * v[x];
    const double r = lp_norm(bundle, residual, g, 2.0);
    const double vnorm = lp_norm(bundle, v, g, 2.0);
    experiment.residual = r;
    if (r > residual_tol * (1.0 + vnorm))
      throw precondition_error("(H - lambda) v = 0 fails the residual threshold", r);
    experiment.total_norm_sq = vnorm * vnorm;
  }

  const RealVector from_x0 = shortest_paths(g, sigma, x0);
  for (const auto& point : schedule) {
    AgmonPointReport report;
    report.point = point;
    report.beta = point.rho / (point.rho - point.eps) + point.alpha;

    const RealVector f = cutoff_f_eps(d_values, point.eps, point.rho);
    const RealVector g_alpha = cutoff_g_alpha(g, sigma, x0, point.alpha);
    Section phi_v(v.size());
    for (int x = 0; x < g.size(); ++x) phi_v[x] = (f[x] * g_alpha[x]) * v[x];

    Section h_phi_v = schrodinger_apply(g, bundle, conn, w, phi_v);
    for (int x = 0; x < g.size(); ++x) h_phi_v[x] -= lambda * phi_v[x];
    report.lhs = inner_product(bundle, phi_v, h_phi_v, g).real();

    double norm_sq = 0.0;
    for (int x = 0; x < g.size(); ++x) norm_sq += g.measure(x) * v[x].squaredNorm();
    report.rhs_upper = 0.5 * report.beta * report.beta * norm_sq;

    for (int x = 0; x < g.size(); ++x)
      if (d_values[x] >= point.rho && from_x0[x] <= 1.0 / point.alpha)
        report.sum_s += g.measure(x) * v[x].squaredNorm();
    for (int x = 0; x < g.size(); ++x)
      report.cutoff_norm_sq += g.measure(x) * phi_v[x].squaredNorm();

    report.cert_bound =
        report.beta * report.beta * norm_sq - 2.0 * report.cutoff_norm_sq;
    report.scale = 1.0 + std::abs(report.lhs) + std::abs(report.rhs_upper) +
                   report.sum_s + report.cutoff_norm_sq;
    report.upper_ok = report.lhs <= report.rhs_upper + 1e-9 * report.scale;
    report.lower_ok =
        report.lhs >= 0.5 * report.sum_s + report.cutoff_norm_sq - 1e-9 * report.scale;
    experiment.points.push_back(std::move(report));
  }
  if (!experiment.points.empty())
    experiment.final_bound = experiment.points.back().cert_bound;
  return experiment;
}

}  // namespace vblap
