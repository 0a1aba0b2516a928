#include "vblap/commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "vblap/document.hpp"
#include "vblap/geometry.hpp"
#include "vblap/identities.hpp"
#include "vblap/operator.hpp"
#include "vblap/rng.hpp"
#include "vblap/semigroup.hpp"

namespace vblap {

namespace {

using nlohmann::json;

class Timer {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void parallel_for(int jobs, int count, const std::function<void(int)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const int workers = std::min(jobs, count);
  for (int j = 0; j < workers; ++j) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& worker : pool) worker.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string seed_hex(std::uint64_t seed) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(seed));
  return buffer;
}

double connection_unitarity_worst(const Connection& conn) {
  double worst = 0.0;
  for (auto [u, v] : conn.edges()) {
    const Matrix& phi = conn.stored(u, v);
    if (phi.rows() != phi.cols()) return kInf;
    const Matrix gram = phi.adjoint() * phi;
    worst = std::max(worst,
                     (gram - Matrix::Identity(phi.rows(), phi.cols()))
                         .cwiseAbs()
                         .maxCoeff());
  }
  return worst;
}

void require_valid(const ParsedModel& model, const CommandOptions& options) {
  if (options.allow_invalid) return;
  const ValidationReport report = validate_graph(model.graph);
  if (!report.empty())
    throw parse_error("/", "graph fails validation (" + report.front().description +
                               "); fix the document or pass --allow-invalid");
}

Section random_section(Rng& rng, const Bundle& bundle) {
  Section u(bundle.size());
  for (int x = 0; x < bundle.size(); ++x) u[x] = rng.normal_vector(bundle.dim(x));
  return u;
}

// Near-kernel candidate for H - lambda: the smallest m-weighted singular
// direction, scaled so the absolute residual sits below the threshold.
Section minimal_residual_section(const BlockOperator& op, double lambda,
                                 double residual_tol) {
  const int n = op.total_dim();
  const RealVector sqrt_m = op.coordinate_measures().cwiseSqrt();
  const Matrix shifted = op.dense() - lambda * Matrix::Identity(n, n);
  const Matrix weighted = sqrt_m.cast<cplx>().asDiagonal() * shifted *
                          sqrt_m.cwiseInverse().cast<cplx>().asDiagonal();
  Eigen::JacobiSVD<Matrix> svd(weighted, Eigen::ComputeThinV);
  const double sigma_min = svd.singularValues()(n - 1);
  Vector v = sqrt_m.cwiseInverse().cast<cplx>().asDiagonal() *
             svd.matrixV().col(n - 1);
  const double delta =
      std::min(1.0, 0.5 * residual_tol / std::max(sigma_min, residual_tol));
  return unstack(op.bundle(), delta * v);
}

struct SuiteContext {
  const ParsedModel& model;
  BlockOperator op;
  double tolerance = 0.0;
};

json instance_header(int instance, std::uint64_t instance_seed) {
  return json{{"instance", instance}, {"instance_seed", seed_hex(instance_seed)}};
}

CheckRecord run_green(const SuiteContext& ctx, int instance, std::uint64_t inst_seed) {
  Rng rng(inst_seed);
  const Section u = random_section(rng, ctx.model.bundle);
  const Section v = random_section(rng, ctx.model.bundle);
  const TripleReport triple = greens_formula_triple(
      ctx.model.graph, ctx.model.bundle, ctx.model.connection, ctx.model.potential, u, v);
  CheckRecord record;
  record.name = "green";
  record.tolerance = ctx.tolerance;
  record.values = instance_header(instance, inst_seed);
  record.values["deviation"] = triple.deviation;
  record.values["scale"] = triple.scale;
  record.pass = triple.pass(ctx.tolerance);
  return record;
}

CheckRecord run_kato(const SuiteContext& ctx, int instance, std::uint64_t inst_seed) {
  Rng rng(inst_seed);
  const Section u = random_section(rng, ctx.model.bundle);
  const RealVector gap =
      kato_gap(ctx.model.graph, ctx.model.bundle, ctx.model.connection, u);
  CheckRecord record;
  record.name = "kato";
  record.tolerance = ctx.tolerance;
  record.values = instance_header(instance, inst_seed);
  const double min_gap = gap.minCoeff();
  record.values["min_gap"] = min_gap;
  record.pass = min_gap >= -ctx.tolerance;
  return record;
}

CheckRecord run_ground(const SuiteContext& ctx, const PencilEigen& eigen, int instance,
                       std::uint64_t inst_seed) {
  Rng rng(inst_seed);
  CheckRecord record;
  record.name = "ground";
  record.tolerance = ctx.tolerance;
  record.values = instance_header(instance, inst_seed);
  const int index = rng.below(static_cast<int>(eigen.eigenvalues.size()));
  const double lambda = eigen.eigenvalues[index];
  const Section u = unstack(ctx.model.bundle, eigen.eigenvectors.col(index));
  RealVector g_fun(ctx.model.graph.size());
  for (int x = 0; x < ctx.model.graph.size(); ++x) g_fun[x] = rng.normal();
  try {
    const GroundStateReport report =
        ground_state_identity(ctx.model.graph, ctx.model.bundle, ctx.model.connection,
                              ctx.model.potential, lambda, u, g_fun);
    record.values["lambda"] = lambda;
    record.values["deviation"] = report.deviation;
    record.values["scale"] = report.scale;
    record.values["residual"] = report.residual;
    record.pass = report.pass(ctx.tolerance);
  } catch (const precondition_error& e) {
    record.values["error"] = e.what();
    record.values["residual"] = e.residual();
    record.pass = false;
  }
  return record;
}

CheckRecord run_accretive(const SuiteContext& ctx, int instance,
                          std::uint64_t inst_seed) {
  Rng rng(inst_seed);
  const Section u = random_section(rng, ctx.model.bundle);
  CheckRecord record;
  record.name = "accretive";
  record.tolerance = ctx.tolerance;
  record.values = instance_header(instance, inst_seed);
  double worst = kInf;
  double worst_p = 0.0;
  for (double p : {1.0, 1.5, 2.0, 3.0, 4.0}) {
    const PairingResult pairing =
        accretivity_pairing(ctx.model.graph, ctx.model.bundle, ctx.model.connection,
                            ctx.model.potential, u, p);
    const double normalized = pairing.value / pairing.scale;
    if (normalized < worst) {
      worst = normalized;
      worst_p = p;
    }
  }
  record.values["min_normalized_pairing"] = worst;
  record.values["worst_p"] = worst_p;
  record.pass = worst >= -ctx.tolerance;
  return record;
}

CheckRecord run_contraction(const SuiteContext& ctx, int instance,
                            std::uint64_t inst_seed) {
  const ContractionCertificate cert = contraction_certificate(
      ctx.op, {1.0, 1.5, 2.0, 3.0, kInf}, log_grid(), log_grid(), 10, inst_seed);
  CheckRecord record;
  record.name = "contraction";
  record.tolerance = ctx.tolerance;
  record.values = instance_header(instance, inst_seed);
  record.values["max_semigroup_ratio"] = cert.max_semigroup_ratio;
  record.values["max_resolvent_ratio"] = cert.max_resolvent_ratio;
  record.values["worst_semigroup_t"] = cert.worst_semigroup_t;
  record.values["worst_semigroup_p"] = json_real(cert.worst_semigroup_p);
  record.values["worst_resolvent_xi"] = cert.worst_resolvent_xi;
  record.values["worst_resolvent_p"] = json_real(cert.worst_resolvent_p);
  record.pass = cert.contractive(ctx.tolerance);
  return record;
}

CheckRecord run_positivity(const SuiteContext& ctx, int instance,
                           std::uint64_t inst_seed) {
  const PositivityResult result = positivity_check(ctx.op, log_grid());
  CheckRecord record;
  record.name = "positivity";
  record.tolerance = ctx.tolerance;
  record.values = instance_header(instance, inst_seed);
  record.values["min_entry"] = result.min_entry;
  record.values["worst_xi"] = result.worst_xi;
  record.pass = result.min_entry >= -ctx.tolerance;
  return record;
}

CheckRecord run_mass(const SuiteContext& ctx, int instance, std::uint64_t inst_seed) {
  const MassConservationResult result = mass_conservation(ctx.op, log_grid());
  CheckRecord record;
  record.name = "mass";
  record.tolerance = ctx.tolerance;
  record.values = instance_header(instance, inst_seed);
  record.values["max_deviation"] = result.max_deviation;
  record.pass = result.max_deviation <= ctx.tolerance;
  return record;
}

CheckRecord run_domination(const SuiteContext& ctx, const BlockOperator& scalar_op,
                           int instance, std::uint64_t inst_seed) {
  const DominationResult result =
      kato_domination(ctx.op, scalar_op, log_grid(), 10, inst_seed);
  CheckRecord record;
  record.name = "domination";
  record.tolerance = ctx.tolerance;
  record.values = instance_header(instance, inst_seed);
  record.values["max_violation"] = result.max_violation;
  record.pass = result.max_violation <= ctx.tolerance;
  return record;
}

}  // namespace

Report cmd_validate(const CommandOptions& options) {
  Timer timer;
  ParseOptions parse_options;
  parse_options.validate_connection = false;
  const ParsedModel model = load_model(options.path, parse_options);

  Report report;
  report.command = "validate";
  report.input_hash = model.input_hash;
  report.seed = options.seed;

  const double tol = options.tolerance.value_or(1e-12);
  const ValidationReport violations = validate_graph(model.graph, tol);
  const auto axiom_record = [&](const std::string& name, ViolationKind kind) {
    CheckRecord record;
    record.name = name;
    record.tolerance = tol;
    json list = json::array();
    for (const auto& violation : violations)
      if (violation.kind == kind) list.push_back(violation.description);
    record.values = json{{"violations", list}};
    record.pass = list.empty();
    return record;
  };
  report.add(axiom_record("axiom-i-symmetry", ViolationKind::kSymmetry));
  report.add(axiom_record("axiom-ii-diagonal", ViolationKind::kDiagonal));
  report.add(axiom_record("axiom-iii-row-sums", ViolationKind::kRowSum));
  report.add(axiom_record("measure-positivity", ViolationKind::kMeasure));
  report.add(axiom_record("nonnegative-weights", ViolationKind::kNegativeWeight));

  {
    CheckRecord record;
    record.name = "connection-unitarity";
    record.tolerance = Connection::kUnitTol;
    const double worst = connection_unitarity_worst(model.connection);
    record.values = json{{"worst_deviation", json_real(worst)}};
    record.pass = worst <= Connection::kUnitTol;
    report.add(record);
  }
  {
    CheckRecord record;
    record.name = "potential-predicates";
    record.tolerance = 1e-12;
    const AccretivityResult accretive = check_potential_accretive(model.potential);
    record.values = json{{"accretive", accretive.accretive},
                         {"margin", accretive.margin},
                         {"selfadjoint", check_potential_selfadjoint(model.potential)}};
    record.pass = true;  // predicates are data, not axioms
    report.add(record);
  }

  report.wall_time_ms = timer.elapsed_ms();
  return report;
}

Report cmd_spectrum(const CommandOptions& options, bool pencil) {
  Timer timer;
  const ParsedModel model = load_model(options.path);
  require_valid(model, options);

  Report report;
  report.command = "spectrum";
  report.input_hash = model.input_hash;
  report.seed = options.seed;

  const BlockOperator op =
      assemble(model.graph, model.bundle, model.connection, model.potential);
  if (pencil && !op.selfadjoint_potential()) {
    CheckRecord record;
    record.name = "selfadjoint-potential";
    record.tolerance = 1e-12;
    record.values = json{{"selfadjoint", false}};
    record.pass = false;
    report.add(record);
    report.wall_time_ms = timer.elapsed_ms();
    return report;
  }

  CheckRecord record;
  record.name = pencil ? "spectrum-pencil" : "spectrum-complex";
  record.tolerance = 0.0;
  json values = json::array();
  if (pencil) {
    const PencilEigen eigen = pencil_eigensolve(op);
    for (Eigen::Index i = 0; i < eigen.eigenvalues.size(); ++i)
      values.push_back(eigen.eigenvalues[i]);
  } else {
    for (cplx z : eigenvalues_sorted(op)) values.push_back(json_complex(z));
  }
  record.values = json{{"eigenvalues", values}};
  record.pass = true;
  report.add(record);
  report.wall_time_ms = timer.elapsed_ms();
  return report;
}

Report cmd_check(const CommandOptions& options, const std::string& suite,
                 int instances) {
  Timer timer;
  if (instances < 1) throw parse_error("/", "--instances must be at least 1");
  ParseOptions parse_options;
  parse_options.validate_connection = !options.allow_invalid;
  const ParsedModel model = load_model(options.path, parse_options);
  require_valid(model, options);

  Report report;
  report.command = "check:" + suite;
  report.input_hash = model.input_hash;
  report.seed = options.seed;

  SuiteContext ctx{model,
                   assemble(model.graph, model.bundle, model.connection, model.potential),
                   0.0};

  std::function<CheckRecord(int, std::uint64_t)> runner;
  if (suite == "green") {
    ctx.tolerance = options.tolerance.value_or(1e-10);
    runner = [&](int i, std::uint64_t s) { return run_green(ctx, i, s); };
  } else if (suite == "kato") {
    ctx.tolerance = options.tolerance.value_or(1e-12);
    runner = [&](int i, std::uint64_t s) { return run_kato(ctx, i, s); };
  } else if (suite == "ground") {
    ctx.tolerance = options.tolerance.value_or(1e-9);
    if (!ctx.op.selfadjoint_potential())
      throw parse_error("/potential", "the ground suite needs a self-adjoint potential");
    auto eigen = std::make_shared<PencilEigen>(pencil_eigensolve(ctx.op));
    runner = [&, eigen](int i, std::uint64_t s) { return run_ground(ctx, *eigen, i, s); };
  } else if (suite == "accretive") {
    ctx.tolerance = options.tolerance.value_or(1e-10);
    runner = [&](int i, std::uint64_t s) { return run_accretive(ctx, i, s); };
  } else if (suite == "contraction") {
    ctx.tolerance = options.tolerance.value_or(1e-10);
    runner = [&](int i, std::uint64_t s) { return run_contraction(ctx, i, s); };
  } else if (suite == "positivity") {
    ctx.tolerance = options.tolerance.value_or(1e-12);
    runner = [&](int i, std::uint64_t s) { return run_positivity(ctx, i, s); };
  } else if (suite == "mass") {
    ctx.tolerance = options.tolerance.value_or(1e-10);
    runner = [&](int i, std::uint64_t s) { return run_mass(ctx, i, s); };
  } else if (suite == "domination") {
    ctx.tolerance = options.tolerance.value_or(1e-10);
    if (!ctx.op.zero_potential())
      throw parse_error("/potential", "the domination suite needs W = 0");
    auto scalar_op = std::make_shared<BlockOperator>(
        assemble(model.graph, Bundle::constant(model.graph.size(), 1),
                 Connection::identity(model.graph, Bundle::constant(model.graph.size(), 1)),
                 {}));
    runner = [&, scalar_op](int i, std::uint64_t s) {
      return run_domination(ctx, *scalar_op, i, s);
    };
  } else {
    throw parse_error("/", "unknown suite \"" + suite + "\"");
  }

  std::vector<CheckRecord> records(instances);
  parallel_for(options.jobs, instances, [&](int i) {
    records[i] = runner(i, mix_seed(options.seed, static_cast<std::uint64_t>(i)));
  });
  for (auto& record : records) report.add(std::move(record));
  report.wall_time_ms = timer.elapsed_ms();
  return report;
}

Report cmd_heat(const CommandOptions& options, double t,
                const std::string& section_path) {
  Timer timer;
  if (t < 0.0) throw parse_error("/", "--t must be nonnegative");
  const ParsedModel model = load_model(options.path);
  require_valid(model, options);
  const Section u = load_section(section_path, model.bundle);
  const BlockOperator op =
      assemble(model.graph, model.bundle, model.connection, model.potential);
  const SemigroupResult result = heat_apply(op, t, u);

  Report report;
  report.command = "heat";
  report.input_hash = model.input_hash;
  report.seed = options.seed;
  CheckRecord record;
  record.name = "heat";
  record.tolerance = 0.0;
  record.values = json{{"t", t},
                       {"method", result.method},
                       {"error_estimate", result.error_estimate},
                       {"section", json_section(model.bundle, result.output)}};
  record.pass = true;
  report.add(record);
  report.wall_time_ms = timer.elapsed_ms();
  return report;
}

Report cmd_resolvent(const CommandOptions& options, double xi,
                     const std::string& section_path) {
  Timer timer;
  if (!(xi > 0.0)) throw parse_error("/", "--xi must be positive");
  const ParsedModel model = load_model(options.path);
  require_valid(model, options);
  const Section f = load_section(section_path, model.bundle);
  const BlockOperator op =
      assemble(model.graph, model.bundle, model.connection, model.potential);
  const Section u = resolvent_apply(op, xi, f);

  Report report;
  report.command = "resolvent";
  report.input_hash = model.input_hash;
  report.seed = options.seed;
  CheckRecord record;
  record.name = "resolvent";
  record.tolerance = 1e-10;
  record.values = json{{"xi", xi}, {"section", json_section(model.bundle, u)}};
  record.pass = true;
  report.add(record);
  report.wall_time_ms = timer.elapsed_ms();
  return report;
}

Report cmd_metric(const CommandOptions& options, double eps,
                  std::optional<int> horizon_override) {
  Timer timer;
  ParseOptions parse_options;
  parse_options.horizon_override = horizon_override;
  const ParsedModel model = load_model(options.path, parse_options);
  require_valid(model, options);
  const ResolvedMetric metric = resolve_metric(model);

  Report report;
  report.command = "metric";
  report.input_hash = model.input_hash;
  report.seed = options.seed;

  {
    CheckRecord record;
    record.name = "sigma";
    record.tolerance = 0.0;
    json edges = json::array();
    for (auto [u, v] : model.graph.undirected_edges())
      edges.push_back(json{{"u", model.labels[u]},
                           {"v", model.labels[v]},
                           {"value", metric.sigma.value(u, v)}});
    record.values = json{{"edges", edges}};
    record.pass = true;
    report.add(record);
  }
  {
    const double tol = options.tolerance.value_or(1e-12);
    CheckRecord record;
    record.name = "intrinsic";
    record.tolerance = tol;
    const IntrinsicCheck check = intrinsic_check(model.graph, metric.sigma, tol);
    record.values = json{{"worst_vertex", model.labels[check.worst_vertex]},
                         {"worst_value", check.worst_value},
                         {"vertex_values", json_real_vector(check.vertex_values)}};
    record.pass = check.intrinsic;
    report.add(record);
  }
  {
    CheckRecord record;
    record.name = "cauchy-distance";
    record.tolerance = 0.0;
    record.values = json{{"D", json_real_vector(metric.d_values)}};
    record.pass = true;
    report.add(record);
  }
  {
    CheckRecord record;
    record.name = "eps-interior";
    record.tolerance = 0.0;
    json x_eps = json::array();
    json boundary = json::array();
    if (model.truncation) {
      const BoundaryGeometry geometry =
          boundary_geometry(*model.truncation, metric.d_values, eps);
      for (int x : geometry.x_eps) x_eps.push_back(model.labels[x]);
      for (int x : geometry.boundary) boundary.push_back(model.labels[x]);
    } else {
      for (int x = 0; x < model.graph.size(); ++x)
        if (metric.d_values[x] >= eps) x_eps.push_back(model.labels[x]);
    }
    record.values = json{{"eps", eps}, {"x_eps", x_eps}, {"boundary", boundary}};
    record.pass = true;
    report.add(record);
  }
  report.wall_time_ms = timer.elapsed_ms();
  return report;
}

Report cmd_agmon(const CommandOptions& options, double c,
                 std::optional<double> lambda_option) {
  Timer timer;
  const ParsedModel model = load_model(options.path);
  require_valid(model, options);
  const ResolvedMetric metric = resolve_metric(model);

  Report report;
  report.command = "agmon";
  report.input_hash = model.input_hash;
  report.seed = options.seed;

  if (!check_potential_selfadjoint(model.potential)) {
    CheckRecord record;
    record.name = "selfadjoint-potential";
    record.tolerance = 1e-12;
    record.values = json{{"selfadjoint", false}};
    record.pass = false;
    report.add(record);
    report.wall_time_ms = timer.elapsed_ms();
    return report;
  }

  const AgmonHypothesis hypothesis = agmon_hypothesis_check(
      model.graph, model.bundle, model.connection, model.potential, metric.d_values, c,
      20, options.seed);
  {
    CheckRecord record;
    record.name = "minorant-pointwise";
    record.tolerance = 1e-10;
    record.values = json{{"C", c},
                         {"worst_vertex", model.labels[hypothesis.worst_vertex]},
                         {"margin", json_real(hypothesis.pointwise_margin)}};
    record.pass = hypothesis.pointwise_ok;
    report.add(record);
  }
  {
    CheckRecord record;
    record.name = "form-bound";
    record.tolerance = 1e-8;
    record.values = json{{"lambda", hypothesis.lambda},
                         {"worst_margin", hypothesis.worst_form_margin},
                         {"scale", hypothesis.form_scale}};
    record.pass = hypothesis.form_ok;
    report.add(record);
  }
  if (!hypothesis.pointwise_ok || !hypothesis.form_ok) {
    report.wall_time_ms = timer.elapsed_ms();
    return report;
  }

  const double lambda = lambda_option.value_or(hypothesis.lambda);
  const BlockOperator op =
      assemble(model.graph, model.bundle, model.connection, model.potential);
  const Section v = minimal_residual_section(op, lambda, 1e-10);
  const AgmonExperiment experiment = agmon_vanishing_experiment(
      model.graph, model.bundle, model.connection, model.potential, lambda, v,
      metric.d_values, metric.sigma, 0, default_agmon_schedule());
  int index = 0;
  for (const auto& point : experiment.points) {
    CheckRecord record;
    record.name = "vanishing-point-" + std::to_string(index++);
    record.tolerance = 1e-9;
    record.values = json{{"rho", point.point.rho},
                         {"eps", point.point.eps},
                         {"alpha", point.point.alpha},
                         {"beta", point.beta},
                         {"lhs", point.lhs},
                         {"rhs_upper", point.rhs_upper},
                         {"sum_s", point.sum_s},
                         {"cutoff_norm_sq", point.cutoff_norm_sq},
                         {"cert_bound", point.cert_bound}};
    record.pass = point.upper_ok && point.lower_ok;
    report.add(record);
  }
  {
    CheckRecord record;
    record.name = "vanishing-final-bound";
    record.tolerance = options.tolerance.value_or(1e-6);
    record.values = json{{"lambda", lambda},
                         {"residual", experiment.residual},
                         {"total_norm_sq", experiment.total_norm_sq},
                         {"final_bound", experiment.final_bound}};
    record.pass = experiment.final_bound <= record.tolerance;
    report.add(record);
  }
  report.wall_time_ms = timer.elapsed_ms();
  return report;
}

}  // namespace vblap
