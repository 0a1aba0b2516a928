#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vblap/commands.hpp"
#include "vblap/types.hpp"

namespace {

int emit(const vblap::Report& report, const std::string& output_path) {
  if (output_path.empty()) {
    vblap::write_report(report, std::cout);
  } else {
    std::ofstream out(output_path);
    if (!out) {
      std::cerr << "cannot open output file " << output_path << "\n";
      return 2;
    }
    vblap::write_report(report, out);
  }
  return report.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laplacians and Schrodinger operators on Hermitian vector bundles "
               "over weighted graphs"};
  app.require_subcommand(1);

  vblap::CommandOptions options;
  std::string output_path;
  double tolerance = -1.0;
  app.add_option("--seed", options.seed, "base seed for all randomized checks")
      ->capture_default_str();
  app.add_option("--jobs", options.jobs, "worker threads for suite instances")
      ->capture_default_str();
  app.add_option("--tolerance", tolerance,
                 "override the default tolerance of the command's checks");
  app.add_option("--output", output_path, "report file (default: stdout)");

  auto* validate =
      app.add_subcommand("validate", "axioms and unitarity of a document");
  validate->fallthrough();
  std::string validate_path;
  validate->add_option("path", validate_path, "model document")->required();

  auto* spectrum = app.add_subcommand("spectrum", "sorted operator spectrum");
  spectrum->fallthrough();
  std::string spectrum_path;
  bool pencil_flag = false;
  bool complex_flag = false;
  spectrum->add_option("path", spectrum_path, "model document")->required();
  spectrum->add_flag("--pencil", pencil_flag,
                     "Hermitian pencil eigenvalues (the default)");
  spectrum->add_flag("--complex", complex_flag,
                     "complex spectrum of the assembled operator");

  auto* check = app.add_subcommand("check", "seeded verification suites");
  check->fallthrough();
  std::string check_path;
  std::string suite;
  int instances = 1;
  check->add_option("path", check_path, "model document")->required();
  check
      ->add_option("--suite", suite,
                   "green|kato|ground|accretive|contraction|positivity|mass|domination")
      ->required();
  check->add_option("--instances", instances, "instances to run")
      ->capture_default_str();
  check->add_flag("--allow-invalid", options.allow_invalid,
                  "skip graph and connection validation");

  auto* heat = app.add_subcommand("heat", "apply the heat semigroup");
  heat->fallthrough();
  std::string heat_path, heat_input;
  double heat_t = 0.0;
  heat->add_option("path", heat_path, "model document")->required();
  heat->add_option("--t", heat_t, "time")->required();
  heat->add_option("--input", heat_input, "section file")->required();

  auto* resolvent = app.add_subcommand("resolvent", "apply (xi + H)^{-1}");
  resolvent->fallthrough();
  std::string resolvent_path, resolvent_input;
  double xi = 1.0;
  resolvent->add_option("path", resolvent_path, "model document")->required();
  resolvent->add_option("--xi", xi, "shift, positive")->required();
  resolvent->add_option("--input", resolvent_input, "section file")->required();

  auto* metric =
      app.add_subcommand("metric", "intrinsic metric and boundary geometry");
  metric->fallthrough();
  std::string metric_path;
  double eps = 0.1;
  int horizon = -1;
  metric->add_option("path", metric_path, "model document")->required();
  metric->add_option("--epsilon", eps, "interior threshold")->capture_default_str();
  metric->add_option("--horizon", horizon, "override the family horizon");

  auto* agmon = app.add_subcommand("agmon", "spectral minorant and cutoff chain");
  agmon->fallthrough();
  std::string agmon_path;
  double c_constant = 0.0;
  std::string lambda_str = "auto";
  agmon->add_option("path", agmon_path, "model document")->required();
  agmon->add_option("--C", c_constant, "minorant constant")->capture_default_str();
  agmon->add_option("--lambda", lambda_str, "shift, or 'auto' for -C - 3/2")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (tolerance >= 0.0) options.tolerance = tolerance;

  try {
    if (validate->parsed()) {
      options.path = validate_path;
      return emit(vblap::cmd_validate(options), output_path);
    }
    if (spectrum->parsed()) {
      options.path = spectrum_path;
      (void)pencil_flag;
      return emit(vblap::cmd_spectrum(options, !complex_flag), output_path);
    }
    if (check->parsed()) {
      options.path = check_path;
      return emit(vblap::cmd_check(options, suite, instances), output_path);
    }
    if (heat->parsed()) {
      options.path = heat_path;
      return emit(vblap::cmd_heat(options, heat_t, heat_input), output_path);
    }
    if (resolvent->parsed()) {
      options.path = resolvent_path;
      return emit(vblap::cmd_resolvent(options, xi, resolvent_input), output_path);
    }
    if (metric->parsed()) {
      options.path = metric_path;
      std::optional<int> horizon_override;
      if (horizon >= 1) horizon_override = horizon;
      return emit(vblap::cmd_metric(options, eps, horizon_override), output_path);
    }
    if (agmon->parsed()) {
      options.path = agmon_path;
      std::optional<double> lambda;
      if (lambda_str != "auto") lambda = std::stod(lambda_str);
      return emit(vblap::cmd_agmon(options, c_constant, lambda), output_path);
    }
  } catch (const vblap::parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const vblap::argument_error& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  } catch (const vblap::precondition_error& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 1;
  } catch (const vblap::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
