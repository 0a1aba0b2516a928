#pragma once

#include <optional>
#include <string>

#include "vblap/report.hpp"

namespace vblap {

struct CommandOptions {
  std::string path;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::optional<double> tolerance;  // overrides the per-check default
  bool allow_invalid = false;       // skip graph/connection validation (check only)
};

// Axioms, connection unitarity and the potential predicates; exit 0 iff the
// axioms and unitarity hold (the predicates are data, not requirements).
Report cmd_validate(const CommandOptions& options);

// Sorted eigenvalues; pencil mode (the default) solves the Hermitian pencil
// and needs a self-adjoint potential, otherwise the complex spectrum of the
// assembled operator is reported.
Report cmd_spectrum(const CommandOptions& options, bool pencil = true);

// Seeded verification suites over the document model; one record per
// instance. Suites: green, kato, ground, accretive, contraction, positivity,
// mass, domination.
Report cmd_check(const CommandOptions& options, const std::string& suite, int instances);

Report cmd_heat(const CommandOptions& options, double t, const std::string& section_path);
Report cmd_resolvent(const CommandOptions& options, double xi,
                     const std::string& section_path);

// Resolved sigma, intrinsic margins, Cauchy-boundary distances and the
// eps-interior/boundary sets.
Report cmd_metric(const CommandOptions& options, double eps,
                  std::optional<int> horizon_override);

// Spectral-minorant hypothesis margins at constant C, lambda = -C - 3/2
// unless given, and the cutoff vanishing experiment over the default
// schedule.
Report cmd_agmon(const CommandOptions& options, double c, std::optional<double> lambda);

}  // namespace vblap
