#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vblap/bundle.hpp"
#include "vblap/family.hpp"
#include "vblap/geometry.hpp"
#include "vblap/graph.hpp"

namespace vblap {

enum class MetricKind { kDefault, kExplicit, kFamilyTail };

struct MetricSpec {
  MetricKind kind = MetricKind::kDefault;
  std::vector<std::tuple<int, int, double>> sigma_entries;  // explicit
  std::optional<std::vector<double>> d_override;            // explicit, optional
  std::optional<GenerationRule> tail_rule;                  // family-tail override
};

// A fully parsed model document: graph (explicit or a family truncation),
// bundle, connection, potential and metric declaration. String vertex labels
// are mapped to dense indices in sorted order; family vertices are labeled
// by their dense index.
struct ParsedModel {
  WeightedGraph graph;
  Bundle bundle{std::vector<int>{1}};
  Connection connection;
  Potential potential;
  MetricSpec metric;
  std::optional<GraphFamily> family;
  std::optional<Truncation> truncation;
  std::vector<std::string> labels;
  std::string input_hash;

  int index_of(const std::string& label) const;  // throws on unknown label
};

struct ParseOptions {
  bool validate_connection = true;  // reject non-unitary explicit maps
  std::optional<int> horizon_override;
};

ParsedModel parse_model(const nlohmann::json& doc, const ParseOptions& options = {});
ParsedModel load_model(const std::string& path, const ParseOptions& options = {});

// Resolved metric data for a parsed model: sigma on edges, plus the Cauchy
// boundary distance (family tail based; +inf for plain finite graphs, which
// are metrically complete).
struct ResolvedMetric {
  SigmaMap sigma;
  std::vector<double> d_values;
};

ResolvedMetric resolve_metric(const ParsedModel& model);

// Section file: JSON array with one entry per vertex, each a list of
// [re, im] fiber coordinates.
Section parse_section(const nlohmann::json& doc, const Bundle& bundle);
Section load_section(const std::string& path, const Bundle& bundle);

}  // namespace vblap
