#include "vblap/document.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace vblap {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw parse_error(field, message);
}

const json& member(const json& node, const std::string& field, const char* key) {
  if (!node.is_object()) fail(field, "expected an object");
  const auto it = node.find(key);
  if (it == node.end()) fail(field + "/" + key, "missing field");
  return *it;
}

double as_number(const json& node, const std::string& field) {
  if (!node.is_number()) fail(field, "expected a number");
  return node.get<double>();
}

double as_number_or(const json& parent, const std::string& field, const char* key,
                    double fallback) {
  if (!parent.is_object()) fail(field, "expected an object");
  const auto it = parent.find(key);
  if (it == parent.end()) return fallback;
  return as_number(*it, field + "/" + key);
}

std::string as_string(const json& node, const std::string& field) {
  if (!node.is_string()) fail(field, "expected a string");
  return node.get<std::string>();
}

std::uint64_t fnv1a_bytes(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << value;
  return os.str();
}

GenerationRule parse_rule(const json& node, const std::string& field) {
  GenerationRule rule;
  if (node.is_null()) return rule;
  if (!node.is_object()) fail(field, "expected a rule object");
  rule.scale = as_number_or(node, field, "scale", 1.0);
  rule.ratio = as_number_or(node, field, "ratio", 1.0);
  rule.power = as_number_or(node, field, "power", 0.0);
  return rule;
}

// Flat row-major list of [re, im] pairs.
Matrix parse_complex_matrix(const json& node, int rows, int cols,
                            const std::string& field) {
  if (!node.is_array() || static_cast<int>(node.size()) != rows * cols)
    fail(field, "expected " + std::to_string(rows * cols) + " [re, im] pairs");
  Matrix out(rows, cols);
  for (int idx = 0; idx < rows * cols; ++idx) {
    const json& pair = node[idx];
    const std::string at = field + "/" + std::to_string(idx);
    if (!pair.is_array() || pair.size() != 2) fail(at, "expected an [re, im] pair");
    out(idx / cols, idx % cols) = cplx(as_number(pair[0], at), as_number(pair[1], at));
  }
  return out;
}

}  // namespace

int ParsedModel::index_of(const std::string& label) const {
  const auto it = std::lower_bound(labels.begin(), labels.end(), label);
  if (it == labels.end() || *it != label) {
    // family docs use index labels that are not sorted lexicographically
    const auto linear = std::find(labels.begin(), labels.end(), label);
    if (linear == labels.end()) throw argument_error("unknown vertex label: " + label);
    return static_cast<int>(linear - labels.begin());
  }
  return static_cast<int>(it - labels.begin());
}

ParsedModel parse_model(const json& doc, const ParseOptions& options) {
  if (!doc.is_object()) fail("/", "document must be a JSON object");
  ParsedModel model;
  model.input_hash = hex64(fnv1a_bytes(doc.dump()));

  const bool has_family = doc.contains("family") && !doc["family"].is_null();
  const bool has_vertices = doc.contains("vertices");
  if (has_family == has_vertices)
    fail("/", "document needs exactly one of \"vertices\" or \"family\"");

  if (has_family) {
    const json& fam = doc["family"];
    GraphFamily family;
    try {
      family.kind = family_kind_from_string(as_string(member(fam, "/family", "kind"),
                                                      "/family/kind"));
    } catch (const argument_error& e) {
      fail("/family/kind", e.what());
    }
    if (fam.contains("b")) family.b_rule = parse_rule(fam["b"], "/family/b");
    if (fam.contains("m")) family.m_rule = parse_rule(fam["m"], "/family/m");
    if (fam.contains("sigma"))
      family.sigma_rule = parse_rule(fam["sigma"], "/family/sigma");
    if (fam.contains("cycle_len")) {
      const double raw = as_number(fam["cycle_len"], "/family/cycle_len");
      family.cycle_len = static_cast<int>(raw);
      if (family.cycle_len < 3) fail("/family/cycle_len", "needs at least 3");
    }
    int horizon = 0;
    if (options.horizon_override)
      horizon = *options.horizon_override;
    else
      horizon = static_cast<int>(as_number(member(fam, "/family", "horizon"),
                                           "/family/horizon"));
    if (horizon < 1) fail("/family/horizon", "horizon must be at least 1");
    model.family = family;
    try {
      model.truncation = truncate(*model.family, horizon);
    } catch (const argument_error& e) {
      fail("/family", e.what());
    }
    model.graph = model.truncation->graph;
    model.labels.resize(model.graph.size());
    for (int x = 0; x < model.graph.size(); ++x) model.labels[x] = std::to_string(x);
  } else {
    const json& vertices = doc["vertices"];
    if (!vertices.is_array() || vertices.empty())
      fail("/vertices", "expected a non-empty array");
    std::map<std::string, double> measures;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      const std::string at = "/vertices/" + std::to_string(i);
      const json& v = vertices[i];
      const std::string id = as_string(member(v, at, "id"), at + "/id");
      if (measures.count(id)) fail(at + "/id", "duplicate vertex id \"" + id + "\"");
      measures[id] = as_number_or(v, at, "m", 1.0);
    }
    std::vector<double> m;
    for (const auto& [label, value] : measures) {
      model.labels.push_back(label);  // std::map iterates in sorted order
      m.push_back(value);
    }
    const auto index_of = [&](const std::string& label,
                              const std::string& at) -> int {
      const auto it = std::lower_bound(model.labels.begin(), model.labels.end(), label);
      if (it == model.labels.end() || *it != label)
        fail(at, "unknown vertex id \"" + label + "\"");
      return static_cast<int>(it - model.labels.begin());
    };

    std::vector<EdgeTriple> entries;
    std::set<std::pair<int, int>> seen_directed;
    if (doc.contains("edges")) {
      const json& edges = doc["edges"];
      if (!edges.is_array()) fail("/edges", "expected an array");
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string at = "/edges/" + std::to_string(i);
        const json& e = edges[i];
        const int u = index_of(as_string(member(e, at, "u"), at + "/u"), at + "/u");
        const int v = index_of(as_string(member(e, at, "v"), at + "/v"), at + "/v");
        const double b = as_number(member(e, at, "b"), at + "/b");
        if (!seen_directed.insert({u, v}).second)
          fail(at, "duplicate edge declaration");
        entries.push_back({u, v, b});
      }
    }
    // A single orientation declares a symmetric edge; both orientations are
    // taken literally, so asymmetric data stays representable and lands in
    // the validation report rather than being silently repaired.
    std::vector<EdgeTriple> raw;
    for (const auto& e : entries) {
      raw.push_back(e);
      if (e.u != e.v && !seen_directed.count({e.v, e.u}))
        raw.push_back({e.v, e.u, e.b});
    }
    model.graph = WeightedGraph::from_directed_raw(std::move(m), raw);
  }

  const int n = model.graph.size();

  std::vector<int> dims(n, 1);
  if (doc.contains("fiber_dim")) {
    const json& fd = doc["fiber_dim"];
    if (fd.is_number()) {
      const int d = static_cast<int>(fd.get<double>());
      if (d < 1) fail("/fiber_dim", "fiber dimension must be positive");
      dims.assign(n, d);
    } else if (fd.is_object()) {
      for (const auto& [label, value] : fd.items()) {
        const std::string at = "/fiber_dim/" + label;
        int x = 0;
        try {
          x = model.index_of(label);
        } catch (const argument_error&) {
          fail(at, "unknown vertex id");
        }
        const int d = static_cast<int>(as_number(value, at));
        if (d < 1) fail(at, "fiber dimension must be positive");
        dims[x] = d;
      }
    } else {
      fail("/fiber_dim", "expected an integer or a per-vertex map");
    }
  }
  model.bundle = Bundle(dims);

  const json connection_spec =
      doc.contains("connection") ? doc["connection"] : json{{"kind", "identity"}};
  const std::string kind =
      as_string(member(connection_spec, "/connection", "kind"), "/connection/kind");
  try {
    if (kind == "identity") {
      model.connection = Connection::identity(model.graph, model.bundle);
    } else if (kind == "magnetic") {
      EdgePhases phases;
      if (connection_spec.contains("theta")) {
        const json& theta = connection_spec["theta"];
        if (!theta.is_array()) fail("/connection/theta", "expected an array");
        for (std::size_t i = 0; i < theta.size(); ++i) {
          const std::string at = "/connection/theta/" + std::to_string(i);
          const json& t = theta[i];
          const int u = model.index_of(as_string(member(t, at, "u"), at + "/u"));
          const int v = model.index_of(as_string(member(t, at, "v"), at + "/v"));
          if (!model.graph.has_edge(u, v)) fail(at, "phase on a non-edge");
          phases.set(u, v, as_number(member(t, at, "value"), at + "/value"));
        }
      }
      model.connection = Connection::magnetic(model.graph, model.bundle, phases);
    } else if (kind == "random") {
      const double seed = as_number(member(connection_spec, "/connection", "seed"),
                                    "/connection/seed");
      model.connection = Connection::random_unitary(model.graph, model.bundle,
                                                    static_cast<std::uint64_t>(seed));
    } else if (kind == "explicit") {
      const json& maps = member(connection_spec, "/connection", "maps");
      if (!maps.is_array()) fail("/connection/maps", "expected an array");
      std::vector<std::pair<std::pair<int, int>, Matrix>> parsed;
      std::set<std::pair<int, int>> seen;
      for (std::size_t i = 0; i < maps.size(); ++i) {
        const std::string at = "/connection/maps/" + std::to_string(i);
        const json& entry = maps[i];
        const int u = model.index_of(as_string(member(entry, at, "u"), at + "/u"));
        const int v = model.index_of(as_string(member(entry, at, "v"), at + "/v"));
        if (!seen.insert(std::minmax(u, v)).second) fail(at, "duplicate connection map");
        const Matrix matrix =
            parse_complex_matrix(member(entry, at, "matrix"), model.bundle.dim(v),
                                 model.bundle.dim(u), at + "/matrix");
        parsed.push_back({{u, v}, matrix});
      }
      model.connection = Connection::explicit_maps(model.graph, model.bundle, parsed,
                                                   options.validate_connection);
    } else {
      fail("/connection/kind", "unknown connection kind \"" + kind + "\"");
    }
  } catch (const argument_error& e) {
    fail("/connection", e.what());
  }

  if (doc.contains("potential") && !doc["potential"].is_null()) {
    const json& pot = doc["potential"];
    if (!pot.is_object()) fail("/potential", "expected a per-vertex map");
    model.potential = zero_potential(model.bundle);
    for (const auto& [label, value] : pot.items()) {
      const std::string at = "/potential/" + label;
      int x = 0;
      try {
        x = model.index_of(label);
      } catch (const argument_error&) {
        fail(at, "unknown vertex id");
      }
      model.potential[x] =
          parse_complex_matrix(value, model.bundle.dim(x), model.bundle.dim(x), at);
    }
  }

  if (doc.contains("metric") && !doc["metric"].is_null()) {
    const json& metric = doc["metric"];
    const std::string metric_kind =
        as_string(member(metric, "/metric", "kind"), "/metric/kind");
    if (metric_kind == "default") {
      model.metric.kind = MetricKind::kDefault;
    } else if (metric_kind == "explicit") {
      model.metric.kind = MetricKind::kExplicit;
      const json& sigma = member(metric, "/metric", "sigma");
      if (!sigma.is_array()) fail("/metric/sigma", "expected an array");
      for (std::size_t i = 0; i < sigma.size(); ++i) {
        const std::string at = "/metric/sigma/" + std::to_string(i);
        const json& entry = sigma[i];
        const int u = model.index_of(as_string(member(entry, at, "u"), at + "/u"));
        const int v = model.index_of(as_string(member(entry, at, "v"), at + "/v"));
        if (!model.graph.has_edge(u, v)) fail(at, "sigma on a non-edge");
        const double value = as_number(member(entry, at, "value"), at + "/value");
        if (!(value > 0.0)) fail(at + "/value", "sigma must be positive");
        model.metric.sigma_entries.emplace_back(u, v, value);
      }
      if (metric.contains("D")) {
        const json& dvals = metric["D"];
        if (!dvals.is_object()) fail("/metric/D", "expected a per-vertex map");
        std::vector<double> d(n, kInf);
        for (const auto& [label, value] : dvals.items()) {
          const std::string at = "/metric/D/" + label;
          int x = 0;
          try {
            x = model.index_of(label);
          } catch (const argument_error&) {
            fail(at, "unknown vertex id");
          }
          if (value.is_string() && value.get<std::string>() == "inf")
            d[x] = kInf;
          else
            d[x] = as_number(value, at);
        }
        model.metric.d_override = std::move(d);
      }
    } else if (metric_kind == "family-tail") {
      model.metric.kind = MetricKind::kFamilyTail;
      if (!model.family) fail("/metric", "family-tail metric needs a family document");
      if (metric.contains("rule")) {
        const std::string rule =
            as_string(metric["rule"], "/metric/rule");
        if (rule != "geometric") fail("/metric/rule", "unknown tail rule \"" + rule + "\"");
        GenerationRule tail;
        tail.scale = as_number_or(metric, "/metric", "scale", 1.0);
        tail.ratio = as_number(member(metric, "/metric", "ratio"), "/metric/ratio");
        tail.power = 0.0;
        model.metric.tail_rule = tail;
      }
    } else {
      fail("/metric/kind", "unknown metric kind \"" + metric_kind + "\"");
    }
  }
  return model;
}

ParsedModel load_model(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) fail("/", "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("/", std::string("invalid JSON: ") + e.what());
  }
  return parse_model(doc, options);
}

ResolvedMetric resolve_metric(const ParsedModel& model) {
  ResolvedMetric resolved;
  const int n = model.graph.size();

  if (model.metric.kind == MetricKind::kExplicit) {
    for (const auto& [u, v, value] : model.metric.sigma_entries)
      resolved.sigma.set(u, v, value);
    for (auto [u, v] : model.graph.undirected_edges())
      if (!resolved.sigma.has(u, v))
        throw parse_error("/metric/sigma", "missing sigma for an edge");
  } else if (model.metric.kind == MetricKind::kFamilyTail) {
    Truncation trunc = *model.truncation;
    if (model.metric.tail_rule) trunc.family.sigma_rule = *model.metric.tail_rule;
    resolved.sigma = SigmaMap::from_truncation(trunc);
  } else {
    resolved.sigma = default_intrinsic_sigma(model.graph);
  }

  if (model.metric.d_override) {
    resolved.d_values = *model.metric.d_override;
  } else if (model.truncation) {
    Truncation trunc = *model.truncation;
    if (model.metric.tail_rule) trunc.family.sigma_rule = *model.metric.tail_rule;
    resolved.d_values = cauchy_distance(trunc);
  } else {
    // finite explicit graphs are metrically complete
    resolved.d_values.assign(n, kInf);
  }
  return resolved;
}

Section parse_section(const json& doc, const Bundle& bundle) {
  if (!doc.is_array() || static_cast<int>(doc.size()) != bundle.size())
    fail("/", "section needs one entry per vertex");
  Section u(bundle.size());
  for (int x = 0; x < bundle.size(); ++x) {
    const std::string at = "/" + std::to_string(x);
    const json& fiber = doc[x];
    if (!fiber.is_array() || static_cast<int>(fiber.size()) != bundle.dim(x))
      fail(at, "expected " + std::to_string(bundle.dim(x)) + " fiber coordinates");
    u[x] = Vector(bundle.dim(x));
    for (int i = 0; i < bundle.dim(x); ++i) {
      const json& pair = fiber[i];
      const std::string coord = at + "/" + std::to_string(i);
      if (!pair.is_array() || pair.size() != 2) fail(coord, "expected an [re, im] pair");
      u[x][i] = cplx(as_number(pair[0], coord), as_number(pair[1], coord));
    }
  }
  return u;
}

Section load_section(const std::string& path, const Bundle& bundle) {
  std::ifstream in(path);
  if (!in) fail("/", "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("/", std::string("invalid JSON: ") + e.what());
  }
  return parse_section(doc, bundle);
}

}  // namespace vblap
