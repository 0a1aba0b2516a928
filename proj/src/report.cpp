#include "vblap/report.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace vblap {

using nlohmann::json;

bool Report::all_pass() const {
  for (const auto& record : records)
    if (!record.pass) return false;
  return true;
}

json json_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json json_complex(cplx z) { return json::array({z.real(), z.imag()}); }

json json_section(const Bundle& bundle, const Section& u) {
  json out = json::array();
  for (int x = 0; x < bundle.size(); ++x) {
    json fiber = json::array();
    for (int i = 0; i < bundle.dim(x); ++i) fiber.push_back(json_complex(u[x][i]));
    out.push_back(std::move(fiber));
  }
  return out;
}

json json_real_vector(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) out.push_back(json_real(v));
  return out;
}

void write_report(const Report& report, std::ostream& out) {
  json header{{"record", "header"},
              {"command", report.command},
              {"input_hash", report.input_hash},
              {"seed", report.seed}};
  out << header.dump() << '\n';
  for (const auto& record : report.records) {
    json line{{"record", "check"},
              {"name", record.name},
              {"values", record.values},
              {"tolerance", record.tolerance},
              {"pass", record.pass}};
    out << line.dump() << '\n';
  }
  json summary{{"record", "summary"},
               {"pass", report.all_pass()},
               {"checks", report.records.size()},
               {"wall_time_ms", report.wall_time_ms}};
  out << summary.dump() << '\n';
}

std::string report_to_string(const Report& report) {
  std::ostringstream os;
  write_report(report, os);
  return os.str();
}

}  // namespace vblap
