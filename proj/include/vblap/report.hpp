#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vblap/bundle.hpp"

namespace vblap {

struct CheckRecord {
  std::string name;
  nlohmann::json values;  // object with check-specific payload
  double tolerance = 0.0;
  bool pass = true;
};

// Reports are emitted as JSON lines: one header record, one record per
// check, one trailing summary. Identical inputs and seeds give byte-identical
// output except for the wall_time_ms field of the summary.
struct Report {
  std::string command;
  std::string input_hash;
  std::uint64_t seed = 0;
  std::vector<CheckRecord> records;
  double wall_time_ms = 0.0;

  bool all_pass() const;
  int exit_code() const { return all_pass() ? 0 : 1; }
  void add(CheckRecord record) { records.push_back(std::move(record)); }
};

void write_report(const Report& report, std::ostream& out);
std::string report_to_string(const Report& report);

// JSON encoding helpers shared by the report writers: complex numbers as
// [re, im], infinities as the string "inf" (never a large float).
nlohmann::json json_complex(cplx z);
nlohmann::json json_real(double x);
nlohmann::json json_section(const Bundle& bundle, const Section& u);
nlohmann::json json_real_vector(const std::vector<double>& values);

}  // namespace vblap
