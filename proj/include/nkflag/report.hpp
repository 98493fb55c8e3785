#pragma once
// Structured check reports: named checks with the mathematical claim they
// test, measured values, tolerances, and deterministic JSON / CSV output.
#include <string>
#include <utility>
#include <vector>

namespace nkflag {
namespace report {

// Formats a double with 17 significant digits (round-trip exact, stable
// bytes across runs).
std::string format_number(double v);

struct Check {
  std::string id;
  std::string anchor;  // the mathematical claim, or "plumbing"
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
};

struct Report {
  std::string suite;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, std::string>> meta;

  // Pass iff |measured| <= tolerance.
  void add(const std::string& id, const std::string& anchor, double measured,
           double tolerance);
  // Explicit verdict with the measured value attached.
  void add_flag(const std::string& id, const std::string& anchor, bool passed,
                double measured, double tolerance);
  void set_meta(const std::string& key, const std::string& value);

  bool all_passed() const;
  int failures() const;

  std::string to_json() const;  // {"suite", "checks": [...], "meta": {...}}
  std::string to_csv() const;   // one row per check, header line first
};

}  // namespace report
}  // namespace nkflag
