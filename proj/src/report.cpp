#include "nkflag/report.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace nkflag {
namespace report {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void Report::add(const std::string& id, const std::string& anchor,
                 double measured, double tolerance) {
  checks.push_back(
      {id, anchor, std::abs(measured) <= tolerance, measured, tolerance});
}

void Report::add_flag(const std::string& id, const std::string& anchor,
                      bool passed, double measured, double tolerance) {
  checks.push_back({id, anchor, passed, measured, tolerance});
}

void Report::set_meta(const std::string& key, const std::string& value) {
  for (auto& kv : meta)
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  meta.emplace_back(key, value);
}

bool Report::all_passed() const { return failures() == 0; }

int Report::failures() const {
  int n = 0;
  for (const auto& c : checks)
    if (!c.passed) ++n;
  return n;
}

std::string Report::to_json() const {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json jc;
    jc["id"] = c.id;
    jc["anchor"] = c.anchor;
    jc["status"] = c.passed ? "pass" : "fail";
    jc["measured"] = format_number(c.measured);
    jc["tolerance"] = format_number(c.tolerance);
    j["checks"].push_back(jc);
  }
  nlohmann::ordered_json jm = nlohmann::ordered_json::object();
  for (const auto& kv : meta) jm[kv.first] = kv.second;
  j["meta"] = jm;
  return j.dump(2) + "\n";
}

namespace {

std::string csv_escape(const std::string& s) {
  bool needs = s.find_first_of(",\"\n") != std::string::npos;
  if (!needs) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

std::string Report::to_csv() const {
  std::string out = "suite,id,anchor,status,measured,tolerance\n";
  for (const auto& c : checks) {
    out += csv_escape(suite) + "," + csv_escape(c.id) + "," +
           csv_escape(c.anchor) + "," + (c.passed ? "pass" : "fail") + "," +
           format_number(c.measured) + "," + format_number(c.tolerance) + "\n";
  }
  return out;
}

}  // namespace report
}  // namespace nkflag
