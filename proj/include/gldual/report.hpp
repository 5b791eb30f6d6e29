#pragma once

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace gldual {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kLibraryVersion = "0.1.0";

/// One executed check: name, theorem case (when applicable), the observed
/// values, the tolerances they were held to, and the verdict.
struct CheckRecord {
  std::string name;
  std::string case_label;
  json values = json::object();
  json tolerances = json::object();
  bool passed = false;
};

struct VerificationReport {
  json config_echo = json::object();
  std::vector<CheckRecord> checks;

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }

  json to_json() const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["environment"] = {{"library", "gldual"}, {"version", kLibraryVersion}};
    j["config"] = config_echo;
    json arr = json::array();
    for (const auto& c : checks) {
      json r;
      r["name"] = c.name;
      r["case"] = c.case_label;
      r["values"] = c.values;
      r["tolerances"] = c.tolerances;
      r["passed"] = c.passed;
      arr.push_back(std::move(r));
    }
    j["checks"] = std::move(arr);
    j["all_passed"] = all_passed();
    return j;
  }

  static VerificationReport from_json(const json& j) {
    VerificationReport rep;
    rep.config_echo = j.value("config", json::object());
    for (const auto& r : j.at("checks")) {
      CheckRecord c;
      c.name = r.at("name").get<std::string>();
      c.case_label = r.value("case", "");
      c.values = r.value("values", json::object());
      c.tolerances = r.value("tolerances", json::object());
      c.passed = r.at("passed").get<bool>();
      rep.checks.push_back(std::move(c));
    }
    return rep;
  }
};

inline void write_report(const VerificationReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report: cannot open " + path);
  out << rep.to_json().dump(2) << "\n";
}

/// Shortest round-trippable decimal form, stable across runs.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace gldual
