#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace paqft {

// Configuration/schema problems. `field` is a JSON-pointer-ish path to the
// offending entry so the CLI can point at it (exit code 2).
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_, const std::string& msg)
      : std::runtime_error(msg + " (at " + field_ + ")"), field(std::move(field_)) {}
};

// Violated precondition or unusable input to a numerical operation.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckResult {
  std::string name;
  std::string statement;  // the identity or property being checked, as a formula
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

inline CheckResult make_check(std::string name, std::string statement, double deviation,
                              double tolerance, std::string note = "") {
  CheckResult c;
  c.name = std::move(name);
  c.statement = std::move(statement);
  c.deviation = deviation;
  c.tolerance = tolerance;
  c.pass = std::isfinite(deviation) && deviation <= tolerance;
  c.note = std::move(note);
  return c;
}

// A boolean check; stores deviation 0/1 against tolerance 0.
inline CheckResult make_flag_check(std::string name, std::string statement, bool ok,
                                   std::string note = "") {
  return make_check(std::move(name), std::move(statement), ok ? 0.0 : 1.0, 0.5,
                    std::move(note));
}

struct Report {
  std::string suite;
  std::vector<CheckResult> checks;

  void add(CheckResult c) { checks.push_back(std::move(c)); }
  bool passed() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  double max_deviation() const {
    double m = 0;
    for (const auto& c : checks) m = std::max(m, c.deviation);
    return m;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["suite"] = suite;
    j["passed"] = passed();
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
      nlohmann::ordered_json cj;
      cj["name"] = c.name;
      cj["statement"] = c.statement;
      cj["deviation"] = c.deviation;
      cj["tolerance"] = c.tolerance;
      cj["pass"] = c.pass;
      if (!c.note.empty()) cj["note"] = c.note;
      arr.push_back(cj);
    }
    j["checks"] = arr;
    return j;
  }
};

}  // namespace paqft
