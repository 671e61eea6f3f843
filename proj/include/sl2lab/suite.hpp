#pragma once

// Acceptance criteria A1..A13 as runnable experiments. Each criterion yields
// one summary (named checks against bounds) plus detail rows; the CLI and the
// acceptance binary print the same reports.

#include <cstdint>
#include <string>
#include <vector>

#include "sl2lab/io.hpp"

namespace sl2lab {

struct Check {
  std::string name;
  double measured = 0.0;
  std::string relation;  // "<=" or ">="
  double bound = 0.0;
  bool pass = false;
};

struct CriterionReport {
  std::string id;
  std::string title;
  Json parameters = Json::object();
  std::vector<Check> checks;
  /// Flat objects, one per detail row; key order is stable.
  std::vector<Json> details;
  std::string note;
  double runtime_seconds = 0.0;

  bool pass() const;
  /// Adds a check; NaN measurements fail.
  void check(std::string name, double measured, const std::string& relation, double bound);
};

struct SuiteOptions {
  std::uint64_t seed = 20240517;
  int barycenter_maps = 100;
};

const std::vector<std::string>& criterion_ids();
/// identities: A1..A6, kotani: A7..A8, renorm-cascade: A9..A10,
/// monotone-audit: A2, A8; also barycenter (A11), ah (A12), conjugacy (A13),
/// all (A1..A13) and any single id. Throws ConfigError otherwise.
std::vector<std::string> suite_members(const std::string& name);

/// Runs one criterion; library errors are recorded as a failed check, not thrown.
CriterionReport run_criterion(const std::string& id, const SuiteOptions& opt = {});

Json to_json(const CriterionReport& r);
/// "A1 PASS <title> | name=measured<=bound ..."
std::string summary_line(const CriterionReport& r);
/// Detail rows of several reports as CSV (criterion, row, key, value); no timestamps.
std::string details_csv(const std::vector<CriterionReport>& reports);

}  // namespace sl2lab
