#pragma once

#include <map>
#include <string>
#include <vector>

#include "coulomblab/grid.hpp"

namespace clab {

/// Declarative run configuration (single JSON file, no interactive mode).
struct RunConfig {
  std::string metric_family = "warped";  // flat | warped
  std::vector<double> phi_coeffs = {0.0, 0.3};
  std::vector<std::pair<int, int>> resolutions = {{16, 17}, {32, 33}};  // (N_lat, N_norm)
  std::vector<std::string> suites;  // empty: all
  uint64_t seed = 1;
  std::string out_dir = "out";
  bool debug_flip_tau = false;  // test hook: breaks the bct suite on purpose

  static RunConfig from_file(const std::string& path);
  MetricSpec metric() const;
  void validate() const;
};

struct SuiteResult {
  std::string name;        // paper anchor identifier, e.g. "lemma-bct"
  bool passed = true;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> failures;

  void check(const std::string& what, double value, double bound);
  void check_at_least(const std::string& what, double value, double bound);
  void note(const std::string& what, double value) { metrics.push_back({what, value}); }
};

struct RunReport {
  std::vector<SuiteResult> suites;
  bool all_passed() const;
  std::string to_json(const RunConfig& cfg) const;
  /// Deterministic report bytes; wall-clock timing goes to a separate sidecar.
  void write(const RunConfig& cfg, const std::string& dir, double wall_seconds) const;
};

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Least-squares slope of log(err) against log(h).
double fitted_order(const std::vector<double>& h, const std::vector<double>& err);

}  // namespace clab
