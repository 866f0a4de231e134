#include "coulomblab/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace clab {

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json j;
  is >> j;
  RunConfig cfg;
  if (j.contains("metric")) {
    cfg.metric_family = j["metric"].value("family", "warped");
    if (j["metric"].contains("phi_coeffs"))
      cfg.phi_coeffs = j["metric"]["phi_coeffs"].get<std::vector<double>>();
  }
  if (j.contains("resolutions")) {
    cfg.resolutions.clear();
    for (const auto& r : j["resolutions"])
      cfg.resolutions.push_back({r[0].get<int>(), r[1].get<int>()});
  }
  if (j.contains("suites")) cfg.suites = j["suites"].get<std::vector<std::string>>();
  cfg.seed = j.value("seed", uint64_t(1));
  cfg.out_dir = j.value("out", std::string("out"));
  cfg.debug_flip_tau = j.value("debug_flip_tau", false);
  cfg.validate();
  return cfg;
}

MetricSpec RunConfig::metric() const {
  if (metric_family == "flat") return MetricSpec::flat();
  if (metric_family == "warped") return MetricSpec::warped(phi_coeffs);
  throw std::runtime_error("config: unknown metric family " + metric_family);
}

void RunConfig::validate() const {
  if (resolutions.empty()) throw std::runtime_error("config: no resolutions");
  for (size_t i = 0; i < resolutions.size(); ++i) {
    if (resolutions[i].first < 8 || resolutions[i].second < 9)
      throw std::runtime_error("config: resolution below N_lat >= 8, N_norm >= 9");
    if (i > 0 && (resolutions[i].first <= resolutions[i - 1].first))
      throw std::runtime_error("config: resolutions must be ascending");
  }
  if (metric_family != "flat" && metric_family != "warped")
    throw std::runtime_error("config: unknown metric family");
}

void SuiteResult::check(const std::string& what, double value, double bound) {
  metrics.push_back({what, value});
  if (!(value <= bound)) {
    passed = false;
    std::ostringstream os;
    os << name << ": " << what << " = " << value << " exceeds " << bound;
    failures.push_back(os.str());
  }
}

void SuiteResult::check_at_least(const std::string& what, double value, double bound) {
  metrics.push_back({what, value});
  if (!(value >= bound)) {
    passed = false;
    std::ostringstream os;
    os << name << ": " << what << " = " << value << " below " << bound;
    failures.push_back(os.str());
  }
}

bool RunReport::all_passed() const {
  for (const auto& s : suites)
    if (!s.passed) return false;
  return true;
}

std::string RunReport::to_json(const RunConfig& cfg) const {
  nlohmann::json j;
  j["config"] = {{"metric", cfg.metric_family},
                 {"phi_coeffs", cfg.phi_coeffs},
                 {"seed", cfg.seed}};
  auto res = nlohmann::json::array();
  for (auto [nl, nn] : cfg.resolutions) res.push_back({nl, nn});
  j["config"]["resolutions"] = res;
  j["suites"] = nlohmann::json::array();
  for (const auto& s : suites) {
    nlohmann::json js;
    js["id"] = s.name;
    js["passed"] = s.passed;
    js["metrics"] = nlohmann::json::object();
    for (const auto& [k, v] : s.metrics) js["metrics"][k] = v;
    js["failures"] = s.failures;
    j["suites"].push_back(js);
  }
  j["all_passed"] = all_passed();
  return j.dump(2);
}

void RunReport::write(const RunConfig& cfg, const std::string& dir, double wall_seconds) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir + "/report.json", std::ios::binary);
    os << to_json(cfg) << "\n";
  }
  {
    std::ofstream os(dir + "/run_meta.json");
    nlohmann::json j;
    j["wall_seconds"] = wall_seconds;
    os << j.dump(2) << "\n";
  }
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path, std::ios::binary);
  for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  os.precision(17);
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  }
}

double fitted_order(const std::vector<double>& h, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < h.size(); ++i) {
    if (!(err[i] > 0)) continue;
    double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return 0;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace clab
