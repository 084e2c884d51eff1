#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "blsw/resonance.hpp"

namespace blsw {

struct RunConfig {
  std::string command;
  double a = 1.0, b = 2.0, c = 1.05, alpha_fraction = 0.5;
  int n = 512;
  bool n_explicit = false;  // evolve falls back to 256 when n is not given
  std::optional<double> L_override;
  std::optional<double> eta_max;  // default 0.5 eps^2
  int n_eta = 33;
  double eta = 0.0;               // spectrum
  std::optional<double> threshold;
  std::optional<double> eta0;     // decay; default 0.3 eps^2
  int m = 256;
  std::optional<double> L_y;
  double y_width = 12.0;
  std::vector<double> times;      // empty: command default
  std::string preset = "gaussian-phase-bump";
  std::uint64_t seed = 1;
  std::vector<double> eps_list = {0.4, 0.2, 0.1};
  double kp_eta = 0.05;
  std::int64_t samples = 100000;
  int threads = 1;
  std::string output = "out";
  std::vector<std::string> formats = {"csv", "json"};
};

const std::vector<std::string>& command_names();

// File values first, then overrides; unknown keys are rejected.
RunConfig load_config(const std::optional<std::string>& path,
                      const nlohmann::json& overrides = nlohmann::json::object());
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);
void validate(const RunConfig& cfg);

// Writes to a temporary sibling and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

// %.17g
std::string format_double(double x);

std::string curve_csv(const EigenCurve& curve);
nlohmann::json curve_json(const EigenCurve& curve, const ClosedFormConstants& k);
// format is "csv" or "json"
void write_curve(const EigenCurve& curve, const ClosedFormConstants& k,
                 const std::string& path, const std::string& format);
EigenCurve read_curve_csv(const std::string& path);

// Dispatches cfg.command; prints a one-line JSON summary to `summary`.
// Returns 0 on success, 1 on input errors, 2 on numerical failures.
int run(const RunConfig& cfg, std::ostream& summary);

}  // namespace blsw
