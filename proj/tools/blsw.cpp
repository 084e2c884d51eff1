#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "blsw/errors.hpp"
#include "blsw/io.hpp"

using nlohmann::json;

namespace {

struct Flags {
  std::optional<std::string> config;
  std::optional<double> a, b, c, alpha_fraction, L_override, eta_max, eta, threshold, eta0,
      L_y, y_width, kp_eta;
  std::optional<int> n, n_eta, m, threads;
  std::optional<std::int64_t> seed, samples;
  std::optional<std::string> preset, output;
  std::vector<double> times, eps_list;
  std::vector<std::string> formats;
};

template <typename T>
void put(json& j, const char* group, const char* key, const std::optional<T>& v) {
  if (v) j[group][key] = *v;
}

json overrides(const Flags& f) {
  json j = json::object();
  put(j, "params", "a", f.a);
  put(j, "params", "b", f.b);
  put(j, "params", "c", f.c);
  put(j, "params", "alpha_fraction", f.alpha_fraction);
  put(j, "numerics", "n", f.n);
  put(j, "numerics", "L_override", f.L_override);
  put(j, "numerics", "eta_max", f.eta_max);
  put(j, "numerics", "n_eta", f.n_eta);
  put(j, "numerics", "eta", f.eta);
  put(j, "numerics", "threshold", f.threshold);
  put(j, "numerics", "eta0", f.eta0);
  put(j, "numerics", "m", f.m);
  put(j, "numerics", "L_y", f.L_y);
  put(j, "numerics", "y_width", f.y_width);
  put(j, "numerics", "preset", f.preset);
  put(j, "numerics", "seed", f.seed);
  put(j, "numerics", "kp_eta", f.kp_eta);
  put(j, "numerics", "samples", f.samples);
  put(j, "numerics", "threads", f.threads);
  if (!f.times.empty()) j["numerics"]["times"] = f.times;
  if (!f.eps_list.empty()) j["numerics"]["eps_list"] = f.eps_list;
  put(j, "output", "dir", f.output);
  if (!f.formats.empty()) j["output"]["formats"] = f.formats;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis of line solitary waves for the 2D Benney-Luke equation"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string("blsw ") + BLSW_VERSION + " (interface 1)");
  app.fallthrough();

  Flags f;
  app.add_option("--config", f.config, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--a", f.a, "dispersion coefficient a");
  app.add_option("--b", f.b, "dispersion coefficient b (> a)");
  app.add_option("--c", f.c, "wave speed (> 1)");
  app.add_option("--alpha-fraction", f.alpha_fraction, "weight alpha as a fraction of alpha_c");
  app.add_option("--n", f.n, "z grid size (even, >= 64)");
  app.add_option("--L", f.L_override, "z half-length override");
  app.add_option("--eta-max", f.eta_max, "largest |eta| of the resonant curve");
  app.add_option("--n-eta", f.n_eta, "number of eta samples");
  app.add_option("--eta", f.eta, "transverse wavenumber for spectrum");
  app.add_option("--threshold", f.threshold, "keep eigenvalues with Re above this");
  app.add_option("--eta0", f.eta0, "lower edge of the off-resonant band for decay");
  app.add_option("--m", f.m, "y grid size");
  app.add_option("--L-y", f.L_y, "y half-length");
  app.add_option("--y-width", f.y_width, "width of the initial y envelope");
  app.add_option("--times", f.times, "output times")->delimiter(',');
  app.add_option("--preset", f.preset, "initial data preset");
  app.add_option("--seed", f.seed, "random seed");
  app.add_option("--eps", f.eps_list, "eps values for kp-compare")->delimiter(',');
  app.add_option("--kp-eta", f.kp_eta, "KP wavenumber for kp-compare");
  app.add_option("--samples", f.samples, "samples per symbol check");
  app.add_option("--threads", f.threads, "cap on worker threads");
  app.add_option("--output,-o", f.output, "output directory");
  app.add_option("--formats", f.formats, "subset of csv,json,bin")->delimiter(',');

  std::string command;
  for (const std::string& name : blsw::command_names())
    app.add_subcommand(name)->callback([&command, name] { command = name; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  blsw::RunConfig cfg;
  try {
    json o = overrides(f);
    o["command"] = command;
    cfg = blsw::load_config(f.config, o);
  } catch (const blsw::Error& e) {
    json s = {{"command", command}, {"status", "error"}, {"error", e.name()},
              {"message", e.what()}};
    std::cout << s.dump() << std::endl;
    return e.exit_code();
  }
  return blsw::run(cfg, std::cout);
}
