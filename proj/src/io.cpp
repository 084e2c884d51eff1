#include "blsw/io.hpp"

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <unistd.h>

#include "blsw/dynamics.hpp"
#include "blsw/errors.hpp"
#include "blsw/kp.hpp"
#include "blsw/linop.hpp"
#include "blsw/params.hpp"
#include "blsw/symbols.hpp"

namespace blsw {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "profile", "symbols-check", "spectrum", "resonance", "kp-compare", "evolve", "decay"};
  return names;
}

namespace {

const std::vector<std::string> kPresets = {"gaussian-phase-bump", "kernel-mode",
                                           "projected-noise"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// Typed readers with key-path diagnostics.
double get_double(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + ": expected a number, got " + v.dump());
  return v.get<double>();
}

std::int64_t get_int(const json& v, const std::string& path) {
  if (v.is_number_integer() || v.is_number_unsigned()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (d == std::floor(d) && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
  }
  throw ConfigError(path + ": expected an integer, got " + v.dump());
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path + ": expected a string, got " + v.dump());
  return v.get<std::string>();
}

std::vector<double> get_doubles(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected an array of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < v.size(); ++i)
    out.push_back(get_double(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::string> get_strings(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected an array of strings");
  std::vector<std::string> out;
  for (size_t i = 0; i < v.size(); ++i)
    out.push_back(get_string(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::optional<double> get_opt_double(const json& v, const std::string& path) {
  if (v.is_null()) return std::nullopt;
  return get_double(v, path);
}

void merge(json& into, const json& from, const std::string& path) {
  if (!from.is_object()) throw ConfigError((path.empty() ? "<root>" : path) + ": expected an object");
  for (auto it = from.begin(); it != from.end(); ++it) {
    std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (it->is_object() && into.contains(it.key()) && into[it.key()].is_object())
      merge(into[it.key()], *it, key);
    else
      into[it.key()] = *it;
  }
}

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  if (!j.is_object()) throw ConfigError("<root>: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "command") {
      cfg.command = get_string(*it, k);
    } else if (k == "params" || k == "numerics" || k == "output") {
      if (!it->is_object()) throw ConfigError(k + ": expected an object");
      for (auto jt = it->begin(); jt != it->end(); ++jt) {
        const std::string& f = jt.key();
        const std::string path = k + "." + f;
        const json& v = *jt;
        bool known = true;
        if (k == "params") {
          if (f == "a") cfg.a = get_double(v, path);
          else if (f == "b") cfg.b = get_double(v, path);
          else if (f == "c") cfg.c = get_double(v, path);
          else if (f == "alpha_fraction") cfg.alpha_fraction = get_double(v, path);
          else known = false;
        } else if (k == "numerics") {
          if (f == "n") {
            cfg.n = static_cast<int>(get_int(v, path));
            cfg.n_explicit = true;
          } else if (f == "L_override") cfg.L_override = get_opt_double(v, path);
          else if (f == "eta_max") cfg.eta_max = get_opt_double(v, path);
          else if (f == "n_eta") cfg.n_eta = static_cast<int>(get_int(v, path));
          else if (f == "eta") cfg.eta = get_double(v, path);
          else if (f == "threshold") cfg.threshold = get_opt_double(v, path);
          else if (f == "eta0") cfg.eta0 = get_opt_double(v, path);
          else if (f == "m") cfg.m = static_cast<int>(get_int(v, path));
          else if (f == "L_y") cfg.L_y = get_opt_double(v, path);
          else if (f == "y_width") cfg.y_width = get_double(v, path);
          else if (f == "times") cfg.times = get_doubles(v, path);
          else if (f == "preset") cfg.preset = get_string(v, path);
          else if (f == "seed") {
            std::int64_t s = get_int(v, path);
            if (s < 0) throw ConfigError(path + ": must be >= 0");
            cfg.seed = static_cast<std::uint64_t>(s);
          } else if (f == "eps_list") cfg.eps_list = get_doubles(v, path);
          else if (f == "kp_eta") cfg.kp_eta = get_double(v, path);
          else if (f == "samples") cfg.samples = get_int(v, path);
          else if (f == "threads") cfg.threads = static_cast<int>(get_int(v, path));
          else known = false;
        } else {
          if (f == "dir") cfg.output = get_string(v, path);
          else if (f == "formats") cfg.formats = get_strings(v, path);
          else known = false;
        }
        if (!known) throw ConfigError(path + ": unknown key");
      }
    } else {
      throw ConfigError(k + ": unknown key");
    }
  }
  validate(cfg);
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["command"] = cfg.command;
  j["params"] = {{"a", cfg.a}, {"b", cfg.b}, {"c", cfg.c}, {"alpha_fraction", cfg.alpha_fraction}};
  j["numerics"] = {{"n", cfg.n},
                   {"L_override", opt(cfg.L_override)},
                   {"eta_max", opt(cfg.eta_max)},
                   {"n_eta", cfg.n_eta},
                   {"eta", cfg.eta},
                   {"threshold", opt(cfg.threshold)},
                   {"eta0", opt(cfg.eta0)},
                   {"m", cfg.m},
                   {"L_y", opt(cfg.L_y)},
                   {"y_width", cfg.y_width},
                   {"times", cfg.times},
                   {"preset", cfg.preset},
                   {"seed", cfg.seed},
                   {"eps_list", cfg.eps_list},
                   {"kp_eta", cfg.kp_eta},
                   {"samples", cfg.samples},
                   {"threads", cfg.threads}};
  if (!cfg.n_explicit) j["numerics"].erase("n");
  j["output"] = {{"dir", cfg.output}, {"formats", cfg.formats}};
  return j;
}

void validate(const RunConfig& cfg) {
  auto fail = [](const std::string& s) { throw ConfigError(s); };
  if (!cfg.command.empty() && !contains(command_names(), cfg.command))
    fail("command: unknown command '" + cfg.command + "'");
  if (!(cfg.a > 0)) fail("params.a: must satisfy a > 0");
  if (!(cfg.b > cfg.a)) fail("params.b: must satisfy b > a");
  if (!(cfg.c > 1)) fail("params.c: must satisfy c > 1 (got " + json(cfg.c).dump() + ")");
  if (!(cfg.alpha_fraction > 0 && cfg.alpha_fraction < 1))
    fail("params.alpha_fraction: must lie in (0, 1)");
  if (cfg.n <= 0) fail("numerics.n: must be positive");
  if (cfg.L_override && !(*cfg.L_override > 0)) fail("numerics.L_override: must be positive");
  if (cfg.eta_max && !(*cfg.eta_max > 0)) fail("numerics.eta_max: must be positive");
  if (cfg.n_eta < 5) fail("numerics.n_eta: must be >= 5");
  if (!std::isfinite(cfg.eta)) fail("numerics.eta: must be finite");
  if (cfg.eta0 && !(*cfg.eta0 > 0)) fail("numerics.eta0: must be positive");
  if (cfg.m < 8 || cfg.m % 2) fail("numerics.m: must be even and >= 8");
  if (cfg.L_y && !(*cfg.L_y > 0)) fail("numerics.L_y: must be positive");
  if (!(cfg.y_width > 0)) fail("numerics.y_width: must be positive");
  for (size_t i = 0; i < cfg.times.size(); ++i) {
    if (!(cfg.times[i] >= 0)) fail("numerics.times[" + std::to_string(i) + "]: must be >= 0");
    if (i && !(cfg.times[i] > cfg.times[i - 1]))
      fail("numerics.times[" + std::to_string(i) + "]: must be increasing");
  }
  if (!contains(kPresets, cfg.preset)) fail("numerics.preset: unknown preset '" + cfg.preset + "'");
  if (cfg.eps_list.empty()) fail("numerics.eps_list: must not be empty");
  for (size_t i = 0; i < cfg.eps_list.size(); ++i)
    if (!(cfg.eps_list[i] > 0 && cfg.eps_list[i] < 1))
      fail("numerics.eps_list[" + std::to_string(i) + "]: must lie in (0, 1)");
  if (!std::isfinite(cfg.kp_eta)) fail("numerics.kp_eta: must be finite");
  if (cfg.samples <= 0) fail("numerics.samples: must be positive");
  if (cfg.threads < 1) fail("numerics.threads: must be >= 1");
  if (cfg.output.empty()) fail("output.dir: must not be empty");
  for (size_t i = 0; i < cfg.formats.size(); ++i)
    if (!contains({"csv", "json", "bin"}, cfg.formats[i]))
      fail("output.formats[" + std::to_string(i) + "]: must be one of csv, json, bin");
}

RunConfig load_config(const std::optional<std::string>& path, const json& overrides) {
  json merged = json::object();
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("config: cannot open '" + *path + "'");
    try {
      merged = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config: " + *path + ": " + e.what());
    }
  }
  merge(merged, overrides, "");
  return config_from_json(merged);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into '" + target.string() + "'");
  }
}

std::string curve_csv(const EigenCurve& curve) {
  std::string s = "eta,re_lambda,im_lambda\n";
  for (size_t i = 0; i < curve.etas.size(); ++i)
    s += format_double(curve.etas[i]) + "," + format_double(curve.lambdas[i].real()) + "," +
         format_double(curve.lambdas[i].imag()) + "\n";
  return s;
}

json curve_json(const EigenCurve& curve, const ClosedFormConstants& k) {
  json j;
  j["lambda1_fit"] = curve.fit.lambda1;
  j["lambda2_fit"] = curve.fit.lambda2;
  j["lambda3_fit"] = curve.fit.lambda3;
  j["lambda2_quartic_fit"] = curve.fit.lambda2_quartic;
  j["fit_points"] = curve.fit.points;
  j["fit_rms_im"] = curve.fit.residual_im;
  j["fit_rms_re"] = curve.fit.residual_re;
  j["lambda1_closed"] = k.lambda1_0;
  j["lambda2_closed"] = k.lambda2_0;
  j["kappa1"] = k.kappa1;
  j["eta"] = curve.etas;
  json re = json::array(), im = json::array();
  for (const cd& l : curve.lambdas) {
    re.push_back(l.real());
    im.push_back(l.imag());
  }
  j["re_lambda"] = re;
  j["im_lambda"] = im;
  j["residual"] = curve.residuals;
  return j;
}

void write_curve(const EigenCurve& curve, const ClosedFormConstants& k,
                 const std::string& path, const std::string& format) {
  if (format == "csv")
    write_atomic(path, curve_csv(curve));
  else if (format == "json")
    write_atomic(path, curve_json(curve, k).dump(2) + "\n");
  else
    throw IoError("unsupported curve format '" + format + "'");
}

EigenCurve read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "eta,re_lambda,im_lambda")
    throw IoError(path + ": bad header");
  EigenCurve c;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double v[3];
    const char* s = line.c_str();
    for (int i = 0; i < 3; ++i) {
      char* end = nullptr;
      v[i] = std::strtod(s, &end);
      if (end == s || (i < 2 && *end != ',') || (i == 2 && *end != '\0'))
        throw IoError(path + ":" + std::to_string(lineno) + ": malformed row");
      s = end + 1;
    }
    c.etas.push_back(v[0]);
    c.lambdas.emplace_back(v[1], v[2]);
    c.residuals.push_back(0.0);
  }
  return c;
}

namespace {

struct Context {
  const RunConfig& cfg;
  ModelParams p;
  fs::path dir;
  bool want(const std::string& f) const { return contains(cfg.formats, f); }
  std::string file(const std::string& name) const { return (dir / name).string(); }
};

json profile_cmd(Context& cx) {
  const ModelParams& p = cx.p;
  Grid1D g = build_grid(p, cx.cfg.n, cx.cfg.L_override);
  ProfileIntegrals ci = closed_form_integrals(p), qi = quadrature_integrals(p);
  Energy e = energy_and_derivative(p);
  if (cx.want("csv")) {
    std::string s = "z,phi,q,qp,qpp,r,rp,dq_dc,dr_dc\n";
    for (int j = 0; j < g.n; ++j) {
      double z = g.nodes[j];
      ProfileBundle b = eval_profile(p, z);
      for (double v : {z, b.phi, b.q, b.qp, b.qpp, b.r, b.rp, b.dq_dc})
        s += format_double(v) + ",";
      s += format_double(b.dr_dc) + "\n";
    }
    write_atomic(cx.file("profile.csv"), s);
  }
  ProfileBundle b0 = eval_profile(p, 0.0);
  json j;
  j["params"] = {{"a", p.a}, {"b", p.b}, {"c", p.c}, {"eps", p.eps}, {"alpha", p.alpha},
                 {"alpha_c", p.alpha_c}, {"alpha_c_prime", p.alpha_c_prime},
                 {"alpha_hat0", p.alpha_hat0}};
  j["bundle_at_0"] = {{"phi", b0.phi}, {"q", b0.q}, {"qp", b0.qp}, {"qpp", b0.qpp},
                      {"r", b0.r}, {"rp", b0.rp}, {"dq_dc", b0.dq_dc}, {"dr_dc", b0.dr_dc}};
  j["integrals_closed"] = {{"I1", ci.I1}, {"I2", ci.I2}, {"I3", ci.I3}};
  j["integrals_quadrature"] = {{"I1", qi.I1}, {"I2", qi.I2}, {"I3", qi.I3}};
  j["E"] = e.E;
  j["dE_dc"] = e.dE_dc;
  j["grid"] = {{"n", g.n}, {"half_length", g.half_length}};
  if (cx.want("json")) write_atomic(cx.file("profile.json"), j.dump(2) + "\n");
  return {{"E", e.E}, {"dE_dc", e.dE_dc}};
}

json symbols_cmd(Context& cx, std::ostream& out, bool& ok) {
  BoundReport r = verify_symbol_bounds(cx.p, cx.cfg.samples, cx.cfg.seed);
  json checks = json::array();
  for (const BoundCheck& c : r.checks) {
    bool pass = c.violations == 0;
    char line[256];
    std::snprintf(line, sizeof line, "%-16s %s  samples=%lld violations=%lld worst_margin=%.3e",
                  c.name.c_str(), pass ? "PASS" : "FAIL", static_cast<long long>(c.samples),
                  static_cast<long long>(c.violations), c.worst_margin);
    out << line << "\n";
    checks.push_back({{"name", c.name}, {"samples", c.samples}, {"violations", c.violations},
                      {"worst_margin", c.worst_margin}, {"pass", pass}});
  }
  json j;
  j["checks"] = checks;
  j["delta"] = r.delta;
  j["K"] = r.K;
  j["high_constant"] = r.high_constant;
  j["beta_hat"] = r.beta_hat;
  j["sup_inv_plus"] = r.sup_inv_plus;
  j["sup_inv_minus"] = r.sup_inv_minus;
  j["C_plus"] = r.C_plus;
  j["C_minus"] = r.C_minus;
  j["sup_inv_minus_at_zero"] = r.sup_inv_minus_at_zero;
  j["violations"] = r.violations;
  if (cx.want("json")) write_atomic(cx.file("symbols.json"), j.dump(2) + "\n");
  ok = r.ok();
  return {{"checks", r.checks.size()}, {"violations", r.violations.size()}};
}

json spectrum_cmd(Context& cx) {
  Grid1D g = build_grid(cx.p, cx.cfg.n, cx.cfg.L_override);
  OperatorMatrix M = assemble_L(cx.p, g, cx.cfg.eta);
  double thr = cx.cfg.threshold.value_or(-std::numeric_limits<double>::infinity());
  std::vector<cd> vals = spectrum_slice(M, thr);
  if (cx.want("csv")) {
    std::string s = "re,im\n";
    for (const cd& v : vals) s += format_double(v.real()) + "," + format_double(v.imag()) + "\n";
    write_atomic(cx.file("spectrum.csv"), s);
  }
  if (cx.want("json")) {
    DenseEigen de = dense_eigen(M);
    json pairs = json::array();
    for (Eigen::Index k = 0; k < de.values.size(); ++k) {
      cd l = de.values[k];
      if (!(l.real() > thr)) continue;
      const Eigen::VectorXcd& v = de.right.col(k);
      double res = (M.entries.cast<cd>() * v - l * v).norm() / v.norm();
      pairs.push_back({{"re", l.real()}, {"im", l.imag()}, {"residual", res}});
    }
    json j = {{"eta", cx.cfg.eta}, {"n", g.n}, {"half_length", g.half_length},
              {"alpha", g.alpha}, {"condition", de.condition}, {"eigenpairs", pairs}};
    write_atomic(cx.file("spectrum.json"), j.dump(2) + "\n");
  }
  json s = {{"count", vals.size()}};
  if (!vals.empty()) s["max_re"] = vals.front().real();
  return s;
}

json resonance_cmd(Context& cx) {
  const ModelParams& p = cx.p;
  Grid1D g = build_grid(p, cx.cfg.n, cx.cfg.L_override);
  CurveOptions co;
  co.threads = cx.cfg.threads;
  double eta_max = cx.cfg.eta_max.value_or(0.5 * p.eps * p.eps);
  EigenCurve curve = resonant_curve(p, g, eta_max, cx.cfg.n_eta, co);
  ClosedFormConstants k = closed_form_constants(p);
  if (cx.want("csv")) write_curve(curve, k, cx.file("resonance.csv"), "csv");
  if (cx.want("json")) write_curve(curve, k, cx.file("resonance.json"), "json");
  return {{"lambda1_fit", curve.fit.lambda1}, {"lambda2_fit", curve.fit.lambda2},
          {"lambda1_closed", k.lambda1_0}, {"lambda2_closed", k.lambda2_0},
          {"kappa1", k.kappa1}};
}

json kp_cmd(Context& cx, std::ostream& out) {
  KPStudyOptions o;
  o.n = cx.cfg.n;
  o.alpha_fraction = cx.cfg.alpha_fraction;
  o.threads = cx.cfg.threads;
  std::vector<KPRow> rows = kp_convergence_study(cx.cfg.a, cx.cfg.b, cx.cfg.eps_list,
                                                 cx.cfg.kp_eta, o);
  std::string s = "eps,c,re_scaled,im_scaled,re_kp,im_kp,error,residual\n";
  json jr = json::array();
  out << "     eps        Re(scaled)        Im(scaled)           Re(KP)           Im(KP)"
         "          error\n";
  for (const KPRow& r : rows) {
    for (double v : {r.eps, r.c, r.scaled_lambda.real(), r.scaled_lambda.imag(),
                     r.kp_lambda.real(), r.kp_lambda.imag(), r.error})
      s += format_double(v) + ",";
    s += format_double(r.residual) + "\n";
    char line[200];
    std::snprintf(line, sizeof line, "%8.4f %17.10e %17.10e %16.10e %16.10e %14.6e\n", r.eps,
                  r.scaled_lambda.real(), r.scaled_lambda.imag(), r.kp_lambda.real(),
                  r.kp_lambda.imag(), r.error);
    out << line;
    jr.push_back({{"eps", r.eps}, {"c", r.c}, {"scaled_lambda", {r.scaled_lambda.real(), r.scaled_lambda.imag()}},
                  {"kp_lambda", {r.kp_lambda.real(), r.kp_lambda.imag()}}, {"error", r.error},
                  {"residual", r.residual}});
  }
  json ratios = json::array();
  for (size_t i = 1; i < rows.size(); ++i) ratios.push_back(rows[i - 1].error / rows[i].error);
  if (cx.want("csv")) write_atomic(cx.file("kp.csv"), s);
  if (cx.want("json"))
    write_atomic(cx.file("kp.json"),
                 json{{"eta", cx.cfg.kp_eta}, {"rows", jr}, {"ratios", ratios}}.dump(2) + "\n");
  json errs = json::array();
  for (const KPRow& r : rows) errs.push_back(r.error);
  return {{"errors", errs}, {"ratios", ratios}};
}

// Half-width that keeps the predicted front and the initial bump inside the box.
double default_ly(const ModelParams& p, double t_max, double y_width) {
  ClosedFormConstants k = closed_form_constants(p);
  double reach = k.lambda1_0 * t_max + 6.0 * std::sqrt(2.0 * k.lambda2_0 * t_max);
  return 1.25 * reach + 4.0 * y_width;
}

json evolve_cmd(Context& cx) {
  const RunConfig& cfg = cx.cfg;
  const ModelParams& p = cx.p;
  Grid1D g = build_grid(p, cfg.n_explicit ? cfg.n : 256, cfg.L_override);
  std::vector<double> times = cfg.times.empty() ? geometric_times(12.5, 800.0, 25) : cfg.times;
  double Ly = cfg.L_y.value_or(default_ly(p, times.back(), cfg.y_width));
  YGrid yg = build_ygrid(Ly, cfg.m);
  Field2D f0 = make_field(p, g, yg, cfg.preset, static_cast<unsigned>(cfg.seed), cfg.y_width);
  EvolveOptions eo;
  eo.threads = cfg.threads;
  eo.keep_snapshots = cx.want("bin");
  EvolutionRecord rec = evolve_field(p, f0, times, eo);
  if (cx.want("csv")) {
    std::string s = "t,residual,norm_X\n";
    for (size_t i = 0; i < rec.times.size(); ++i)
      s += format_double(rec.times[i]) + "," + format_double(rec.residual[i]) + "," +
           format_double(rec.norm_X[i]) + "\n";
    write_atomic(cx.file("evolve.csv"), s);
  }
  if (cx.want("json")) {
    json j = {{"times", rec.times},
              {"residual", rec.residual},
              {"norm_X", rec.norm_X},
              {"prediction_boundary", rec.prediction_boundary},
              {"decay_slope", rec.decay_slope},
              {"fit_window", {rec.fit_t0, rec.fit_t1}},
              {"n", g.n},
              {"half_length", g.half_length},
              {"m", yg.m},
              {"L_y", yg.half_length},
              {"preset", cfg.preset},
              {"seed", cfg.seed}};
    write_atomic(cx.file("evolve.json"), j.dump(2) + "\n");
  }
  if (cx.want("bin")) {
    std::string data;
    auto put = [&](const Eigen::MatrixXcd& A) {
      for (int r = 0; r < A.rows(); ++r)
        for (int c = 0; c < A.cols(); ++c) {
          float v[2] = {static_cast<float>(A(r, c).real()), static_cast<float>(A(r, c).imag())};
          data.append(reinterpret_cast<const char*>(v), sizeof v);
        }
    };
    for (const Field2D& s : rec.snapshots) {
      put(s.phi);
      put(s.psi);
    }
    write_atomic(cx.file("evolve_snapshots.bin"), data);
    json h = {{"dtype", "complex64"},
              {"layout", "per time: phi[n][m] then psi[n][m], row-major, conjugated in z"},
              {"n", g.n},
              {"m", yg.m},
              {"z_half_length", g.half_length},
              {"y_half_length", yg.half_length},
              {"alpha", g.alpha},
              {"times", rec.times}};
    write_atomic(cx.file("evolve_snapshots.json"), h.dump(2) + "\n");
  }
  return {{"decay_slope", rec.decay_slope},
          {"final_residual", rec.residual.empty() ? 0.0 : rec.residual.back()}};
}

json decay_cmd(Context& cx) {
  const RunConfig& cfg = cx.cfg;
  const ModelParams& p = cx.p;
  Grid1D g = build_grid(p, cfg.n, cfg.L_override);
  double eta0 = cfg.eta0.value_or(0.3 * p.eps * p.eps);
  double beta = alpha_hat(p) / 16.0 * p.eps * p.eps * p.eps;
  std::vector<double> times = cfg.times;
  if (times.empty())
    for (int i = 0; i <= 64; ++i) times.push_back(i * 4.0 / beta / 64.0);
  ResonantBasis rb = resonant_basis(p, g, eta0);
  StatePair s0 = project_out_resonant(rb, g, noise_state(p, g, static_cast<unsigned>(cfg.seed)));
  s0 /= x_norm(g, eta0, s0);
  DecayResult d = offresonant_decay(p, g, eta0, s0, times);
  if (cx.want("csv")) {
    std::string s = "t,norm_X\n";
    for (size_t i = 0; i < d.times.size(); ++i)
      s += format_double(d.times[i]) + "," + format_double(d.norms[i]) + "\n";
    write_atomic(cx.file("decay.csv"), s);
  }
  json j = {{"eta0", eta0}, {"rate", d.rate}, {"bound", -beta},
            {"within_bound", d.rate <= -beta}, {"resonant_content", d.resonant_content},
            {"projected", d.projected}};
  if (cx.want("json")) write_atomic(cx.file("decay.json"), j.dump(2) + "\n");
  return j;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& summary) {
  json s;
  s["command"] = cfg.command;
  try {
    validate(cfg);
    if (cfg.command.empty()) throw ConfigError("command: missing");
    Context cx{cfg, make_params(cfg.a, cfg.b, cfg.c, cfg.alpha_fraction), fs::path(cfg.output)};
    std::error_code ec;
    fs::create_directories(cx.dir, ec);
    if (ec) throw IoError("cannot create output directory '" + cfg.output + "'");
    json r;
    bool ok = true;
    if (cfg.command == "profile") r = profile_cmd(cx);
    else if (cfg.command == "symbols-check") r = symbols_cmd(cx, summary, ok);
    else if (cfg.command == "spectrum") r = spectrum_cmd(cx);
    else if (cfg.command == "resonance") r = resonance_cmd(cx);
    else if (cfg.command == "kp-compare") r = kp_cmd(cx, summary);
    else if (cfg.command == "evolve") r = evolve_cmd(cx);
    else r = decay_cmd(cx);
    s["status"] = ok ? "ok" : "violations";
    s["result"] = r;
    s["output"] = cfg.output;
    summary << s.dump() << std::endl;
    return ok ? 0 : 2;
  } catch (const Error& e) {
    s["status"] = "error";
    s["error"] = e.name();
    s["message"] = e.what();
    summary << s.dump() << std::endl;
    return e.exit_code();
  } catch (const std::exception& e) {
    s["status"] = "error";
    s["error"] = "InternalError";
    s["message"] = e.what();
    summary << s.dump() << std::endl;
    return 2;
  }
}

}  // namespace blsw
