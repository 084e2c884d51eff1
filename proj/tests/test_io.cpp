#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "blsw/errors.hpp"
#include "blsw/io.hpp"

using namespace blsw;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("blsw_io_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Proc {
  int code;
  std::string out;
};

Proc cli(const std::string& args) {
  const char* exe = std::getenv("BLSW_CLI");
  REQUIRE(exe != nullptr);
  std::string cmd = std::string(exe) + " " + args + " 2>&1";
  FILE* f = ::popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  std::string out;
  char buf[4096];
  while (size_t k = std::fread(buf, 1, sizeof buf, f)) out.append(buf, k);
  int st = ::pclose(f);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

json last_line(const std::string& out) {
  std::string s = out;
  while (!s.empty() && s.back() == '\n') s.pop_back();
  return json::parse(s.substr(s.find_last_of('\n') + 1));
}

}  // namespace

TEST_CASE("empty config gives the defaults") {
  RunConfig c = load_config(std::nullopt, json{{"command", "profile"}});
  CHECK(c.a == 1.0);
  CHECK(c.b == 2.0);
  CHECK(c.c == 1.05);
  CHECK(c.alpha_fraction == 0.5);
  CHECK(c.n == 512);
  CHECK(c.n_eta == 33);
  CHECK(c.formats == std::vector<std::string>{"csv", "json"});
  RunConfig back = config_from_json(config_to_json(c));
  CHECK(back.c == c.c);
  CHECK(back.n == c.n);
}

TEST_CASE("flags override file values") {
  fs::path d = scratch("precedence");
  fs::path f = d / "cfg.json";
  std::ofstream(f) << json{{"command", "spectrum"}, {"params", {{"c", 1.1}, {"a", 0.5}}}}.dump();
  RunConfig c = load_config(f.string(), json{{"params", {{"c", 1.2}}}});
  CHECK(c.c == 1.2);
  CHECK(c.a == 0.5);
  CHECK(c.command == "spectrum");
  CHECK_THROWS_AS(load_config((d / "missing.json").string()), ConfigError);
}

TEST_CASE("validation errors carry key paths") {
  try {
    load_config(std::nullopt, json{{"command", "profile"}, {"params", {{"c", 0.9}}}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string m = e.what();
    CHECK(m.find("params.c") != std::string::npos);
    CHECK(m.find("c > 1") != std::string::npos);
  }
  try {
    load_config(std::nullopt, json{{"command", "profile"}, {"numerics", {{"bogus", 1}}}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("numerics.bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config(std::nullopt, json{{"command", "plot"}}), ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, json{{"command", "profile"}, {"params", {{"a", "x"}}}}),
                  ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, json{{"command", "profile"}, {"output", {{"formats", {"png"}}}}}),
                  ConfigError);
}

TEST_CASE("write_curve") {
  EigenCurve cv;
  cv.etas = {-0.01, 0.0, 0.1 / 3};
  cv.lambdas = {{-1e-5, -0.003}, {0.0, 0.0}, {-std::acos(-1.0) * 1e-7, 2.0 / 7}};
  cv.residuals = {1e-12, 0, 1e-11};
  cv.fit.lambda1 = 0.3;
  cv.fit.lambda2 = 0.7;
  ClosedFormConstants k{};
  k.lambda1_0 = 0.31;
  k.lambda2_0 = 0.69;
  fs::path d = scratch("curve");
  write_curve(cv, k, (d / "c.csv").string(), "csv");
  write_curve(cv, k, (d / "c.json").string(), "json");

  std::string csv = slurp(d / "c.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.rfind("eta,re_lambda,im_lambda\n", 0) == 0);
  EigenCurve rt = read_curve_csv((d / "c.csv").string());
  REQUIRE(rt.etas.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(rt.etas[i] == cv.etas[i]);
    CHECK(rt.lambdas[i].real() == cv.lambdas[i].real());
    CHECK(rt.lambdas[i].imag() == cv.lambdas[i].imag());
  }
  json j = json::parse(slurp(d / "c.json"));
  for (const char* key : {"lambda1_fit", "lambda2_fit", "lambda1_closed", "lambda2_closed"})
    CHECK(j.contains(key));
  CHECK(j["lambda1_closed"].get<double>() == 0.31);
  CHECK_THROWS_AS(write_curve(cv, k, (d / "c.png").string(), "png"), IoError);
  CHECK_THROWS_AS(write_curve(cv, k, (d / "nodir" / "c.csv").string(), "csv"), IoError);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("cli: resonance default run") {
  fs::path d = scratch("resonance");
  Proc p = cli("resonance -o " + d.string());
  CHECK(p.code == 0);
  CHECK(fs::exists(d / "resonance.csv"));
  CHECK(fs::exists(d / "resonance.json"));
  json s = last_line(p.out);
  CHECK(s["status"] == "ok");
  CHECK(s["command"] == "resonance");
  EigenCurve cv = read_curve_csv((d / "resonance.csv").string());
  CHECK(cv.etas.size() == 33);
}

TEST_CASE("cli: failures map to exit codes") {
  fs::path d = scratch("fail");
  Proc g = cli("spectrum --n 63 -o " + d.string());
  CHECK(g.code == 1);
  CHECK(g.out.find("GridError") != std::string::npos);
  Proc c = cli("profile --c 0.9 -o " + d.string());
  CHECK(c.code == 1);
  CHECK(c.out.find("ConfigError") != std::string::npos);
  Proc v = cli("--version");
  CHECK(v.code == 0);
  CHECK(v.out.find("blsw") != std::string::npos);
}

TEST_CASE("cli: evolve is deterministic") {
  fs::path d1 = scratch("ev1"), d2 = scratch("ev2");
  const std::string args = "evolve --c 1.2 --n 64 --m 64 --L-y 120 --times 5,10,20 --seed 7 --preset projected-noise -o ";
  Proc a = cli(args + d1.string()), b = cli(args + d2.string());
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  std::string x = slurp(d1 / "evolve.csv");
  CHECK(!x.empty());
  CHECK(x == slurp(d2 / "evolve.csv"));
}
