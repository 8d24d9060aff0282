#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("qflow_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run run(const std::string& args) {
  const auto out = scratch() / "stdout.txt";
  const auto err = scratch() / "stderr.txt";
  const std::string cmd = std::string(QFLOW_CLI_PATH) + " " + args + " >" + out.string() + " 2>" +
                          err.string();
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(out), slurp(err)};
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("help and version") {
  CHECK(run("--help").code == 0);
  const auto v = run("--version");
  CHECK(v.code == 0);
  CHECK(v.out.find("0.1.0") != std::string::npos);
  CHECK(run("").code == 1);
  CHECK(run("bogus-command").code == 1);
  CHECK(run("bell --n-g notanumber").code == 1);
}

TEST_CASE("derive-fpe prints the amplifier equation") {
  const auto r = run("derive-fpe \"0.5i*adag^2 - 0.5i*a^2\"");
  CHECK(r.code == 0);
  CHECK(r.out.find("dQ/dτ = [∂p·p + ∂p² − ∂q·q − ∂q²] Q") != std::string::npos);
  const auto last = r.out.substr(r.out.find('\n') + 1);
  const auto j = nlohmann::json::parse(last);
  CHECK(j.is_object());
}

TEST_CASE("derive-fpe error codes") {
  const auto parse = run("derive-fpe \"adag^2 $ a\"");
  CHECK(parse.code == 3);
  CHECK(parse.err.find('7') != std::string::npos);
  const auto order = run("derive-fpe \"adag^3 + a^3\"");
  CHECK(order.code == 4);
  CHECK(order.err.find("adag^3") != std::string::npos);
  CHECK(run("derive-fpe \"i*adag*a\"").code == 4);
}

TEST_CASE("unwritable output gives an I/O error") {
  CHECK(run("eigen-dist -o /nonexistent_dir/x.csv").code == 2);
}

TEST_CASE("verify") {
  const auto ok = run("verify --dim 30 --tolerance 1e-6");
  CHECK(ok.code == 0);
  CHECK(ok.out.rfind("identity,re,im,error", 0) == 0);
  CHECK(run("verify --dim 30 --tolerance 1e-30").code == 5);
}

TEST_CASE("trajectories with zero trajectories writes a header only") {
  const auto path = scratch() / "empty.csv";
  const auto r = run("trajectories --n-traj 0 -o " + path.string());
  CHECK(r.code == 0);
  CHECK(slurp(path) == "tau,traj_id,q,p,q_m\r\n");
  const auto meta = nlohmann::json::parse(slurp(path.string() + ".meta.json"));
  CHECK(meta["ensemble"]["n_traj"] == 0);
}

TEST_CASE("reruns are byte-identical and seeds matter") {
  const std::string args = "trajectories --n-traj 5 --tau-f 1 --dtau 0.01 --record-stride 10";
  const auto a = run(args + " --seed 9");
  const auto b = run(args + " --seed 9");
  const auto c = run(args + " --seed 10");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  CHECK(count_lines(a.out) == 1 + 5 * 11);
  const auto s1 = run("spin-samples --gain 1.5 --n-samples 50 --seed 4");
  CHECK(s1.out == run("spin-samples --gain 1.5 --n-samples 50 --seed 4").out);
  const auto b1 = run("bell --n-g 3 --n-samples 2000");
  CHECK(b1.out == run("bell --n-g 3 --n-samples 2000").out);
}

TEST_CASE("bell with zero samples leaves Monte Carlo cells empty") {
  const auto r = run("bell --n-g 2 --n-samples 0");
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "G,B_analytic,B_mc,stderr\r");
  while (std::getline(in, line)) CHECK(line.substr(line.size() - 3) == ",,\r");
  const auto j = nlohmann::json::parse(run("bell --n-g 2 --n-samples 0 --format json").out);
  CHECK(j["rows"][0][2].is_null());
  CHECK(j["columns"].size() == 4);
}

TEST_CASE("spin-dist at large gain peaks at +-1") {
  const auto r = run("spin-dist --gains 5 --sigma-min -2 --sigma-max 2 --points 401");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  double best_pos = 0, best_neg = 0, arg_pos = 0, arg_neg = 0;
  while (std::getline(in, line)) {
    double g, s, d;
    char c1, c2;
    std::istringstream row(line);
    row >> g >> c1 >> s >> c2 >> d;
    if (s > 0 && d > best_pos) best_pos = d, arg_pos = s;
    if (s < 0 && d > best_neg) best_neg = d, arg_neg = s;
  }
  CHECK(arg_pos == doctest::Approx(1.0));
  CHECK(arg_neg == doctest::Approx(-1.0));
}

TEST_CASE("config file supplies defaults and flags win") {
  const auto cfg = scratch() / "cfg.toml";
  std::ofstream(cfg) << "[eigen-dist]\nq0 = 2\nqm-points = 2\n";
  const auto from_file = run("--config " + cfg.string() + " eigen-dist --tau-steps 1");
  CHECK(from_file.code == 0);
  CHECK(count_lines(from_file.out) == 1 + 2 * 2);
  const auto flagged = run("--config " + cfg.string() + " eigen-dist --tau-steps 1 --q0 -3");
  CHECK(flagged.out != from_file.out);
  CHECK(flagged.out == run("eigen-dist --tau-steps 1 --qm-points 2 --q0 -3").out);
}

TEST_CASE("json output parses") {
  const auto j = nlohmann::json::parse(run("eigen-dist --tau-steps 2 --qm-points 3 --format json").out);
  CHECK(j["columns"] == nlohmann::json({"tau", "q_m", "density"}));
  CHECK(j["rows"].size() == 3 * 3);
  CHECK(j["meta"]["command"] == "eigen-dist");
}
