#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "blochlab/certify/certify.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "blochlab");
  std::ostringstream out;
  std::ostringstream err;
  const int code = blochlab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "blochlab_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

class EnvGuard {
 public:
  EnvGuard(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    ::setenv(name, value, 1);
  }
  ~EnvGuard() {
    if (old_.empty()) ::unsetenv(name_); else ::setenv(name_, old_.c_str(), 1);
  }

 private:
  const char* name_;
  std::string old_;
};

}  // namespace

TEST_CASE("certify writes a verified certificate") {
  const auto path = scratch("cert.json");
  const Run r = run({"certify", "--r", "2/5", "--out", path.string()});
  CHECK(r.code == 0);
  const json j = json::parse(slurp(path));
  CHECK(j.at("status") == "verified");
  CHECK(j.at("r") == "2/5");
  CHECK(j.at("precision") == 53);
  const auto cert = blochlab::certify::Certificate::from_json(j);
  CHECK(cert.to_json() == j);
  CHECK(cert.branch1.box.hi() <= 0.8998);
}

TEST_CASE("failed verification exits with 2") {
  const Run r = run({"certify", "--r", "3/10"});
  CHECK(r.code == 2);
  const json j = json::parse(r.out);
  CHECK(j.at("status") == "failed");
  CHECK(j.at("failing_component") == "branch1");
}

TEST_CASE("artifacts are reproducible") {
  const auto a = scratch("a.json");
  const auto b = scratch("b.json");
  REQUIRE(run({"certify", "--threads", "1", "--out", a.string()}).code == 0);
  REQUIRE(run({"certify", "--threads", "4", "--out", b.string()}).code == 0);
  CHECK(slurp(a) == slurp(b));
  const Run s1 = run({"alpha", "--R", "0.8473", "--budget", "4", "--seed", "11"});
  const Run s2 = run({"alpha", "--R", "0.8473", "--budget", "4", "--seed", "11", "--threads", "3"});
  CHECK(s1.code == 0);
  CHECK(s1.out == s2.out);
}

TEST_CASE("precision from the environment and the flag") {
  {
    EnvGuard env("BLOCHLAB_PRECISION", "128");
    const Run r = run({"certify"});
    CHECK(r.code == 0);
    CHECK(json::parse(r.out).at("precision") == 128);
    const Run f = run({"certify", "--precision", "96"});
    CHECK(json::parse(f.out).at("precision") == 96);
  }
  {
    EnvGuard env("BLOCHLAB_PRECISION", "lots");
    CHECK(run({"certify"}).code == 1);
  }
  CHECK(run({"certify", "--precision", "8"}).code == 1);
}

TEST_CASE("variance writes JSON and CSV") {
  const auto path = scratch("variance.csv");
  const Run r = run({"variance", "--function", "lacunary:2", "--method", "circle", "--r", "0.99999999", "--out",
                     path.string()});
  CHECK(r.code == 0);
  const auto lines = split_lines(slurp(path));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "parameter,integral,value");
  const double last = std::stod(lines[1].substr(lines[1].rfind(',') + 1));
  CHECK(std::fabs(last - 1.44) <= 0.12);
  const json j = json::parse(slurp(scratch("variance.json")));
  CHECK(j.at("version") == 1);
  CHECK(j.at("config").at("function") == "lacunary:2");
  CHECK(j.at("result").at("method") == "circle");

  const Run strip = run({"variance", "--function", "exp(lacunary:2)", "--method", "strip", "--h", "0.1,0.01"});
  CHECK(strip.code == 0);
  CHECK(json::parse(strip.out).at("result").at("steps").size() == 2);
}

TEST_CASE("spectrum") {
  const auto path = scratch("means.json");
  const Run r = run({"spectrum", "--function", "logmap", "--tau", "0", "--r", "0.9,0.99", "--normalized", "--out",
                     path.string()});
  CHECK(r.code == 0);
  const auto lines = split_lines(slurp(scratch("means.csv")));
  CHECK(lines[0] == "parameter,log_integral,value");
  CHECK(lines.size() == 3);
  CHECK(std::fabs(json::parse(slurp(path)).at("result").at("value").get<double>()) < 1e-12);
}

TEST_CASE("martingale") {
  const Run ok = run({"martingale", "--function", "logz", "--n", "2", "--depth", "3"});
  CHECK(ok.code == 0);
  const json tree = json::parse(ok.out).at("result").at("tree");
  CHECK(tree.at("n") == 2);
  CHECK(tree.at("nodes").size() == 15);
  const Run coarse = run({"martingale", "--function", "logz", "--n", "2", "--depth", "3", "--h", "0.1"});
  CHECK(coarse.code == 2);
  CHECK(run({"martingale", "--function", "special:0.3", "--n", "2", "--depth", "2"}).code == 1);
}

TEST_CASE("transform") {
  const Run collar = run({"transform", "--method", "collar", "--n", "16", "--R", "1"});
  CHECK(collar.code == 0);
  CHECK(json::parse(collar.out).at("result").at("ratio").get<double>() < 1.0);
  const Run berg = run({"transform", "--method", "bergman", "--function", "poly:0,0,1", "--r", "0.5", "--grid", "4"});
  CHECK(berg.code == 0);
  CHECK(json::parse(berg.out).at("result").at("max_error").get<double>() < 1e-3);
  const Run box = run({"transform", "--method", "box", "--function", "logz", "--n", "2", "--depth", "0"});
  CHECK(box.code == 0);
  CHECK(json::parse(box.out).at("result").at("values")[0].get<double>() == doctest::Approx(2.693948).epsilon(1e-6));
  const Run beur = run({"transform", "--method", "beurling", "--function", "logz", "--h", "1", "--grid", "2"});
  CHECK(beur.code == 0);
  CHECK(run({"transform", "--method", "nope"}).code == 1);
}

TEST_CASE("alpha") {
  const Run avg = run({"alpha", "--R", "0.8472978603872037"});
  CHECK(avg.code == 0);
  CHECK(json::parse(avg.out).at("result").at("value").get<double>() == doctest::Approx(0.84).epsilon(1e-6));
  CHECK(run({"alpha", "--R", "0.8473", "--budget", "0"}).code == 1);
  CHECK(run({"alpha"}).code == 1);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"certify", "--bogus"}).code == 1);
  CHECK(run({"certify", "--r", "x/y"}).code == 1);
  const Run bad = run({"variance", "--function", "special:1.5", "--r", "0.9"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("position 8") != std::string::npos);
  CHECK(run({"variance", "--function", "lacunary:2"}).code == 1);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"certify", "--threads", "0"}).code == 1);
}
