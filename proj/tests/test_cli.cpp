#include "doctest.h"

#include "eknot/cli.hpp"
#include "eknot/families.hpp"
#include "eknot/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>
#include <string>
#include <vector>

using namespace eknot;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "eknot");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path workdir() {
  const auto dir = fs::temp_directory_path() / "eknot_test_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("gen writes a curve with provenance") {
  const auto dir = workdir();
  const std::string path = (dir / "trefoil.json").string();
  auto r = run({"gen", "torus", "--a", "2", "--b", "3", "--rho", "0.1", "--n", "256", "-o", path});
  CHECK(r.code == kExitOk);
  const Curve c = curve_from_string(read_file(path));
  const Curve direct = torus_knot({2, 3, 0.1, 256});
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == direct[i]);
  const Json doc = Json::parse(read_file(path));
  CHECK(doc["provenance"]["command"] == "gen");
  CHECK(doc["provenance"]["version"] == kVersion);

  r = run({"gen", "torus", "--n", "256", "-o", path});
  CHECK(r.code == kExitIo);
  CHECK(r.err.find("IoError") != std::string::npos);
  r = run({"gen", "torus", "--n", "256", "-o", path, "--force"});
  CHECK(r.code == kExitOk);

  r = run({"gen", "torus", "--a", "2", "--b", "4"});
  CHECK(r.code == kExitDomain);
  CHECK(r.err.find("InvalidSpec") != std::string::npos);

  r = run({"gen", "tangential-pair", "--phi", "1.0", "--n", "64"});
  CHECK(r.code == kExitOk);
  CHECK(curve_from_string(r.out).size() == 64);
  CHECK(run({"gen", "covered-circle", "--k", "2", "--n", "64"}).code == kExitOk);
  CHECK(run({"gen", "square"}).code == kExitIo);
}

TEST_CASE("eval, minimize, sweep and diagnose") {
  const auto dir = workdir();
  const std::string circle = (dir / "circle.json").string();
  REQUIRE(run({"gen", "circle", "--n", "128", "-o", circle}).code == kExitOk);

  auto r = run({"eval", circle, "--theta", "0.1"});
  REQUIRE(r.code == kExitOk);
  const Json e = Json::parse(r.out);
  CHECK(e["bending"].get<double>() > 39.0);
  CHECK(e["config"]["command"] == "eval");

  const std::string pair = (dir / "pair.json").string();
  REQUIRE(run({"gen", "tangential-pair", "--phi", "1", "--n", "128", "-o", pair}).code == kExitOk);
  r = run({"eval", pair, "--theta", "0.1"});
  CHECK(r.code == kExitOk);
  CHECK(Json::parse(r.out)["ropelength"] == "inf");

  const std::string out = (dir / "min.json").string();
  const std::string trace = (dir / "trace.csv").string();
  const std::string report = (dir / "report.json").string();
  r = run({"minimize", circle, "--theta", "0.1", "--repulsion", "ropelength", "--max-steps", "5", "-o", out,
           "--trace", trace, "--report", report});
  CHECK(r.code == kExitOk);
  CHECK(read_file(trace).rfind("step,total\n0,", 0) == 0);
  CHECK(Json::parse(read_file(report))["config"]["options"]["max_steps"] == 5);
  r = run({"minimize", circle, "--theta", "0.1", "--max-steps", "5", "-o", out});
  CHECK(r.code == kExitIo);
  CHECK(run({"minimize", circle}).code == kExitIo);
  CHECK(run({"minimize", circle, "--theta", "0.1", "--step-size", "-1"}).code == kExitDomain);

  const std::string csv = (dir / "sweep.csv").string();
  r = run({"sweep", circle, "--thetas", "0.1,0.01", "--max-steps", "5", "--repulsion", "ropelength",
           "--compare-torus", "2,3", "--curves-prefix", (dir / "row").string(), "-o", csv});
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(csv + ".meta.json"));
  CHECK(fs::exists(dir / "row0.json"));
  CHECK(fs::exists(dir / "row1.json"));
  CHECK(read_file(csv).rfind("theta,bending", 0) == 0);
  CHECK(run({"sweep", circle}).code == kExitIo);
  CHECK(run({"sweep", circle, "--thetas", "0.01,0.1"}).code == kExitDomain);

  r = run({"diagnose", circle, "--directions", "1000", "--crossings", "0,0,1"});
  REQUIRE(r.code == kExitOk);
  const Json d = Json::parse(r.out);
  CHECK(d["crookedness"]["mu_min"] == 1);
  CHECK(d["crossings"].empty());
  CHECK(d["fary_milnor"]["passes"].is_null());
  r = run({"diagnose", circle, "--directions", "1000", "--knotted", "--no-fit"});
  CHECK(Json::parse(r.out)["fary_milnor"]["passes"] == false);
  CHECK_FALSE(Json::parse(r.out).contains("tangential_pair_fit"));
}

TEST_CASE("input errors") {
  const auto dir = workdir();
  const std::string bad = (dir / "bad.json").string();
  write_file(bad, "{\"format\": ", true);
  auto r = run({"eval", bad});
  CHECK(r.code == kExitIo);
  CHECK(r.err.find("ParseError") != std::string::npos);
  CHECK(run({"eval", (dir / "missing.json").string()}).code == kExitIo);
  CHECK(run({}).code == kExitIo);
  CHECK(run({"frobnicate"}).code == kExitIo);
  CHECK(run({"--help"}).code == kExitOk);
  r = run({"--version"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find(kVersion) != std::string::npos);
}

TEST_CASE("the installed binary") {
  const char* bin = std::getenv("EKNOT_BIN");
  if (bin == nullptr) return;
  const auto dir = workdir();
  const std::string cmd = std::string(bin) + " gen circle --n 64 -o " + (dir / "c.json").string();
  CHECK(std::system(cmd.c_str()) == 0);
  const std::string again = cmd + " 2>/dev/null";
  const int status = std::system(again.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
