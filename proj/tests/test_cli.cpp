#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(IRRPER_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("exit codes: pass, usage error") {
  CHECK(run("--mode verify --lambda 2 --no-timings") == 0);
  CHECK(run("--mode period --no-timings") == 0);
  CHECK(run("--mode bogus") == 2);
  CHECK(run("--precision quad") == 2);
  CHECK(run("--format csv --mode verify") == 2);  // csv needs a sequence mode
  CHECK(run("--unknown-flag") == 2);
}

TEST_CASE("deterministic output with --no-timings") {
  const std::string a = "/tmp/irrper_cli_a.json";
  const std::string b = "/tmp/irrper_cli_b.json";
  CHECK(run("--mode period --no-timings --out " + a) == 0);
  CHECK(run("--mode period --no-timings --out " + b) == 0);
  const std::string ta = slurp(a);
  CHECK(!ta.empty());
  CHECK(ta == slurp(b));
  const auto doc = nlohmann::ordered_json::parse(ta);
  CHECK(doc["passed"].get<bool>());
  CHECK(!doc.contains("timings"));
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("csv output for a sequence mode") {
  const std::string path = "/tmp/irrper_cli.csv";
  CHECK(run("--mode exceptional --m 24 --format csv --no-timings --out " + path) == 0);
  const std::string text = slurp(path);
  CHECK(text.rfind("m,p_m_re", 0) == 0);
  CHECK(text.find("\n24,") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("flat config file") {
  const std::string cfg = "/tmp/irrper_cli.cfg";
  {
    std::ofstream out(cfg);
    out << "mode=period\nlambda=2.0\nno-timings=true\n";
  }
  const std::string path = "/tmp/irrper_cli_cfg.json";
  CHECK(run("--config " + cfg + " --out " + path) == 0);
  const auto doc = nlohmann::ordered_json::parse(slurp(path));
  CHECK(doc["mode"] == "period");
  CHECK(!doc.contains("timings"));
  std::remove(cfg.c_str());
  std::remove(path.c_str());
}
