// End-to-end tests against the installed command-line binary.  The binary
// path arrives via the BANACHFORGE_CLI compile definition.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <nlohmann/json.hpp>

#ifndef BANACHFORGE_CLI
#error "BANACHFORGE_CLI must point at the CLI binary"
#endif

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args, const std::string& env_prefix = "") {
  std::string cmd = env_prefix + std::string(BANACHFORGE_CLI) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string trimmed(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

}  // namespace

TEST_CASE("norm: pinned example values") {
  RunResult r = run("norm --space jp:2 --vector 1,1");
  REQUIRE(r.code == 0);
  REQUIRE(trimmed(r.out) == "2");
  r = run("norm --space 'tsirelson(schreier,1/2)' --vector 0,1,1,1,1");
  REQUIRE(r.code == 0);
  REQUIRE(trimmed(r.out) == "3/2");
  r = run("norm --space jp:2 --vector 1");
  REQUIRE(r.code == 0);
  REQUIRE(trimmed(r.out) == "1");
}

TEST_CASE("norm: error exit codes") {
  REQUIRE(run("norm --space nosuch:2 --vector 1").code == 2);
  REQUIRE(run("norm --space jp:2 --vector 1/0").code == 2);
  // 17 coordinates exceed the admissible-recursion support cap.
  REQUIRE(run("norm --space 'tsirelson(schreier,1/2)' --vector "
              "1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1")
              .code == 3);
}

TEST_CASE("norm: float mode via flag and environment") {
  RunResult r = run("norm --space jp:2 --vector 1,1 --mode float");
  REQUIRE(r.code == 0);
  REQUIRE(trimmed(r.out) == "2");
  // The environment variable sets the default scalar mode; the flag overrides.
  r = run("norm --space 'tsirelson(schreier,1/2)' --vector 0,1,1,1,1",
          "BANACHFORGE_MODE=float ");
  REQUIRE(r.code == 0);
  REQUIRE(trimmed(r.out) == "1.5");
  r = run("norm --space 'tsirelson(schreier,1/2)' --vector 0,1,1,1,1 --mode exact",
          "BANACHFORGE_MODE=float ");
  REQUIRE(trimmed(r.out) == "3/2");
  REQUIRE(run("norm --space jp:2 --vector 1 --mode bogus").code == 2);
  REQUIRE(run("norm --space jp:2 --vector 1", "BANACHFORGE_MODE=bogus ").code == 2);
}

TEST_CASE("family: membership, admissibility, regularity") {
  RunResult r = run("family member --spec schreier --set 2,3");
  REQUIRE(r.code == 0);
  REQUIRE(trimmed(r.out) == "true");
  r = run("family member --spec schreier --set 1,2");
  REQUIRE(r.code == 1);
  REQUIRE(trimmed(r.out) == "false");
  REQUIRE(run("family regular --spec bounded:3 --cap 12").code == 0);
  REQUIRE(run("family regular --spec 'explicit:[[],[1]]' --cap 6").code == 1);
  REQUIRE(run("family regular --spec bounded:3 --cap 25").code == 3);
  REQUIRE(run("family admissible --spec schreier --sets '2;3,4'").code == 0);
  REQUIRE(run("family admissible --spec schreier --sets '1;3,4'").code == 1);
  REQUIRE(run("family member --spec nosuch --set 1").code == 2);
}

TEST_CASE("bd: build, eval, analysis, norm round trip") {
  std::string req =
      "'{\"cap\":20,"
      "\"handles\":[{\"pool\":\"Zero\"},{\"pool\":\"K\",\"block\":4,"
      "\"coeffs\":{\"entries\":{\"1\":\"1/2\"}}}],"
      "\"nodes\":[{\"j\":1,\"chain\":[{\"rank\":2,\"handle\":0},"
      "{\"rank\":5,\"handle\":1}]}]}'";
  RunResult built = run("bd build --requests " + req);
  REQUIRE(built.code == 0);
  auto model = nlohmann::json::parse(built.out);
  REQUIRE(model.at("built").size() == 1);
  int gamma = model.at("built")[0].get<int>();

  std::string model_file = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                           "/bf_cli_model.json";
  {
    FILE* f = fopen(model_file.c_str(), "w");
    REQUIRE(f != nullptr);
    fwrite(built.out.data(), 1, built.out.size(), f);
    fclose(f);
  }
  std::string vec = "'{\"stage\":4,\"x\":{\"4\":{\"entries\":{\"1\":\"1\"}}}}'";
  RunResult ev = run("bd eval --model " + model_file + " --gamma " + std::to_string(gamma) +
                     " --vector " + vec);
  REQUIRE(ev.code == 0);
  auto evj = nlohmann::json::parse(ev.out);
  // Below the node's rank the canonical extension fills the coordinate.
  REQUIRE(evj.at("e").get<std::string>() == evj.at("c").get<std::string>());
  REQUIRE(evj.at("d").get<std::string>() == "0");

  RunResult an = run("bd analysis --model " + model_file + " --gamma " + std::to_string(gamma));
  REQUIRE(an.code == 0);
  auto anj = nlohmann::json::parse(an.out);
  REQUIRE(anj.at("entries").size() == 2);
  REQUIRE(anj.at("entries")[1].at("b").at("pool").get<std::string>() == "K");

  RunResult nm = run("bd norm --model " + model_file + " --vector " + vec);
  REQUIRE(nm.code == 0);
  REQUIRE(!nlohmann::json::parse(nm.out).at("norm").get<std::string>().empty());

  REQUIRE(run("bd build --requests '{\"nodes\":[{\"j\":1,\"chain\":[]}]}'").code == 2);
  std::remove(model_file.c_str());
}

TEST_CASE("bd: empty build request yields the base layer only") {
  RunResult r = run("bd build");
  REQUIRE(r.code == 0);
  auto model = nlohmann::json::parse(r.out);
  REQUIRE(model.at("delta").size() == 0);  // base node is implicit in a fresh model
  REQUIRE(model.at("built").size() == 0);
}

TEST_CASE("verify: pass, report shape, unknown suite") {
  RunResult r = run("verify submult-2 --trials 60 --seed 7");
  REQUIRE(r.code == 0);
  auto rep = nlohmann::json::parse(r.out);
  REQUIRE(rep.at("suite").get<std::string>() == "submult-2");
  REQUIRE(rep.at("pass").get<bool>());
  REQUIRE(rep.at("trials").get<long>() == 60);
  REQUIRE(rep.contains("anchor"));
  REQUIRE(run("verify nosuite").code == 2);
  REQUIRE(run("verify").code == 2);
}

TEST_CASE("verify: identical seed gives byte-identical reports") {
  RunResult a = run("verify complemented-1p2C --trials 40 --seed 11");
  RunResult b = run("verify complemented-1p2C --trials 40 --seed 11");
  REQUIRE(a.code == 0);
  REQUIRE(a.out == b.out);
  RunResult c = run("verify complemented-1p2C --trials 40 --seed 12");
  REQUIRE(c.out != a.out);
}

TEST_CASE("verify: toy suites are flagged as falsification evidence") {
  RunResult r = run("verify ris-average --mode toy");
  REQUIRE(r.code == 0);
  auto rep = nlohmann::json::parse(r.out);
  REQUIRE(rep.at("mode").at("params").get<std::string>() == "toy");
  REQUIRE(rep.at("mode").at("falsification_evidence").get<bool>());
}

TEST_CASE("verify: suite listing covers the published names") {
  RunResult r = run("verify --list");
  REQUIRE(r.code == 0);
  for (const char* name :
       {"jp-dp-vs-bruteforce", "tsirelson-recursion", "submult-2", "dominance-5C",
        "complemented-1p2C", "utc-column", "c0-maxrule", "C0-extension", "eval-analysis",
        "aux-estimates", "ris-average", "exact-pair-7C", "dependent-33", "lowerbound-3m2j",
        "calkin-sandwich", "ideal-lattice"})
    REQUIRE(r.out.find(name) != std::string::npos);
}
