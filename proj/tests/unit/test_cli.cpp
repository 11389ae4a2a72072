#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"

using hadamard::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "hadamard");
  std::ostringstream o, e;
  int c = run(args, o, e);
  return {c, o.str(), e.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
  std::string p = std::string(HADAMARD_TEST_TMP) + "/" + name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("expand prints the term list and table") {
  Result r = call({"expand", "--m", "-1", "--N", "3", "--potential", "0", "--z", "0"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("1·V0·R(-2), -1·V1·R(0)\n", 0) == 0);
  CHECK(r.out.find("k,j,coefficient,z_power,order,kind") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(call({"expand", "--bogus"}).code == 2);
  CHECK(call({}).code == 2);
  CHECK(call({"verify", "--suite", "nope"}).code == 2);
  CHECK(call({"riesz", "--alpha", "1", "--y", "1,0"}).code == 2);
  CHECK(call({"coeffs", "--y", "1,2,3"}).code == 2);
  CHECK(call({"expand", "--potential", "bump(1)"}).code == 2);
}

TEST_CASE("help exits with 0") { CHECK(call({"--help"}).code == 0); }

TEST_CASE("config files and flag precedence") {
  std::string cfg = temp_file("cfg_ok.json",
                              R"({"spacetime":{"dim":2},"operator":{"potential":"0.5","z":[1,0]},)"
                              R"("task":{"m":2,"N":1}})");
  Result a = call({"--config", cfg, "expand"});
  CHECK(a.code == 0);
  CHECK(a.out.rfind("1·V0·R(4), 2·V1·R(6)\n", 0) == 0);
  Result b = call({"--config", cfg, "expand", "--m", "1"});
  CHECK(b.out.rfind("1·V0·R(2), 1·V1·R(4)\n", 0) == 0);
  std::string bad = temp_file("cfg_bad.json", R"({"task":{"m":1,"colour":3}})");
  Result c = call({"--config", bad, "expand"});
  CHECK(c.code == 2);
  CHECK(c.err.find("colour") != std::string::npos);
  std::string junk = temp_file("cfg_junk.json", "{ not json");
  CHECK(call({"--config", junk, "expand"}).code == 2);
}

TEST_CASE("verify and report") {
  Result v = call({"verify", "--suite", "binomial-identities"});
  CHECK(v.code == 0);
  CHECK(v.out.find("PASS binomial-identities") != std::string::npos);
  Result r = call({"report", "--only", "geometry", "--json", "-"});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"schema\": \"1\"") != std::string::npos);
  CHECK(r.out.find("geometry-invariants") != std::string::npos);
  CHECK(call({"report", "--only", "nothing-matches"}).code == 2);
}

TEST_CASE("evaluation CSVs are deterministic") {
  std::vector<std::string> args = {"riesz", "--alpha", "3.5", "--y", "1,0.2", "--y", "2,1"};
  Result a = call(args), b = call(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("kind,point,value_re,value_im\n", 0) == 0);
}
