#include "doctest.h"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include "../support/support.hpp"

using namespace cpsforge::testing;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  std::string cmd = "CPSFORGE_COLOR=0 " + std::string(CPSFORGE_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string prog(const std::string& name) { return programs_dir() + "/" + name + ".mcps"; }

}  // namespace

TEST_CASE("cli transform and run") {
  Run t = cli("transform " + prog("trivial"));
  CHECK(t.code == 0);
  CHECK(t.out == "cps[ident] { F.pure(42) }\n");
  Run r = cli("run " + prog("copy_file"));
  CHECK(r.code == 0);
  CHECK(r.out == "Ok 10240\nfinalizers: output, input\n");
  CHECK(cli("run " + prog("try_boom")).code == 1);
}

TEST_CASE("cli stats and coloring") {
  CHECK(cli("stats " + prog("straight_line")).out == "awaits=3 binds=17 optimized_binds=3\n");
  Run c = cli("check-coloring " + prog("color_mixed"));
  CHECK(c.code == 1);
  CHECK(c.out == "x MixedError sync=1 async=1\n");
  CHECK(cli("run --coloring " + prog("color_cached")).out == "Some 42\n");
}

TEST_CASE("cli compare") {
  Run ok = cli("compare --seed 3 --count 5 --monad result");
  CHECK(ok.code == 0);
  CHECK(ok.out == "5/5 equivalent\n");
  Run bad = cli("compare --seed 3 --count 5 --monad result --break-transform");
  CHECK(bad.code == 1);
  CHECK(bad.out.find("mismatch: seed") != std::string::npos);
  CHECK(bad.out.find("--- oracle") != std::string::npos);
}

TEST_CASE("cli callchain flag") {
  CHECK(cli("run " + prog("callchain")).out == cli("run --no-callchain " + prog("callchain")).out);
}

TEST_CASE("cli errors") {
  Run u = cli("transform " + prog("unregistered_ho"));
  CHECK(u.code == 1);
  CHECK(u.out.find("Range.map") != std::string::npos);
  CHECK(u.out.find("\x1b[") == std::string::npos);
  Run usage = cli("frobnicate");
  CHECK(usage.code == 2);
  Run missing = cli("run /nonexistent/file.mcps");
  CHECK(missing.code == 2);
}
