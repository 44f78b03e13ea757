#include <catch2/catch_amalgamated.hpp>

#include <minmaxdelay/io.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

using namespace mmd;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(MMD_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::string out;
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path scratch() {
  auto dir = std::filesystem::path("cli_scratch");
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("generated ladder solves to the advertised optimum") {
  auto dir = scratch();
  auto file = (dir / "block5.json").string();
  REQUIRE(run("gen block --size 5 -o " + file).code == 0);

  auto r = run("solve --instance " + file + " --rate 4/3");
  CHECK(r.code == 0);
  CHECK(r.out.find("max_delay: 1") != std::string::npos);

  auto traced = run("solve --instance " + file + " --rate 4/3 --trace");
  CHECK(traced.out.find("trace:") != std::string::npos);
  CHECK(traced.out.find("accept") != std::string::npos);
}

TEST_CASE("gap subcommand reports the composite ratio") {
  auto dir = scratch();
  auto file = (dir / "comp5.json").string();
  REQUIRE(run("gen composite --size 5 -o " + file).code == 0);

  auto r = run("gap --instance " + file);
  CHECK(r.code == 0);
  CHECK(r.out.find("int_gap: 2") != std::string::npos);
}

TEST_CASE("json output is stable and round-trips") {
  auto dir = scratch();
  auto file = (dir / "part.json").string();
  REQUIRE(run("gen partition --elements 3,1,2 -o " + file).code == 0);

  auto a = run("solve --instance " + file + " --json");
  auto b = run("solve --instance " + file + " --json");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  auto doc = nlohmann::ordered_json::parse(a.out);
  CHECK(doc["status"] == "solved");
  CHECK(doc["max_delay"] == 3);

  // The flow file written alongside parses back into a valid flow.
  auto flow_file = (dir / "part_flow.json").string();
  REQUIRE(run("solve --instance " + file + " -o " + flow_file).code == 0);
  auto g = read_instance(slurp(file));
  auto flow = read_flow(slurp(flow_file));
  CHECK(validate_flow(g, flow).empty());
  CHECK(flow.total_rate() == g.rate);
}

TEST_CASE("rate ceiling surfaces as a bounded-flow program") {
  auto dir = scratch();
  auto file = (dir / "part2.json").string();
  REQUIRE(run("gen partition --elements 3,1,2 -o " + file).code == 0);

  auto r = run("dcmaxflow --instance " + file + " --delay-bound 2");
  CHECK(r.code == 0);
  CHECK(r.out.find("value: 1") != std::string::npos);

  auto dumped = run("dcmaxflow --instance " + file + " --delay-bound 1 --dump-lp");
  CHECK(dumped.out.find("maximize") != std::string::npos);
  CHECK(dumped.out.find("conserve[") != std::string::npos);
}

TEST_CASE("exit codes separate failure kinds") {
  auto dir = scratch();
  auto file = (dir / "tiny.json").string();
  REQUIRE(run("gen random --seed 3 --nodes 5 --edges 7 -o " + file).code == 0);

  auto comp = (dir / "comp_budget.json").string();
  REQUIRE(run("gen composite --size 5 -o " + comp).code == 0);

  CHECK(run("solve --instance " + (dir / "no_such.json").string()).code == 2);
  CHECK(run("solve --instance " + file + " --rate 100").code == 1);
  CHECK(run("solve --instance " + file + " --rate 0").code == 2);
  CHECK(run("intsolve --instance " + comp + " --budget 3").code == 3);
  CHECK(run("unknowncmd").code == 2);
  CHECK(run("solve").code == 2);
}

TEST_CASE("generators are reproducible and verifiable") {
  auto dir = scratch() / "batch";
  std::filesystem::create_directories(dir);
  auto once = (dir / "gen_a.json").string();
  auto twice = (dir / "gen_b.json").string();
  REQUIRE(run("gen random --seed 11 --nodes 6 --edges 9 -o " + once).code == 0);
  REQUIRE(run("gen random --seed 11 --nodes 6 --edges 9 -o " + twice).code == 0);
  CHECK(slurp(once) == slurp(twice));

  auto v = run("verify --instance " + once);
  CHECK(v.code == 0);
  CHECK(v.out.find("all checks passed") != std::string::npos);

  auto batch = run("verify --dir " + dir.string() + " --jobs 2 --json");
  CHECK(batch.code == 0);
  auto doc = nlohmann::ordered_json::parse(batch.out);
  REQUIRE(doc.contains("instances"));
  CHECK(doc["instances"].size() == 2);
}
