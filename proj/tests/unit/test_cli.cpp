#include <sys/wait.h>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "handsteer/signal.hpp"
#include "json.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(HANDSTEER_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::path(HANDSTEER_SCRATCH_DIR) / "cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string model_arg() { return std::string("--model-dir ") + HANDSTEER_TEST_MODEL_DIR; }

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run("--help").code == 0);
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("eval").code == 1);  // no model dir
  CHECK(run(model_arg() + " --classifier svm eval").code == 1);
  CHECK(run("--window 1 generate --out /tmp/x").code == 1);
}

TEST_CASE("runtime errors exit with 2") {
  const auto dir = scratch("missing");
  CHECK(run("--model-dir " + dir.string() + " eval").code == 2);
  CHECK(run("--model-dir " + (dir / "m").string() + " train --data " + dir.string()).code == 2);
  CHECK(run("generate --scenario TurnLeft:1,TurnRight:1 --out " + (dir / "s.txt").string()).code == 2);
}

TEST_CASE("generate a custom scenario") {
  const auto dir = scratch("gen");
  const auto file = dir / "s.txt";
  const auto r = run("--seed 4 --noise 0 generate --scenario GoStraight:1,Stop:1 --out " + file.string() +
                     " --report " + (dir / "r.json").string());
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["kind"] == "generate");
  CHECK(j["files"][0]["frames"] == 125);
  CHECK(json::parse(std::ifstream(dir / "r.json")) == j);
  const auto s = handsteer::load_stream(file);
  CHECK(s.size() == 125);
  REQUIRE(s.truth);
}

TEST_CASE("generate, evaluate and bench the evaluation set") {
  const auto dir = scratch("eval");
  REQUIRE(run("--seed 7 generate --out " + (dir / "streams").string()).code == 0);
  std::string files;
  for (int i = 0; i < 12; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "eval_%02d.txt", i);
    CHECK(fs::exists(dir / "streams" / name));
    if (i < 3) files += " " + (dir / "streams" / name).string();
  }
  const auto r = run(model_arg() + " --out " + (dir / "events").string() + " eval" + files);
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["kind"] == "eval");
  CHECK(j["streams"].size() == 3);
  CHECK(j["raw_errors"] == 0);
  CHECK(j["filtered_errors"] == 0);
  CHECK(lines_of(dir / "events" / "eval_00.events").size() == 975);

  const auto b = run(model_arg() + " bench " + (dir / "streams" / "eval_00.txt").string());
  REQUIRE(b.code == 0);
  const auto bj = json::parse(b.out);
  CHECK(bj["windows"] == 975);
  CHECK(bj["crc_total_seconds"].get<double>() > 0.0);
}

TEST_CASE("serve and replay reproduce the offline events") {
  const auto dir = scratch("serve");
  const auto stream = dir / "s.txt";
  REQUIRE(run("--seed 12 generate --scenario GoStraight:2,TurnRight:2,GoStraight:2,Reverse:2 --out " +
              stream.string()).code == 0);
  REQUIRE(run(model_arg() + " --out " + dir.string() + " eval " + stream.string()).code == 0);

  const std::string cmd = "sh -c 'echo $$; exec " + std::string(HANDSTEER_CLI) + " " + model_arg() +
                          " serve --port 0' 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char line[512];
  REQUIRE(fgets(line, sizeof line, p));
  const pid_t pid = static_cast<pid_t>(std::stol(line));
  REQUIRE(fgets(line, sizeof line, p));
  const auto banner = json::parse(line);
  CHECK(banner["model"] == true);
  const int port = banner["port"].get<int>();

  const auto replayed = dir / "replayed.events";
  const auto r = run("replay " + stream.string() + " --port " + std::to_string(port) + " --out " +
                     replayed.string());
  kill(pid, SIGTERM);
  const int status = pclose(p);
  CHECK(r.code == 0);
  CHECK(lines_of(replayed) == lines_of(dir / "s.events"));
  CHECK(lines_of(replayed).size() == 450);
  CHECK(WIFEXITED(status));
}

TEST_CASE("training is deterministic") {
  const auto dir = scratch("retrain");
  const auto r = run("--seed 1 --noise 0.01 --model-dir " + (dir / "model").string() + " train");
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["blocks"]["gestures"]["Go2Left"] == 100);
  for (const char* sub : {"stage1", "postures", "gestures"}) {
    const auto a = json::parse(std::ifstream(fs::path(HANDSTEER_TEST_MODEL_DIR) / sub / "manifest.json"));
    const auto b = json::parse(std::ifstream(dir / "model" / sub / "manifest.json"));
    CHECK(a == b);
  }
}
