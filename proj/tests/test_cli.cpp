// Copyright 2026 The ppgspoof Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;  // stdout and stderr interleaved
};

Run cli(const std::string& args, const fs::path& cwd = fs::temp_directory_path()) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" PPGSPOOF_CLI "' " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[512];
  while (std::fgets(buf, sizeof buf, p)) r.out += buf;
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and usage errors") {
  const Run help = cli("--help");
  CHECK(help.code == 0);
  for (const char* sub : {"synth", "extract", "segment", "train-restore", "restore",
                          "train-auth", "attack", "report"})
    CHECK_MESSAGE(help.out.find(sub) != std::string::npos, sub);
  CHECK(cli("--version").code == 0);

  const Run none = cli("");
  CHECK(none.code == 4);
  CHECK(none.out.rfind("error: usage: ", 0) == 0);
  CHECK(cli("frobnicate").code == 4);
  CHECK(cli("--config /nonexistent.cfg synth").code == 4);
  CHECK(cli("--seed banana synth").code == 4);
}

TEST_CASE("errors map to status exit codes") {
  const fs::path dir = fresh("pps_cli_err");
  const Run missing = cli("attack nothing.csv", dir);
  CHECK(missing.code == 7);
  CHECK(missing.out.find("error: dependency: missing cycle archive: nothing.csv") !=
        std::string::npos);

  std::ofstream(dir / "bad.cfg") << "[sigr]\nnope = 1\n";
  const Run bad = cli("--config bad.cfg synth", dir);
  CHECK(bad.code == 6);
  CHECK(bad.out.find("error: parse: ") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("synth, extract and segment from the command line") {
  const fs::path dir = fresh("pps_cli_run");
  std::ofstream(dir / "tiny.cfg") << "[synth]\nn_subjects = 2\nduration_s = 20\n";

  const Run s = cli("--config tiny.cfg --seed 3 synth --out data", dir);
  REQUIRE(s.code == 0);
  CHECK(s.out.rfind("config_hash=", 0) == 0);
  CHECK(s.out.find(" seed=3\n") != std::string::npos);
  CHECK(fs::exists(dir / "data" / "traces" / "subject02.csv"));
  CHECK(fs::exists(dir / "data" / "ppg" / "subject01.csv"));
  const std::string trace = slurp(dir / "data" / "traces" / "subject01.csv");

  // Same seed, same bytes; quiet mode drops the progress lines.
  const Run again = cli("--config tiny.cfg --seed 3 -q synth --out data", dir);
  CHECK(again.code == 0);
  CHECK(again.out.find("wrote") == std::string::npos);
  CHECK(slurp(dir / "data" / "traces" / "subject01.csv") == trace);
  CHECK(cli("--config tiny.cfg --seed 4 -q synth --out other", dir).code == 0);
  CHECK(slurp(dir / "other" / "traces" / "subject01.csv") != trace);

  const Run ex = cli("--config tiny.cfg -q extract data/traces/subject01.csv "
                     "data/traces/subject02.csv --out rppg",
                     dir);
  REQUIRE(ex.code == 0);
  CHECK(fs::exists(dir / "rppg" / "subject02.csv"));
  const Run seg = cli("--config tiny.cfg -q segment rppg/subject01.csv rppg/subject02.csv --out cyc", dir);
  REQUIRE(seg.code == 0);
  CHECK(fs::exists(dir / "cyc" / "cycles.csv"));
  CHECK(cli("--config tiny.cfg -q segment data/ppg/subject01.csv --label PPG --out cyc", dir).code == 0);
  CHECK(fs::exists(dir / "cyc" / "ppg_cycles.csv"));

  const Run partial = cli("--config tiny.cfg -q extract data/traces/subject01.csv missing.csv --out rppg", dir);
  CHECK(partial.code == 11);
  CHECK(partial.out.find("error: partial: 1 input(s) failed") != std::string::npos);

  const Run noauth = cli("--config tiny.cfg -q attack cyc/cycles.csv --models nowhere", dir);
  CHECK(noauth.code == 7);
  fs::remove_all(dir);
}

}  // TEST_SUITE
