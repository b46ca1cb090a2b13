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

#include <filesystem>

#include "config.hpp"
#include "errors.hpp"
#include "serialize.hpp"

using namespace ppgspoof;

namespace {

ErrorKind parse_error(const std::string& text) {
  try {
    PipelineConfig::parse(text, "cfg");
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error for: " << text);
  return ErrorKind::kUsage;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("canonical text round-trips with a stable hash") {
  const PipelineConfig d = PipelineConfig::parse("");
  const PipelineConfig back = PipelineConfig::parse(d.to_text());
  CHECK(back.to_text() == d.to_text());
  CHECK(back.hash() == d.hash());
  CHECK(d.hash().size() == 16);
  CHECK(d.to_text().rfind("[paths]\n", 0) == 0);
}

TEST_CASE("values, comments and whitespace") {
  const PipelineConfig c = PipelineConfig::parse(
      "# comment\n; another\n\n[paths]\n  models_dir =  out/models  \n"
      "[sigr]\nlearning_rate=0.002\nmax_steps = 12\n[segment]\napply_bandpass = false\n"
      "[auth]\ntarget_eer = 0.2\n");
  CHECK(c.paths.models_dir == "out/models");
  CHECK(c.experiment.sigr.learning_rate == 0.002);
  CHECK(c.experiment.sigr.max_steps == 12);
  CHECK_FALSE(c.experiment.prep.segment_bandpass);
  CHECK(c.experiment.auth.target_eer == 0.2);
  CHECK(c.hash() != PipelineConfig::parse("").hash());
}

TEST_CASE("the global seed drives every module seed") {
  const PipelineConfig a = PipelineConfig::parse("[global]\nrng_seed = 5\n");
  CHECK(a.rng_seed == 5);
  CHECK(a.experiment.seed == 5);
  CHECK(a.experiment.synth.rng_seed == 5);
  PipelineConfig b = PipelineConfig::parse("");
  b.apply_seed(5);
  CHECK(b.to_text() == a.to_text());
  b.apply_seed(6);
  CHECK(b.experiment.sigr.rng_seed != a.experiment.sigr.rng_seed);
  CHECK(b.experiment.auth.seed != a.experiment.auth.seed);
  CHECK(b.experiment.synth.rng_seed == 6);
  // Order inside the file does not matter.
  const PipelineConfig c = PipelineConfig::parse("[synth]\nduration_s = 30\n[global]\nrng_seed = 5\n");
  CHECK(c.experiment.synth.rng_seed == 5);
  CHECK(c.experiment.synth.duration_s == 30.0);
}

TEST_CASE("malformed files are parse errors") {
  CHECK(parse_error("[nope]\n") == ErrorKind::kParse);
  CHECK(parse_error("[sigr]\nnope = 1\n") == ErrorKind::kParse);
  CHECK(parse_error("learning_rate = 1\n") == ErrorKind::kParse);
  CHECK(parse_error("[sigr\n") == ErrorKind::kParse);
  CHECK(parse_error("[sigr]\nlearning_rate\n") == ErrorKind::kParse);
  CHECK(parse_error("[sigr]\nmax_steps = 1.5\n") == ErrorKind::kParse);
  CHECK(parse_error("[sigr]\nlearning_rate = fast\n") == ErrorKind::kParse);
  CHECK(parse_error("[segment]\napply_bandpass = maybe\n") == ErrorKind::kParse);
  CHECK(parse_error("[global]\nrng_seed = -1\n") == ErrorKind::kParse);
  try {
    PipelineConfig::parse("[sigr]\n\nnope = 1\n", "my.cfg");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("my.cfg:3") != std::string::npos);
  }
}

TEST_CASE("out-of-range values fail validation") {
  CHECK(parse_error("[auth]\ntarget_eer = 0.7\n") == ErrorKind::kParameter);
  CHECK(parse_error("[bandpass]\nlow_hz = 5\n") == ErrorKind::kParameter);
  CHECK(parse_error("[sigr]\nbatch_size = 0\n") == ErrorKind::kParameter);
  CHECK(parse_error("[trace]\nmax_gap_frames = -2\n") == ErrorKind::kParameter);
  CHECK(parse_error("[synth]\nn_subjects = 1\n") == ErrorKind::kParameter);
}

TEST_CASE("load") {
  CHECK_THROWS_AS(PipelineConfig::load("/nonexistent/ppgspoof.cfg"), Error);
  const auto p = std::filesystem::temp_directory_path() / "ppgspoof_cfg_test.cfg";
  write_file(p, "[eval]\nlow_fps = 15\n");
  CHECK(PipelineConfig::load(p).experiment.low_fps == 15.0);
  std::filesystem::remove(p);
}

}  // TEST_SUITE
