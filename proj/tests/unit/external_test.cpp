// tests/unit/external_test.cpp

// Copyright 2026 The pse-eval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <atomic>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "common/synthetic.hpp"
#include "pse/metrics/external.hpp"

using namespace pse::metrics;
using pse::ErrorKind;
using pse::testing::TempDir;

namespace {

std::filesystem::path Script(const TempDir &dir, const std::string &name, const std::string &body) {
  const auto p = dir / name;
  std::ofstream(p) << "#!/bin/sh\n" << body << "\n";
  std::filesystem::permissions(p, std::filesystem::perms::owner_all);
  return p;
}

ErrorKind KindOf(auto &&fn) {
  try {
    fn();
  } catch (const pse::Error &e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kIo;
}

}  // namespace

TEST_CASE("adapter score is parsed into a record") {
  TempDir dir;
  const auto echo = Script(dir, "pesq", "echo 3.25");
  const auto r = ExternalMetric(ExternalMetricKind::kPesq, echo, "ref.wav", "est.wav", "u1", "c");
  CHECK(r.value == 3.25);
  CHECK(r.metric == Metric::kPesq);
  CHECK(r.utterance_id == "u1");
}

TEST_CASE("adapter receives the two-column manifest in order") {
  TempDir dir;
  // Score = line number, and the estimate path is echoed to a side file.
  const auto adapter = Script(dir, "count",
                              "n=0\nwhile IFS='\t' read -r ref est; do n=$((n+1)); echo \"$est\" >> \"" +
                                  (dir / "seen.txt").string() + "\"; echo \"$n.0\"; done < \"$1\"");
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> pairs;
  for (int i = 0; i < 4; ++i)
    pairs.emplace_back("r" + std::to_string(i) + ".wav", "dir with space/e" + std::to_string(i) + ".wav");
  const auto scores = RunExternalMetric(ExternalMetricKind::kMos, adapter, pairs);
  CHECK(scores == std::vector<double>{1.0, 2.0, 3.0, 4.0});
  std::ifstream seen(dir / "seen.txt");
  std::string line;
  std::getline(seen, line);
  CHECK(line == "dir with space/e0.wav");
}

TEST_CASE("adapter failures map to the documented error kinds") {
  TempDir dir;
  const std::vector<std::pair<std::filesystem::path, std::filesystem::path>> one = {{"a", "b"}};
  auto run = [&](const std::filesystem::path &adapter, ExternalMetricKind k = ExternalMetricKind::kPesq) {
    return KindOf([&] { RunExternalMetric(k, adapter, one); });
  };
  CHECK(run(dir / "missing") == ErrorKind::kConfiguration);
  CHECK(run({}) == ErrorKind::kConfiguration);
  std::ofstream(dir / "noexec") << "#!/bin/sh\necho 1\n";
  CHECK(run(dir / "noexec") == ErrorKind::kConfiguration);
  CHECK(run(Script(dir, "abc", "echo abc")) == ErrorKind::kProtocol);
  CHECK(run(Script(dir, "two", "echo 1; echo 2")) == ErrorKind::kProtocol);
  CHECK(run(Script(dir, "none", "true")) == ErrorKind::kProtocol);
  CHECK(run(Script(dir, "exit", "echo 2.0; exit 3")) == ErrorKind::kProtocol);
  CHECK(run(Script(dir, "trail", "echo 2.0x")) == ErrorKind::kProtocol);
  CHECK(run(Script(dir, "high", "echo 4.7")) == ErrorKind::kValidation);
  CHECK(run(Script(dir, "low", "echo -0.6")) == ErrorKind::kValidation);
  CHECK(run(Script(dir, "nan", "echo nan")) != ErrorKind::kConfiguration);
  CHECK(run(Script(dir, "mos", "echo 0.9"), ExternalMetricKind::kMos) == ErrorKind::kValidation);

  try {
    RunExternalMetric(ExternalMetricKind::kPesq, dir / "missing", one);
  } catch (const pse::Error &e) {
    CHECK(std::string(e.what()).find((dir / "missing").string()) != std::string::npos);
  }
}

TEST_CASE("score range edges are accepted") {
  TempDir dir;
  const std::vector<std::pair<std::filesystem::path, std::filesystem::path>> two = {{"a", "b"},
                                                                                  {"c", "d"}};
  CHECK(RunExternalMetric(ExternalMetricKind::kPesq, Script(dir, "p", "echo -0.5; echo 4.64"), two) ==
        std::vector<double>{-0.5, 4.64});
  CHECK(RunExternalMetric(ExternalMetricKind::kMos, Script(dir, "m", "printf '1\\r\\n5\\n'"), two) ==
        std::vector<double>{1.0, 5.0});
  CHECK(RunExternalMetric(ExternalMetricKind::kPesq, Script(dir, "z", "exit 0"), {}).empty());
}

TEST_CASE("concurrent adapter batches use separate scratch files") {
  TempDir dir;
  const auto adapter = Script(dir, "slow", "sleep 0.05; while read -r l; do echo 2.0; done < \"$1\"");
  std::vector<std::jthread> threads;
  std::atomic<int> ok{0};
  for (int t = 0; t < 6; ++t)
    threads.emplace_back([&, t] {
      std::vector<std::pair<std::filesystem::path, std::filesystem::path>> pairs(
          static_cast<std::size_t>(t + 1), {"r", "e"});
      if (RunExternalMetric(ExternalMetricKind::kPesq, adapter, pairs).size() == pairs.size()) ++ok;
    });
  threads.clear();
  CHECK(ok == 6);
}
