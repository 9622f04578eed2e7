// tests/unit/cli_test.cpp

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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "common/synthetic.hpp"
#include "json.hpp"
#include "pse/metrics/embedding.hpp"
#include "pse/metrics/record.hpp"
#include "pse/metrics/text.hpp"
#include "pse/mixing/ledger.hpp"
#include "pse/protocol/manifest.hpp"

namespace fs = std::filesystem;
using pse::testing::TempDir;

namespace {

struct Result {
  int status = -1;
  std::string out, err;
  std::vector<nlohmann::json> ErrLines() const {
    std::vector<nlohmann::json> lines;
    std::stringstream in(err);
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) lines.push_back(nlohmann::json::parse(line));
    return lines;
  }
};

std::string Slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t Lines(const fs::path &p) {
  const std::string s = Slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

Result Run(const fs::path &cwd, const std::string &args) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" PSE_CLI_PATH "' " + args +
                          " > cli.out 2> cli.err";
  Result r;
  const int raw = std::system(cmd.c_str());
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = Slurp(cwd / "cli.out");
  r.err = Slurp(cwd / "cli.err");
  return r;
}

// One corpus and one set of pse_test mixtures shared by the cases below.
struct Workspace {
  TempDir dir{"pse_cli"};
  Workspace() {
    pse::testing::WriteCorpusAudio(dir / "corpus", pse::testing::SyntheticCorpusIndex(), 2000,
                                   [](const pse::protocol::UtteranceRef &) { return true; });
    std::ofstream(dir / "run.ini") << "[paths]\naudio_root = corpus\nmanifest = manifest.json\n"
                                      "output_dir = out1\n[run]\nmaster_seed = 7\n";
  }
  const fs::path &root() const { return dir.path(); }
};

Workspace &Shared() {
  static Workspace w;
  return w;
}

}  // namespace

TEST_CASE("manifest build and validate", "[cli]") {
  auto &w = Shared();
  auto r = Run(w.root(), "--config run.ini manifest build");
  REQUIRE(r.status == 0);
  REQUIRE(r.err.empty());
  REQUIRE(fs::exists(w.root() / "manifest.json"));
  r = Run(w.root(), "--config run.ini manifest validate");
  CHECK(r.status == 0);

  auto m = pse::protocol::ReadManifest(w.root() / "manifest.json");
  m.speakers[5].pse_test.clear();
  pse::protocol::WriteManifest(m, w.root() / "broken.json");
  r = Run(w.root(), "manifest validate --manifest broken.json");
  CHECK(r.status == 1);
  const auto lines = r.ErrLines();
  REQUIRE(lines.size() == 1);
  CHECK(lines[0]["code"] == "pse_test_count");
  CHECK(lines[0]["speaker_id"] == m.speakers[5].speaker_id);
}

TEST_CASE("exit codes by error kind", "[cli]") {
  auto &w = Shared();
  CHECK(Run(w.root(), "--config run.ini --parallelism 0 manifest validate").status == 2);
  CHECK(Run(w.root(), "manifest validate --config missing.ini").status == 2);
  CHECK(Run(w.root(), "frobnicate").status == 2);
  CHECK(Run(w.root(), "mix run --set everything --config run.ini").status == 2);
  auto r = Run(w.root(), "manifest validate --manifest nowhere.json");
  CHECK(r.status == 3);
  REQUIRE(r.ErrLines().size() == 1);
  CHECK(r.ErrLines()[0]["kind"] == "io");
  std::ofstream(w.root() / "garbage.json") << "{";
  CHECK(Run(w.root(), "manifest validate --manifest garbage.json").status == 3);
  CHECK(Run(w.root(), "--config run.ini mix run --set six_min").status == 1);  // no augmentation audio
}

TEST_CASE("mix plan writes every target", "[cli]") {
  auto &w = Shared();
  REQUIRE(Run(w.root(), "--config run.ini mix plan --set six_min").status == 0);
  CHECK(Lines(w.root() / "out1" / "six_min.plan.jsonl") == 20 * 50);
  REQUIRE(Run(w.root(), "--config run.ini mix plan --set thirty_min").status == 0);
  CHECK(Lines(w.root() / "out1" / "thirty_min.plan.jsonl") == 20 * 250);
}

TEST_CASE("mix run is byte-identical across runs and parallelism", "[cli]") {
  auto &w = Shared();
  REQUIRE(Run(w.root(), "--config run.ini mix run --set pse_test").status == 0);
  REQUIRE(Run(w.root(), "--config run.ini mix run --set pse_test --output_dir out2 --parallelism 3")
              .status == 0);
  const auto a = Slurp(w.root() / "out1" / "pse_test.ledger.jsonl");
  CHECK(Lines(w.root() / "out1" / "pse_test.ledger.jsonl") == 900);
  CHECK(a == Slurp(w.root() / "out2" / "pse_test.ledger.jsonl"));
  std::size_t compared = 0, differing = 0;
  for (const auto &s : pse::mixing::ReadLedger(w.root() / "out1" / "pse_test.ledger.jsonl")) {
    for (const auto &p : {s.output_path, s.reference_path}) {
      ++compared;
      if (Slurp(w.root() / "out1" / p) != Slurp(w.root() / "out2" / p)) ++differing;
    }
  }
  CHECK(compared == 1800);
  CHECK(differing == 0);
}

TEST_CASE("eval pse scores a complete submission and rejects a partial one", "[cli]") {
  auto &w = Shared();
  // The noisy mixtures themselves, laid out as a submission.
  auto r = Run(w.root(), "--config run.ini eval pse --enhanced out1/pse_test --label Noisy");
  REQUIRE(r.status == 0);
  const auto records = pse::metrics::ReadRecords(w.root() / "out1" / "pse_records.jsonl");
  CHECK(records.size() == 900 * 3);
  for (const auto &rec : records)
    if (rec.metric == pse::metrics::Metric::kSdri) REQUIRE(std::abs(rec.value) < 1e-9);
  CHECK(Slurp(w.root() / "out1" / "pse_report.md").find("| Noisy/real |") != std::string::npos);
  CHECK(fs::exists(w.root() / "out1" / "pse_report.json"));

  fs::copy(w.root() / "out1" / "pse_test", w.root() / "partial", fs::copy_options::recursive);
  const auto ledger = pse::mixing::ReadLedger(w.root() / "out1" / "pse_test.ledger.jsonl");
  const auto &victim = ledger[417];
  fs::remove(w.root() / "partial" / victim.speaker_id / (victim.mixture_id + ".wav"));
  r = Run(w.root(), "--config run.ini eval pse --enhanced partial --output_dir out1");
  CHECK(r.status == 1);
  const auto lines = r.ErrLines();
  REQUIRE(lines.size() == 1);
  CHECK(lines[0]["kind"] == "coverage");
  CHECK(lines[0]["mixture_id"] == victim.mixture_id);
}

TEST_CASE("report re-summarizes record files", "[cli]") {
  auto &w = Shared();
  REQUIRE(fs::exists(w.root() / "out1" / "pse_records.jsonl"));
  auto r = Run(w.root(), "report out1/pse_records.jsonl --format csv --interval_kind mean_ci_t");
  REQUIRE(r.status == 0);
  CHECK(r.out.rfind("condition,metric,n,mean,stddev,interval_half_width,interval_kind,flag\n", 0) == 0);
  CHECK(r.out.find("mean_ci_t") != std::string::npos);
  r = Run(w.root(), "report out1/pse_records.jsonl --group-by 0 --out summary.md");
  REQUIRE(r.status == 0);
  CHECK(Slurp(w.root() / "summary.md").find("| Noisy |") != std::string::npos);
  CHECK(Run(w.root(), "report out1/pse_records.jsonl --group-by x").status == 2);
  CHECK(Run(w.root(), "report missing.jsonl").status == 3);
}

TEST_CASE("eval tts with adapter-scored MOS", "[cli]") {
  auto &w = Shared();
  const auto m = pse::protocol::ReadManifest(w.root() / "manifest.json");
  pse::metrics::TranscriptSet hyp;
  std::vector<pse::metrics::EmbeddingVector> gen;
  nlohmann::json ref = nlohmann::json::object();
  for (const auto &s : m.speakers) {
    ref[s.enrollment[0].utterance_id] = {1.0, 0.0, 0.5};
    for (const auto &u : s.tts_eval) {
      hyp[u.utterance_id] = u.text;
      gen.push_back({u.utterance_id, {1.0, 0.0, 0.5}});
    }
  }
  pse::metrics::WriteTranscripts(hyp, w.root() / "hyp.json");
  pse::metrics::WriteEmbeddingsBinary(gen, w.root() / "gen.emb");
  std::ofstream(w.root() / "ref.json") << ref.dump();
  std::ofstream(w.root() / "mos.sh") << "#!/bin/sh\nwhile read -r l; do echo 4.0; done < \"$1\"\n";
  fs::permissions(w.root() / "mos.sh", fs::perms::owner_all);

  const std::string base =
      "--config run.ini --output_dir tts eval tts --hypotheses hyp.json --generated gen.emb "
      "--reference ref.json --label XTTS";
  CHECK(Run(w.root(), base + " --generated-audio gen").status == 2);  // no mos_adapter
  auto r = Run(w.root(), base + " --generated-audio gen --mos_adapter ./mos.sh");
  REQUIRE(r.status == 0);
  const auto records = pse::metrics::ReadRecords(w.root() / "tts" / "tts_records.jsonl");
  CHECK(records.size() == 20 * 50 * 3);
  for (const auto &rec : records) {
    if (rec.metric == pse::metrics::Metric::kSecs) CHECK(std::abs(rec.value - 1.0) < 1e-12);
    if (rec.metric == pse::metrics::Metric::kWer) CHECK(rec.value == 0.0);
    if (rec.metric == pse::metrics::Metric::kMos) CHECK(rec.value == 4.0);
  }
  const auto md = Slurp(w.root() / "tts" / "tts_report.md");
  CHECK(md.find("| XTTS/virtual |") != std::string::npos);

  hyp.erase(m.speakers[0].tts_eval[3].utterance_id);
  pse::metrics::WriteTranscripts(hyp, w.root() / "hyp.json");
  r = Run(w.root(), base);
  CHECK(r.status == 1);
  REQUIRE(r.ErrLines().size() == 1);
  CHECK(r.ErrLines()[0]["utterance_id"] == m.speakers[0].tts_eval[3].utterance_id);
}
