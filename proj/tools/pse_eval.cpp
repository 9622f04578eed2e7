// tools/pse_eval.cpp

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

// pse-eval command-line entry point.
//
//   pse_eval [--config run.ini] <subcommand> [options]
//
//   manifest build      scan audio_root, write the challenge manifest
//   manifest validate   check a manifest; exit 0 iff valid
//   mix plan --set S    write the mixture plan for S (pse_test|six_min|thirty_min)
//   mix run --set S     synthesize S and write its ledger
//   eval pse            score a submission directory against pse_test
//   eval tts            score TTS transcripts and embeddings
//   report              re-summarize record files
//
// Exit status: 0 ok, 1 validation/coverage failure, 2 configuration error,
// 3 I/O or format error. Problems go to stderr as JSON lines.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pse/cli/config.hpp"
#include "pse/error.hpp"
#include "pse/metrics/embedding.hpp"
#include "pse/metrics/external.hpp"
#include "pse/metrics/record.hpp"
#include "pse/metrics/text.hpp"
#include "pse/mixing/ledger.hpp"
#include "pse/mixing/run.hpp"
#include "pse/protocol/build.hpp"
#include "pse/protocol/corpus.hpp"
#include "pse/protocol/evaluation.hpp"
#include "pse/protocol/manifest.hpp"
#include "pse/protocol/planning.hpp"
#include "pse/report/render.hpp"
#include "pse/report/summary.hpp"

namespace fs = std::filesystem;
using pse::Error;
using pse::ErrorKind;

namespace {

int ExitCode(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfiguration: return 2;
    case ErrorKind::kIo:
    case ErrorKind::kFormat:
    case ErrorKind::kUnsupportedCodec: return 3;
    default: return 1;
  }
}

void EmitJsonLine(const nlohmann::json &j) { std::cerr << j.dump() << "\n"; }

// One line per attached diagnostic, or one line for the error itself.
void ReportError(const Error &e) {
  const std::string kind(pse::ToString(e.kind()));
  if (e.details().empty()) {
    EmitJsonLine({{"kind", kind}, {"message", e.what()}});
    return;
  }
  for (const auto &d : e.details()) {
    nlohmann::json j = {{"kind", kind}, {"code", d.code}, {"message", d.message}};
    for (const auto &[k, v] : d.fields)
      if (!v.empty()) j[k] = v;
    EmitJsonLine(j);
  }
}

void WriteText(const fs::path &path, const std::string &text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) pse::Fail(ErrorKind::kIo, "cannot write " + path.string());
}

void Require(const fs::path &p, const char *key) {
  if (p.empty()) pse::Fail(ErrorKind::kConfiguration, std::string(key) + " is not set");
}

std::vector<std::size_t> ParseGroupBy(const std::string &s) {
  std::vector<std::size_t> keys;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      const unsigned long k = std::stoul(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      keys.push_back(k);
    } catch (const std::exception &) {
      pse::Fail(ErrorKind::kConfiguration, "--group-by expects comma-separated key indices");
    }
  }
  return keys;
}

std::vector<pse::mixing::MixtureSpec> PlanSet(const pse::protocol::ChallengeManifest &m,
                                              const std::string &set,
                                              const fs::path &audio_root) {
  if (set == "pse_test") return pse::protocol::PlanPseTestset(m);
  return pse::protocol::PlanFinetuneSet(m, pse::protocol::ParseRegime(set), audio_root).all();
}

fs::path LedgerPath(const pse::cli::RunConfig &cfg, const std::string &set) {
  return cfg.output_dir / (set + ".ledger.jsonl");
}

void WriteEvalOutputs(const pse::cli::RunConfig &cfg, const std::string &stem,
                      const std::vector<pse::metrics::MetricRecord> &records) {
  pse::metrics::WriteRecords(records, cfg.output_dir / (stem + "_records.jsonl"));
  const auto stats = pse::report::Summarize(records, {}, cfg.interval_kind);
  WriteText(cfg.output_dir / (stem + "_report.md"), pse::report::RenderMarkdown(stats));
  WriteText(cfg.output_dir / (stem + "_report.json"), pse::report::RenderJson(stats));
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Personalized speech enhancement challenge evaluation"};
  app.require_subcommand(1);
  app.fallthrough();  // config flags may follow the subcommand

  std::optional<std::string> config_file;
  app.add_option("--config", config_file, "INI run configuration");
  std::map<std::string, std::string> overrides;
  std::map<std::string, std::optional<std::string>> flags;
  for (const auto &key : pse::cli::ConfigKeys())
    app.add_option("--" + key, flags[key], "overrides config key " + key);

  auto *manifest_cmd = app.add_subcommand("manifest", "build or validate the manifest");
  manifest_cmd->require_subcommand(1);
  auto *manifest_build = manifest_cmd->add_subcommand("build", "scan audio_root and write manifest");
  auto *manifest_validate = manifest_cmd->add_subcommand("validate", "check manifest invariants");

  std::string set;
  fs::path ledger_override;
  auto *mix_cmd = app.add_subcommand("mix", "plan or synthesize mixtures");
  mix_cmd->require_subcommand(1);
  auto *mix_plan = mix_cmd->add_subcommand("plan", "write mixture specs");
  auto *mix_run = mix_cmd->add_subcommand("run", "synthesize mixtures and write the ledger");
  for (auto *c : {mix_plan, mix_run})
    c->add_option("--set", set, "pse_test | six_min | thirty_min")
        ->required()
        ->check(CLI::IsMember({"pse_test", "six_min", "thirty_min"}));

  std::string label;
  fs::path enhanced_dir, hypotheses, generated, reference, mos_records, generated_audio;
  auto *eval_cmd = app.add_subcommand("eval", "score a system");
  eval_cmd->require_subcommand(1);
  auto *eval_pse = eval_cmd->add_subcommand("pse", "score enhanced pse_test submissions");
  eval_pse->add_option("--enhanced", enhanced_dir, "<dir>/<speaker_id>/<mixture_id>.wav")
      ->required();
  eval_pse->add_option("--ledger", ledger_override, "pse_test ledger (default from output_dir)");
  auto *eval_tts = eval_cmd->add_subcommand("tts", "score zero-shot TTS output");
  eval_tts->add_option("--hypotheses", hypotheses, "transcript JSON")->required();
  eval_tts->add_option("--generated", generated, "embeddings of generated speech")->required();
  eval_tts->add_option("--reference", reference, "embeddings of enrollment speech")->required();
  eval_tts->add_option("--mos", mos_records, "MOS record file");
  eval_tts->add_option("--generated-audio", generated_audio,
                       "<dir>/<speaker_id>/<utterance_id>.wav, scored by mos_adapter");
  for (auto *c : {eval_pse, eval_tts})
    c->add_option("--label", label, "condition label, speaker kind is appended");

  std::vector<fs::path> record_files;
  std::string format = "markdown", group_by, report_out, wer_weighting = "corpus";
  auto *report_cmd = app.add_subcommand("report", "summarize record files");
  report_cmd->add_option("records", record_files, "record files")->required();
  report_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json", "markdown"}));
  report_cmd->add_option("--group-by", group_by, "condition key indices, e.g. 0,2");
  report_cmd->add_option("--out", report_out, "output file (default stdout)");
  report_cmd->add_option("--wer-weighting", wer_weighting, "corpus | mean_of_rates")
      ->check(CLI::IsMember({"corpus", "mean_of_rates"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    EmitJsonLine({{"kind", "configuration"}, {"message", e.what()}});
    return 2;
  }

  try {
    for (const auto &[k, v] : flags)
      if (v) overrides[k] = *v;
    const pse::cli::RunConfig cfg = pse::cli::LoadConfig(
        config_file ? std::optional<fs::path>(*config_file) : std::nullopt, overrides);

    if (manifest_build->parsed()) {
      Require(cfg.audio_root, "audio_root");
      Require(cfg.manifest, "manifest");
      const auto index = pse::protocol::ScanCorpus(cfg.audio_root);
      const auto m = pse::protocol::BuildManifest(index, cfg.master_seed, cfg.audio_root.string());
      const auto report = pse::protocol::ValidateManifest(m);
      for (const auto &v : report.violations)
        EmitJsonLine({{"kind", "validation"}, {"code", v.code}, {"speaker_id", v.speaker_id},
                      {"utterance_id", v.utterance_id}, {"message", v.message}});
      if (!report.valid()) return 1;
      pse::protocol::WriteManifest(m, cfg.manifest);
      return 0;
    }
    if (manifest_validate->parsed()) {
      Require(cfg.manifest, "manifest");
      const auto report = pse::protocol::ValidateManifest(pse::protocol::ReadManifest(cfg.manifest));
      for (const auto &v : report.violations)
        EmitJsonLine({{"kind", "validation"}, {"code", v.code}, {"speaker_id", v.speaker_id},
                      {"utterance_id", v.utterance_id}, {"message", v.message}});
      return report.valid() ? 0 : 1;
    }
    if (mix_plan->parsed() || mix_run->parsed()) {
      Require(cfg.manifest, "manifest");
      const auto m = pse::protocol::ReadManifest(cfg.manifest);
      if (mix_plan->parsed()) {
        const auto specs = PlanSet(m, set, {});
        pse::mixing::WriteLedger(specs, cfg.output_dir / (set + ".plan.jsonl"));
        return 0;
      }
      Require(cfg.audio_root, "audio_root");
      auto specs = PlanSet(m, set, cfg.audio_root);
      specs = pse::mixing::RunMixtures(std::move(specs), cfg.audio_root, cfg.output_dir,
                                       cfg.mix_encoding, cfg.parallelism);
      pse::mixing::WriteLedger(specs, LedgerPath(cfg, set));
      return 0;
    }
    if (eval_pse->parsed()) {
      Require(cfg.manifest, "manifest");
      const auto m = pse::protocol::ReadManifest(cfg.manifest);
      const auto ledger = pse::mixing::ReadLedger(
          ledger_override.empty() ? LedgerPath(cfg, "pse_test") : ledger_override);
      pse::protocol::PseEvalOptions opt;
      opt.label = label;
      opt.mixtures_root = cfg.output_dir;
      opt.enhanced_root = enhanced_dir;
      opt.pesq_adapter = cfg.pesq_adapter;
      opt.parallelism = cfg.parallelism;
      WriteEvalOutputs(cfg, "pse", pse::protocol::RunPseEval(m, ledger, opt));
      return 0;
    }
    if (eval_tts->parsed()) {
      Require(cfg.manifest, "manifest");
      const auto m = pse::protocol::ReadManifest(cfg.manifest);
      pse::protocol::TtsEvalInputs in;
      in.label = label;
      in.hypotheses = pse::metrics::ReadTranscripts(hypotheses);
      in.generated = pse::metrics::ReadEmbeddings(generated);
      in.reference = pse::metrics::ReadEmbeddings(reference);
      if (!mos_records.empty()) {
        in.mos = pse::metrics::ReadRecords(mos_records);
      } else if (!generated_audio.empty()) {
        // MOS adapter rows: enrollment (ignored by reference-free predictors) and generated wav.
        std::vector<std::pair<fs::path, fs::path>> pairs;
        std::vector<std::string> ids;
        for (const auto &s : m.speakers)
          for (const auto &u : s.tts_eval) {
            pairs.emplace_back(fs::path(m.audio_root) / s.enrollment.front().path,
                               generated_audio / s.speaker_id / (u.utterance_id + ".wav"));
            ids.push_back(u.utterance_id);
          }
        const auto scores = pse::metrics::RunExternalMetric(pse::metrics::ExternalMetricKind::kMos,
                                                            cfg.mos_adapter, pairs);
        in.mos.emplace();
        for (std::size_t i = 0; i < ids.size(); ++i)
          in.mos->push_back(pse::metrics::MakeRecord(ids[i], pse::metrics::Metric::kMos, scores[i], ""));
      }
      WriteEvalOutputs(cfg, "tts", pse::protocol::RunTtsEval(m, in));
      return 0;
    }
    if (report_cmd->parsed()) {
      std::vector<pse::metrics::MetricRecord> records;
      for (const auto &f : record_files) {
        auto more = pse::metrics::ReadRecords(f);
        records.insert(records.end(), more.begin(), more.end());
      }
      const auto stats = pse::report::Summarize(
          records, ParseGroupBy(group_by), cfg.interval_kind,
          wer_weighting == "corpus" ? pse::report::WerWeighting::kCorpus
                                    : pse::report::WerWeighting::kMeanOfRates);
      const std::string doc = pse::report::Render(stats, pse::report::ParseFormat(format));
      if (report_out.empty())
        std::cout << doc;
      else
        WriteText(report_out, doc);
      return 0;
    }
  } catch (const Error &e) {
    ReportError(e);
    return ExitCode(e.kind());
  } catch (const fs::filesystem_error &e) {
    EmitJsonLine({{"kind", "io"}, {"message", e.what()}});
    return 3;
  } catch (const std::exception &e) {
    EmitJsonLine({{"kind", "internal"}, {"message", e.what()}});
    return 1;
  }
  return 0;
}
