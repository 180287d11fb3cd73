// Copyright 2026 The s2st Authors.
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

#include "s2st/cli/commands.h"

#include <cstdio>
#include <fstream>

#include "CLI11.hpp"
#include "s2st/audio/griffin_lim.h"
#include "s2st/audio/mel.h"
#include "s2st/audio/mel_io.h"
#include "s2st/audio/resample.h"
#include "s2st/audio/wav_io.h"
#include "s2st/common/binary_io.h"
#include "s2st/common/error.h"
#include "s2st/data/phonemize.h"
#include "s2st/data/subprocess_client.h"
#include "s2st/data/toy_clients.h"
#include "s2st/eval/asr_bleu.h"
#include "s2st/model/gradient_check.h"
#include "s2st/nd/gradient_suite.h"
#include "s2st/train/checkpoint.h"
#include "s2st/train/dataset.h"

namespace s2st::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr double kPrimitiveTolerance = 1e-4;
constexpr double kModelTolerance = 1e-3;

data::CorpusManifest ReadRequired(const fs::path& path, const std::string& what) {
  if (!fs::exists(path)) throw IoError(what + " manifest not found: " + path.string());
  return data::ReadManifest(path);
}

data::ToyVoice VoiceFor(const RunConfig& cfg, const data::ToySpec& spec) {
  data::ToyVoice voice;
  voice.phones = spec.tgt_vocab;
  voice.frames_per_phone = spec.frames_per_phone;
  voice.sample_rate = cfg.frontend.tgt_sample_rate;
  voice.hop_length = cfg.frontend.tgt_hop_length;
  return voice;
}

std::unique_ptr<data::Client> Subprocess(const std::string& command) {
  data::SubprocessOptions o;
  o.command = command;
  return std::make_unique<data::SubprocessClient>(o);
}

std::unique_ptr<model::Translatotron> LoadCompatible(const RunConfig& cfg, const fs::path& path) {
  if (!fs::exists(path)) throw IoError("checkpoint not found: " + path.string());
  auto m = train::LoadModel(path);
  if (m->config().Fingerprint() != cfg.model.Fingerprint()) {
    throw FingerprintError(path.string() +
                           ": checkpoint model config differs from the run config");
  }
  return m;
}

}  // namespace

void RunManifest::Add(const std::string& kind, const fs::path& path) {
  artifacts.emplace_back(kind, path.string());
}

ordered_json RunManifest::ToJson() const {
  ordered_json j;
  j["command"] = command;
  j["argv"] = argv;
  char fp[17];
  std::snprintf(fp, sizeof(fp), "%016llx", static_cast<unsigned long long>(config_fingerprint));
  j["config_fingerprint"] = fp;
  ordered_json a = ordered_json::array();
  for (const auto& [kind, path] : artifacts) a.push_back({{"kind", kind}, {"path", path}});
  j["artifacts"] = std::move(a);
  j["errors"] = errors;
  j["status"] = errors.empty() ? "ok" : "error";
  return j;
}

void RunManifest::Write(const fs::path& dir) const {
  fs::create_directories(dir);
  WriteFileBytes(dir / "run_manifest.json", ToJson().dump(2) + "\n");
}

std::unique_ptr<data::Client> MakeMtClient(const RunConfig& cfg, const data::ToyCorpus& corpus) {
  if (!cfg.paths.mt_command.empty()) return Subprocess(cfg.paths.mt_command);
  return std::make_unique<data::ToyMtClient>(data::ToyMtMode::kDictionary,
                                             data::ReadWordMap(corpus.mt_secondary));
}

std::unique_ptr<data::Client> MakeTtsClient(const RunConfig& cfg, const data::ToySpec& spec,
                                            const fs::path& out_dir) {
  if (!cfg.paths.tts_command.empty()) return Subprocess(cfg.paths.tts_command);
  return std::make_unique<data::ToyTtsClient>(VoiceFor(cfg, spec), out_dir);
}

std::unique_ptr<data::Client> MakeAsrClient(const RunConfig& cfg) {
  if (!cfg.paths.asr_command.empty()) return Subprocess(cfg.paths.asr_command);
  return std::make_unique<data::ToyAsrClient>(VoiceFor(cfg, cfg.toy));
}

fs::path GenToy(const RunConfig& cfg, RunManifest& manifest) {
  const data::ToyCorpus c = data::GenerateToyCorpus(cfg.toy, cfg.paths.data_dir);
  manifest.Add("manifest", c.primary_manifest);
  manifest.Add("manifest", c.secondary_manifest);
  if (!c.eval_manifest.empty()) manifest.Add("manifest", c.eval_manifest);
  manifest.Add("lexicon", c.src_lexicon);
  manifest.Add("lexicon", c.tgt_lexicon);
  manifest.Add("inventory", c.src_inventory);
  manifest.Add("inventory", c.tgt_inventory);
  manifest.Add("dictionary", c.mt_primary);
  manifest.Add("dictionary", c.mt_secondary);
  manifest.Add("spec", cfg.paths.data_dir / "toy_spec.json");
  return cfg.paths.data_dir;
}

fs::path Prepare(const RunConfig& cfg, RunManifest& manifest) {
  data::ToySpec spec;
  const data::ToyCorpus corpus = data::LoadToyCorpus(cfg.paths.data_dir, &spec);
  auto mt = MakeMtClient(cfg, corpus);
  auto tts = MakeTtsClient(cfg, spec, cfg.paths.data_dir / "tts");
  const data::PreparedToyData d =
      data::PrepareToyDataset(spec, corpus, cfg.paths.data_dir, mt.get(), tts.get());
  const fs::path prepared = cfg.paths.data_dir / "prepared";
  manifest.Add("manifest", prepared / "primary.jsonl");
  manifest.Add("manifest", prepared / "secondary.jsonl");
  if (!d.eval.records.empty()) manifest.Add("manifest", prepared / "eval.jsonl");
  manifest.Add("transcript", cfg.paths.data_dir / "transcripts" / "mt.jsonl");
  manifest.Add("transcript", cfg.paths.data_dir / "transcripts" / "tts.jsonl");
  if (!d.dropped.records.empty()) {
    data::WriteManifest(d.dropped, prepared / "dropped.jsonl");
    manifest.Add("manifest", prepared / "dropped.jsonl");
  }
  return cfg.paths.data_dir;
}

fs::path Train(const RunConfig& cfg, const TrainRequest& request, RunManifest& manifest) {
  const train::StageConfig stage = cfg.Stage(request.kind);
  stage.Validate(cfg.model);
  train::StageInputs inputs;
  const bool needs_primary = request.kind != train::StageKind::kPretrain;
  const bool needs_secondary = request.kind != train::StageKind::kFinetune;
  if (needs_primary) inputs.primary = ReadRequired(cfg.PrimaryManifest(), "primary");
  if (needs_secondary) inputs.secondary = ReadRequired(cfg.SecondaryManifest(), "secondary");

  std::unique_ptr<model::Translatotron> m =
      request.init ? LoadCompatible(cfg, *request.init)
                   : std::make_unique<model::Translatotron>(cfg.model, cfg.seed);
  const fs::path out_dir = cfg.paths.output_dir / std::string(train::StageKindName(request.kind));
  train::RunStageOptions opts;
  opts.out_dir = out_dir;
  opts.resume_from = request.resume;
  const train::StageResult result = train::RunStage(*m, stage, inputs, opts);
  for (int64_t s = stage.checkpoint_every; stage.checkpoint_every > 0 && s < stage.max_steps;
       s += stage.checkpoint_every) {
    const fs::path p =
        out_dir / (std::string(train::StageKindName(request.kind)) + "_step" + std::to_string(s) +
                   ".ckpt");
    if (fs::exists(p)) manifest.Add("checkpoint", p);
  }
  manifest.Add("checkpoint", result.final_checkpoint);
  manifest.Add("train_log", out_dir / "train_log.jsonl");
  return out_dir;
}

fs::path Translate(const RunConfig& cfg, const TranslateRequest& request, RunManifest& manifest) {
  const auto m = LoadCompatible(cfg, request.checkpoint);
  audio::Waveform wave = audio::ReadWav(request.input);
  if (wave.sample_rate != cfg.frontend.src_sample_rate) {
    wave = audio::Resample(wave, cfg.frontend.src_sample_rate);
  }
  const audio::MelSpectrogram src = audio::ComputeMelSpectrogram(wave, cfg.frontend.Source());
  nd::NoGradGuard no_grad;
  model::RunContext ctx = model::RunContext::Inference();
  const auto prompt = eval::ResolvePrompt(request.prompt, *m, data::Category::kPrimary);
  const model::EncoderStates enc = m->Encode(train::NormalizedSource(*m, src), prompt, ctx);
  const model::InferenceResult inf = m->InferSpectrogram(
      enc, cfg.eval.stop_threshold, eval::DefaultMaxSteps(m->config(), src.num_frames));
  const audio::FrontendConfig tgt = cfg.frontend.Target();
  audio::MelSpectrogram mel =
      train::DenormalizeTarget(*m, inf.mel, inf.num_frames, tgt.sample_rate, tgt.hop_length);
  mel.origin = audio::MelOrigin::kPredicted;

  fs::path mel_path = request.output;
  mel_path.replace_extension(".mel");
  fs::path phones_path = request.output;
  phones_path.replace_extension(".phones.json");
  if (request.output.has_parent_path()) fs::create_directories(request.output.parent_path());
  audio::WriteMel(mel_path, mel);
  audio::WriteWav(request.output,
                  audio::GriffinLimInvert(mel, tgt, cfg.eval.griffin_lim_iterations));
  const std::vector<int64_t> phones =
      eval::DecodePhonemes(*m, enc, model::AuxTask::kTarget, cfg.eval.decode);
  ordered_json pj = {{"target_phone_ids", phones},
                     {"frames", inf.num_frames},
                     {"stopped_early", inf.stopped_early}};
  WriteFileBytes(phones_path, pj.dump(2) + "\n");
  manifest.Add("wav", request.output);
  manifest.Add("mel", mel_path);
  manifest.Add("phones", phones_path);
  return request.output.has_parent_path() ? request.output.parent_path() : fs::path(".");
}

fs::path Evaluate(const RunConfig& cfg, const EvaluateRequest& request, RunManifest& manifest,
                  eval::EvalReport* report_out) {
  const auto m = LoadCompatible(cfg, request.checkpoint);
  const fs::path manifest_path = request.manifest.value_or(cfg.EvalManifest());
  const data::CorpusManifest corpus = ReadRequired(manifest_path, "evaluation");
  const fs::path stem = request.out.value_or(cfg.paths.output_dir / "eval" / "report");
  const fs::path dir = stem.has_parent_path() ? stem.parent_path() : fs::path(".");
  eval::EvalConfig ecfg = cfg.EvalConfig();
  ecfg.asr.out_dir = dir / "asr";
  std::unique_ptr<data::Client> asr;
  if (cfg.eval.asr_bleu) asr = MakeAsrClient(cfg);
  const eval::EvalReport report = eval::Evaluate(*m, corpus, ecfg, asr.get());
  eval::WriteReport(report, stem, manifest_path.stem().string());
  fs::path json_path = stem, txt_path = stem;
  json_path += ".json";
  txt_path += ".txt";
  manifest.Add("report", json_path);
  manifest.Add("report", txt_path);
  if (report.asr.has_value()) manifest.Add("asr_audio", ecfg.asr.out_dir);
  if (report_out != nullptr) *report_out = report;
  return dir;
}

bool GradCheck(const RunConfig& cfg, RunManifest& manifest, std::ostream& out, fs::path* dir_out) {
  const std::vector<nd::GradientCase> cases = nd::RunPrimitiveGradientSuite(cfg.seed);
  const model::ModelGradientReport full = model::CheckModelGradients(cfg.seed);
  bool ok = true;
  ordered_json j;
  ordered_json rows = ordered_json::array();
  char line[160];
  for (const nd::GradientCase& c : cases) {
    const bool pass = c.max_relative_error < kPrimitiveTolerance;
    ok = ok && pass;
    std::snprintf(line, sizeof(line), "%-28s %12.3e  %s\n", c.name.c_str(), c.max_relative_error,
                  pass ? "ok" : "FAIL");
    out << line;
    rows.push_back({{"name", c.name}, {"max_relative_error", c.max_relative_error},
                    {"entries", c.entries}, {"tolerance", kPrimitiveTolerance}});
  }
  const bool model_pass = full.diff.max_relative_error < kModelTolerance;
  ok = ok && model_pass;
  std::snprintf(line, sizeof(line), "%-28s %12.3e  %s (worst: %s)\n", "model loss",
                full.diff.max_relative_error, model_pass ? "ok" : "FAIL",
                full.worst_parameter.c_str());
  out << line;
  rows.push_back({{"name", "model loss"},
                  {"max_relative_error", full.diff.max_relative_error},
                  {"entries", full.diff.entries_checked},
                  {"tolerance", kModelTolerance},
                  {"worst_parameter", full.worst_parameter}});
  j["cases"] = std::move(rows);
  j["pass"] = ok;
  const fs::path dir = cfg.paths.output_dir / "gradcheck";
  fs::create_directories(dir);
  WriteFileBytes(dir / "gradcheck.json", j.dump(2) + "\n");
  manifest.Add("report", dir / "gradcheck.json");
  if (!ok) manifest.errors.push_back("gradient check above tolerance");
  if (dir_out != nullptr) *dir_out = dir;
  return ok;
}

int Main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Direct speech-to-speech translation with pseudo translation labeling"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string config_path, profile;
  std::vector<std::string> overrides;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run config");
    sub->add_option("--profile", profile, "Profile defaults: toy, fisher or teden2zh");
    sub->add_option("--set", overrides, "Override a config key, e.g. --set model.enc_layers=4")
        ->take_all();
  };

  std::string ckpt, init, resume, in_path, out_path, manifest_path, prompt = "auto";
  CLI::App* gen = app.add_subcommand("gen-toy", "Generate the synthetic toy corpus");
  CLI::App* prep = app.add_subcommand("prepare", "Pseudo-label, synthesize and extract features");
  CLI::App* pre = app.add_subcommand("pretrain", "Pre-train encoder and auxiliary decoders on B");
  CLI::App* ft = app.add_subcommand("finetune", "Fine-tune on A");
  CLI::App* mix = app.add_subcommand("mixtune", "Mixed-tune on upsampled A plus B");
  CLI::App* pt = app.add_subcommand("prompttune", "Prompt-tune on upsampled A plus B");
  CLI::App* tr = app.add_subcommand("translate", "Translate one wav file");
  CLI::App* ev = app.add_subcommand("evaluate", "Score a checkpoint on a manifest");
  CLI::App* gc = app.add_subcommand("gradcheck", "Run the finite-difference gradient suite");
  for (CLI::App* sub : {gen, prep, pre, ft, mix, pt, tr, ev, gc}) common(sub);
  for (CLI::App* sub : {pre, ft, mix, pt}) {
    sub->add_option("--init", init, "Checkpoint to start from");
    sub->add_option("--resume", resume, "Checkpoint of this stage to resume");
  }
  tr->add_option("--ckpt", ckpt, "Model checkpoint")->required();
  tr->add_option("--in", in_path, "Source wav")->required();
  tr->add_option("--out", out_path, "Output wav")->required();
  tr->add_option("--prompt", prompt, "auto, none, primary or secondary");
  ev->add_option("--ckpt", ckpt, "Model checkpoint")->required();
  ev->add_option("--manifest", manifest_path, "Manifest to score");
  ev->add_option("--out", out_path, "Report stem");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  RunManifest manifest;
  manifest.command = sub->get_name();
  for (int i = 0; i < argc; ++i) manifest.argv.emplace_back(argv[i]);
  // Unset until the config loads; a run without a config has no directory.
  std::optional<fs::path> dir;
  bool ok = true;
  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::vector<std::string> all;
      if (!profile.empty()) all.push_back("profile=" + profile);
      all.insert(all.end(), overrides.begin(), overrides.end());
      cfg = LoadConfig(config_path, all);
    } else {
      nlohmann::json tree = nlohmann::json::object();
      if (!profile.empty()) tree["profile"] = profile;
      for (const std::string& o : overrides) ApplyOverride(tree, o);
      cfg = ConfigFromJson(tree, fs::current_path());
    }
    manifest.config_fingerprint = cfg.Fingerprint();
    dir = cfg.paths.output_dir;
    const std::string name = sub->get_name();
    auto opt = [](const std::string& s) {
      return s.empty() ? std::nullopt : std::optional<fs::path>(s);
    };
    if (name == "gen-toy") {
      dir = GenToy(cfg, manifest);
    } else if (name == "prepare") {
      dir = Prepare(cfg, manifest);
    } else if (name == "pretrain" || name == "finetune" || name == "mixtune" ||
               name == "prompttune") {
      TrainRequest r;
      r.kind = name == "pretrain"   ? train::StageKind::kPretrain
               : name == "finetune" ? train::StageKind::kFinetune
               : name == "mixtune"  ? train::StageKind::kMixed
                                    : train::StageKind::kPrompt;
      r.init = opt(init);
      r.resume = opt(resume);
      dir = Train(cfg, r, manifest);
    } else if (name == "translate") {
      dir = Translate(cfg, {ckpt, in_path, out_path, eval::ParsePromptPolicy(prompt)}, manifest);
    } else if (name == "evaluate") {
      eval::EvalReport report;
      dir = Evaluate(cfg, {ckpt, opt(manifest_path), opt(out_path)}, manifest, &report);
      out << report.Table(fs::path(manifest_path.empty() ? cfg.EvalManifest() : fs::path(manifest_path))
                              .stem()
                              .string());
    } else if (name == "gradcheck") {
      fs::path report_dir;
      ok = GradCheck(cfg, manifest, out, &report_dir);
      dir = report_dir;
    }
  } catch (const std::exception& e) {
    manifest.errors.push_back(e.what());
    err << "error: " << e.what() << "\n";
    ok = false;
  }
  if (!dir.has_value()) return 1;
  try {
    manifest.Write(*dir);
  } catch (const std::exception& e) {
    err << "error: could not write run manifest: " << e.what() << "\n";
    return 1;
  }
  return ok && manifest.errors.empty() ? 0 : 1;
}

}  // namespace s2st::cli
