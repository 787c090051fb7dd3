// Copyright 2026 The cnat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// cnat: data generation, training, evaluation and benchmarking from the
// command line. Run `cnat <command> --help` for the options of a command.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cnat/data/dataset_io.hpp"
#include "cnat/data/synthetic.hpp"
#include "cnat/data/vocab.hpp"
#include "cnat/error.hpp"
#include "cnat/evalkit/bench.hpp"
#include "cnat/evalkit/judge.hpp"
#include "cnat/evalkit/report.hpp"
#include "cnat/model/checkpoint.hpp"
#include "cnat/model/cnat_model.hpp"
#include "cnat/model/language_model.hpp"
#include "cnat/training/lm_trainer.hpp"
#include "cnat/training/trainer.hpp"
#include "cnat/unsup/paraphraser.hpp"
#include "cnat/weaksup/label_model.hpp"
#include "cnat/weaksup/pseudo.hpp"
#include "cnat/weaksup/rules.hpp"

namespace {

using namespace cnat;
using json = nlohmann::ordered_json;

void progress(const std::string& line) { std::fprintf(stderr, "%s\n", line.c_str()); }

std::vector<data::Example> load_all(const std::vector<std::string>& paths) {
  std::vector<data::Example> out;
  for (const auto& p : paths) {
    auto part = data::load_dataset(p);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  if (out.empty()) raise(ErrorCode::kEmptyInput, "no records in the given data files");
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::kIo, "cannot write " + path);
  return out;
}

// ------------------------------------------------------------ gen-data ----

struct GenData {
  std::string task = "nli";
  std::uint64_t seed = 0;
  std::string out_dir;
  int train = 2048, val = 256, test = 256;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("gen-data", "Write seeded synthetic train/val/test splits");
    c->add_option("--task", task, "nli or spouse")->capture_default_str();
    c->add_option("--seed", seed, "Generator seed")->required();
    c->add_option("--out-dir", out_dir, "Directory for train.jsonl, val.jsonl, test.jsonl")->required();
    c->add_option("--train-size", train)->capture_default_str();
    c->add_option("--val-size", val)->capture_default_str();
    c->add_option("--test-size", test)->capture_default_str();
    c->callback([this] { run(); });
  }

  void run() const {
    const auto family = data::task_family_from_string(task);
    auto config = family == data::TaskFamily::kNli ? data::SyntheticTaskConfig::nli(seed)
                                                   : data::SyntheticTaskConfig::spouse(seed);
    config.train_size = train;
    config.val_size = val;
    config.test_size = test;
    const auto splits = data::generate_synthetic(config);
    std::filesystem::create_directories(out_dir);
    data::save_dataset(out_dir + "/train.jsonl", splits.train);
    data::save_dataset(out_dir + "/val.jsonl", splits.val);
    data::save_dataset(out_dir + "/test.jsonl", splits.test);
    std::printf("%s: train %zu, val %zu, test %zu records\n", data::to_string(family).c_str(), splits.train.size(),
                splits.val.size(), splits.test.size());
  }
};

// --------------------------------------------------------------- vocab ----

struct BuildVocab {
  std::vector<std::string> data_paths;
  std::string out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("vocab", "Build a vocabulary from dataset files");
    c->add_option("--data", data_paths, "Dataset files")->required();
    c->add_option("--out", out, "Vocabulary file")->required();
    c->callback([this] { run(); });
  }

  void run() const {
    const auto vocab = data::Vocab::build(load_all(data_paths));
    vocab.save(out);
    std::printf("%d tokens\n", vocab.size());
  }
};

// --------------------------------------------------------------- train ----

struct Train {
  std::string regime = "full";
  std::string task = "nli";
  std::vector<std::string> data_paths;
  std::string vocab_path, out, history, lm_path;
  std::optional<std::uint64_t> seed;
  std::string mode = "nar";
  int steps = 1000, batch = 16, eval_every = 100;
  int d_model = 128, heads = 4, encoder_layers = 2, decoder_layers = 2, ffn = 512, max_fertility = 3;
  double dropout = 0.1, lr = 1e-3, lambda_e = 1.0, lambda_f = 0.5, lambda_lm = 0.1;
  bool no_targets = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("train", "Train a classifier-generator");
    c->add_option("--regime", regime, "full, weak or unsup")->capture_default_str();
    c->add_option("--task", task, "nli or spouse (sets the label count)")->capture_default_str();
    c->add_option("--data", data_paths, "Training dataset files")->required();
    c->add_option("--vocab", vocab_path, "Vocabulary file")->required();
    c->add_option("--out", out, "Model checkpoint to write")->required();
    c->add_option("--seed", seed, "Initialization and batching seed")->required();
    c->add_option("--history", history, "Write the loss history as JSON lines");
    c->add_option("--lm", lm_path, "Fluency discriminator checkpoint (needed when --lambda-lm > 0)");
    c->add_option("--mode", mode, "nar or ar")->capture_default_str();
    c->add_option("--steps", steps)->capture_default_str();
    c->add_option("--batch-size", batch)->capture_default_str();
    c->add_option("--eval-every", eval_every)->capture_default_str();
    c->add_option("--d-model", d_model)->capture_default_str();
    c->add_option("--heads", heads)->capture_default_str();
    c->add_option("--encoder-layers", encoder_layers)->capture_default_str();
    c->add_option("--decoder-layers", decoder_layers)->capture_default_str();
    c->add_option("--ffn-width", ffn)->capture_default_str();
    c->add_option("--max-fertility", max_fertility)->capture_default_str();
    c->add_option("--dropout", dropout)->capture_default_str();
    c->add_option("--lr", lr)->capture_default_str();
    c->add_option("--lambda-e", lambda_e)->capture_default_str();
    c->add_option("--lambda-f", lambda_f)->capture_default_str();
    c->add_option("--lambda-lm", lambda_lm)->capture_default_str();
    c->add_flag("--no-explanation-targets", no_targets, "Drop the explanation and fertility terms");
    c->callback([this] { run(); });
  }

  void run() const {
    const auto dataset = load_all(data_paths);
    const auto vocab = data::Vocab::load(vocab_path);
    auto config = model::ModelConfig::desk(vocab.size(), data::label_count(data::task_family_from_string(task)));
    config.d_model = d_model;
    config.heads = heads;
    config.encoder_layers = encoder_layers;
    config.decoder_layers = decoder_layers;
    config.ffn_width = ffn;
    config.max_fertility = max_fertility;
    config.dropout = dropout;
    config.mode = model::decode_mode_from_string(mode);
    config.validate();

    training::TrainConfig tc;
    tc.regime = training::regime_from_string(regime);
    tc.steps = steps;
    tc.batch_size = batch;
    tc.seed = *seed;
    tc.eval_every = eval_every;
    tc.adam.learning_rate = lr;
    tc.weights.explanation = lambda_e;
    tc.weights.fertility = lambda_f;
    tc.weights.lm = lambda_lm;
    tc.use_explanation_targets = !no_targets;

    std::optional<model::LanguageModel<float>> lm;
    if (!lm_path.empty()) lm.emplace(model::load_language_model(lm_path));
    if (lambda_lm > 0 && !lm) raise(ErrorCode::kInvalidArgument, "--lambda-lm > 0 needs --lm");

    model::CnatModel<float> m(config, *seed);
    const auto hook = [this](const model::CnatModel<float>&, int step) -> std::map<std::string, double> {
      progress("train: step " + std::to_string(step) + "/" + std::to_string(steps));
      return {};
    };
    const auto result = training::train(m, dataset, vocab, tc, lm ? &*lm : nullptr, hook);
    model::save_model(out, m);
    if (!history.empty()) {
      auto h = open_out(history);
      training::write_history(h, result.history);
    }
    if (!result.history.empty()) {
      std::printf("%s\n", training::history_record_to_json(result.history.back()).c_str());
    }
  }
};

// --------------------------------------------------------- pretrain-lm ----

struct PretrainLm {
  std::vector<std::string> data_paths;
  std::string vocab_path, out;
  std::optional<std::uint64_t> seed;
  int steps = 500, batch = 16, d_model = 64, heads = 4, layers = 2, ffn = 128;
  double lr = 1e-3;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("pretrain-lm", "Train a causal LM on the explanations of a dataset");
    c->add_option("--data", data_paths, "Dataset files; records without explanations are skipped")->required();
    c->add_option("--vocab", vocab_path, "Vocabulary file")->required();
    c->add_option("--out", out, "LM checkpoint to write")->required();
    c->add_option("--seed", seed)->required();
    c->add_option("--steps", steps)->capture_default_str();
    c->add_option("--batch-size", batch)->capture_default_str();
    c->add_option("--d-model", d_model)->capture_default_str();
    c->add_option("--heads", heads)->capture_default_str();
    c->add_option("--layers", layers)->capture_default_str();
    c->add_option("--ffn-width", ffn)->capture_default_str();
    c->add_option("--lr", lr)->capture_default_str();
    c->callback([this] { run(); });
  }

  void run() const {
    const auto vocab = data::Vocab::load(vocab_path);
    std::vector<std::vector<int>> corpus;
    for (const auto& ex : load_all(data_paths)) {
      if (ex.explanation) corpus.push_back(vocab.tokenize(*ex.explanation));
    }
    auto config = model::ModelConfig::desk(vocab.size(), 2);
    config.d_model = d_model;
    config.heads = heads;
    config.decoder_layers = layers;
    config.ffn_width = ffn;
    config.dropout = 0.0;
    config.validate();
    model::LanguageModel<float> lm(config, *seed);
    training::LmTrainConfig lc;
    lc.steps = steps;
    lc.batch_size = batch;
    lc.seed = *seed;
    lc.adam.learning_rate = lr;
    for (const auto& r : training::pretrain_lm(lm, corpus, lc)) {
      progress("pretrain-lm: step " + std::to_string(r.step) + " train ppl " + std::to_string(r.train_perplexity));
    }
    model::save_language_model(out, lm);
    std::printf("{\"sentences\":%zu,\"perplexity\":%.6f}\n", corpus.size(), training::corpus_perplexity(lm, corpus));
  }
};

// --------------------------------------------------------- train-judge ----

struct TrainJudge {
  std::vector<std::string> data_paths;
  std::string vocab_path, out, task = "nli";
  std::optional<std::uint64_t> seed;
  evalkit::JudgeTrainConfig config;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("train-judge", "Train the rationality judge on (input, explanation) -> label");
    c->add_option("--data", data_paths, "Dataset files with gold labels and explanations")->required();
    c->add_option("--vocab", vocab_path, "Vocabulary file")->required();
    c->add_option("--out", out, "Judge checkpoint to write")->required();
    c->add_option("--task", task, "nli or spouse")->capture_default_str();
    c->add_option("--seed", seed)->required();
    c->add_option("--steps", config.steps)->capture_default_str();
    c->add_option("--d-model", config.d_model)->capture_default_str();
    c->add_option("--noise-rate", config.noise_rate)->capture_default_str();
    c->add_option("--restate-rate", config.restate_rate)->capture_default_str();
    c->callback([this] { run(); });
  }

  void run() {
    const auto vocab = data::Vocab::load(vocab_path);
    config.seed = *seed;
    const auto judge = evalkit::train_judge(load_all(data_paths), vocab, config,
                                            data::label_count(data::task_family_from_string(task)));
    evalkit::save_judge(out, judge);
    std::printf("judge trained for %d steps\n", config.steps);
  }
};

// ---------------------------------------------------------------- eval ----

struct Eval {
  std::string model_path, vocab_path, scorer_path, judge_path, baseline_path, out, format = "json";
  std::vector<std::string> data_paths;
  int warmup = 10, repeats = 3;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("eval", "Acc, NE-Acc, BLEU, PPL, Inter-Rep, Rationality and latency");
    c->add_option("--model", model_path, "Model checkpoint")->required();
    c->add_option("--vocab", vocab_path, "Vocabulary file")->required();
    c->add_option("--data", data_paths, "Evaluation dataset files")->required();
    c->add_option("--scorer", scorer_path, "Scorer LM checkpoint for PPL");
    c->add_option("--judge", judge_path, "Judge checkpoint for Rationality");
    c->add_option("--baseline", baseline_path, "Autoregressive model; adds the NAR speedup");
    c->add_option("--warmup", warmup)->capture_default_str();
    c->add_option("--repeats", repeats)->capture_default_str();
    c->add_option("--format", format, "json or table")->capture_default_str();
    c->add_option("--out", out, "Also write the JSON report here");
    c->callback([this] { run(); });
  }

  void run() const {
    const auto m = model::load_model(model_path);
    const auto vocab = data::Vocab::load(vocab_path);
    const auto examples = load_all(data_paths);
    std::optional<model::LanguageModel<float>> scorer;
    if (!scorer_path.empty()) scorer.emplace(model::load_language_model(scorer_path));
    std::optional<evalkit::JudgeClassifier> judge;
    if (!judge_path.empty()) judge.emplace(evalkit::load_judge(judge_path));
    auto report = evalkit::evaluate_model(m, examples, vocab, scorer ? &*scorer : nullptr, judge ? &*judge : nullptr);
    if (!baseline_path.empty()) {
      const auto ar = model::load_model(baseline_path);
      std::vector<std::vector<int>> inputs;
      for (const auto& ex : examples) inputs.push_back(data::encode_input(ex, vocab));
      evalkit::BenchOptions options;
      options.warmup = warmup;
      options.repeats = repeats;
      report.speedup = evalkit::bench_latency(m, ar, inputs, options).speedup;
      report.baseline = "ar";
    }
    const auto text = evalkit::report_to_json(report);
    if (!out.empty()) open_out(out) << text << '\n';
    std::printf("%s\n", format == "table" ? evalkit::report_to_table(report).c_str() : text.c_str());
  }
};

// ------------------------------------------------------------ generate ----

struct Generate {
  std::string model_path, vocab_path, task = "nli", segment_a;
  std::optional<std::string> segment_b;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("generate", "Label and explanation for one input");
    c->add_option("--model", model_path, "Model checkpoint")->required();
    c->add_option("--vocab", vocab_path, "Vocabulary file")->required();
    c->add_option("--task", task, "nli or spouse (label names)")->capture_default_str();
    c->add_option("--a", segment_a, "First input segment")->required();
    c->add_option("--b", segment_b, "Second input segment");
    c->callback([this] { run(); });
  }

  void run() const {
    const auto m = model::load_model(model_path);
    const auto vocab = data::Vocab::load(vocab_path);
    data::Example ex;
    ex.segment_a = segment_a;
    ex.segment_b = segment_b;
    const auto input = data::encode_input(ex, vocab);
    const auto result = m.config().mode == model::DecodeMode::kAutoregressive ? m.generate_autoregressive(input)
                                                                                : m.generate(input);
    const auto& names = data::label_names(data::task_family_from_string(task));
    json j;
    j["label"] = result.label >= 0 && result.label < static_cast<int>(names.size())
                     ? names[static_cast<std::size_t>(result.label)]
                     : std::to_string(result.label);
    j["explanation"] = vocab.detokenize(result.explanation);
    j["latency_ms"] = static_cast<double>(result.latency_ns) / 1e6;
    std::printf("%s\n", j.dump().c_str());
  }
};

// ---------------------------------------------------------- weak-label ----

struct WeakLabel {
  std::vector<std::string> annotated, unlabeled;
  std::string lfs_path, out, task = "spouse";
  double resolution = 0.05;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("weak-label", "Pseudo-label unlabeled records with labeling functions");
    c->add_option("--annotated", annotated, "Annotated dataset files (kept verbatim)");
    c->add_option("--unlabeled", unlabeled, "Unlabeled dataset files")->required();
    c->add_option("--lfs", lfs_path, "Labeling function config")->required();
    c->add_option("--task", task, "nli or spouse (sets the label count)")->capture_default_str();
    c->add_option("--resolution", resolution, "Weight lattice step (0 keeps the continuous optimum)")
        ->capture_default_str();
    c->add_option("--out", out, "Combined dataset to write")->required();
    c->callback([this] { run(); });
  }

  void run() const {
    const auto lfs = weaksup::load_labeling_functions_file(lfs_path);
    weaksup::LabelModelConfig config;
    config.num_labels = data::label_count(data::task_family_from_string(task));
    config.resolution = resolution;
    const auto ann = annotated.empty() ? std::vector<data::Example>{} : load_all(annotated);
    const auto combined = weaksup::build_combined_dataset(ann, load_all(unlabeled), lfs, config);
    data::save_dataset(out, combined.examples);
    json j;
    j["records"] = combined.examples.size();
    j["coverage"] = combined.coverage();
    j["dropped"] = combined.dropped;
    json w = json::object();
    for (std::size_t i = 0; i < lfs.size(); ++i) w[lfs[i].id] = combined.weights[i];
    j["weights"] = w;
    std::printf("%s\n", j.dump().c_str());
  }
};

// --------------------------------------------------------- make-pseudo ----

struct MakePseudo {
  std::vector<std::string> data_paths;
  std::string out, synonyms, endpoint;
  std::uint64_t seed = 0;
  double synonym_rate = 1.0, reorder_rate = 0.5, connective_rate = 0.5;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("make-pseudo", "Attach paraphrase pseudo explanations to unlabeled inputs");
    c->add_option("--data", data_paths, "Input dataset files")->required();
    c->add_option("--out", out, "Dataset to write")->required();
    c->add_option("--seed", seed)->required();
    c->add_option("--synonyms", synonyms, "Synonym table for the surrogate paraphraser");
    c->add_option("--synonym-rate", synonym_rate)->capture_default_str();
    c->add_option("--reorder-rate", reorder_rate)->capture_default_str();
    c->add_option("--connective-rate", connective_rate)->capture_default_str();
    c->add_option("--endpoint", endpoint, "host:port/path of an external translation service");
    c->callback([this] { run(); });
  }

  void run() const {
    unsup::ParaphraserConfig config;
    config.seed = seed;
    if (!synonyms.empty()) config.surrogate.synonyms = unsup::load_synonym_table(synonyms);
    config.surrogate.synonym_rate = synonym_rate;
    config.surrogate.reorder_rate = reorder_rate;
    config.surrogate.connective_rate = connective_rate;
    if (!endpoint.empty()) {
      config.mode = unsup::ParaphraseMode::kExternal;
      const auto colon = endpoint.find(':');
      const auto slash = endpoint.find('/', colon == std::string::npos ? 0 : colon);
      if (colon == std::string::npos) raise(ErrorCode::kInvalidArgument, "--endpoint needs host:port");
      config.external.host = endpoint.substr(0, colon);
      try {
        config.external.port = std::stoi(endpoint.substr(colon + 1, slash - colon - 1));
      } catch (const std::logic_error&) {
        raise(ErrorCode::kInvalidArgument, "bad port in --endpoint " + endpoint);
      }
      if (slash != std::string::npos) config.external.path = endpoint.substr(slash);
    }
    const unsup::Paraphraser paraphraser(config);
    const auto dataset = unsup::build_unsup_dataset(load_all(data_paths), paraphraser);
    data::save_dataset(out, dataset);
    std::printf("{\"records\":%zu,\"fallbacks\":%d}\n", dataset.size(), paraphraser.fallbacks());
  }
};

// --------------------------------------------------------------- bench ----

struct Bench {
  std::string nar_path, ar_path, vocab_path, csv, modes = "nar,ar";
  std::vector<std::string> data_paths;
  int warmup = 10, repeats = 3, groups = 5, limit = 0;
  std::optional<int> length;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("bench", "Single-sequence decode latency");
    c->add_option("--nar", nar_path, "Non-autoregressive model checkpoint");
    c->add_option("--ar", ar_path, "Autoregressive model checkpoint");
    c->add_option("--vocab", vocab_path, "Vocabulary file")->required();
    c->add_option("--data", data_paths, "Inputs to decode")->required();
    c->add_option("--modes", modes, "Comma-separated subset of nar,ar")->capture_default_str();
    c->add_option("--warmup", warmup)->capture_default_str();
    c->add_option("--repeats", repeats)->capture_default_str();
    c->add_option("--groups", groups)->capture_default_str();
    c->add_option("--limit", limit, "Use only the first N inputs (0: all)")->capture_default_str();
    c->add_option("--length", length, "Force the explanation length of every decode");
    c->add_option("--csv", csv, "Write per-decode rows here");
    c->callback([this] { run(); });
  }

  void run() const {
    std::vector<std::string> wanted;
    std::stringstream ss(modes);
    for (std::string m; std::getline(ss, m, ',');) {
      if (m != "nar" && m != "ar") raise(ErrorCode::kInvalidArgument, "unknown mode '" + m + "' in --modes");
      wanted.push_back(m);
    }
    if (wanted.empty()) raise(ErrorCode::kInvalidArgument, "--modes is empty");
    const bool use_nar = std::find(wanted.begin(), wanted.end(), "nar") != wanted.end();
    const bool use_ar = std::find(wanted.begin(), wanted.end(), "ar") != wanted.end();
    if (use_nar && nar_path.empty()) raise(ErrorCode::kInvalidArgument, "mode nar needs --nar");
    if (use_ar && ar_path.empty()) raise(ErrorCode::kInvalidArgument, "mode ar needs --ar");

    const auto vocab = data::Vocab::load(vocab_path);
    std::vector<std::vector<int>> inputs;
    for (const auto& ex : load_all(data_paths)) {
      if (limit > 0 && static_cast<int>(inputs.size()) == limit) break;
      inputs.push_back(data::encode_input(ex, vocab));
    }
    evalkit::BenchOptions options;
    options.warmup = warmup;
    options.repeats = repeats;
    options.groups = groups;
    options.forced_length = length;

    std::optional<model::CnatModel<float>> nar, ar;
    if (use_nar) nar.emplace(model::load_model(nar_path));
    if (use_ar) ar.emplace(model::load_model(ar_path));
    model::GenerateOptions gen;
    gen.forced_length = length;
    const evalkit::DecodeFn nar_fn = [&](std::size_t i) {
      return static_cast<int>(nar->generate(inputs[i], gen).explanation.size());
    };
    const evalkit::DecodeFn ar_fn = [&](std::size_t i) {
      return static_cast<int>(ar->generate_autoregressive(inputs[i], gen).explanation.size());
    };

    json j;
    evalkit::BenchResult result;
    if (use_nar && use_ar) {
      result = evalkit::bench_latency(*nar, *ar, inputs, options);
      j["ar_median_ms"] = result.baseline.median_of_means_ns / 1e6;
      j["nar_median_ms"] = result.candidate.median_of_means_ns / 1e6;
      j["speedup"] = result.speedup;
    } else {
      const auto& fn = use_nar ? nar_fn : ar_fn;
      for (int w = 0; w < warmup; ++w) fn(static_cast<std::size_t>(w) % inputs.size());
      std::vector<double> samples;
      for (int r = 0; r < repeats; ++r) {
        for (std::size_t i = 0; i < inputs.size(); ++i) {
          const auto t0 = std::chrono::steady_clock::now();
          const int emitted = fn(i);
          const double ns = std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - t0).count();
          samples.push_back(ns);
          result.rows.push_back({wanted[0], i, emitted, ns});
        }
      }
      j[wanted[0] + "_median_ms"] = evalkit::summarize_latency(samples, groups).median_of_means_ns / 1e6;
    }
    j["inputs"] = inputs.size();
    if (!csv.empty()) {
      auto f = open_out(csv);
      evalkit::write_bench_csv(f, result.rows);
    }
    std::printf("%s\n", j.dump().c_str());
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"C-NAT classifier-generator toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; [command] sections apply to that command, flags override it");

  GenData gen_data;
  BuildVocab vocab;
  Train train;
  PretrainLm pretrain_lm;
  TrainJudge train_judge;
  Eval eval;
  Generate generate;
  WeakLabel weak_label;
  MakePseudo make_pseudo;
  Bench bench;
  gen_data.add(app);
  vocab.add(app);
  train.add(app);
  pretrain_lm.add(app);
  train_judge.add(app);
  eval.add(app);
  generate.add(app);
  weak_label.add(app);
  make_pseudo.add(app);
  bench.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const cnat::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", std::string(cnat::error_code_name(e.code())).c_str(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
