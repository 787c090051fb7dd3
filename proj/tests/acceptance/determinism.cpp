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


#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <sstream>

#include <unistd.h>

#include "cnat/evalkit/judge.hpp"
#include "cnat/model/checkpoint.hpp"
#include "harness.hpp"

#ifndef CNAT_SOURCE_DIR
#error "CNAT_SOURCE_DIR must point at the source tree"
#endif

namespace acceptance {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Ran {
  int status = 0;
  std::string out;
};

Ran run(const std::string& command) {
  Ran r;
  FILE* pipe = popen((command + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) return {-1, ""};
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  r.status = pclose(pipe);
  return r;
}

// Wall-clock fields are the only outputs allowed to differ between reruns.
std::string without_timing(const std::string& text, const fs::path& name) {
  const auto ext = name.extension().string();
  if (ext == ".csv") {
    std::istringstream in(text);
    std::string out, line;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + '\n';
    return out;
  }
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line)) {
    auto j = nlohmann::ordered_json::parse(line, nullptr, false);
    if (j.is_object()) {
      for (const char* key : {"mean_latency_ns", "speedup", "latency_ms", "ar_median_ms", "nar_median_ms"}) j.erase(key);
      line = j.dump();
    }
    out += line + '\n';
  }
  return out;
}

bool timed(const fs::path& name) {
  const auto stem = name.filename().string();
  return stem.rfind("eval", 0) == 0 || stem.rfind("generate", 0) == 0 || stem.rfind("bench", 0) == 0;
}

std::vector<std::pair<std::string, std::string>> pipeline(const std::string& dir) {
  const std::string cli = CNAT_CLI_PATH;
  const std::string src = CNAT_SOURCE_DIR;
  const std::string d = dir + "/";
  const std::string model = " --d-model 32 --heads 2 --ffn-width 64";
  return {
      {"gen-data", "gen-data --task nli --seed 7 --train-size 96 --val-size 24 --test-size 24 --out-dir " + d + "nli"},
      {"gen-data-sp", "gen-data --task spouse --seed 7 --train-size 96 --val-size 24 --test-size 24 --out-dir " + d + "sp"},
      {"vocab", "vocab --data " + d + "nli/train.jsonl " + d + "nli/val.jsonl --out " + d + "vocab.txt"},
      {"pretrain-lm", "pretrain-lm --data " + d + "nli/train.jsonl --vocab " + d + "vocab.txt --seed 3 --steps 20 --d-model 32 --heads 2 --ffn-width 64 --out " + d + "lm.ckpt"},
      {"train", "train --regime full --data " + d + "nli/train.jsonl --vocab " + d + "vocab.txt --seed 3 --steps 30 --eval-every 10 --lm " + d + "lm.ckpt --history " + d + "history.jsonl --out " + d + "nar.ckpt" + model},
      {"train-ar", "train --regime full --mode ar --lambda-lm 0 --data " + d + "nli/train.jsonl --vocab " + d + "vocab.txt --seed 3 --steps 20 --out " + d + "ar.ckpt" + model},
      {"train-judge", "train-judge --data " + d + "nli/train.jsonl --vocab " + d + "vocab.txt --seed 3 --steps 40 --d-model 32 --out " + d + "judge.ckpt"},
      {"eval", "eval --model " + d + "nar.ckpt --vocab " + d + "vocab.txt --data " + d + "nli/test.jsonl --scorer " + d + "lm.ckpt --judge " + d + "judge.ckpt --baseline " + d + "ar.ckpt --warmup 1 --repeats 1 --out " + d + "eval.json"},
      {"generate", "generate --model " + d + "nar.ckpt --vocab " + d + "vocab.txt --a \"a small cat sleeps\" --b \"a cat sleeps\""},
      {"weak-label", "weak-label --task spouse --annotated " + d + "sp/val.jsonl --unlabeled " + d + "sp/train.jsonl --lfs " + src + "/configs/sp_lfs.cfg --out " + d + "weak.jsonl"},
      {"make-pseudo", "make-pseudo --data " + d + "nli/train.jsonl --seed 5 --synonyms " + src + "/configs/nli_synonyms.txt --out " + d + "pseudo.jsonl"},
      {"train-unsup", "train --regime unsup --lambda-lm 0 --data " + d + "pseudo.jsonl --vocab " + d + "vocab.txt --seed 3 --steps 10 --out " + d + "unsup.ckpt" + model},
      {"bench", "bench --nar " + d + "nar.ckpt --ar " + d + "ar.ckpt --vocab " + d + "vocab.txt --data " + d + "nli/test.jsonl --modes nar,ar --limit 4 --warmup 1 --repeats 1 --groups 1 --csv " + d + "bench.csv"},
  };
}

// Runs the pipeline in `dir`, storing each command's stdout next to its files.
std::string run_pipeline(const std::string& dir) {
  fs::create_directories(dir);
  for (const auto& [name, args] : pipeline(dir)) {
    const auto r = run(std::string(CNAT_CLI_PATH) + " " + args);
    if (r.status != 0) return "command " + name + " exited with status " + std::to_string(r.status);
    std::ofstream(dir + "/" + name + ".stdout", std::ios::binary) << r.out;
  }
  return "";
}

template <typename Params>
bool same_bits(const Params& a, const Params& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.vars()[i].value();
    const auto& y = b.vars()[i].value();
    if (a.names()[i] != b.names()[i] || x.shape() != y.shape()) return false;
    if (std::memcmp(x.data().data(), y.data().data(), x.data().size_bytes()) != 0) return false;
  }
  return true;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("cnat_determinism_" + std::to_string(::getpid()));
  fs::remove_all(root);
  for (const char* run_dir : {"a", "b"}) {
    const auto error = run_pipeline((root / run_dir).string());
    if (!error.empty()) return {false, error};
  }

  int compared = 0, timing_filtered = 0;
  std::vector<std::string> differing;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), root / "a");
    std::string x = slurp(entry.path()), y = slurp(root / "b" / rel);
    if (timed(rel)) {
      x = without_timing(x, rel);
      y = without_timing(y, rel);
      ++timing_filtered;
    }
    ++compared;
    if (x != y) differing.push_back(rel.string());
  }

  // Checkpoint round-trips: load, save again, compare bytes and parameters.
  const auto a = root / "a";
  bool round_trip = true;
  const auto m = cnat::model::load_model((a / "nar.ckpt").string());
  cnat::model::save_model((a / "nar2.ckpt").string(), m);
  round_trip = round_trip && slurp(a / "nar.ckpt") == slurp(a / "nar2.ckpt");
  round_trip = round_trip && same_bits(m.parameters(), cnat::model::load_model((a / "nar2.ckpt").string()).parameters());
  const auto lm = cnat::model::load_language_model((a / "lm.ckpt").string());
  cnat::model::save_language_model((a / "lm2.ckpt").string(), lm);
  round_trip = round_trip && slurp(a / "lm.ckpt") == slurp(a / "lm2.ckpt");
  const auto judge = cnat::evalkit::load_judge((a / "judge.ckpt").string());
  cnat::evalkit::save_judge((a / "judge2.ckpt").string(), judge);
  round_trip = round_trip && slurp(a / "judge.ckpt") == slurp(a / "judge2.ckpt");

  // A fresh in-memory model survives save/load with identical outputs.
  cnat::model::ModelConfig config = cnat::model::ModelConfig::desk(40, 3);
  config.d_model = 32;
  config.heads = 2;
  cnat::model::CnatModel<float> fresh(config, 19);
  cnat::model::save_model((a / "fresh.ckpt").string(), fresh);
  const auto loaded = cnat::model::load_model((a / "fresh.ckpt").string());
  const std::vector<int> input{5, 9, 4, 7, 12};
  const auto g1 = fresh.generate(input), g2 = loaded.generate(input);
  round_trip = round_trip && same_bits(fresh.parameters(), loaded.parameters()) && loaded.config() == fresh.config() &&
               g1.explanation == g2.explanation && g1.label == g2.label && g1.label_probs == g2.label_probs;

  fs::remove_all(root);
  std::string detail = format("%d output files compared across two runs (%d with wall-clock fields removed), %zu differ",
                              compared, timing_filtered, differing.size());
  for (const auto& name : differing) detail += " " + name;
  detail += round_trip ? "; checkpoint round-trips bit-exact" : "; checkpoint round-trip mismatch";
  return {differing.empty() && compared > 0 && round_trip, detail};
}

const Register reg(10, "determinism and persistence", determinism);

}  // namespace
}  // namespace acceptance
