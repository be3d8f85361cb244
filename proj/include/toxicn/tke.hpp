// Copyright 2026 The toxicn Authors
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

#ifndef TOXICN_TKE_HPP_
#define TOXICN_TKE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "toxicn/corpus.hpp"
#include "toxicn/lexicon.hpp"
#include "toxicn/matrix.hpp"

namespace toxicn {

// The four subtasks of the label hierarchy.
enum class Task : std::uint8_t {
  kToxic,       // all samples: non-toxic / toxic
  kType,        // toxic samples: general offensive / hate
  kGroup,       // hate samples: multi-label over the four groups
  kExpression,  // hate samples: explicit / implicit / reporting
};

inline constexpr std::array<Task, 4> kAllTasks = {
    Task::kToxic, Task::kType, Task::kGroup, Task::kExpression};

std::string_view ToString(Task t);
std::optional<Task> ParseTask(std::string_view s);
std::size_t NumOutputs(Task t);
inline bool IsMultiLabel(Task t) { return t == Task::kGroup; }

// Gold filtering: whether the sample carries a label for the task.
bool Applicable(const ToxiSample& s, Task t);

struct Label {
  int cls = 0;             // single-label tasks
  std::uint8_t groups = 0;  // group task: bit i = Group i
  friend bool operator==(const Label&, const Label&) = default;
};

// Throws DataError when the sample has no label for the task.
Label LabelFor(const ToxiSample& s, Task t);

struct TkeConfig {
  int dim = 64;
  double lambda = 0.5;
  int hidden = 64;
  int pad_len = 100;
  int epochs = 20;
  int batch = 64;
  double learning_rate = 1e-3;
  double dropout = 0.5;
  std::uint64_t seed = 1;
  Task task = Task::kToxic;
  // Early stopping: epochs without validation-loss improvement.
  int patience = 3;
  // Fraction of the training set held out for early stopping.
  double val_ratio = 0.1;
  // false removes the category term from the model entirely (ablation).
  bool knowledge_enhancement = true;
  double init_range = 0.1;

  void Validate() const;
};

nlohmann::json ToJson(const TkeConfig& cfg);
TkeConfig TkeConfigFromJson(const nlohmann::json& j);

// Character vocabulary. Id 0 pads, id 1 stands for unseen characters.
class Vocab {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnknown = 1;

  Vocab() = default;
  // Ids by frequency descending, then code point. Throws ArgumentError on an
  // empty corpus.
  static Vocab Build(std::span<const std::string> texts);
  static Vocab FromTokens(std::u32string tokens);

  std::int32_t Id(char32_t c) const;
  std::size_t size() const { return tokens_.size() + 2; }
  // Characters for ids 2, 3, ...
  const std::u32string& tokens() const { return tokens_; }

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::u32string tokens_;
  std::unordered_map<char32_t, std::int32_t> ids_;
};

struct EncodedSample {
  std::vector<std::int32_t> tokens;  // pad_len entries
  std::vector<std::uint8_t> toxic;   // category ids in 0..5, same length
  Label label;
};

// Characters of the (normalized) text, truncated and padded to pad_len.
EncodedSample Encode(std::string_view text, const Vocab& vocab,
                     const Lexicon& lexicon, int pad_len);

// Encodes the samples that carry a label for the task.
std::vector<EncodedSample> EncodeTask(std::span<const ToxiSample> samples,
                                      Task task, const Vocab& vocab,
                                      const Lexicon& lexicon, int pad_len);

// Trainable tables.
//   word:     |V| x d      word embeddings
//   category: (m+1) x d    toxic category embeddings, row 0 = non-toxic
//   enc_w:    d x h,  enc_b: 1 x h
//   head_w:   h x k,  head_b: 1 x k
struct ModelParams {
  Matrix word;
  Matrix category;
  Matrix enc_w;
  Matrix enc_b;
  Matrix head_w;
  Matrix head_b;

  static constexpr std::size_t kCategoryRows = kNumCategories + 1;

  // Uniform [-range, range] weights, one seeded stream per block; zero
  // biases.
  static ModelParams Init(std::size_t vocab_size, const TkeConfig& cfg);
  ModelParams ZerosLike() const;

  std::array<Matrix*, 6> blocks();
  std::array<const Matrix*, 6> blocks() const;
  static std::array<std::string_view, 6> BlockNames();

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Row i = word[token_i] + lambda * category[toxic_i], one row per position.
Matrix EmbedEnhanced(const EncodedSample& sample, const ModelParams& params,
                     double lambda);

// Class scores (logits), inference mode. Throws ArgumentError on an all-pad
// sequence or shape mismatch.
std::vector<double> Forward(const EncodedSample& sample,
                            const ModelParams& params, const TkeConfig& cfg);

// Weighted cross-entropy for one sample. Single-label tasks: softmax CE times
// the true class weight. Group task: mean over labels of weight_j * BCE_j.
// Throws ArgumentError on non-finite scores.
double WeightedCrossEntropy(std::span<const double> scores, const Label& label,
                            Task task, std::span<const double> class_weights);

// Inverse label frequency normalized to mean 1 (group task: per-label
// positive frequency). Empty classes count as frequency 1.
std::vector<double> ClassWeights(std::span<const EncodedSample> samples,
                                 Task task);

// Mean loss over a batch and its gradient w.r.t. every parameter block.
// Inference mode (no dropout).
double BatchLossAndGradient(std::span<const EncodedSample> batch,
                            const ModelParams& params, const TkeConfig& cfg,
                            std::span<const double> class_weights,
                            ModelParams* grad);

struct GradCheckOptions {
  double step = 1e-5;
  // Self-test: flip the sign of the largest analytic gradient entry.
  bool corrupt = false;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_block;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

// Compares analytic gradients of every parameter entry against central
// finite differences; relative error |a - n| / max(|a| + |n|, 1e-6).
GradCheckResult GradCheck(const ModelParams& params,
                          std::span<const EncodedSample> batch,
                          const TkeConfig& cfg,
                          std::span<const double> class_weights,
                          const GradCheckOptions& options = {});

// A small random problem for gradient checking: random dims, lambda, task,
// token/category ids (with padding) and labels.
struct GradCheckCase {
  TkeConfig cfg;
  std::vector<EncodedSample> batch;
  ModelParams params;
  std::vector<double> class_weights;
};

GradCheckCase RandomGradCheckCase(std::uint64_t seed);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochStats> history;
  int best_epoch = 0;  // 1-based epoch whose params were returned
  double best_val_loss = 0.0;
  std::vector<double> class_weights;
};

// Adam on mini-batches with dropout on the pooled vector. A val_ratio share
// of the set is held out; training stops after `patience` epochs without
// validation-loss improvement and returns the best epoch's params.
// Deterministic for a fixed seed.
TrainResult Train(std::span<const EncodedSample> train, std::size_t vocab_size,
                  const TkeConfig& cfg);

struct Prediction {
  std::vector<Label> labels;
  std::vector<std::vector<double>> probabilities;
};

// Argmax for single-label tasks (ties to the lower class). Group task: every
// label with sigmoid >= 0.5, or the single most probable label when none
// clears the threshold.
Label Decide(std::span<const double> probabilities, Task task);
std::vector<double> Probabilities(std::span<const double> scores, Task task);

Prediction Predict(std::span<const EncodedSample> samples,
                   const ModelParams& params, const TkeConfig& cfg);

// Share of samples whose predicted label equals the gold label exactly.
double Accuracy(std::span<const EncodedSample> samples,
                std::span<const Label> predicted);

// Self-contained model file: config, vocabulary, lexicon and all matrices.
struct Checkpoint {
  TkeConfig config;
  Vocab vocab;
  Lexicon lexicon;
  ModelParams params;
};

inline constexpr int kCheckpointVersion = 1;

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);
nlohmann::json ToJson(const Checkpoint& ckpt);
Checkpoint CheckpointFromJson(const nlohmann::json& j);

}  // namespace toxicn

#endif  // TOXICN_TKE_HPP_
