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

#include "toxicn/tke.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "toxicn/error.hpp"
#include "toxicn/random.hpp"
#include "toxicn/utf8.hpp"

namespace toxicn {

namespace {

constexpr std::array<std::string_view, 4> kTaskNames = {"toxic", "type", "group",
                                                        "expression"};
constexpr std::array<std::string_view, 6> kBlockNames = {
    "word", "category", "enc_w", "enc_b", "head_w", "head_b"};

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow
double Softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

std::vector<double> Softmax(std::span<const double> s) {
  const double mx = *std::max_element(s.begin(), s.end());
  std::vector<double> p(s.size());
  double z = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    p[i] = std::exp(s[i] - mx);
    z += p[i];
  }
  for (auto& x : p) x /= z;
  return p;
}

void CheckShapes(const ModelParams& p, const TkeConfig& cfg) {
  const auto d = static_cast<std::size_t>(cfg.dim);
  const auto h = static_cast<std::size_t>(cfg.hidden);
  const auto k = NumOutputs(cfg.task);
  if (p.word.cols() != d || p.category.rows() != ModelParams::kCategoryRows ||
      p.category.cols() != d || p.enc_w.rows() != d || p.enc_w.cols() != h ||
      p.enc_b.rows() != 1 || p.enc_b.cols() != h || p.head_w.rows() != h ||
      p.head_w.cols() != k || p.head_b.rows() != 1 || p.head_b.cols() != k) {
    throw ArgumentError("model parameters do not match the configuration");
  }
}

// Intermediate values of one forward pass, kept for backpropagation.
struct Activations {
  std::vector<double> pooled;  // after dropout
  std::vector<double> mask;    // dropout scale per unit; empty when disabled
  std::vector<double> hidden;
  std::vector<double> scores;
  std::size_t count = 0;  // non-pad positions
};

void ForwardInto(const EncodedSample& x, const ModelParams& p,
                 const TkeConfig& cfg, Rng* dropout_rng, Activations& a) {
  const std::size_t d = p.word.cols();
  const std::size_t h = p.enc_w.cols();
  const std::size_t k = p.head_w.cols();
  if (x.toxic.size() != x.tokens.size()) {
    throw ArgumentError("token and category sequences differ in length");
  }

  a.pooled.assign(d, 0.0);
  a.count = 0;
  for (std::size_t i = 0; i < x.tokens.size(); ++i) {
    const auto tok = x.tokens[i];
    if (tok == Vocab::kPad) continue;
    if (tok < 0 || static_cast<std::size_t>(tok) >= p.word.rows()) {
      throw ArgumentError("token id " + std::to_string(tok) + " out of range");
    }
    const auto w = p.word.row(static_cast<std::size_t>(tok));
    if (cfg.knowledge_enhancement) {
      if (x.toxic[i] >= ModelParams::kCategoryRows) {
        throw ArgumentError("category id out of range");
      }
      const auto c = p.category.row(x.toxic[i]);
      for (std::size_t j = 0; j < d; ++j) a.pooled[j] += w[j] + cfg.lambda * c[j];
    } else {
      for (std::size_t j = 0; j < d; ++j) a.pooled[j] += w[j];
    }
    ++a.count;
  }
  if (a.count == 0) throw ArgumentError("empty sequence");
  for (auto& v : a.pooled) v /= static_cast<double>(a.count);

  a.mask.clear();
  if (dropout_rng != nullptr && cfg.dropout > 0.0) {
    a.mask.resize(d);
    const double keep = 1.0 / (1.0 - cfg.dropout);
    for (std::size_t j = 0; j < d; ++j) {
      a.mask[j] = dropout_rng->Uniform() < cfg.dropout ? 0.0 : keep;
      a.pooled[j] *= a.mask[j];
    }
  }

  a.hidden.assign(h, 0.0);
  for (std::size_t j = 0; j < h; ++j) a.hidden[j] = p.enc_b(0, j);
  for (std::size_t c = 0; c < d; ++c) {
    const double v = a.pooled[c];
    if (v == 0.0) continue;
    const auto u = p.enc_w.row(c);
    for (std::size_t j = 0; j < h; ++j) a.hidden[j] += v * u[j];
  }
  for (auto& v : a.hidden) v = std::tanh(v);

  a.scores.assign(k, 0.0);
  for (std::size_t t = 0; t < k; ++t) a.scores[t] = p.head_b(0, t);
  for (std::size_t j = 0; j < h; ++j) {
    const auto v = p.head_w.row(j);
    for (std::size_t t = 0; t < k; ++t) a.scores[t] += a.hidden[j] * v[t];
  }
}

// d loss / d scores
std::vector<double> ScoreGradient(std::span<const double> scores,
                                  const Label& label, Task task,
                                  std::span<const double> weights) {
  std::vector<double> g(scores.size());
  if (IsMultiLabel(task)) {
    const double inv = 1.0 / static_cast<double>(scores.size());
    for (std::size_t j = 0; j < scores.size(); ++j) {
      const double y = (label.groups >> j) & 1u ? 1.0 : 0.0;
      g[j] = weights[j] * inv * (Sigmoid(scores[j]) - y);
    }
  } else {
    const auto prob = Softmax(scores);
    const double w = weights[static_cast<std::size_t>(label.cls)];
    for (std::size_t t = 0; t < scores.size(); ++t) {
      g[t] = w * (prob[t] - (static_cast<int>(t) == label.cls ? 1.0 : 0.0));
    }
  }
  return g;
}

void Backward(const EncodedSample& x, const ModelParams& p,
              const TkeConfig& cfg, const Activations& a,
              std::span<const double> g, double scale, ModelParams& grad) {
  const std::size_t d = p.word.cols();
  const std::size_t h = p.enc_w.cols();
  const std::size_t k = p.head_w.cols();

  std::vector<double> da(h, 0.0);
  for (std::size_t j = 0; j < h; ++j) {
    const auto v = p.head_w.row(j);
    auto gv = grad.head_w.row(j);
    double dh = 0.0;
    for (std::size_t t = 0; t < k; ++t) {
      gv[t] += scale * a.hidden[j] * g[t];
      dh += v[t] * g[t];
    }
    da[j] = dh * (1.0 - a.hidden[j] * a.hidden[j]);
  }
  for (std::size_t t = 0; t < k; ++t) grad.head_b(0, t) += scale * g[t];
  for (std::size_t j = 0; j < h; ++j) grad.enc_b(0, j) += scale * da[j];

  std::vector<double> dpool(d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    const auto u = p.enc_w.row(c);
    auto gu = grad.enc_w.row(c);
    double acc = 0.0;
    for (std::size_t j = 0; j < h; ++j) {
      gu[j] += scale * a.pooled[c] * da[j];
      acc += u[j] * da[j];
    }
    dpool[c] = a.mask.empty() ? acc : acc * a.mask[c];
  }

  const double per_token = scale / static_cast<double>(a.count);
  for (std::size_t i = 0; i < x.tokens.size(); ++i) {
    const auto tok = x.tokens[i];
    if (tok == Vocab::kPad) continue;
    auto gw = grad.word.row(static_cast<std::size_t>(tok));
    for (std::size_t c = 0; c < d; ++c) gw[c] += per_token * dpool[c];
    if (cfg.knowledge_enhancement) {
      auto gc = grad.category.row(x.toxic[i]);
      for (std::size_t c = 0; c < d; ++c) {
        gc[c] += per_token * cfg.lambda * dpool[c];
      }
    }
  }
}

bool Correct(const EncodedSample& x, std::span<const double> scores, Task task) {
  return Decide(Probabilities(scores, task), task) == x.label;
}

struct Adam {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  explicit Adam(const ModelParams& like) : m(like.ZerosLike()), v(like.ZerosLike()) {}

  void Step(ModelParams& p, const ModelParams& g, double lr, bool update_category) {
    ++t;
    const double c1 = 1.0 - std::pow(kBeta1, t);
    const double c2 = 1.0 - std::pow(kBeta2, t);
    auto pb = p.blocks();
    auto gb = g.blocks();
    auto mb = m.blocks();
    auto vb = v.blocks();
    for (std::size_t b = 0; b < pb.size(); ++b) {
      if (b == 1 && !update_category) continue;
      auto pw = pb[b]->flat();
      auto gw = gb[b]->flat();
      auto mw = mb[b]->flat();
      auto vw = vb[b]->flat();
      for (std::size_t i = 0; i < pw.size(); ++i) {
        mw[i] = kBeta1 * mw[i] + (1.0 - kBeta1) * gw[i];
        vw[i] = kBeta2 * vw[i] + (1.0 - kBeta2) * gw[i] * gw[i];
        pw[i] -= lr * (mw[i] / c1) / (std::sqrt(vw[i] / c2) + kEps);
      }
    }
  }

  ModelParams m;
  ModelParams v;
  int t = 0;
};

void Zero(ModelParams& g) {
  for (auto* b : g.blocks()) std::fill(b->flat().begin(), b->flat().end(), 0.0);
}

struct EvalStats {
  double loss = 0.0;
  double accuracy = 0.0;
};

EvalStats Evaluate(std::span<const EncodedSample> data,
                   std::span<const std::size_t> idx, const ModelParams& p,
                   const TkeConfig& cfg, std::span<const double> weights) {
  EvalStats s;
  if (idx.empty()) return s;
  Activations a;
  std::size_t correct = 0;
  for (auto i : idx) {
    ForwardInto(data[i], p, cfg, nullptr, a);
    s.loss += WeightedCrossEntropy(a.scores, data[i].label, cfg.task, weights);
    if (Correct(data[i], a.scores, cfg.task)) ++correct;
  }
  s.loss /= static_cast<double>(idx.size());
  s.accuracy = static_cast<double>(correct) / static_cast<double>(idx.size());
  return s;
}

nlohmann::json MatrixJson(const Matrix& m) {
  nlohmann::json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::vector<double>(m.flat().begin(), m.flat().end());
  return j;
}

Matrix MatrixFromJson(const nlohmann::json& j, std::string_view name) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto& data = j.at("data");
  if (!data.is_array() || data.size() != rows * cols) {
    throw DataError("checkpoint matrix '" + std::string(name) +
                    "' has the wrong number of entries");
  }
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < data.size(); ++i) m.flat()[i] = data[i].get<double>();
  return m;
}

}  // namespace

std::string_view ToString(Task t) { return kTaskNames[static_cast<std::size_t>(t)]; }

std::optional<Task> ParseTask(std::string_view s) {
  for (std::size_t i = 0; i < kTaskNames.size(); ++i) {
    if (kTaskNames[i] == s) return static_cast<Task>(i);
  }
  return std::nullopt;
}

std::size_t NumOutputs(Task t) {
  switch (t) {
    case Task::kToxic:
    case Task::kType:
      return 2;
    case Task::kGroup:
      return kNumGroups;
    case Task::kExpression:
      return kNumExpressions;
  }
  return 2;
}

bool Applicable(const ToxiSample& s, Task t) {
  switch (t) {
    case Task::kToxic:
      return true;
    case Task::kType:
      return s.toxic;
    case Task::kGroup:
      return s.toxic && s.hate && !s.groups.empty();
    case Task::kExpression:
      return s.toxic && s.hate && s.expression.has_value();
  }
  return false;
}

Label LabelFor(const ToxiSample& s, Task t) {
  if (!Applicable(s, t)) {
    throw DataError("sample " + std::to_string(s.id) + " has no label for task " +
                    std::string(ToString(t)));
  }
  Label l;
  switch (t) {
    case Task::kToxic:
      l.cls = s.toxic ? 1 : 0;
      break;
    case Task::kType:
      l.cls = s.hate ? 1 : 0;
      break;
    case Task::kGroup:
      l.groups = s.groups.mask();
      break;
    case Task::kExpression:
      l.cls = static_cast<int>(*s.expression);
      break;
  }
  return l;
}

void TkeConfig::Validate() const {
  auto fail = [](const std::string& what) { throw ArgumentError(what); };
  if (dim <= 0 || hidden <= 0) fail("dimensions must be positive");
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail("lambda must lie in [0, 1]");
  if (pad_len <= 0) fail("pad_len must be positive");
  if (epochs <= 0) fail("epochs must be positive");
  if (batch <= 0) fail("batch must be positive");
  if (!(learning_rate >= 0.0)) fail("learning rate must be non-negative");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (patience <= 0) fail("patience must be positive");
  if (!(val_ratio >= 0.0 && val_ratio < 1.0)) fail("val_ratio must lie in [0, 1)");
  if (!(init_range > 0.0)) fail("init_range must be positive");
}

nlohmann::json ToJson(const TkeConfig& c) {
  nlohmann::json j;
  j["dim"] = c.dim;
  j["lambda"] = c.lambda;
  j["hidden"] = c.hidden;
  j["pad_len"] = c.pad_len;
  j["epochs"] = c.epochs;
  j["batch"] = c.batch;
  j["learning_rate"] = c.learning_rate;
  j["dropout"] = c.dropout;
  j["seed"] = c.seed;
  j["task"] = ToString(c.task);
  j["patience"] = c.patience;
  j["val_ratio"] = c.val_ratio;
  j["knowledge_enhancement"] = c.knowledge_enhancement;
  j["init_range"] = c.init_range;
  return j;
}

TkeConfig TkeConfigFromJson(const nlohmann::json& j) {
  TkeConfig c;
  c.dim = j.at("dim").get<int>();
  c.lambda = j.at("lambda").get<double>();
  c.hidden = j.at("hidden").get<int>();
  c.pad_len = j.at("pad_len").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.batch = j.at("batch").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.dropout = j.at("dropout").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  const auto task = ParseTask(j.at("task").get<std::string>());
  if (!task) throw DataError("unknown task in configuration");
  c.task = *task;
  c.patience = j.at("patience").get<int>();
  c.val_ratio = j.at("val_ratio").get<double>();
  c.knowledge_enhancement = j.at("knowledge_enhancement").get<bool>();
  c.init_range = j.at("init_range").get<double>();
  c.Validate();
  return c;
}

Vocab Vocab::Build(std::span<const std::string> texts) {
  std::map<char32_t, std::size_t> freq;
  for (const auto& t : texts) {
    for (char32_t c : utf8::Decode(t)) ++freq[c];
  }
  if (freq.empty()) throw ArgumentError("cannot build a vocabulary from an empty corpus");
  std::vector<std::pair<char32_t, std::size_t>> order(freq.begin(), freq.end());
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;  // ties keep code point order
  });
  std::u32string tokens;
  tokens.reserve(order.size());
  for (const auto& [c, n] : order) tokens.push_back(c);
  return FromTokens(std::move(tokens));
}

Vocab Vocab::FromTokens(std::u32string tokens) {
  Vocab v;
  v.tokens_ = std::move(tokens);
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    if (!v.ids_.emplace(v.tokens_[i], static_cast<std::int32_t>(i + 2)).second) {
      throw DataError("duplicate vocabulary token");
    }
  }
  return v;
}

std::int32_t Vocab::Id(char32_t c) const {
  auto it = ids_.find(c);
  return it == ids_.end() ? kUnknown : it->second;
}

EncodedSample Encode(std::string_view text, const Vocab& vocab,
                     const Lexicon& lexicon, int pad_len) {
  const auto chars = utf8::Decode(text);
  const auto categories = lexicon.TokenCategories(chars);
  const auto n = static_cast<std::size_t>(pad_len);
  EncodedSample x;
  x.tokens.assign(n, Vocab::kPad);
  x.toxic.assign(n, 0);
  for (std::size_t i = 0; i < std::min(n, chars.size()); ++i) {
    x.tokens[i] = vocab.Id(chars[i]);
    x.toxic[i] = categories[i];
  }
  return x;
}

std::vector<EncodedSample> EncodeTask(std::span<const ToxiSample> samples,
                                      Task task, const Vocab& vocab,
                                      const Lexicon& lexicon, int pad_len) {
  std::vector<EncodedSample> out;
  for (const auto& s : samples) {
    if (!Applicable(s, task)) continue;
    auto x = Encode(s.text, vocab, lexicon, pad_len);
    x.label = LabelFor(s, task);
    out.push_back(std::move(x));
  }
  return out;
}

ModelParams ModelParams::Init(std::size_t vocab_size, const TkeConfig& cfg) {
  cfg.Validate();
  const auto d = static_cast<std::size_t>(cfg.dim);
  const auto h = static_cast<std::size_t>(cfg.hidden);
  const auto k = NumOutputs(cfg.task);
  ModelParams p;
  p.word = Matrix(vocab_size, d);
  p.category = Matrix(kCategoryRows, d);
  p.enc_w = Matrix(d, h);
  p.enc_b = Matrix(1, h);
  p.head_w = Matrix(h, k);
  p.head_b = Matrix(1, k);
  auto fill = [&](Matrix& m, std::string_view stream) {
    Rng rng(cfg.seed, stream);
    for (auto& v : m.flat()) v = rng.Uniform(-cfg.init_range, cfg.init_range);
  };
  fill(p.word, "init.word");
  fill(p.category, "init.category");
  fill(p.enc_w, "init.enc_w");
  fill(p.head_w, "init.head_w");
  return p;
}

ModelParams ModelParams::ZerosLike() const {
  ModelParams z;
  z.word = Matrix(word.rows(), word.cols());
  z.category = Matrix(category.rows(), category.cols());
  z.enc_w = Matrix(enc_w.rows(), enc_w.cols());
  z.enc_b = Matrix(enc_b.rows(), enc_b.cols());
  z.head_w = Matrix(head_w.rows(), head_w.cols());
  z.head_b = Matrix(head_b.rows(), head_b.cols());
  return z;
}

std::array<Matrix*, 6> ModelParams::blocks() {
  return {&word, &category, &enc_w, &enc_b, &head_w, &head_b};
}

std::array<const Matrix*, 6> ModelParams::blocks() const {
  return {&word, &category, &enc_w, &enc_b, &head_w, &head_b};
}

std::array<std::string_view, 6> ModelParams::BlockNames() { return kBlockNames; }

Matrix EmbedEnhanced(const EncodedSample& x, const ModelParams& p,
                     double lambda) {
  if (x.toxic.size() != x.tokens.size()) {
    throw ArgumentError("token and category sequences differ in length");
  }
  const std::size_t d = p.word.cols();
  Matrix out(x.tokens.size(), d);
  for (std::size_t i = 0; i < x.tokens.size(); ++i) {
    const auto tok = x.tokens[i];
    if (tok < 0 || static_cast<std::size_t>(tok) >= p.word.rows()) {
      throw ArgumentError("token id " + std::to_string(tok) + " out of range");
    }
    if (x.toxic[i] >= p.category.rows()) {
      throw ArgumentError("category id out of range");
    }
    const auto w = p.word.row(static_cast<std::size_t>(tok));
    const auto c = p.category.row(x.toxic[i]);
    auto r = out.row(i);
    for (std::size_t j = 0; j < d; ++j) r[j] = w[j] + lambda * c[j];
  }
  return out;
}

std::vector<double> Forward(const EncodedSample& x, const ModelParams& p,
                            const TkeConfig& cfg) {
  CheckShapes(p, cfg);
  Activations a;
  ForwardInto(x, p, cfg, nullptr, a);
  return a.scores;
}

double WeightedCrossEntropy(std::span<const double> scores, const Label& label,
                            Task task, std::span<const double> weights) {
  if (scores.size() != NumOutputs(task) || weights.size() != scores.size()) {
    throw ArgumentError("score/weight length does not match the task");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw ArgumentError("non-finite score");
  }
  if (IsMultiLabel(task)) {
    double total = 0.0;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      const double y = (label.groups >> j) & 1u ? 1.0 : 0.0;
      total += weights[j] * (Softplus(scores[j]) - y * scores[j]);
    }
    return total / static_cast<double>(scores.size());
  }
  if (label.cls < 0 || static_cast<std::size_t>(label.cls) >= scores.size()) {
    throw ArgumentError("label out of range");
  }
  const double mx = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double s : scores) z += std::exp(s - mx);
  const double nll = mx + std::log(z) - scores[static_cast<std::size_t>(label.cls)];
  return weights[static_cast<std::size_t>(label.cls)] * std::max(nll, 0.0);
}

std::vector<double> ClassWeights(std::span<const EncodedSample> samples,
                                 Task task) {
  const std::size_t k = NumOutputs(task);
  std::vector<double> count(k, 0.0);
  for (const auto& x : samples) {
    if (IsMultiLabel(task)) {
      for (std::size_t j = 0; j < k; ++j) {
        if ((x.label.groups >> j) & 1u) count[j] += 1.0;
      }
    } else {
      count[static_cast<std::size_t>(x.label.cls)] += 1.0;
    }
  }
  std::vector<double> w(k);
  double sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    w[c] = 1.0 / std::max(count[c], 1.0);
    sum += w[c];
  }
  for (auto& v : w) v *= static_cast<double>(k) / sum;
  return w;
}

double BatchLossAndGradient(std::span<const EncodedSample> batch,
                            const ModelParams& params, const TkeConfig& cfg,
                            std::span<const double> weights,
                            ModelParams* grad) {
  CheckShapes(params, cfg);
  if (batch.empty()) throw ArgumentError("empty batch");
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  Activations a;
  for (const auto& x : batch) {
    ForwardInto(x, params, cfg, nullptr, a);
    loss += WeightedCrossEntropy(a.scores, x.label, cfg.task, weights);
    if (grad != nullptr) {
      const auto g = ScoreGradient(a.scores, x.label, cfg.task, weights);
      Backward(x, params, cfg, a, g, scale, *grad);
    }
  }
  return loss * scale;
}

GradCheckResult GradCheck(const ModelParams& params,
                          std::span<const EncodedSample> batch,
                          const TkeConfig& cfg,
                          std::span<const double> weights,
                          const GradCheckOptions& options) {
  ModelParams analytic = params.ZerosLike();
  BatchLossAndGradient(batch, params, cfg, weights, &analytic);

  auto blocks = analytic.blocks();
  if (options.corrupt) {
    double* largest = nullptr;
    for (auto* b : blocks) {
      for (auto& v : b->flat()) {
        if (largest == nullptr || std::abs(v) > std::abs(*largest)) largest = &v;
      }
    }
    if (largest != nullptr) *largest = -*largest;
  }

  GradCheckResult r;
  ModelParams probe = params;
  auto probe_blocks = probe.blocks();
  const auto names = ModelParams::BlockNames();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (b == 1 && !cfg.knowledge_enhancement) continue;
    auto values = probe_blocks[b]->flat();
    const auto grads = blocks[b]->flat();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + options.step;
      const double up = BatchLossAndGradient(batch, probe, cfg, weights, nullptr);
      values[i] = saved - options.step;
      const double down = BatchLossAndGradient(batch, probe, cfg, weights, nullptr);
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double err = std::abs(grads[i] - numeric) /
                         std::max(std::abs(grads[i]) + std::abs(numeric), 1e-6);
      ++r.checked;
      if (err > r.max_rel_error) {
        r.max_rel_error = err;
        r.worst_block = std::string(names[b]);
        r.worst_index = i;
      }
    }
  }
  return r;
}

GradCheckCase RandomGradCheckCase(std::uint64_t seed) {
  Rng rng(seed, "gradcheck");
  GradCheckCase c;
  c.cfg.dim = 2 + static_cast<int>(rng.Below(7));
  c.cfg.hidden = 2 + static_cast<int>(rng.Below(5));
  c.cfg.task = kAllTasks[rng.Below(kAllTasks.size())];
  c.cfg.lambda = rng.Below(5) == 0 ? 0.0 : rng.Uniform();
  c.cfg.pad_len = 3 + static_cast<int>(rng.Below(6));
  c.cfg.seed = seed;
  c.cfg.init_range = 0.5;
  const std::size_t vocab = 4 + rng.Below(8);
  const std::size_t n = 1 + rng.Below(8);
  for (std::size_t s = 0; s < n; ++s) {
    EncodedSample x;
    const auto len = 1 + rng.Below(static_cast<std::uint64_t>(c.cfg.pad_len));
    x.tokens.assign(static_cast<std::size_t>(c.cfg.pad_len), Vocab::kPad);
    x.toxic.assign(static_cast<std::size_t>(c.cfg.pad_len), 0);
    for (std::size_t i = 0; i < len; ++i) {
      x.tokens[i] = 1 + static_cast<std::int32_t>(rng.Below(vocab - 1));
      x.toxic[i] = rng.Below(2) ? 0 : static_cast<std::uint8_t>(rng.Below(
                                          ModelParams::kCategoryRows));
    }
    if (IsMultiLabel(c.cfg.task)) {
      x.label.groups = static_cast<std::uint8_t>(1 + rng.Below(15));
    } else {
      x.label.cls = static_cast<int>(rng.Below(NumOutputs(c.cfg.task)));
    }
    c.batch.push_back(std::move(x));
  }
  c.params = ModelParams::Init(vocab, c.cfg);
  // non-zero biases so every block is exercised away from the origin
  for (auto* b : {&c.params.enc_b, &c.params.head_b}) {
    for (auto& v : b->flat()) v = rng.Uniform(-0.5, 0.5);
  }
  for (std::size_t j = 0; j < NumOutputs(c.cfg.task); ++j) {
    c.class_weights.push_back(rng.Uniform(0.5, 2.0));
  }
  return c;
}

TrainResult Train(std::span<const EncodedSample> data, std::size_t vocab_size,
                  const TkeConfig& cfg) {
  cfg.Validate();
  if (data.empty()) throw ArgumentError("empty training set");
  const std::size_t k = NumOutputs(cfg.task);
  for (const auto& x : data) {
    const bool bad = IsMultiLabel(cfg.task)
                         ? (x.label.groups == 0 || x.label.groups >> k)
                         : (x.label.cls < 0 || static_cast<std::size_t>(x.label.cls) >= k);
    if (bad) throw DataError("label does not fit task " + std::string(ToString(cfg.task)));
  }

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<std::size_t> fit, val;
  const std::size_t n_val =
      (cfg.val_ratio > 0.0 && data.size() >= 10)
          ? std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(
                                         cfg.val_ratio * data.size() + 0.5)))
          : 0;
  if (n_val > 0) {
    Rng split(cfg.seed, "validation");
    split.Shuffle(order);
    val.assign(order.begin(), order.begin() + n_val);
    fit.assign(order.begin() + n_val, order.end());
    std::sort(val.begin(), val.end());
    std::sort(fit.begin(), fit.end());
  } else {
    fit = order;
  }
  const auto& monitor = val.empty() ? fit : val;

  std::vector<EncodedSample> fit_samples;
  fit_samples.reserve(fit.size());
  for (auto i : fit) fit_samples.push_back(data[i]);

  TrainResult result;
  result.class_weights = ClassWeights(fit_samples, cfg.task);
  const auto& weights = result.class_weights;

  ModelParams params = ModelParams::Init(vocab_size, cfg);
  ModelParams grad = params.ZerosLike();
  Adam adam(params);
  Rng shuffle(cfg.seed, "shuffle");
  Rng dropout(cfg.seed, "dropout");

  result.params = params;
  result.best_val_loss = std::numeric_limits<double>::infinity();
  int stale = 0;
  Activations a;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle.Shuffle(fit);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t begin = 0; begin < fit.size();
         begin += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t end =
          std::min(fit.size(), begin + static_cast<std::size_t>(cfg.batch));
      const double scale = 1.0 / static_cast<double>(end - begin);
      Zero(grad);
      for (std::size_t b = begin; b < end; ++b) {
        const auto& x = data[fit[b]];
        ForwardInto(x, params, cfg, &dropout, a);
        loss_sum += WeightedCrossEntropy(a.scores, x.label, cfg.task, weights);
        if (Correct(x, a.scores, cfg.task)) ++correct;
        const auto g = ScoreGradient(a.scores, x.label, cfg.task, weights);
        Backward(x, params, cfg, a, g, scale, grad);
      }
      adam.Step(params, grad, cfg.learning_rate, cfg.knowledge_enhancement);
    }

    EpochStats st;
    st.epoch = epoch;
    st.train_loss = loss_sum / static_cast<double>(fit.size());
    st.train_accuracy = static_cast<double>(correct) / static_cast<double>(fit.size());
    const auto ev = Evaluate(data, monitor, params, cfg, weights);
    st.val_loss = ev.loss;
    st.val_accuracy = ev.accuracy;
    result.history.push_back(st);

    if (st.val_loss < result.best_val_loss) {
      result.best_val_loss = st.val_loss;
      result.best_epoch = epoch;
      result.params = params;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  return result;
}

std::vector<double> Probabilities(std::span<const double> scores, Task task) {
  if (IsMultiLabel(task)) {
    std::vector<double> p(scores.size());
    for (std::size_t j = 0; j < scores.size(); ++j) p[j] = Sigmoid(scores[j]);
    return p;
  }
  return Softmax(scores);
}

Label Decide(std::span<const double> prob, Task task) {
  if (prob.size() != NumOutputs(task)) {
    throw ArgumentError("probability vector does not match the task");
  }
  Label l;
  const auto best = static_cast<std::size_t>(
      std::max_element(prob.begin(), prob.end()) - prob.begin());
  if (!IsMultiLabel(task)) {
    l.cls = static_cast<int>(best);
    return l;
  }
  for (std::size_t j = 0; j < prob.size(); ++j) {
    if (prob[j] >= 0.5) l.groups |= static_cast<std::uint8_t>(1u << j);
  }
  if (l.groups == 0) l.groups = static_cast<std::uint8_t>(1u << best);
  return l;
}

Prediction Predict(std::span<const EncodedSample> samples,
                   const ModelParams& params, const TkeConfig& cfg) {
  CheckShapes(params, cfg);
  Prediction out;
  out.labels.reserve(samples.size());
  out.probabilities.reserve(samples.size());
  Activations a;
  for (const auto& x : samples) {
    ForwardInto(x, params, cfg, nullptr, a);
    auto prob = Probabilities(a.scores, cfg.task);
    out.labels.push_back(Decide(prob, cfg.task));
    out.probabilities.push_back(std::move(prob));
  }
  return out;
}

double Accuracy(std::span<const EncodedSample> samples,
                std::span<const Label> predicted) {
  if (samples.size() != predicted.size()) {
    throw ArgumentError("prediction count does not match sample count");
  }
  if (samples.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].label == predicted[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

nlohmann::json ToJson(const Checkpoint& ckpt) {
  nlohmann::json j;
  j["format"] = "toxicn-tke";
  j["version"] = kCheckpointVersion;
  j["config"] = ToJson(ckpt.config);
  nlohmann::json vocab = nlohmann::json::array();
  for (char32_t c : ckpt.vocab.tokens()) {
    std::string s;
    utf8::Append(s, c);
    vocab.push_back(std::move(s));
  }
  j["vocab"] = std::move(vocab);
  nlohmann::json lex = nlohmann::json::array();
  for (const auto& e : ckpt.lexicon.entries()) {
    lex.push_back({e.term, ToString(e.category), ToString(e.surface),
                   ToString(e.rule_tag)});
  }
  j["lexicon"] = std::move(lex);
  const auto names = ModelParams::BlockNames();
  const auto blocks = ckpt.params.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    j["params"][std::string(names[b])] = MatrixJson(*blocks[b]);
  }
  return j;
}

Checkpoint CheckpointFromJson(const nlohmann::json& j) {
  try {
    if (j.at("format") != "toxicn-tke") throw DataError("not a toxicn checkpoint");
    if (j.at("version") != kCheckpointVersion) {
      throw DataError("unsupported checkpoint version " + j.at("version").dump());
    }
    Checkpoint c;
    c.config = TkeConfigFromJson(j.at("config"));
    std::u32string tokens;
    for (const auto& t : j.at("vocab")) {
      const auto cps = utf8::Decode(t.get<std::string>());
      if (cps.size() != 1) throw DataError("vocabulary entries must be single characters");
      tokens.push_back(cps[0]);
    }
    c.vocab = Vocab::FromTokens(std::move(tokens));
    std::vector<InsultEntry> entries;
    for (const auto& row : j.at("lexicon")) {
      InsultEntry e;
      e.term = row.at(0).get<std::string>();
      const auto cat = ParseCategory(row.at(1).get<std::string>());
      const auto surface = ParseSurface(row.at(2).get<std::string>());
      const auto tag = ParseRuleTag(row.at(3).get<std::string>());
      if (!cat || !surface || !tag) throw DataError("bad lexicon row in checkpoint");
      e.category = *cat;
      e.surface = *surface;
      e.rule_tag = *tag;
      entries.push_back(std::move(e));
    }
    c.lexicon = Lexicon(std::move(entries));
    const auto names = ModelParams::BlockNames();
    auto blocks = c.params.blocks();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      *blocks[b] = MatrixFromJson(j.at("params").at(std::string(names[b])), names[b]);
    }
    if (c.params.word.rows() != c.vocab.size()) {
      throw DataError("word matrix rows do not match the vocabulary");
    }
    CheckShapes(c.params, c.config);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ArgumentError& e) {
    throw DataError(std::string("inconsistent checkpoint: ") + e.what());
  }
}

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint", path.string());
  out << ToJson(ckpt).dump() << '\n';
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint", path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what(), path.string());
  }
  return CheckpointFromJson(j);
}

}  // namespace toxicn
