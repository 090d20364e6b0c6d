// Copyright 2026 The Polydec Authors.
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

#include "polydec/neural.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "polydec/automaton.hpp"
#include "polydec/errors.hpp"

namespace polydec {
namespace {

using Expr = ad::Tape::Expr;

// Platform-independent uniform values in [-range, range).
class UniformSource {
 public:
  explicit UniformSource(uint64_t seed) : rng_(seed) {}
  double Next(double range) {
    double unit = static_cast<double>(rng_() >> 11) * 0x1p-53;
    return (2.0 * unit - 1.0) * range;
  }
  uint64_t NextIndex(uint64_t bound) { return rng_() % bound; }

 private:
  std::mt19937_64 rng_;
};

void InitUniform(ad::Parameter& p, UniformSource& rng, double range = 0.1) {
  for (int c = 0; c < p.value.cols(); ++c) {
    for (int r = 0; r < p.value.rows(); ++r) {
      p.value(r, c) = rng.Next(range);
    }
  }
}

Vocabulary BuildVocabulary(const std::set<std::string>& tokens,
                           bool decoder_side) {
  Vocabulary vocab;
  auto add = [&vocab](const std::string& t) {
    if (vocab.index.emplace(t, vocab.size()).second) {
      vocab.tokens.push_back(t);
    }
  };
  add(kUnkToken);
  if (decoder_side) {
    add(kBosToken);
    add(kEosLabel);
  }
  for (const auto& t : tokens) add(t);
  vocab.unk = vocab.index.at(kUnkToken);
  if (decoder_side) {
    vocab.bos = vocab.index.at(kBosToken);
    vocab.eos = vocab.index.at(kEosLabel);
  }
  return vocab;
}

uint64_t Fnv1a(const std::vector<std::string>& tokens) {
  uint64_t h = 1469598103934665603ull;
  for (const auto& t : tokens) {
    for (char c : t) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

// Tape plus a cache of parameter expressions, so each parameter enters a
// tape once per evaluation.
struct NeuralModel::Wire {
  ad::Tape tape;
  std::unordered_map<const ad::Parameter*, Expr> cache;

  Expr P(const ad::Parameter& p) {
    auto it = cache.find(&p);
    if (it != cache.end()) return it->second;
    Expr e = tape.Param(const_cast<ad::Parameter*>(&p));
    cache.emplace(&p, e);
    return e;
  }
  Expr Row(const ad::Parameter& p, int row) {
    return tape.ParamRow(const_cast<ad::Parameter*>(&p), row);
  }
};

struct NeuralModel::StepExprs {
  Expr logits;
  Expr alpha;
  Expr attn_scores;
  Expr new_h;
  Expr new_c;
};

NeuralModel::NeuralModel(const NeuralConfig& config,
                         const std::set<std::string>& source_tokens,
                         const std::set<std::string>& target_tokens,
                         uint64_t seed)
    : config_(config),
      src_vocab_(BuildVocabulary(source_tokens, false)),
      tgt_vocab_(BuildVocabulary(target_tokens, true)),
      src_embed_("src_embed", src_vocab_.size(), config.src_embed_dim),
      out_embed_("out_embed", tgt_vocab_.size(), config.out_embed_dim),
      enc_fwd_("enc_fwd", config.enc_hidden, config.src_embed_dim),
      enc_bwd_("enc_bwd", config.enc_hidden, config.src_embed_dim),
      dec_("dec", config.dec_hidden,
           config.out_embed_dim + 2 * config.enc_hidden),
      attn_w_("attn.w", config.attn_hidden,
              config.dec_hidden + 2 * config.enc_hidden),
      attn_b_("attn.b", config.attn_hidden, 1),
      attn_v_("attn.v", 1, config.attn_hidden),
      out_w_("out_mlp.w", config.out_hidden,
             2 * config.enc_hidden + config.dec_hidden),
      out_b_("out_mlp.b", config.out_hidden, 1),
      wo_("wo", tgt_vocab_.size(), config.out_hidden),
      bo_("bo", tgt_vocab_.size(), 1),
      copy_w_("copy.w", 1, 1),
      copy_b_("copy.b", 1, 1) {
  if (config.epsilon <= 0) throw DataError("epsilon must be positive");
  UniformSource rng(seed);
  for (ad::Parameter* p : Parameters()) InitUniform(*p, rng);
  copy_w_.value(0, 0) = 1.0;
  copy_b_.value(0, 0) = 0.0;
}

std::vector<ad::Parameter*> NeuralModel::Parameters() {
  std::vector<ad::Parameter*> all = {
      &src_embed_,  &out_embed_, &enc_fwd_.wx, &enc_fwd_.wh, &enc_fwd_.b,
      &enc_bwd_.wx, &enc_bwd_.wh, &enc_bwd_.b, &dec_.wx,     &dec_.wh,
      &dec_.b,      &attn_w_,    &attn_b_,     &attn_v_,     &out_w_,
      &out_b_,      &wo_,        &bo_};
  if (config_.copy_enabled) {
    all.push_back(&copy_w_);
    all.push_back(&copy_b_);
  }
  return all;
}

std::vector<int> NeuralModel::WireEncoderIds(const TokenSeq& x) const {
  std::vector<int> ids;
  ids.reserve(x.size());
  for (const auto& t : x) ids.push_back(src_vocab_.Id(t));
  return ids;
}

Expr NeuralModel::WireLstmStep(Wire& w, const Lstm& lstm, int hidden,
                               Expr input, Expr& h, Expr& c) const {
  auto& t = w.tape;
  Expr gates = t.Add(t.Add(t.MatMul(w.P(lstm.wx), input),
                           t.MatMul(w.P(lstm.wh), h)),
                     w.P(lstm.b));
  Expr in_gate = t.Logistic(t.SliceRows(gates, 0, hidden));
  Expr forget_gate = t.Logistic(t.SliceRows(gates, hidden, hidden));
  Expr out_gate = t.Logistic(t.SliceRows(gates, 2 * hidden, hidden));
  Expr update = t.Tanh(t.SliceRows(gates, 3 * hidden, hidden));
  c = t.Add(t.CMult(forget_gate, c), t.CMult(in_gate, update));
  h = t.CMult(out_gate, t.Tanh(c));
  return h;
}

std::vector<Expr> NeuralModel::WireEncoder(Wire& w,
                                           const std::vector<int>& ids) const {
  auto& t = w.tape;
  const int n = static_cast<int>(ids.size());
  const int hidden = config_.enc_hidden;
  ad::Matrix zero = ad::Matrix::Zero(hidden, 1);

  std::vector<Expr> embeds;
  embeds.reserve(n);
  for (int id : ids) embeds.push_back(w.Row(src_embed_, id));

  std::vector<Expr> fwd(n), bwd(n);
  Expr h = t.Input(zero), c = t.Input(zero);
  for (int j = 0; j < n; ++j) {
    fwd[j] = WireLstmStep(w, enc_fwd_, hidden, embeds[j], h, c);
  }
  h = t.Input(zero);
  c = t.Input(zero);
  for (int j = n - 1; j >= 0; --j) {
    bwd[j] = WireLstmStep(w, enc_bwd_, hidden, embeds[j], h, c);
  }

  std::vector<Expr> annots(n);
  for (int j = 0; j < n; ++j) annots[j] = t.ConcatRows({fwd[j], bwd[j]});
  return annots;
}

NeuralModel::StepExprs NeuralModel::WireStep(
    Wire& w, Expr h, Expr c, int last_token,
    const std::vector<Expr>& annots) const {
  auto& t = w.tape;
  const int n = static_cast<int>(annots.size());

  // e_{i,j} = v . tanh(W [g_{i-1}; h_j] + b), one scalar per position.
  std::vector<Expr> scores(n);
  for (int j = 0; j < n; ++j) {
    Expr hidden = t.Tanh(
        t.Affine(w.P(attn_w_), t.ConcatRows({h, annots[j]}), w.P(attn_b_)));
    scores[j] = t.MatMul(w.P(attn_v_), hidden);
  }
  Expr e = t.ConcatRows(scores);
  Expr alpha = t.Softmax(e);

  Expr context = t.ScaleByScalar(t.PickRow(alpha, 0), annots[0]);
  for (int j = 1; j < n; ++j) {
    context =
        t.Add(context, t.ScaleByScalar(t.PickRow(alpha, j), annots[j]));
  }

  Expr dec_input = t.ConcatRows({w.Row(out_embed_, last_token), context});
  Expr new_h = h, new_c = c;
  WireLstmStep(w, dec_, config_.dec_hidden, dec_input, new_h, new_c);

  Expr eta = t.Tanh(
      t.Affine(w.P(out_w_), t.ConcatRows({context, new_h}), w.P(out_b_)));
  Expr logits = t.Affine(w.P(wo_), eta, w.P(bo_));

  return StepExprs{logits, alpha, e, new_h, new_c};
}

ad::Matrix NeuralModel::BiasMatrix(const TokenSeq& x,
                                   const TranslationTable& inverse) const {
  ad::Matrix bias(tgt_vocab_.size(), static_cast<int>(x.size()));
  for (int k = 0; k < tgt_vocab_.size(); ++k) {
    for (size_t j = 0; j < x.size(); ++j) {
      bias(k, static_cast<int>(j)) = inverse.prob(tgt_vocab_.tokens[k], x[j]);
    }
  }
  return bias;
}

Expr NeuralModel::WireBias(Wire& w, Expr logits, Expr alpha,
                           const ad::Matrix& bias) const {
  auto& t = w.tape;
  Expr weighted = t.MatMul(t.Input(bias), alpha);
  return t.Add(logits, t.Log(t.AddConst(weighted, config_.epsilon)));
}

Expr NeuralModel::WireCopyLogits(Wire& w, Expr attn_scores) const {
  auto& t = w.tape;
  return t.AddBroadcastScalar(w.P(copy_b_),
                              t.ScaleByScalar(w.P(copy_w_), attn_scores));
}

EncoderOutput NeuralModel::Encode(const TokenSeq& x) const {
  if (x.empty()) throw DataError("cannot encode an empty input");
  EncoderOutput out;
  out.tokens = x;
  out.ids = WireEncoderIds(x);
  Wire w;
  auto annots = WireEncoder(w, out.ids);
  out.annotations.reserve(annots.size());
  for (Expr a : annots) out.annotations.push_back(w.tape.value(a));
  return out;
}

DecoderStepState NeuralModel::InitState() const {
  DecoderStepState state;
  state.h = ad::Vector::Zero(config_.dec_hidden);
  state.c = ad::Vector::Zero(config_.dec_hidden);
  state.last_token = tgt_vocab_.bos;
  state.step_index = 0;
  return state;
}

StepResult NeuralModel::Step(const DecoderStepState& state,
                             const EncoderOutput& enc) const {
  Wire w;
  auto& t = w.tape;
  std::vector<Expr> annots;
  annots.reserve(enc.annotations.size());
  for (const auto& a : enc.annotations) annots.push_back(t.Input(a));
  Expr h = t.Input(state.h), c = t.Input(state.c);
  StepExprs s = WireStep(w, h, c, state.last_token, annots);

  StepResult result;
  result.logits = t.value(s.logits);
  result.alpha = t.value(s.alpha);
  result.attn_scores = t.value(s.attn_scores);
  result.new_h = t.value(s.new_h);
  result.new_c = t.value(s.new_c);
  return result;
}

std::pair<ad::Vector, ad::Vector> NeuralModel::Attention(
    const DecoderStepState& state, const EncoderOutput& enc) const {
  StepResult step = Step(state, enc);
  ad::Vector context = ad::Vector::Zero(enc.annotations.front().size());
  for (size_t j = 0; j < enc.annotations.size(); ++j) {
    context += step.alpha(static_cast<int>(j)) * enc.annotations[j];
  }
  return {step.alpha, context};
}

ad::Vector NeuralModel::BiasLogits(const ad::Vector& logits,
                                   const ad::Vector& alpha,
                                   const EncoderOutput& enc,
                                   const TranslationTable& inverse) const {
  ad::Vector weighted = BiasMatrix(enc.tokens, inverse) * alpha;
  return logits.array() + (weighted.array() + config_.epsilon).log();
}

EmissionResult NeuralModel::Emit(const DecoderStepState& state,
                                 const EncoderOutput& enc,
                                 const TranslationTable* inverse) const {
  if (config_.bias_enabled && inverse == nullptr) {
    throw DataError("model is bias-enabled but no inverse table was given");
  }
  EmissionResult result;
  result.step = Step(state, enc);

  ad::Vector write = result.step.logits;
  if (config_.bias_enabled) {
    write = BiasLogits(write, result.step.alpha, enc, *inverse);
  }

  const int v = static_cast<int>(write.size());
  if (config_.copy_enabled) {
    const int n = static_cast<int>(enc.annotations.size());
    ad::Vector all(v + n);
    all.head(v) = write;
    all.tail(n) = (copy_w_.value(0, 0) * result.step.attn_scores.array() +
                   copy_b_.value(0, 0))
                      .matrix();
    double m = all.maxCoeff();
    ad::Vector probs = (all.array() - m).exp();
    probs /= probs.sum();
    result.write_probs = probs.head(v);
    result.copy_probs = probs.tail(n);
  } else {
    double m = write.maxCoeff();
    result.write_probs = (write.array() - m).exp();
    result.write_probs /= result.write_probs.sum();
  }
  return result;
}

DecoderStepState NeuralModel::Advance(const StepResult& step, int token_id,
                                      int step_index) const {
  DecoderStepState state;
  state.h = step.new_h;
  state.c = step.new_c;
  state.last_token = token_id;
  state.step_index = step_index;
  return state;
}

double NeuralModel::EmissionProb(const EmissionResult& emission,
                                 const EncoderOutput& enc,
                                 const std::string& label,
                                 bool* unknown) const {
  int id = tgt_vocab_.Id(label);
  if (unknown != nullptr) *unknown = !tgt_vocab_.Contains(label);
  double p = emission.write_probs(id);
  if (config_.copy_enabled) {
    for (size_t j = 0; j < enc.tokens.size(); ++j) {
      if (enc.tokens[j] == label) p += emission.copy_probs(static_cast<int>(j));
    }
  }
  return p;
}

double NeuralModel::SequenceScore(const TokenSeq& x, const TokenSeq& labels,
                                  const TranslationTable* inverse) const {
  EncoderOutput enc = Encode(x);
  DecoderStepState state = InitState();
  double total = 0.0;
  TokenSeq with_eos = labels;
  with_eos.push_back(kEosLabel);
  for (size_t i = 0; i < with_eos.size(); ++i) {
    EmissionResult em = Emit(state, enc, inverse);
    total -= std::log(EmissionProb(em, enc, with_eos[i]));
    state = Advance(em.step, tgt_vocab_.Id(with_eos[i]),
                    static_cast<int>(i) + 1);
  }
  return total;
}

double NeuralModel::ExampleLoss(const Pair& pair,
                                const TranslationTable* inverse,
                                bool backward) {
  if (config_.bias_enabled && inverse == nullptr) {
    throw DataError("model is bias-enabled but no inverse table was given");
  }
  Wire w;
  auto& t = w.tape;
  auto ids = WireEncoderIds(pair.source_tokens);
  auto annots = WireEncoder(w, ids);

  ad::Matrix bias;
  if (config_.bias_enabled) bias = BiasMatrix(pair.source_tokens, *inverse);

  TokenSeq targets = pair.target_tokens;
  targets.push_back(kEosLabel);

  ad::Matrix zero = ad::Matrix::Zero(config_.dec_hidden, 1);
  Expr h = t.Input(zero), c = t.Input(zero);
  int last = tgt_vocab_.bos;
  Expr total = -1;
  for (const auto& gold : targets) {
    StepExprs s = WireStep(w, h, c, last, annots);
    Expr logits = s.logits;
    if (config_.bias_enabled) logits = WireBias(w, logits, s.alpha, bias);

    int gold_id = tgt_vocab_.Id(gold);
    std::vector<int> subset = {gold_id};
    if (config_.copy_enabled) {
      logits = t.ConcatRows({logits, WireCopyLogits(w, s.attn_scores)});
      for (size_t j = 0; j < pair.source_tokens.size(); ++j) {
        if (pair.source_tokens[j] == gold) {
          subset.push_back(tgt_vocab_.size() + static_cast<int>(j));
        }
      }
    }
    Expr loss = t.NegLogSoftmaxSubset(logits, std::move(subset));
    total = total < 0 ? loss : t.Add(total, loss);

    h = s.new_h;
    c = s.new_c;
    last = gold_id;
  }
  if (backward) t.Backward(total);
  return t.scalar(total);
}

std::vector<double> NeuralModel::Train(const ParallelCorpus& corpus,
                                       int epochs, double learning_rate,
                                       uint64_t seed,
                                       const TranslationTable* inverse) {
  if (epochs < 1) throw TrainError("need at least one epoch");
  if (corpus.pairs.empty()) throw DataError("cannot train on an empty corpus");

  auto params = Parameters();
  UniformSource rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<size_t> order(corpus.pairs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<double> trace;
  std::vector<double> losses(corpus.pairs.size());
  for (int epoch = 0; epoch < epochs; ++epoch) {
    // Fisher-Yates with our own index source keeps the permutation
    // platform-independent.
    for (size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[rng.NextIndex(i + 1)]);
    }
    for (size_t idx : order) {
      for (ad::Parameter* p : params) p->ZeroGrad();
      losses[idx] = ExampleLoss(corpus.pairs[idx], inverse, true);

      double norm_sq = 0.0;
      for (ad::Parameter* p : params) norm_sq += p->grad.squaredNorm();
      double scale = 1.0;
      if (config_.clip_norm > 0 && norm_sq > config_.clip_norm * config_.clip_norm) {
        scale = config_.clip_norm / std::sqrt(norm_sq);
      }
      for (ad::Parameter* p : params) {
        p->value -= (learning_rate * scale) * p->grad;
      }
    }
    // Order-fixed reduction so the trace does not depend on the shuffle.
    double epoch_loss = 0.0;
    for (double l : losses) epoch_loss += l;
    epoch_loss /= static_cast<double>(losses.size());
    if (!std::isfinite(epoch_loss)) {
      throw TrainError("training diverged at epoch " + std::to_string(epoch));
    }
    trace.push_back(epoch_loss);
  }
  return trace;
}

void NeuralModel::Save(const std::string& path) const {
  nlohmann::json manifest;
  manifest["config"] = {{"src_embed_dim", config_.src_embed_dim},
                        {"out_embed_dim", config_.out_embed_dim},
                        {"enc_hidden", config_.enc_hidden},
                        {"dec_hidden", config_.dec_hidden},
                        {"attn_hidden", config_.attn_hidden},
                        {"out_hidden", config_.out_hidden},
                        {"epsilon", config_.epsilon},
                        {"copy_enabled", config_.copy_enabled},
                        {"bias_enabled", config_.bias_enabled},
                        {"clip_norm", config_.clip_norm}};
  manifest["source_vocab"] = src_vocab_.tokens;
  manifest["target_vocab"] = tgt_vocab_.tokens;
  manifest["vocab_hash"] = {{"source", Fnv1a(src_vocab_.tokens)},
                            {"target", Fnv1a(tgt_vocab_.tokens)}};
  auto* self = const_cast<NeuralModel*>(this);
  nlohmann::json plist = nlohmann::json::array();
  for (ad::Parameter* p : self->Parameters()) {
    plist.push_back({{"name", p->name},
                     {"rows", p->value.rows()},
                     {"cols", p->value.cols()}});
  }
  manifest["params"] = plist;
  std::string mstr = manifest.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file: " + path);
  out.write("PDNM0001", 8);
  uint64_t len = mstr.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(mstr.data(), static_cast<std::streamsize>(mstr.size()));
  for (ad::Parameter* p : self->Parameters()) {
    out.write(reinterpret_cast<const char*>(p->value.data()),
              static_cast<std::streamsize>(p->value.size() * sizeof(double)));
  }
}

NeuralModel NeuralModel::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != "PDNM0001") {
    throw DataError("not a model file: " + path);
  }
  uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string mstr(len, '\0');
  in.read(mstr.data(), static_cast<std::streamsize>(len));
  if (!in) throw DataError("truncated model file: " + path);
  nlohmann::json manifest = nlohmann::json::parse(mstr);

  NeuralConfig config;
  const auto& c = manifest.at("config");
  config.src_embed_dim = c.at("src_embed_dim");
  config.out_embed_dim = c.at("out_embed_dim");
  config.enc_hidden = c.at("enc_hidden");
  config.dec_hidden = c.at("dec_hidden");
  config.attn_hidden = c.at("attn_hidden");
  config.out_hidden = c.at("out_hidden");
  config.epsilon = c.at("epsilon");
  config.copy_enabled = c.at("copy_enabled");
  config.bias_enabled = c.at("bias_enabled");
  config.clip_norm = c.at("clip_norm");

  std::vector<std::string> src_tokens = manifest.at("source_vocab");
  std::vector<std::string> tgt_tokens = manifest.at("target_vocab");
  // Constructor re-derives vocabularies from sets; feed it the stored
  // lists minus the reserved entries it adds itself.
  std::set<std::string> src_set(src_tokens.begin(), src_tokens.end());
  std::set<std::string> tgt_set(tgt_tokens.begin(), tgt_tokens.end());
  src_set.erase(kUnkToken);
  tgt_set.erase(kUnkToken);
  tgt_set.erase(kBosToken);
  tgt_set.erase(kEosLabel);

  NeuralModel model(config, src_set, tgt_set, 0);
  if (model.src_vocab_.tokens != src_tokens ||
      model.tgt_vocab_.tokens != tgt_tokens) {
    throw DataError("model file vocabulary mismatch: " + path);
  }
  for (ad::Parameter* p : model.Parameters()) {
    in.read(reinterpret_cast<char*>(p->value.data()),
            static_cast<std::streamsize>(p->value.size() * sizeof(double)));
  }
  if (!in) throw DataError("truncated model file: " + path);
  return model;
}

}  // namespace polydec
