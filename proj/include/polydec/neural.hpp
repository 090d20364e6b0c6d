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

#ifndef POLYDEC_NEURAL_H_
#define POLYDEC_NEURAL_H_

#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "polydec/autodiff.hpp"
#include "polydec/corpus.hpp"
#include "polydec/lexical_model.hpp"

namespace polydec {

inline constexpr const char* kUnkToken = "<unk>";
inline constexpr const char* kBosToken = "<s>";

struct NeuralConfig {
  int src_embed_dim = 64;
  int out_embed_dim = 64;
  int enc_hidden = 64;
  int dec_hidden = 64;
  int attn_hidden = 64;
  int out_hidden = 64;
  double epsilon = 1e-3;  // lexical-bias stabilizer
  bool copy_enabled = false;
  bool bias_enabled = false;
  double clip_norm = 5.0;
};

struct Vocabulary {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, int> index;
  int unk = -1;
  int bos = -1;  // decoder side only
  int eos = -1;  // decoder side only

  int size() const { return static_cast<int>(tokens.size()); }
  int Id(const std::string& token) const {
    auto it = index.find(token);
    return it == index.end() ? unk : it->second;
  }
  bool Contains(const std::string& token) const {
    return index.count(token) != 0;
  }
};

// Bi-directional encoder annotations plus the input they were computed for.
struct EncoderOutput {
  std::vector<ad::Vector> annotations;  // each 2 * enc_hidden
  std::vector<int> ids;
  TokenSeq tokens;
};

struct DecoderStepState {
  ad::Vector h;
  ad::Vector c;
  int last_token = -1;
  int step_index = 0;
};

struct StepResult {
  ad::Vector logits;       // over the decoder vocabulary, pre-bias
  ad::Vector alpha;        // attention over source positions
  ad::Vector attn_scores;  // raw e_{i,j}
  ad::Vector new_h;
  ad::Vector new_c;
};

// One decoder step with the emission distribution materialized: a single
// softmax over write actions (per vocabulary entry, lexically biased when
// configured) and copy actions (per source position).
struct EmissionResult {
  StepResult step;
  ad::Vector write_probs;  // |vocab|
  ad::Vector copy_probs;   // |x|; empty when copying is disabled
};

// Attention encoder-decoder scorer over component sequences, trained by
// SGD on negative conditional log-likelihood. All math is 64-bit; a fixed
// seed makes construction, training, and inference bit-reproducible.
class NeuralModel {
 public:
  NeuralModel(const NeuralConfig& config,
              const std::set<std::string>& source_tokens,
              const std::set<std::string>& target_tokens, uint64_t seed);

  const NeuralConfig& config() const { return config_; }
  const Vocabulary& source_vocab() const { return src_vocab_; }
  const Vocabulary& target_vocab() const { return tgt_vocab_; }

  EncoderOutput Encode(const TokenSeq& x) const;
  DecoderStepState InitState() const;

  // Raw decoder step: context via attention, decoder recurrence, output
  // MLP, logits = W_o eta + b_o.
  StepResult Step(const DecoderStepState& state,
                  const EncoderOutput& enc) const;

  // (alpha, context) for the state against the encoder annotations.
  std::pair<ad::Vector, ad::Vector> Attention(const DecoderStepState& state,
                                              const EncoderOutput& enc) const;

  // logits + log(bias + epsilon) with bias[k] = sum_j p_t'(z_k|x_j) a_j.
  ad::Vector BiasLogits(const ad::Vector& logits, const ad::Vector& alpha,
                        const EncoderOutput& enc,
                        const TranslationTable& inverse) const;

  // Step + emission softmax. `inverse` may be null when the model was not
  // configured for biasing; it is required otherwise.
  EmissionResult Emit(const DecoderStepState& state, const EncoderOutput& enc,
                      const TranslationTable* inverse) const;

  DecoderStepState Advance(const StepResult& step, int token_id,
                           int step_index) const;

  // Probability that the step emits this label string: write probability
  // (unk row for out-of-vocabulary labels) plus matching copy mass.
  double EmissionProb(const EmissionResult& emission,
                      const EncoderOutput& enc, const std::string& label,
                      bool* unknown = nullptr) const;

  // Teacher-forced -log p(labels </s> | x).
  double SequenceScore(const TokenSeq& x, const TokenSeq& labels,
                       const TranslationTable* inverse) const;

  // Negative log-likelihood of one example; accumulates parameter
  // gradients when backward is set.
  double ExampleLoss(const Pair& pair, const TranslationTable* inverse,
                     bool backward);

  // Plain SGD with gradient-norm clipping; returns the per-epoch mean loss
  // trace. Throws TrainError when the loss turns non-finite.
  std::vector<double> Train(const ParallelCorpus& corpus, int epochs,
                            double learning_rate, uint64_t seed,
                            const TranslationTable* inverse);

  std::vector<ad::Parameter*> Parameters();

  void Save(const std::string& path) const;
  static NeuralModel Load(const std::string& path);

 private:
  struct Lstm {
    ad::Parameter wx;
    ad::Parameter wh;
    ad::Parameter b;
    Lstm(const std::string& prefix, int hidden, int input)
        : wx(prefix + ".wx", 4 * hidden, input),
          wh(prefix + ".wh", 4 * hidden, hidden),
          b(prefix + ".b", 4 * hidden, 1) {}
  };

  struct Wire;
  struct StepExprs;

  std::vector<int> WireEncoderIds(const TokenSeq& x) const;
  std::vector<ad::Tape::Expr> WireEncoder(Wire& w,
                                          const std::vector<int>& ids) const;
  ad::Tape::Expr WireLstmStep(Wire& w, const Lstm& lstm, int hidden,
                              ad::Tape::Expr input, ad::Tape::Expr& h,
                              ad::Tape::Expr& c) const;
  StepExprs WireStep(Wire& w, ad::Tape::Expr h, ad::Tape::Expr c,
                     int last_token,
                     const std::vector<ad::Tape::Expr>& annots) const;
  ad::Tape::Expr WireBias(Wire& w, ad::Tape::Expr logits,
                          ad::Tape::Expr alpha, const ad::Matrix& bias) const;
  ad::Tape::Expr WireCopyLogits(Wire& w, ad::Tape::Expr attn_scores) const;

  // p_t'(z_k|x_j) matrix, |vocab| x |x|.
  ad::Matrix BiasMatrix(const TokenSeq& x,
                        const TranslationTable& inverse) const;

  NeuralConfig config_;
  Vocabulary src_vocab_;
  Vocabulary tgt_vocab_;

  ad::Parameter src_embed_;
  ad::Parameter out_embed_;
  Lstm enc_fwd_;
  Lstm enc_bwd_;
  Lstm dec_;
  ad::Parameter attn_w_;
  ad::Parameter attn_b_;
  ad::Parameter attn_v_;
  ad::Parameter out_w_;
  ad::Parameter out_b_;
  ad::Parameter wo_;
  ad::Parameter bo_;
  ad::Parameter copy_w_;
  ad::Parameter copy_b_;
};

}  // namespace polydec

#endif  // POLYDEC_NEURAL_H_
