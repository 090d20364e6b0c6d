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

// Command-line surface for the translation pipeline: build component
// graphs, train lexical/neural scorers, decode, extract k-best lists,
// query, and evaluate.

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "polydec/automaton.hpp"
#include "polydec/bpe.hpp"
#include "polydec/corpus.hpp"
#include "polydec/errors.hpp"
#include "polydec/eval.hpp"
#include "polydec/kbest.hpp"
#include "polydec/lexical_decoder.hpp"
#include "polydec/lexical_model.hpp"
#include "polydec/neural.hpp"
#include "polydec/neural_decoder.hpp"

namespace {

using namespace polydec;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitSearch = 3;

TagMode ParseTagMode(const std::string& mode) {
  if (mode == "none") return TagMode::kNone;
  if (mode == "column") return TagMode::kFromColumn;
  if (mode == "filename") return TagMode::kFromFilename;
  throw DataError("unknown tag mode: " + mode);
}

BpeSide ParseBpeSide(const std::string& side) {
  if (side == "source") return BpeSide::kSource;
  if (side == "target") return BpeSide::kTarget;
  if (side == "both") return BpeSide::kBoth;
  throw DataError("unknown BPE side: " + side);
}

struct CorpusFlags {
  std::vector<std::string> paths;
  std::string tag_mode = "column";
  std::string bpe_path;
  std::string bpe_side = "both";

  void Register(CLI::App* cmd) {
    cmd->add_option("--corpus", paths, "corpus file(s): source TAB target [TAB tag]")
        ->required();
    cmd->add_option("--tag-mode", tag_mode, "none|column|filename");
    cmd->add_option("--bpe", bpe_path, "BPE merge file to apply");
    cmd->add_option("--bpe-side", bpe_side, "source|target|both");
  }

  ParallelCorpus Load() const {
    ParallelCorpus merged;
    for (const auto& path : paths) {
      ParallelCorpus c = LoadCorpus(path, ParseTagMode(tag_mode));
      for (auto& p : c.pairs) merged.pairs.push_back(std::move(p));
      merged.source_vocab.insert(c.source_vocab.begin(), c.source_vocab.end());
      merged.target_vocab.insert(c.target_vocab.begin(), c.target_vocab.end());
    }
    if (!bpe_path.empty()) {
      BpeModel bpe = BpeModel::Load(bpe_path);
      merged = ApplyBpeToCorpus(bpe, merged, ParseBpeSide(bpe_side));
    }
    return merged;
  }
};

// Scorer wiring shared by decode/kbest/query/eval.
struct ScorerFlags {
  std::string scorer = "lexical";
  std::string table_path;
  std::string model_path;
  std::string inverse_path;
  int beam = 5;

  void Register(CLI::App* cmd) {
    cmd->add_option("--scorer", scorer, "lexical|neural");
    cmd->add_option("--table", table_path, "forward translation table (lexical)");
    cmd->add_option("--model", model_path, "neural model file");
    cmd->add_option("--inverse", inverse_path, "inverse table (neural bias)");
    cmd->add_option("--beam", beam, "beam size l for the neural search");
  }

  struct Loaded {
    std::unique_ptr<TranslationTable> table;
    std::unique_ptr<TranslationTable> inverse;
    std::unique_ptr<NeuralModel> model;
    std::unique_ptr<Scorer> scorer;
  };

  Loaded Build() const {
    Loaded loaded;
    if (scorer == "lexical") {
      if (table_path.empty()) throw DataError("--table is required for the lexical scorer");
      loaded.table = std::make_unique<TranslationTable>(
          TranslationTable::Load(table_path));
      loaded.scorer = std::make_unique<LexicalScorer>(*loaded.table);
    } else if (scorer == "neural") {
      if (model_path.empty()) throw DataError("--model is required for the neural scorer");
      loaded.model = std::make_unique<NeuralModel>(NeuralModel::Load(model_path));
      if (!inverse_path.empty()) {
        loaded.inverse = std::make_unique<TranslationTable>(
            TranslationTable::Load(inverse_path));
      }
      loaded.scorer = std::make_unique<NeuralScorer>(*loaded.model, beam,
                                                     loaded.inverse.get());
    } else {
      throw DataError("unknown scorer: " + scorer);
    }
    return loaded;
  }
};

std::vector<std::string> ReadInputLines(const std::string& path) {
  std::vector<std::string> lines;
  std::string line;
  if (path.empty() || path == "-") {
    while (std::getline(std::cin, line)) lines.push_back(line);
  } else {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file: " + path);
    while (std::getline(in, line)) lines.push_back(line);
  }
  return lines;
}

std::string JoinTokens(const TokenSeq& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

// Maps input lines to k-best lists, optionally across threads; output
// order always equals input order.
std::vector<KBestList> DecodeLines(const std::vector<std::string>& lines,
                                   const ComponentGraph& graph,
                                   const Scorer& scorer, int k, int start,
                                   const BpeModel* bpe, int jobs) {
  std::vector<KBestList> results(lines.size());
  auto worker = [&](size_t begin, size_t step) {
    for (size_t i = begin; i < lines.size(); i += step) {
      TokenSeq x = SplitWhitespace(lines[i]);
      if (x.empty()) continue;
      if (bpe != nullptr) x = bpe->Apply(x);
      results[i] = DecodeK(x, graph, scorer, k, start);
    }
  };
  if (jobs <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker, t, jobs);
    for (auto& t : threads) t.join();
  }
  return results;
}

int CmdBuildGraph(const CorpusFlags& corpus_flags, const std::string& out_path) {
  ParallelCorpus corpus = corpus_flags.Load();
  std::vector<std::vector<std::string>> sequences;
  sequences.reserve(corpus.pairs.size());
  for (const auto& pair : corpus.pairs) sequences.push_back(pair.target_tokens);
  ComponentGraph graph = ComponentGraph::Build(std::move(sequences));
  graph.Save(out_path);
  std::cout << graph.node_count() << " nodes, " << graph.edge_count()
            << " edges, " << graph.CountPaths() << " paths\n";
  return 0;
}

int CmdTrainBpe(const CorpusFlags& corpus_flags, size_t merges,
                const std::string& side, const std::string& out_path) {
  ParallelCorpus corpus = corpus_flags.Load();
  BpeModel model = LearnBpe(corpus, merges, ParseBpeSide(side));
  model.Save(out_path);
  std::cout << model.merges.size() << " merges\n";
  return 0;
}

int CmdTrainLexical(const CorpusFlags& corpus_flags, int iterations,
                    bool no_null, const std::string& out_forward,
                    const std::string& out_inverse) {
  ParallelCorpus corpus = corpus_flags.Load();
  Model1Options options;
  options.iterations = iterations;
  options.use_null = !no_null;

  options.direction = Direction::kForward;
  Model1Result fwd = TrainModel1(corpus, options);
  fwd.table.Save(out_forward);
  std::cout << "forward: final log-likelihood " << fwd.trace.back() << '\n';

  if (!out_inverse.empty()) {
    options.direction = Direction::kInverse;
    Model1Result inv = TrainModel1(corpus, options);
    inv.table.Save(out_inverse);
    std::cout << "inverse: final log-likelihood " << inv.trace.back() << '\n';
  }
  return 0;
}

struct NeuralTrainFlags {
  int epochs = 30;
  double lr = 0.1;
  uint64_t seed = 1;
  int hidden = 64;
  int embed = 64;
  double epsilon = 1e-3;
  bool copy = false;
  bool bias = false;
  std::string inverse_path;
};

int CmdTrainNeural(const CorpusFlags& corpus_flags,
                   const NeuralTrainFlags& flags,
                   const std::string& out_path) {
  ParallelCorpus corpus = corpus_flags.Load();
  NeuralConfig config;
  config.src_embed_dim = flags.embed;
  config.out_embed_dim = flags.embed;
  config.enc_hidden = flags.hidden;
  config.dec_hidden = flags.hidden;
  config.attn_hidden = flags.hidden;
  config.out_hidden = flags.hidden;
  config.epsilon = flags.epsilon;
  config.copy_enabled = flags.copy;
  config.bias_enabled = flags.bias;

  std::unique_ptr<TranslationTable> inverse;
  if (flags.bias) {
    if (flags.inverse_path.empty()) {
      throw DataError("--bias requires --inverse");
    }
    inverse = std::make_unique<TranslationTable>(
        TranslationTable::Load(flags.inverse_path));
  }

  NeuralModel model(config, corpus.source_vocab, corpus.target_vocab,
                    flags.seed);
  auto trace = model.Train(corpus, flags.epochs, flags.lr, flags.seed,
                           inverse.get());
  model.Save(out_path);
  std::cout << "final mean loss " << trace.back() << " after "
            << trace.size() << " epochs\n";
  return 0;
}

int CmdDecode(const std::string& graph_path, const ScorerFlags& scorer_flags,
              const std::string& language, int k, const std::string& input,
              const std::string& bpe_path, int jobs) {
  ComponentGraph graph = ComponentGraph::Load(graph_path);
  auto loaded = scorer_flags.Build();
  std::unique_ptr<BpeModel> bpe;
  if (!bpe_path.empty()) {
    bpe = std::make_unique<BpeModel>(BpeModel::Load(bpe_path));
  }
  int start = language.empty()
                  ? graph.source()
                  : graph.LanguageStart(MakeLanguageToken(language));

  auto lines = ReadInputLines(input);
  auto results =
      DecodeLines(lines, graph, *loaded.scorer, k, start, bpe.get(), jobs);
  std::cout.precision(12);
  for (size_t i = 0; i < lines.size(); ++i) {
    int rank = 1;
    for (const auto& item : results[i].items) {
      std::cout << lines[i] << '\t' << rank++ << '\t' << item.score << '\t'
                << JoinTokens(item.SurfaceLabels()) << '\n';
    }
  }
  return 0;
}

int CmdQuery(const std::string& graph_path, const ScorerFlags& scorer_flags,
             const std::string& language, int k, const std::string& question,
             const std::string& bpe_path) {
  ComponentGraph graph = ComponentGraph::Load(graph_path);
  auto loaded = scorer_flags.Build();
  TokenSeq x = SplitWhitespace(question);
  if (x.empty()) throw DataError("empty query");
  if (!bpe_path.empty()) x = BpeModel::Load(bpe_path).Apply(x);
  int start = language.empty()
                  ? graph.source()
                  : graph.LanguageStart(MakeLanguageToken(language));
  KBestList list = DecodeK(x, graph, *loaded.scorer, k, start);

  std::map<std::string, std::vector<const Translation*>> by_language;
  for (const auto& item : list.items) {
    std::string lang =
        item.language ? *item.language : (language.empty() ? "?" : language);
    by_language[lang].push_back(&item);
  }
  std::cout.precision(6);
  for (const auto& [lang, items] : by_language) {
    std::cout << "Language: " << lang << '\n';
    for (const Translation* t : items) {
      std::cout << "  " << JoinTokens(t->SurfaceLabels()) << "  (score "
                << t->score << ")\n";
    }
  }
  return 0;
}

// Parses decode output (`input TAB rank TAB score TAB labels`) back into
// per-input k-best lists, in file order.
std::vector<std::vector<TokenSeq>> ParsePredictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open predictions file: " + path);
  std::vector<std::vector<TokenSeq>> lists;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string input, rank, score, labels;
    if (!std::getline(ls, input, '\t') || !std::getline(ls, rank, '\t') ||
        !std::getline(ls, score, '\t') || !std::getline(ls, labels)) {
      throw DataError("predictions line " + std::to_string(line_no) +
                      ": expected `input TAB rank TAB score TAB labels`");
    }
    if (rank == "1") lists.emplace_back();
    if (lists.empty()) {
      throw DataError("predictions file does not start at rank 1");
    }
    lists.back().push_back(SplitWhitespace(labels));
  }
  return lists;
}

int CmdEval(const CorpusFlags& corpus_flags, const std::string& pred_path,
            const std::string& graph_path) {
  ParallelCorpus gold = corpus_flags.Load();
  auto predictions = ParsePredictions(pred_path);
  if (predictions.size() != gold.pairs.size()) {
    throw DataError("prediction count (" + std::to_string(predictions.size()) +
                    ") does not match gold pair count (" +
                    std::to_string(gold.pairs.size()) + ")");
  }
  std::unique_ptr<ComponentGraph> graph;
  if (!graph_path.empty()) {
    graph = std::make_unique<ComponentGraph>(ComponentGraph::Load(graph_path));
  }

  std::vector<EvalRecord> records;
  for (size_t i = 0; i < gold.pairs.size(); ++i) {
    const Pair& pair = gold.pairs[i];
    TokenSeq gold_surface(pair.target_tokens.begin() +
                              (pair.language_tag ? 1 : 0),
                          pair.target_tokens.end());
    EvalRecord record = EvalRecord::Make(pair.source_tokens, gold_surface,
                                         predictions[i], pair.language_tag);
    if (graph) {
      int start = pair.language_tag
                      ? graph->LanguageStart(MakeLanguageToken(*pair.language_tag))
                      : graph->source();
      for (const auto& output : record.outputs) {
        if (graph->Accepts(output, start)) ++record.well_formed_count;
      }
    }
    records.push_back(std::move(record));
  }
  EvalSummary summary = Evaluate(records);
  std::cout << summary.ToTable() << '\n' << summary.ToKeyValueLines();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polydec: constrained text-to-signature translation"};
  app.set_config("--config", "", "key-value config file; flags win");
  app.require_subcommand(1);

  // build-graph
  auto* build = app.add_subcommand("build-graph", "compile target sequences into a minimal DAFSA");
  CorpusFlags build_corpus;
  build_corpus.Register(build);
  std::string build_out;
  build->add_option("--out", build_out, "output graph file")->required();

  // train-bpe
  auto* tbpe = app.add_subcommand("train-bpe", "learn subword merges");
  CorpusFlags tbpe_corpus;
  tbpe_corpus.Register(tbpe);
  size_t tbpe_merges = 10000;
  std::string tbpe_side = "both", tbpe_out;
  tbpe->add_option("--merges", tbpe_merges, "number of merges");
  tbpe->add_option("--side", tbpe_side, "source|target|both");
  tbpe->add_option("--out", tbpe_out, "output merge file")->required();

  // train-lexical
  auto* tlex = app.add_subcommand("train-lexical", "train IBM Model 1 tables by EM");
  CorpusFlags tlex_corpus;
  tlex_corpus.Register(tlex);
  int tlex_iters = 10;
  bool tlex_no_null = false;
  std::string tlex_fwd, tlex_inv;
  tlex->add_option("--iterations", tlex_iters, "EM iterations");
  tlex->add_flag("--no-null", tlex_no_null, "disable the null alignment token");
  tlex->add_option("--out-forward", tlex_fwd, "forward table file")->required();
  tlex->add_option("--out-inverse", tlex_inv, "inverse table file");

  // train-neural
  auto* tneu = app.add_subcommand("train-neural", "train the attention scorer by SGD");
  CorpusFlags tneu_corpus;
  tneu_corpus.Register(tneu);
  NeuralTrainFlags tneu_flags;
  std::string tneu_out;
  tneu->add_option("--epochs", tneu_flags.epochs);
  tneu->add_option("--lr", tneu_flags.lr);
  tneu->add_option("--seed", tneu_flags.seed);
  tneu->add_option("--hidden", tneu_flags.hidden);
  tneu->add_option("--embed", tneu_flags.embed);
  tneu->add_option("--epsilon", tneu_flags.epsilon);
  tneu->add_flag("--copy", tneu_flags.copy, "enable the copy mechanism");
  tneu->add_flag("--bias", tneu_flags.bias, "enable lexical biasing");
  tneu->add_option("--inverse", tneu_flags.inverse_path, "inverse table for biasing");
  tneu->add_option("--out", tneu_out, "output model file")->required();

  // decode / kbest
  std::string dec_graph, dec_language, dec_input, dec_bpe;
  int dec_k = 1, dec_jobs = 1;
  ScorerFlags dec_scorer;
  auto* dec = app.add_subcommand("decode", "translate input lines to best paths");
  dec->add_option("--graph", dec_graph)->required();
  dec_scorer.Register(dec);
  dec->add_option("--language", dec_language, "monolingual mode target language");
  dec->add_option("--input", dec_input, "input file (default stdin)");
  dec->add_option("--bpe", dec_bpe, "BPE merge file applied to inputs");
  dec->add_option("--jobs", dec_jobs, "process input lines concurrently");

  std::string kb_graph, kb_language, kb_input, kb_bpe;
  int kb_k = 10, kb_jobs = 1;
  ScorerFlags kb_scorer;
  auto* kb = app.add_subcommand("kbest", "ranked k-best translations per input line");
  kb->add_option("--graph", kb_graph)->required();
  kb_scorer.Register(kb);
  kb->add_option("--k", kb_k, "list size");
  kb->add_option("--language", kb_language, "monolingual mode target language");
  kb->add_option("--input", kb_input, "input file (default stdin)");
  kb->add_option("--bpe", kb_bpe, "BPE merge file applied to inputs");
  kb->add_option("--jobs", kb_jobs, "process input lines concurrently");

  // query
  std::string q_graph, q_language, q_bpe, q_text;
  int q_k = 10;
  ScorerFlags q_scorer;
  auto* query = app.add_subcommand("query", "free-text question; top-k signatures grouped by language");
  query->add_option("--graph", q_graph)->required();
  q_scorer.Register(query);
  query->add_option("--k", q_k, "list size");
  query->add_option("--language", q_language, "restrict to one language");
  query->add_option("--bpe", q_bpe, "BPE merge file applied to the question");
  query->add_option("question", q_text, "free-text question")->required();

  // eval
  auto* ev = app.add_subcommand("eval", "score a decoded file against gold");
  CorpusFlags ev_corpus;
  ev_corpus.Register(ev);
  std::string ev_pred, ev_graph;
  ev->add_option("--pred", ev_pred, "decode/kbest output file")->required();
  ev->add_option("--eval-graph", ev_graph, "graph for well-formedness checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (build->parsed()) return CmdBuildGraph(build_corpus, build_out);
    if (tbpe->parsed()) return CmdTrainBpe(tbpe_corpus, tbpe_merges, tbpe_side, tbpe_out);
    if (tlex->parsed()) return CmdTrainLexical(tlex_corpus, tlex_iters, tlex_no_null, tlex_fwd, tlex_inv);
    if (tneu->parsed()) return CmdTrainNeural(tneu_corpus, tneu_flags, tneu_out);
    if (dec->parsed()) return CmdDecode(dec_graph, dec_scorer, dec_language, dec_k, dec_input, dec_bpe, dec_jobs);
    if (kb->parsed()) return CmdDecode(kb_graph, kb_scorer, kb_language, kb_k, kb_input, kb_bpe, kb_jobs);
    if (query->parsed()) return CmdQuery(q_graph, q_scorer, q_language, q_k, q_text, q_bpe);
    if (ev->parsed()) return CmdEval(ev_corpus, ev_pred, ev_graph);
  } catch (const SearchError& e) {
    std::cerr << "search error: " << e.what() << '\n';
    return kExitSearch;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const TrainError& e) {
    std::cerr << "training error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
