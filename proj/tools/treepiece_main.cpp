// treepiece: learn subtree vocabularies for semantic-parse skeletons and
// tokenize/detokenize them losslessly.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "treepiece/cli.hpp"

namespace {

using namespace treepiece;

void add_corpus_options(CLI::App* cmd, CorpusOptions* opts, bool required = true) {
  auto* o = cmd->add_option("--corpus", opts->path, "tab-separated corpus file ('-' for stdin)");
  if (required) o->required();
  cmd->add_option("--columns", opts->columns, "corpus column count (1, 2 or 3; default auto)")
      ->check(CLI::Range(1, 3));
  cmd->add_flag("--lenient", opts->lenient, "skip malformed corpus lines instead of aborting");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tree tokenizer for semantic-parse skeletons"};
  app.require_subcommand(1);

  TrainOptions train;
  auto* tr = app.add_subcommand("train", "learn a vocabulary from a corpus");
  add_corpus_options(tr, &train.corpus);
  tr->add_option("--out", train.out_path, "output vocabulary file")->required();
  tr->add_option("--merges", train.config.num_merges, "number of pair-merge rounds")
      ->check(CLI::NonNegativeNumber);
  tr->add_option("--em-iters", train.config.em_max_iters, "maximum EM iterations")
      ->check(CLI::NonNegativeNumber);
  tr->add_option("--em-eps", train.config.em_epsilon, "EM convergence threshold");
  tr->add_option("--expand-samples", train.config.expand_samples,
                 "sampled tokenizations per skeleton during expansion")
      ->check(CLI::PositiveNumber);
  tr->add_option("--expand-theta", train.config.expand_theta, "sampling sharpness for expansion");
  tr->add_option("--seed", train.config.seed, "RNG seed")->envname("TREEPIECE_SEED");
  tr->add_option("--max-nodes", train.config.max_nodes, "skeleton node cap for the lattice");
  tr->add_flag("--no-expand", train.no_expand, "stop after EM; write the bare vocabulary");

  TokenizeOptions tok;
  auto* tk = app.add_subcommand("tokenize", "tokenize corpus skeletons into unit lines");
  add_corpus_options(tk, &tok.corpus);
  tk->add_option("--vocab", tok.vocab_path, "vocabulary file")->required();
  tk->add_option("--out", tok.out_path, "output file ('-' for stdout)");
  std::string mode = "viterbi";
  tk->add_option("--mode", mode, "viterbi or sample")
      ->check(CLI::IsMember({"viterbi", "sample"}));
  tk->add_option("--theta", tok.theta, "sampling sharpness for --mode sample");
  tk->add_option("--seed", tok.seed, "RNG seed")->envname("TREEPIECE_SEED");
  tk->add_option("--max-nodes", tok.max_nodes, "skeleton node cap for the lattice");

  DetokenizeOptions detok;
  auto* dt = app.add_subcommand("detokenize", "assemble unit lines back into skeletons");
  dt->add_option("--input", detok.input_path, "unit lines ('-' for stdin)");
  dt->add_option("--out", detok.out_path, "output file ('-' for stdout)");

  StatsOptions stats;
  auto* st = app.add_subcommand("stats", "corpus and vocabulary statistics");
  add_corpus_options(st, &stats.corpus);
  st->add_option("--vocab", stats.vocab_path, "vocabulary file")->required();
  st->add_option("--max-nodes", stats.max_nodes, "skeleton node cap for the lattice");

  StatsOptions oov;
  auto* ov = app.add_subcommand("oov-rate", "share of skeletons the vocabulary cannot cover");
  add_corpus_options(ov, &oov.corpus);
  ov->add_option("--vocab", oov.vocab_path, "vocabulary file")->required();
  ov->add_option("--max-nodes", oov.max_nodes, "skeleton node cap for the lattice");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (tr->parsed()) return cmd_train(train, std::cout, std::cerr);
  if (tk->parsed()) {
    tok.mode = mode == "sample" ? TokenizeMode::Sample : TokenizeMode::Viterbi;
    return cmd_tokenize(tok, std::cerr);
  }
  if (dt->parsed()) return cmd_detokenize(detok, std::cerr);
  if (st->parsed()) return cmd_stats(stats, std::cout, std::cerr);
  if (ov->parsed()) return cmd_oov_rate(oov, std::cout, std::cerr);
  return kExitUsage;
}
