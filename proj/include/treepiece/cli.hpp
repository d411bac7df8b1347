#ifndef TREEPIECE_CLI_HPP
#define TREEPIECE_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

#include "treepiece/trainer.hpp"

namespace treepiece {

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDataError = 2;

struct CorpusOptions {
  std::string path;
  int columns = 0;  // 0 = auto-detect
  bool lenient = false;
};

struct TrainOptions {
  CorpusOptions corpus;
  std::string out_path;
  TrainConfig config;
  bool no_expand = false;
};

enum class TokenizeMode { Viterbi, Sample };

struct TokenizeOptions {
  CorpusOptions corpus;
  std::string vocab_path;
  std::string out_path = "-";
  TokenizeMode mode = TokenizeMode::Viterbi;
  double theta = 1.0;
  std::uint64_t seed = 0;
  int max_nodes = kDefaultMaxNodes;
};

struct DetokenizeOptions {
  std::string input_path = "-";
  std::string out_path = "-";
};

struct StatsOptions {
  CorpusOptions corpus;
  std::string vocab_path;
  int max_nodes = kDefaultMaxNodes;
};

// Each command reports data errors on `err` and returns an exit code.
int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err);
int cmd_tokenize(const TokenizeOptions& opts, std::ostream& err);
int cmd_detokenize(const DetokenizeOptions& opts, std::ostream& err);
int cmd_stats(const StatsOptions& opts, std::ostream& out, std::ostream& err);
int cmd_oov_rate(const StatsOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace treepiece

#endif  // TREEPIECE_CLI_HPP
