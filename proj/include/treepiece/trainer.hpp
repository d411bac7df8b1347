#ifndef TREEPIECE_TRAINER_HPP
#define TREEPIECE_TRAINER_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "treepiece/lattice.hpp"
#include "treepiece/tree.hpp"
#include "treepiece/vocab.hpp"

namespace treepiece {

struct TrainConfig {
  int num_merges = 600;
  int em_max_iters = 30;      // N0
  double em_epsilon = 0.01;   // eps0, absolute log-likelihood gain threshold
  int expand_samples = 10;    // K0
  double expand_theta = 0.15; // theta0
  std::uint64_t seed = 0;
  int max_nodes = kDefaultMaxNodes;
  unsigned threads = 0;       // 0 = hardware concurrency
};

enum class EmStop { MaxIters, Converged };

struct EmTrace {
  std::vector<double> log_likelihood;  // corpus log-likelihood per iteration
  int iterations = 0;
  EmStop stop = EmStop::MaxIters;
};

// Bare-phase vocabulary of single-ontology units with corpus occurrence
// counts; simplex = normalized counts.
Vocabulary init_vocab(const Corpus& corpus);

// Iterative pair merging. Each round counts every parent-child contact
// between distinct current pieces keyed by the merged bare shape, picks the
// most frequent shape (ties to the smaller canonical string), merges its
// occurrences greedily in pre-order in every skeleton, and records the shape
// with the counted frequency. Stops early when no pair reaches frequency 2.
Vocabulary generate_vocabulary(const Corpus& corpus, const TrainConfig& config);

// EM over the simplex with an exact Viterbi E-step. Zero-frequency units
// keep probability 0 but stay in the vocabulary.
std::pair<Vocabulary, EmTrace> em_train(const Corpus& corpus, Vocabulary vocab,
                                        const TrainConfig& config);

// EM with a sampled E-step: K FFBS draws per skeleton, fractional counts
// n(pi, t) / K. The log-likelihood trace uses the exact forward marginal and
// is recorded without any monotonicity guarantee. Draw k for corpus record i
// at iteration j uses the RNG stream mix_seed(config.seed, {j, i, k}).
std::pair<Vocabulary, EmTrace> em_train_sampled(const Corpus& corpus, Vocabulary vocab,
                                                const TrainConfig& config,
                                                int samples_per_skeleton, double theta);

// Decorated-phase vocabulary built by tokenizing every training skeleton K0
// times with FFBS at theta0 and collecting the emitted decorated units with
// their total occurrence counts. Draw k for corpus record i uses the RNG
// stream mix_seed(config.seed, {i, k}).
Vocabulary expand_vocab(const Corpus& corpus, const Vocabulary& vocab, const TrainConfig& config);

}  // namespace treepiece

#endif  // TREEPIECE_TRAINER_HPP
