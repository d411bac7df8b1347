#ifndef TREEPIECE_LATTICE_HPP
#define TREEPIECE_LATTICE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "treepiece/unit.hpp"
#include "treepiece/vocab.hpp"

namespace treepiece {

inline constexpr int kDefaultMaxNodes = 24;
inline constexpr int kBruteForceMaxNodes = 10;

// All connected subtrees of a skeleton that contain its root, identified by
// node bitmasks over pre-order indices and graded by depth (root level = 1).
class SubtreeLattice {
 public:
  static constexpr int kBos = -1;  // begin marker used as a predecessor id

  SubtreeLattice() = default;
  SubtreeLattice(const Skeleton& skeleton, int max_nodes);

  const Skeleton& source() const { return source_; }
  int size() const { return static_cast<int>(masks_.size()); }
  std::uint64_t mask(int id) const { return masks_[id]; }
  int depth(int id) const { return depth_[id]; }
  int max_depth() const { return static_cast<int>(by_depth_.size()) - 1; }
  std::span<const int> at_depth(int d) const { return by_depth_[d]; }
  int find(std::uint64_t mask) const {
    auto it = index_.find(mask);
    return it == index_.end() ? kBos : it->second;
  }
  int full_id() const { return static_cast<int>(masks_.size()) - 1; }
  std::uint64_t descendants(int node) const { return desc_[node]; }

 private:
  Skeleton source_;
  std::vector<std::uint64_t> masks_;  // sorted by (depth, popcount, mask)
  std::vector<int> depth_;
  std::vector<std::vector<int>> by_depth_;
  std::unordered_map<std::uint64_t, int> index_;
  std::vector<std::uint64_t> desc_;  // per node: descendants incl. self
};

SubtreeLattice enumerate_subtrees(const Skeleton& skeleton, int max_nodes = kDefaultMaxNodes);

struct TokenizationResult {
  Partition partition;
  double probability = 0.0;
};

// One skeleton bound to one read-only vocabulary. Reusable across simplex
// updates: viterbi() and ffbs_forward() read the probabilities at call time,
// while the lattice and unit lookups are built once. Not thread-safe per
// instance; distinct instances over a shared vocabulary are.
class Tokenizer {
 public:
  Tokenizer(const Skeleton& skeleton, const Vocabulary& vocab,
            int max_nodes = kDefaultMaxNodes);

  const SubtreeLattice& lattice() const { return lattice_; }

  // Max-product forward-backward over the lattice. Throws OovSkeleton when no
  // partition covers the skeleton with positive-probability units.
  TokenizationResult viterbi();

  // Sum-product forward pass. The pair table is indexed by (subtree, root of
  // the last piece in assembly order), which counts every partition exactly
  // once; marginal() is then the exact sum of partition weights.
  void ffbs_forward();
  double marginal() const { return marginal_; }
  bool forward_done() const { return forward_done_; }

  // Samples a partition backwards; at theta == 1 the draw follows the exact
  // posterior weight(pi) / marginal(). Requires ffbs_forward().
  TokenizationResult ffbs_sample(double theta, std::uint64_t seed) const;

  // Forward pair weight for (subtree, last-piece root); 0 when inadmissible.
  double pair_weight(int subtree_id, int piece_root) const;

 private:
  struct CompEntry {
    int vocab_id = -1;
    std::string key;
  };
  const CompEntry& component(std::uint64_t mask) const;
  double component_prob(std::uint64_t mask) const;

  const Vocabulary& vocab_;
  SubtreeLattice lattice_;
  mutable std::unordered_map<std::uint64_t, CompEntry> comp_cache_;

  // FFBS tables: per subtree, pair weights in ascending set-bit order plus
  // exclusive prefix sums (one extra trailing total entry).
  std::vector<std::vector<double>> pair_;
  std::vector<std::vector<double>> prefix_;
  double marginal_ = 0.0;
  bool forward_done_ = false;
};

TokenizationResult viterbi_tokenize(const Skeleton& skeleton, const Vocabulary& vocab,
                                    int max_nodes = kDefaultMaxNodes);

TokenizationResult ffbs_tokenize(const Skeleton& skeleton, const Vocabulary& vocab, double theta,
                                 std::uint64_t seed, int max_nodes = kDefaultMaxNodes);

struct BruteForceResult {
  TokenizationResult best;        // empty partition, probability 0 when no cover exists
  double total_probability = 0.0;
  std::vector<TokenizationResult> all_partitions;
};

// Exhaustive oracle over all edge-cut decompositions; independent of the
// lattice dynamic programs. Units with zero probability are treated as
// absent, matching the tokenizers' support.
BruteForceResult brute_force_tokenize(const Skeleton& skeleton, const Vocabulary& vocab,
                                      int max_nodes = kBruteForceMaxNodes);

}  // namespace treepiece

#endif  // TREEPIECE_LATTICE_HPP
