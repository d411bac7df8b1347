#include "treepiece/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "treepiece/util.hpp"

namespace treepiece {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// All subtrees rooted at v within the skeleton: v plus any combination of
// whole-or-absent choices recursively over children.
std::vector<std::uint64_t> rooted_subtrees(const Skeleton& s, int v) {
  std::vector<std::uint64_t> acc = {1ULL << v};
  for (int c : s.children(v)) {
    auto sub = rooted_subtrees(s, c);
    std::vector<std::uint64_t> next;
    next.reserve(acc.size() * (1 + sub.size()));
    for (std::uint64_t a : acc) {
      next.push_back(a);
      for (std::uint64_t m : sub) next.push_back(a | m);
    }
    acc = std::move(next);
  }
  return acc;
}

std::uint64_t low_bits(int r) { return r >= 64 ? ~0ULL : (1ULL << r) - 1; }

}  // namespace

SubtreeLattice::SubtreeLattice(const Skeleton& skeleton, int max_nodes) {
  int n = skeleton.node_count();
  int cap = std::min(max_nodes, 63);
  if (n > cap)
    fail(Errc::SkeletonTooLarge,
         std::to_string(n) + " nodes exceeds the cap of " + std::to_string(cap));
  source_ = skeleton;
  desc_.assign(n, 0);
  for (int v = n - 1; v >= 0; --v) {
    desc_[v] = 1ULL << v;
    for (int c : skeleton.children(v)) desc_[v] |= desc_[c];
  }
  masks_ = rooted_subtrees(skeleton, 0);
  auto mask_depth = [&](std::uint64_t m) {
    int d = 0;
    for (std::uint64_t b = m; b; b &= b - 1) d = std::max(d, skeleton.node_depth(std::countr_zero(b)));
    return d;
  };
  std::sort(masks_.begin(), masks_.end(), [&](std::uint64_t a, std::uint64_t b) {
    int da = mask_depth(a), db = mask_depth(b);
    if (da != db) return da < db;
    int pa = std::popcount(a), pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    return a < b;
  });
  depth_.resize(masks_.size());
  by_depth_.assign(skeleton.depth() + 1, {});
  index_.reserve(masks_.size());
  for (int i = 0; i < static_cast<int>(masks_.size()); ++i) {
    depth_[i] = mask_depth(masks_[i]);
    by_depth_[depth_[i]].push_back(i);
    index_.emplace(masks_[i], i);
  }
}

SubtreeLattice enumerate_subtrees(const Skeleton& skeleton, int max_nodes) {
  return SubtreeLattice(skeleton, max_nodes);
}

Tokenizer::Tokenizer(const Skeleton& skeleton, const Vocabulary& vocab, int max_nodes)
    : vocab_(vocab), lattice_(skeleton, max_nodes) {}

const Tokenizer::CompEntry& Tokenizer::component(std::uint64_t mask) const {
  auto it = comp_cache_.find(mask);
  if (it != comp_cache_.end()) return it->second;
  CompEntry e;
  const Skeleton& s = lattice_.source();
  e.key = vocab_.phase() == Phase::Bare ? bare_shape(s, mask).canonical()
                                        : decorate(s, mask).canonical();
  e.vocab_id = vocab_.find(e.key);
  return comp_cache_.emplace(mask, std::move(e)).first->second;
}

double Tokenizer::component_prob(std::uint64_t mask) const {
  const CompEntry& e = component(mask);
  return e.vocab_id < 0 ? 0.0 : vocab_.prob(e.vocab_id);
}

TokenizationResult Tokenizer::viterbi() {
  int m = lattice_.size();
  std::vector<double> score(m, kNegInf);
  std::vector<int> back(m, SubtreeLattice::kBos);
  std::vector<std::uint64_t> back_delta(m, 0);
  std::vector<const std::string*> back_key(m, nullptr);

  for (int i = 0; i < m; ++i) {
    std::uint64_t t = lattice_.mask(i);
    auto consider = [&](double cand, int pred, std::uint64_t delta, const std::string* key) {
      bool better = cand > score[i];
      if (!better && cand == score[i] && back_key[i] != nullptr) {
        if (*key < *back_key[i])
          better = true;
        else if (*key == *back_key[i] && delta < back_delta[i])
          better = true;
      }
      if (better) {
        score[i] = cand;
        back[i] = pred;
        back_delta[i] = delta;
        back_key[i] = key;
      }
    };
    // The subtree as a single unit.
    {
      const CompEntry& e = component(t);
      double p = e.vocab_id < 0 ? 0.0 : vocab_.prob(e.vocab_id);
      if (p > 0) consider(std::log(p), SubtreeLattice::kBos, t, &e.key);
    }
    // Split off one hanging component rooted at r.
    for (std::uint64_t bits = t & (t - 1); bits; bits &= bits - 1) {
      int r = std::countr_zero(bits);
      std::uint64_t delta = t & lattice_.descendants(r);
      int pred = lattice_.find(t ^ delta);
      if (score[pred] == kNegInf) continue;
      const CompEntry& e = component(delta);
      double p = e.vocab_id < 0 ? 0.0 : vocab_.prob(e.vocab_id);
      if (p <= 0) continue;
      consider(score[pred] + std::log(p), pred, delta, &e.key);
    }
  }

  int full = lattice_.full_id();
  if (score[full] == kNegInf)
    fail(Errc::OovSkeleton, "no partition covers the skeleton with in-vocabulary units");

  std::vector<std::uint64_t> pieces;
  int cur = full;
  while (back[cur] != SubtreeLattice::kBos) {
    pieces.push_back(back_delta[cur]);
    cur = back[cur];
  }
  pieces.push_back(lattice_.mask(cur));

  TokenizationResult res;
  res.partition =
      Partition::from_masks(lattice_.source(), std::move(pieces), vocab_.phase() == Phase::Bare);
  res.probability = std::exp(score[full]);
  return res;
}

void Tokenizer::ffbs_forward() {
  int m = lattice_.size();
  pair_.assign(m, {});
  prefix_.assign(m, {});
  for (int i = 0; i < m; ++i) {
    std::uint64_t t = lattice_.mask(i);
    int k = std::popcount(t);
    pair_[i].assign(k, 0.0);
    prefix_[i].assign(k + 1, 0.0);
    int j = 0;
    for (std::uint64_t bits = t; bits; bits &= bits - 1, ++j) {
      int r = std::countr_zero(bits);
      if (r == 0) {
        pair_[i][j] = component_prob(t);
      } else {
        std::uint64_t delta = t & lattice_.descendants(r);
        double p = component_prob(delta);
        if (p > 0) {
          std::uint64_t pred = t ^ delta;
          int pid = lattice_.find(pred);
          // Partitions of pred whose pieces all root below r.
          double below = prefix_[pid][std::popcount(pred & low_bits(r))];
          pair_[i][j] = p * below;
        }
      }
      prefix_[i][j + 1] = prefix_[i][j] + pair_[i][j];
    }
  }
  marginal_ = prefix_[lattice_.full_id()].back();
  forward_done_ = true;
}

double Tokenizer::pair_weight(int subtree_id, int piece_root) const {
  std::uint64_t t = lattice_.mask(subtree_id);
  if (!(t >> piece_root & 1)) return 0.0;
  int j = std::popcount(t & low_bits(piece_root));
  return pair_[subtree_id][j];
}

TokenizationResult Tokenizer::ffbs_sample(double theta, std::uint64_t seed) const {
  if (!forward_done_) fail(Errc::OovSkeleton, "forward pass not run");
  if (!(theta > 0)) throw std::invalid_argument("theta must be positive");
  if (marginal_ <= 0)
    fail(Errc::OovSkeleton, "no partition covers the skeleton with in-vocabulary units");

  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> pieces;
  std::uint64_t cur = lattice_.mask(lattice_.full_id());
  int bound = 64;
  while (true) {
    int i = lattice_.find(cur);
    // Candidate last-piece roots below the bound, with their thetas applied
    // in a numerically safe way (max log subtracted before exponentiation).
    std::vector<int> roots;
    std::vector<double> logs;
    double max_log = kNegInf;
    int j = 0;
    for (std::uint64_t bits = cur; bits; bits &= bits - 1, ++j) {
      int r = std::countr_zero(bits);
      if (r >= bound) break;
      if (pair_[i][j] <= 0) continue;
      double lg = std::log(pair_[i][j]);
      roots.push_back(r);
      logs.push_back(lg);
      max_log = std::max(max_log, lg);
    }
    double total = 0.0;
    for (double& lg : logs) {
      lg = std::exp(theta * (lg - max_log));
      total += lg;
    }
    double u = uniform01(rng) * total;
    int chosen = static_cast<int>(roots.size()) - 1;
    double acc = 0.0;
    for (std::size_t c = 0; c < roots.size(); ++c) {
      acc += logs[c];
      if (u < acc) {
        chosen = static_cast<int>(c);
        break;
      }
    }
    int r = roots[chosen];
    if (r == 0) {
      pieces.push_back(cur);
      break;
    }
    std::uint64_t delta = cur & lattice_.descendants(r);
    pieces.push_back(delta);
    cur ^= delta;
    bound = r;
  }

  TokenizationResult res;
  res.probability = 1.0;
  for (std::uint64_t piece : pieces) res.probability *= component_prob(piece);
  res.partition =
      Partition::from_masks(lattice_.source(), std::move(pieces), vocab_.phase() == Phase::Bare);
  return res;
}

TokenizationResult viterbi_tokenize(const Skeleton& skeleton, const Vocabulary& vocab,
                                    int max_nodes) {
  Tokenizer tok(skeleton, vocab, max_nodes);
  return tok.viterbi();
}

TokenizationResult ffbs_tokenize(const Skeleton& skeleton, const Vocabulary& vocab, double theta,
                                 std::uint64_t seed, int max_nodes) {
  Tokenizer tok(skeleton, vocab, max_nodes);
  tok.ffbs_forward();
  return tok.ffbs_sample(theta, seed);
}

BruteForceResult brute_force_tokenize(const Skeleton& skeleton, const Vocabulary& vocab,
                                      int max_nodes) {
  int n = skeleton.node_count();
  if (n > max_nodes)
    fail(Errc::SkeletonTooLarge,
         std::to_string(n) + " nodes exceeds the brute-force cap of " + std::to_string(max_nodes));

  BruteForceResult out;
  std::string best_cat;
  bool bare = vocab.phase() == Phase::Bare;
  // Every partition into connected components corresponds to one subset of
  // cut edges (node v >= 1 cut from its parent starts a new piece).
  std::uint64_t num_cuts = n >= 1 ? 1ULL << (n - 1) : 0;
  std::vector<int> piece_of(n);
  for (std::uint64_t cut = 0; cut < num_cuts; ++cut) {
    piece_of[0] = 0;
    for (int v = 1; v < n; ++v)
      piece_of[v] = (cut >> (v - 1)) & 1 ? v : piece_of[skeleton.parent(v)];
    std::vector<std::uint64_t> masks;
    for (int v = 0; v < n; ++v) {
      if (piece_of[v] == v) masks.push_back(0);
    }
    std::vector<int> piece_index(n, -1);
    int next = 0;
    for (int v = 0; v < n; ++v) {
      int root = piece_of[v];
      if (piece_index[root] < 0) piece_index[root] = next++;
      masks[piece_index[root]] |= 1ULL << v;
    }
    double weight = 1.0;
    std::string cat;
    bool ok = true;
    for (std::uint64_t m : masks) {
      std::string key = bare ? bare_shape(skeleton, m).canonical() : decorate(skeleton, m).canonical();
      int id = vocab.find(key);
      if (id < 0 || vocab.prob(id) <= 0) {
        ok = false;
        break;
      }
      weight *= vocab.prob(id);
      cat += key;
    }
    if (!ok) continue;
    TokenizationResult r;
    r.partition = Partition::from_masks(skeleton, masks, bare);
    r.probability = weight;
    out.total_probability += weight;
    bool take = out.all_partitions.empty() || weight > out.best.probability ||
                (weight == out.best.probability && cat < best_cat);
    if (take) {
      out.best = r;
      best_cat = cat;
    }
    out.all_partitions.push_back(std::move(r));
  }
  return out;
}

}  // namespace treepiece
