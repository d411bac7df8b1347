#ifndef TREEPIECE_TESTUTIL_HPP
#define TREEPIECE_TESTUTIL_HPP

#include <random>
#include <string>
#include <vector>

#include "treepiece/lattice.hpp"
#include "treepiece/tree.hpp"
#include "treepiece/unit.hpp"
#include "treepiece/vocab.hpp"

namespace tptest {

using namespace treepiece;

inline Skeleton skel(const std::string& top) { return extract_skeleton(parse_top(top)); }

inline Corpus corpus_of(const std::vector<std::string>& forms) {
  std::vector<CorpusRecord> records;
  for (const auto& f : forms) records.push_back({std::nullopt, "", parse_top(f)});
  return Corpus::from_records(std::move(records));
}

// Vocabulary from (canonical unit string, probability) pairs; frequencies are
// not meaningful here and default to 1.
inline Vocabulary vocab_of(Phase phase,
                           const std::vector<std::pair<std::string, double>>& entries) {
  Vocabulary v(phase);
  std::vector<double> probs;
  for (const auto& [canon, p] : entries) {
    v.upsert(parse_unit(canon), 1);
    probs.push_back(p);
  }
  v.set_probs(std::move(probs));
  return v;
}

// The canonical two-partition fixture: skeleton [in:A [sl:B ] ] with units
// a = [in:A <ph> ], b = [sl:B ], ab = [in:A [sl:B ] ] at probability 1/3 each.
inline Vocabulary two_partition_vocab() {
  return vocab_of(Phase::Decorated, {{"[in:A <ph> ]", 1.0 / 3},
                                     {"[sl:B ]", 1.0 / 3},
                                     {"[in:A [sl:B ] ]", 1.0 / 3}});
}

inline Skeleton two_partition_skeleton() { return skel("[in:A [sl:B ] ]"); }

// Random rooted skeleton with an intent root and labels drawn from a small
// alphabet so shapes collide often.
inline Skeleton random_skeleton(std::mt19937_64& rng, int max_nodes) {
  int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_nodes));
  Skeleton::Builder b;
  std::vector<char> names = {'A', 'B', 'C'};
  b.add_node(-1, {NodeKind::Intent, std::string(1, names[rng() % names.size()])});
  for (int v = 1; v < n; ++v) {
    int parent = static_cast<int>(rng() % static_cast<unsigned>(v));
    NodeKind kind = rng() % 2 ? NodeKind::Intent : NodeKind::Slot;
    b.add_node(parent, {kind, std::string(1, names[rng() % names.size()])});
  }
  return b.build();
}

// All connected components of a skeleton (masks), used to propose vocabulary
// units: for every node, all ways of keeping or dropping each child subtree.
inline std::vector<std::uint64_t> components_rooted_at(const Skeleton& s, int v) {
  std::vector<std::uint64_t> acc = {1ULL << v};
  for (int c : s.children(v)) {
    auto sub = components_rooted_at(s, c);
    std::vector<std::uint64_t> next;
    for (std::uint64_t a : acc) {
      next.push_back(a);
      for (std::uint64_t m : sub) next.push_back(a | m);
    }
    acc = std::move(next);
  }
  return acc;
}

inline std::vector<std::uint64_t> all_components(const Skeleton& s) {
  std::vector<std::uint64_t> out;
  for (int v = 0; v < s.node_count(); ++v)
    for (std::uint64_t m : components_rooted_at(s, v)) out.push_back(m);
  return out;
}

// Random vocabulary over a skeleton's component shapes. Keeps each candidate
// with probability `keep`, zeroes some probabilities, and normalizes the
// rest. May leave the skeleton uncoverable, which is intended.
inline Vocabulary random_vocab(std::mt19937_64& rng, const Skeleton& s, Phase phase,
                               double keep = 0.6) {
  std::vector<std::pair<std::string, double>> entries;
  std::vector<std::string> seen;
  for (std::uint64_t m : all_components(s)) {
    std::string canon =
        phase == Phase::Bare ? bare_shape(s, m).canonical() : decorate(s, m).canonical();
    bool dup = false;
    for (const auto& c : seen)
      if (c == canon) dup = true;
    if (dup) continue;
    seen.push_back(canon);
    double r = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (r > keep) continue;
    double zero_draw = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double weight = zero_draw < 0.15 ? 0.0 : 0.05 + static_cast<double>(rng() >> 11) * 0x1.0p-53;
    entries.push_back({canon, weight});
  }
  double total = 0;
  for (auto& [c, w] : entries) total += w;
  if (entries.empty() || total == 0) {
    // Degenerate draw; fall back to the full-skeleton unit alone.
    std::uint64_t full = (1ULL << s.node_count()) - 1;
    std::string canon =
        phase == Phase::Bare ? bare_shape(s, full).canonical() : decorate(s, full).canonical();
    return vocab_of(phase, {{canon, 1.0}});
  }
  for (auto& [c, w] : entries) w /= total;
  return vocab_of(phase, entries);
}

}  // namespace tptest

#endif  // TREEPIECE_TESTUTIL_HPP
