#include "treepiece/trainer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <unordered_map>

#include "treepiece/util.hpp"

namespace treepiece {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Identical skeletons share one lattice; per-record work (RNG streams,
// counts) stays keyed by the original record index, so results are the same
// as processing every record independently.
struct DedupCorpus {
  std::vector<const Skeleton*> unique;
  std::vector<std::uint64_t> weight;
  std::vector<std::vector<std::size_t>> records;  // original indices per unique

  static DedupCorpus build(const Corpus& corpus) {
    if (corpus.skeletons.empty()) fail(Errc::EmptyCorpus, "corpus has no records");
    DedupCorpus d;
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < corpus.skeletons.size(); ++i) {
      std::string key = serialize_top(corpus.skeletons[i]);
      auto [it, inserted] = seen.emplace(std::move(key), d.unique.size());
      if (inserted) {
        d.unique.push_back(&corpus.skeletons[i]);
        d.weight.push_back(0);
        d.records.emplace_back();
      }
      d.weight[it->second] += 1;
      d.records[it->second].push_back(i);
    }
    return d;
  }
};

// parallel_for with deterministic exception propagation (first failing index).
void parallel_for_checked(std::size_t n, const std::function<void(std::size_t)>& fn,
                          unsigned threads) {
  std::vector<std::exception_ptr> errors(n);
  parallel_for_indexed(
      n,
      [&](std::size_t i) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      },
      threads);
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

Vocabulary init_vocab(const Corpus& corpus) {
  if (corpus.skeletons.empty()) fail(Errc::EmptyCorpus, "corpus has no records");
  std::map<std::string, std::pair<Unit, std::uint64_t>> counts;
  for (const Skeleton& s : corpus.skeletons) {
    for (int v = 0; v < s.node_count(); ++v) {
      Unit u = Unit::singleton(s.label(v));
      auto [it, inserted] = counts.try_emplace(u.canonical(), std::move(u), 0);
      it->second.second += 1;
    }
  }
  Vocabulary vocab(Phase::Bare);
  for (auto& [canon, entry] : counts) vocab.upsert(std::move(entry.first), entry.second);
  vocab.renormalize();
  return vocab;
}

Vocabulary generate_vocabulary(const Corpus& corpus, const TrainConfig& config) {
  Vocabulary vocab = init_vocab(corpus);
  DedupCorpus dedup = DedupCorpus::build(corpus);
  std::size_t m = dedup.unique.size();

  // Partition state: rep[v] = pre-order index of the piece root owning v.
  std::vector<std::vector<int>> rep(m);
  std::vector<std::vector<std::uint64_t>> piece_mask(m);
  for (std::size_t i = 0; i < m; ++i) {
    int n = dedup.unique[i]->node_count();
    rep[i].resize(n);
    piece_mask[i].assign(n, 0);
    for (int v = 0; v < n; ++v) {
      rep[i][v] = v;
      piece_mask[i][v] = 1ULL << v;
    }
  }

  for (int round = 0; round < config.num_merges; ++round) {
    std::map<std::string, std::uint64_t> counts;
    std::unordered_map<std::string, Unit> shapes;
    for (std::size_t i = 0; i < m; ++i) {
      const Skeleton& s = *dedup.unique[i];
      for (int v = 1; v < s.node_count(); ++v) {
        int u = s.parent(v);
        if (rep[i][u] == rep[i][v]) continue;
        Unit merged = bare_shape(s, piece_mask[i][rep[i][u]] | piece_mask[i][rep[i][v]]);
        auto [it, inserted] = counts.try_emplace(merged.canonical(), 0);
        it->second += dedup.weight[i];
        if (inserted) shapes.emplace(merged.canonical(), std::move(merged));
      }
    }
    const std::string* best = nullptr;
    std::uint64_t best_count = 0;
    for (const auto& [canon, c] : counts) {
      if (c > best_count) {  // map order makes ties resolve to the smaller key
        best = &canon;
        best_count = c;
      }
    }
    if (best == nullptr || best_count < 2) break;

    for (std::size_t i = 0; i < m; ++i) {
      const Skeleton& s = *dedup.unique[i];
      std::uint64_t consumed = 0;  // piece roots merged this round
      for (int v = 1; v < s.node_count(); ++v) {
        int u = s.parent(v);
        int pu = rep[i][u], pv = rep[i][v];
        if (pu == pv) continue;
        if ((consumed >> pu & 1) || (consumed >> pv & 1)) continue;
        std::uint64_t merged_mask = piece_mask[i][pu] | piece_mask[i][pv];
        if (bare_shape(s, merged_mask).canonical() != *best) continue;
        piece_mask[i][pu] = merged_mask;
        for (int w = 0; w < s.node_count(); ++w)
          if (rep[i][w] == pv) rep[i][w] = pu;
        consumed |= 1ULL << pu;
      }
    }
    vocab.upsert(shapes.at(*best), best_count);
  }
  vocab.renormalize();
  return vocab;
}

namespace {

struct EStepOut {
  std::vector<std::string> keys;   // vocabulary keys of the emitted units
  std::uint64_t key_weight = 1;    // count added per key occurrence
  double log_prob = 0.0;           // per-skeleton log-probability
};

template <class EStep>
std::pair<Vocabulary, EmTrace> run_em(const Corpus& corpus, Vocabulary vocab,
                                      const TrainConfig& config, const EStep& estep) {
  DedupCorpus dedup = DedupCorpus::build(corpus);
  std::size_t m = dedup.unique.size();
  std::vector<Tokenizer> tokenizers;
  tokenizers.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    tokenizers.emplace_back(*dedup.unique[i], vocab, config.max_nodes);

  EmTrace trace;
  double prev = kNegInf;
  for (int iter = 0; iter < config.em_max_iters; ++iter) {
    std::vector<EStepOut> outs(m);
    std::vector<std::uint64_t> freq(vocab.size(), 0);
    parallel_for_checked(
        m, [&](std::size_t i) { outs[i] = estep(iter, i, tokenizers[i], dedup); },
        config.threads);
    double curr = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      curr += static_cast<double>(dedup.weight[i]) * outs[i].log_prob;
    for (std::size_t i = 0; i < m; ++i) {
      for (const std::string& key : outs[i].keys) {
        int id = vocab.find(key);
        freq[id] += outs[i].key_weight;
      }
    }
    std::uint64_t total = 0;
    for (std::uint64_t f : freq) total += f;
    std::vector<double> probs(vocab.size());
    for (std::size_t t = 0; t < freq.size(); ++t)
      probs[t] = static_cast<double>(freq[t]) / static_cast<double>(total);
    vocab.set_freqs(std::move(freq));
    vocab.set_probs(std::move(probs));

    trace.log_likelihood.push_back(curr);
    double delta = curr - prev;
    prev = curr;
    if (delta <= config.em_epsilon) {
      trace.stop = EmStop::Converged;
      break;
    }
  }
  trace.iterations = static_cast<int>(trace.log_likelihood.size());
  return {std::move(vocab), std::move(trace)};
}

}  // namespace

std::pair<Vocabulary, EmTrace> em_train(const Corpus& corpus, Vocabulary vocab,
                                        const TrainConfig& config) {
  return run_em(corpus, std::move(vocab), config,
                [](int, std::size_t i, Tokenizer& tok, const DedupCorpus& dedup) {
                  TokenizationResult r = tok.viterbi();
                  EStepOut out;
                  out.keys = r.partition.vocab_keys();
                  out.key_weight = dedup.weight[i];
                  out.log_prob = std::log(r.probability);
                  return out;
                });
}

std::pair<Vocabulary, EmTrace> em_train_sampled(const Corpus& corpus, Vocabulary vocab,
                                                const TrainConfig& config,
                                                int samples_per_skeleton, double theta) {
  if (samples_per_skeleton < 1) throw std::invalid_argument("need at least one sample");
  std::uint64_t base_seed = config.seed;
  return run_em(corpus, std::move(vocab), config,
                [samples_per_skeleton, theta, base_seed](
                    int iter, std::size_t i, Tokenizer& tok, const DedupCorpus& dedup) {
                  tok.ffbs_forward();
                  if (tok.marginal() <= 0)
                    fail(Errc::OovSkeleton, "skeleton not coverable by the vocabulary");
                  EStepOut out;
                  out.log_prob = std::log(tok.marginal());
                  out.key_weight = 1;  // keys below are already per record and draw
                  // Raw totals over records x draws; the 1/K factor cancels in
                  // the M-step normalization.
                  for (std::size_t rec : dedup.records[i]) {
                    for (int k = 0; k < samples_per_skeleton; ++k) {
                      std::uint64_t seed = mix_seed(
                          base_seed, {static_cast<std::uint64_t>(iter), rec,
                                      static_cast<std::uint64_t>(k)});
                      TokenizationResult r = tok.ffbs_sample(theta, seed);
                      for (const std::string& key : r.partition.vocab_keys())
                        out.keys.push_back(key);
                    }
                  }
                  return out;
                });
}

Vocabulary expand_vocab(const Corpus& corpus, const Vocabulary& vocab,
                        const TrainConfig& config) {
  if (vocab.phase() != Phase::Bare)
    throw std::invalid_argument("expand_vocab requires a bare-phase vocabulary");
  DedupCorpus dedup = DedupCorpus::build(corpus);
  std::size_t m = dedup.unique.size();

  std::vector<std::map<std::string, std::pair<Unit, std::uint64_t>>> slots(m);
  parallel_for_checked(
      m,
      [&](std::size_t i) {
        Tokenizer tok(*dedup.unique[i], vocab, config.max_nodes);
        tok.ffbs_forward();
        if (tok.marginal() <= 0)
          fail(Errc::OovSkeleton, "training skeleton not coverable by the vocabulary");
        for (std::size_t rec : dedup.records[i]) {
          for (int k = 0; k < config.expand_samples; ++k) {
            std::uint64_t seed = mix_seed(config.seed, {rec, static_cast<std::uint64_t>(k)});
            TokenizationResult r = tok.ffbs_sample(config.expand_theta, seed);
            for (const Unit& u : r.partition.units()) {
              auto [it, inserted] = slots[i].try_emplace(u.canonical(), u, 0);
              it->second.second += 1;
            }
          }
        }
      },
      config.threads);

  std::map<std::string, std::pair<Unit, std::uint64_t>> total;
  for (auto& slot : slots) {
    for (auto& [canon, entry] : slot) {
      auto [it, inserted] = total.try_emplace(canon, std::move(entry.first), 0);
      it->second.second += entry.second;
    }
  }
  Vocabulary out(Phase::Decorated);
  for (auto& [canon, entry] : total) out.upsert(std::move(entry.first), entry.second);
  out.renormalize();
  return out;
}

}  // namespace treepiece
