#ifndef TREEPIECE_VOCAB_HPP
#define TREEPIECE_VOCAB_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "treepiece/unit.hpp"

namespace treepiece {

enum class Phase { Bare, Decorated };

inline const char* phase_name(Phase p) { return p == Phase::Bare ? "bare" : "decorated"; }

// Unit set with frequencies and a probability simplex over the units.
// In the bare phase no unit carries a placeholder and tokenizers match
// components by bare shape; in the decorated phase they match by decorated
// canonical form.
class Vocabulary {
 public:
  explicit Vocabulary(Phase phase = Phase::Bare) : phase_(phase) {}

  Phase phase() const { return phase_; }
  void set_phase(Phase p) { phase_ = p; }

  std::size_t size() const { return units_.size(); }
  const Unit& unit(int id) const { return units_[id]; }
  std::uint64_t freq(int id) const { return freq_[id]; }
  double prob(int id) const { return prob_[id]; }

  int find(std::string_view canonical) const {
    auto it = index_.find(std::string(canonical));
    return it == index_.end() ? -1 : it->second;
  }
  bool contains(std::string_view canonical) const { return find(canonical) >= 0; }

  // Inserts or overwrites the frequency of a unit; returns its id.
  int upsert(Unit unit, std::uint64_t freq);
  void add_freq(int id, std::uint64_t delta) { freq_[id] += delta; }
  void set_freqs(std::vector<std::uint64_t> freqs);

  // Sets probabilities to freq / sum(freq).
  void renormalize();
  // Replaces the simplex (must match size; callers guarantee the sum).
  void set_probs(std::vector<double> probs);

  double prob_sum() const;

 private:
  Phase phase_;
  std::vector<Unit> units_;
  std::vector<std::uint64_t> freq_;
  std::vector<double> prob_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace treepiece

#endif  // TREEPIECE_VOCAB_HPP
