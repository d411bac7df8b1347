#include "treepiece/vocab.hpp"

namespace treepiece {

int Vocabulary::upsert(Unit unit, std::uint64_t freq) {
  auto it = index_.find(unit.canonical());
  if (it != index_.end()) {
    freq_[it->second] = freq;
    return it->second;
  }
  if (phase_ == Phase::Bare && unit.decorated())
    fail(Errc::InvalidPartition, "decorated unit in bare-phase vocabulary");
  int id = static_cast<int>(units_.size());
  index_.emplace(unit.canonical(), id);
  units_.push_back(std::move(unit));
  freq_.push_back(freq);
  prob_.push_back(0.0);
  return id;
}

void Vocabulary::renormalize() {
  std::uint64_t total = 0;
  for (std::uint64_t f : freq_) total += f;
  if (total == 0) fail(Errc::EmptyCorpus, "vocabulary has no observed frequencies");
  for (std::size_t i = 0; i < freq_.size(); ++i)
    prob_[i] = static_cast<double>(freq_[i]) / static_cast<double>(total);
}

void Vocabulary::set_freqs(std::vector<std::uint64_t> freqs) {
  if (freqs.size() != units_.size())
    fail(Errc::CorruptVocabFile, "frequency table size does not match vocabulary");
  freq_ = std::move(freqs);
}

void Vocabulary::set_probs(std::vector<double> probs) {
  if (probs.size() != units_.size())
    fail(Errc::CorruptVocabFile, "simplex size does not match vocabulary");
  prob_ = std::move(probs);
}

double Vocabulary::prob_sum() const {
  double s = 0.0;
  for (double p : prob_) s += p;
  return s;
}

}  // namespace treepiece
