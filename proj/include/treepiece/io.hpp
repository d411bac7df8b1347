#ifndef TREEPIECE_IO_HPP
#define TREEPIECE_IO_HPP

#include <iosfwd>
#include <string>

#include "treepiece/tree.hpp"
#include "treepiece/vocab.hpp"

namespace treepiece {

inline constexpr std::string_view kVocabFileHeader = "TPV1";

// Loads a tab-separated corpus: 3 columns (domain, utterance, logical_form)
// or 2 columns (utterance, logical_form), auto-detected from the first data
// line when `columns` is 0; a first line whose last field is not a bracketed
// form is treated as a header and skipped. A single-column file of bare
// logical forms is also accepted. In lenient mode malformed lines are
// reported to `diag` and skipped; otherwise they abort with the line number.
Corpus load_corpus(const std::string& path, bool lenient = false, int columns = 0,
                   std::ostream* diag = nullptr);
Corpus load_corpus_stream(std::istream& in, const std::string& name, bool lenient = false,
                          int columns = 0, std::ostream* diag = nullptr);

// Vocabulary file: a TPV1 header line, then one JSON object per line with
// keys unit/freq/prob/phase, sorted by unit string, probabilities printed
// with 17 significant digits. Loading then saving is byte-identical.
void save_vocab(const Vocabulary& vocab, const std::string& path);
void save_vocab_stream(const Vocabulary& vocab, std::ostream& out);
Vocabulary load_vocab(const std::string& path);
Vocabulary load_vocab_stream(std::istream& in, const std::string& name);

}  // namespace treepiece

#endif  // TREEPIECE_IO_HPP
