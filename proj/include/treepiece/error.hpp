#ifndef TREEPIECE_ERROR_HPP
#define TREEPIECE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace treepiece {

enum class Errc {
  // tree parsing / structure
  UnbalancedBrackets,
  BadLabelPrefix,
  TextUnderIntent,
  EmptyInput,
  InvalidRoot,
  // unit algebra
  InvalidAttachPosition,
  DisconnectedComponent,
  NoOpenPlaceholder,
  UnfilledPlaceholders,
  InvalidPartition,
  // lattice / tokenizers
  SkeletonTooLarge,
  OovSkeleton,
  // trainer / io
  EmptyCorpus,
  FileNotFound,
  ParseErrorAtLine,
  CorruptVocabFile,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace treepiece

#endif  // TREEPIECE_ERROR_HPP
