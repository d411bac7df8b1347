#include "treepiece/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "treepiece/io.hpp"
#include "treepiece/util.hpp"

namespace treepiece {

namespace {

// Output sink for a path, with "-" meaning stdout.
class OutFile {
 public:
  explicit OutFile(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) fail(Errc::FileNotFound, "cannot write " + path);
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }
  void finish() {
    if (file_.is_open()) file_.flush();
  }

 private:
  std::ofstream file_;
};

Corpus load(const CorpusOptions& opts, std::ostream& err) {
  return load_corpus(opts.path, opts.lenient, opts.columns, &err);
}

std::string format3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
}

}  // namespace

int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Corpus corpus = load(opts.corpus, err);
    out << "records: " << corpus.size() << "\n";

    Vocabulary vocab = init_vocab(corpus);
    std::size_t initial = vocab.size();
    out << "initial units: " << initial << "\n";

    vocab = generate_vocabulary(corpus, opts.config);
    out << "merges executed: " << vocab.size() - initial << "\n";
    out << "post-merge vocabulary: " << vocab.size() << "\n";

    auto [trained, trace] = em_train(corpus, std::move(vocab), opts.config);
    for (std::size_t i = 0; i < trace.log_likelihood.size(); ++i)
      out << "em iteration " << i + 1 << ": log-likelihood "
          << format_double17(trace.log_likelihood[i]) << "\n";
    out << "em stop: " << (trace.stop == EmStop::Converged ? "converged" : "max-iterations")
        << " after " << trace.iterations << " iterations\n";

    Vocabulary final_vocab = std::move(trained);
    if (!opts.no_expand) {
      final_vocab = expand_vocab(corpus, final_vocab, opts.config);
      out << "expanded vocabulary: " << final_vocab.size() << "\n";
    }
    save_vocab(final_vocab, opts.out_path);
    out << "wrote " << opts.out_path << "\n";
    return kExitOk;
  });
}

int cmd_tokenize(const TokenizeOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    Vocabulary vocab = load_vocab(opts.vocab_path);
    Corpus corpus = load(opts.corpus, err);
    OutFile sink(opts.out_path);
    std::ostream& out = sink.get();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const Skeleton& skel = corpus.skeletons[i];
      try {
        TokenizationResult res =
            opts.mode == TokenizeMode::Viterbi
                ? viterbi_tokenize(skel, vocab, opts.max_nodes)
                : ffbs_tokenize(skel, vocab, opts.theta, mix_seed(opts.seed, {i}),
                                opts.max_nodes);
        const auto& units = res.partition.units();
        for (std::size_t k = 0; k < units.size(); ++k) {
          if (k) out << '\t';
          out << units[k].canonical();
        }
        out << '\n';
      } catch (const Error& e) {
        if (e.code() != Errc::OovSkeleton) throw;
        out << "<OOV>\n";  // data, not a failure
      }
    }
    sink.finish();
    return kExitOk;
  });
}

int cmd_detokenize(const DetokenizeOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream file;
    if (opts.input_path != "-") {
      file.open(opts.input_path);
      if (!file) fail(Errc::FileNotFound, opts.input_path);
    }
    std::istream& in = opts.input_path == "-" ? std::cin : file;
    OutFile sink(opts.out_path);
    std::ostream& out = sink.get();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      try {
        std::vector<Unit> units;
        std::size_t start = 0;
        while (start <= line.size()) {
          std::size_t tab = line.find('\t', start);
          std::string_view field(line.data() + start,
                                 (tab == std::string::npos ? line.size() : tab) - start);
          units.push_back(parse_unit(field));
          if (tab == std::string::npos) break;
          start = tab + 1;
        }
        out << serialize_top(assemble(units)) << '\n';
      } catch (const Error& e) {
        fail(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    sink.finish();
    return kExitOk;
  });
}

int cmd_stats(const StatsOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Vocabulary vocab = load_vocab(opts.vocab_path);
    Corpus corpus = load(opts.corpus, err);
    std::vector<int> units_per;
    std::size_t oov = 0;
    for (const Skeleton& s : corpus.skeletons) {
      try {
        units_per.push_back(static_cast<int>(viterbi_tokenize(s, vocab, opts.max_nodes).partition.size()));
      } catch (const Error& e) {
        if (e.code() != Errc::OovSkeleton) throw;
        ++oov;
      }
    }
    std::size_t with_ph = 0;
    std::map<int, std::size_t> size_hist;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      if (vocab.unit(static_cast<int>(i)).decorated()) ++with_ph;
      size_hist[vocab.unit(static_cast<int>(i)).node_count()]++;
    }
    out << "records: " << corpus.size() << "\n";
    out << "vocabulary: phase=" << phase_name(vocab.phase()) << " size=" << vocab.size()
        << " placeholder_units=" << with_ph << " plain_units=" << vocab.size() - with_ph << "\n";
    out << "oov: " << oov << "\n";
    if (!units_per.empty()) {
      double mean = 0.0;
      for (int u : units_per) mean += u;
      mean /= static_cast<double>(units_per.size());
      std::vector<int> sorted = units_per;
      std::sort(sorted.begin(), sorted.end());
      int median = sorted[(sorted.size() - 1) / 2];
      int mx = sorted.back();
      out << "units per skeleton: mean=" << format3(mean) << " median=" << median
          << " max=" << mx << "\n";
    } else {
      out << "units per skeleton: n/a (all records oov)\n";
    }
    out << "unit size histogram:\n";
    for (const auto& [nodes, cnt] : size_hist)
      out << "  " << nodes << " nodes: " << cnt << " units\n";
    return kExitOk;
  });
}

int cmd_oov_rate(const StatsOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Vocabulary vocab = load_vocab(opts.vocab_path);
    Corpus corpus = load(opts.corpus, err);
    std::size_t oov = 0;
    for (const Skeleton& s : corpus.skeletons) {
      try {
        viterbi_tokenize(s, vocab, opts.max_nodes);
      } catch (const Error& e) {
        if (e.code() != Errc::OovSkeleton) throw;
        ++oov;
      }
    }
    double pct = 100.0 * static_cast<double>(oov) / static_cast<double>(corpus.size());
    out << "oov: " << oov << " / " << corpus.size() << " = " << format3(pct) << "%\n";
    return kExitOk;
  });
}

}  // namespace treepiece
