#include "treepiece/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "treepiece/util.hpp"

namespace treepiece {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool looks_like_logical_form(std::string_view field) {
  std::size_t i = 0;
  while (i < field.size() && std::isspace(static_cast<unsigned char>(field[i]))) ++i;
  return i < field.size() && field[i] == '[';
}

[[noreturn]] void line_fail(const std::string& name, std::size_t line_no, const std::string& what) {
  fail(Errc::ParseErrorAtLine, name + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

Corpus load_corpus_stream(std::istream& in, const std::string& name, bool lenient, int columns,
                          std::ostream* diag) {
  if (columns != 0 && (columns < 1 || columns > 3))
    throw std::invalid_argument("columns must be 1, 2 or 3");
  std::ostream& err = diag ? *diag : std::cerr;
  std::vector<CorpusRecord> records;
  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;
  int detected = columns;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (first_content_line) {
      first_content_line = false;
      if (!looks_like_logical_form(fields.back())) continue;  // header line
    }
    if (detected == 0) detected = static_cast<int>(std::min<std::size_t>(fields.size(), 3));
    try {
      if (static_cast<int>(fields.size()) != detected)
        line_fail(name, line_no,
                  "expected " + std::to_string(detected) + " tab-separated columns, got " +
                      std::to_string(fields.size()));
      CorpusRecord rec;
      std::string_view form;
      if (detected == 1) {
        form = fields[0];
      } else if (detected == 2) {
        rec.utterance = std::string(fields[0]);
        form = fields[1];
      } else {
        rec.domain = std::string(fields[0]);
        rec.utterance = std::string(fields[1]);
        form = fields[2];
      }
      rec.tree = parse_top(form);
      records.push_back(std::move(rec));
    } catch (const Error& e) {
      if (e.code() == Errc::ParseErrorAtLine && !lenient) throw;
      if (!lenient) line_fail(name, line_no, e.what());
      err << name << ":" << line_no << ": skipped: " << e.what() << "\n";
    }
  }
  if (records.empty()) fail(Errc::EmptyCorpus, name + " has no parseable records");
  return Corpus::from_records(std::move(records));
}

Corpus load_corpus(const std::string& path, bool lenient, int columns, std::ostream* diag) {
  if (path == "-") return load_corpus_stream(std::cin, "<stdin>", lenient, columns, diag);
  std::ifstream in(path);
  if (!in) fail(Errc::FileNotFound, path);
  return load_corpus_stream(in, path, lenient, columns, diag);
}

void save_vocab_stream(const Vocabulary& vocab, std::ostream& out) {
  if (vocab.size() == 0) fail(Errc::CorruptVocabFile, "refusing to write an empty vocabulary");
  std::vector<int> order(vocab.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return vocab.unit(a).canonical() < vocab.unit(b).canonical();
  });
  out << kVocabFileHeader << "\n";
  for (int id : order) {
    nlohmann::json unit_str = vocab.unit(id).canonical();
    out << "{\"unit\":" << unit_str.dump() << ",\"freq\":" << vocab.freq(id)
        << ",\"prob\":" << format_double17(vocab.prob(id)) << ",\"phase\":\""
        << phase_name(vocab.phase()) << "\"}\n";
  }
}

void save_vocab(const Vocabulary& vocab, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::FileNotFound, "cannot write " + path);
  save_vocab_stream(vocab, out);
  if (!out.flush()) fail(Errc::FileNotFound, "write failed for " + path);
}

Vocabulary load_vocab_stream(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) fail(Errc::CorruptVocabFile, name + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kVocabFileHeader)
    fail(Errc::CorruptVocabFile, name + ": bad header '" + line + "'");

  bool phase_known = false;
  Phase phase = Phase::Bare;
  std::vector<std::tuple<Unit, std::uint64_t, double>> entries;
  std::size_t line_no = 1;
  std::string prev_unit;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
    auto where = name + ":" + std::to_string(line_no);
    if (rec.is_discarded() || !rec.is_object() || !rec.contains("unit") || !rec.contains("freq") ||
        !rec.contains("prob") || !rec.contains("phase"))
      fail(Errc::CorruptVocabFile, where + ": malformed record");
    if (!rec["unit"].is_string() || !rec["freq"].is_number_unsigned() ||
        !rec["prob"].is_number() || !rec["phase"].is_string())
      fail(Errc::CorruptVocabFile, where + ": wrong field types");
    std::string unit_str = rec["unit"].get<std::string>();
    if (!prev_unit.empty() && !(prev_unit < unit_str))
      fail(Errc::CorruptVocabFile, where + ": entries not sorted by unit string");
    prev_unit = unit_str;
    Unit unit;
    try {
      unit = parse_unit(unit_str);
    } catch (const Error& e) {
      fail(Errc::CorruptVocabFile, where + ": " + e.what());
    }
    if (unit.canonical() != unit_str)
      fail(Errc::CorruptVocabFile, where + ": unit string is not canonical");
    double prob = rec["prob"].get<double>();
    if (!(prob >= 0.0) || prob > 1.0)
      fail(Errc::CorruptVocabFile, where + ": probability out of range");
    std::string phase_str = rec["phase"].get<std::string>();
    Phase p;
    if (phase_str == "bare")
      p = Phase::Bare;
    else if (phase_str == "decorated")
      p = Phase::Decorated;
    else
      fail(Errc::CorruptVocabFile, where + ": unknown phase '" + phase_str + "'");
    if (phase_known && p != phase) fail(Errc::CorruptVocabFile, where + ": mixed phases");
    phase = p;
    phase_known = true;
    if (phase == Phase::Bare && unit.decorated())
      fail(Errc::CorruptVocabFile, where + ": placeholder unit in bare-phase file");
    entries.emplace_back(std::move(unit), rec["freq"].get<std::uint64_t>(), prob);
  }
  if (entries.empty()) fail(Errc::CorruptVocabFile, name + ": no entries");

  Vocabulary vocab(phase);
  std::vector<double> probs;
  probs.reserve(entries.size());
  double sum = 0.0;
  for (auto& [unit, freq, prob] : entries) {
    int id = static_cast<int>(vocab.size());
    if (vocab.upsert(std::move(unit), freq) != id)
      fail(Errc::CorruptVocabFile, name + ": duplicate unit entry");
    probs.push_back(prob);
    sum += prob;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    fail(Errc::CorruptVocabFile,
         name + ": probabilities sum to " + format_double17(sum) + ", not 1");
  vocab.set_probs(std::move(probs));
  return vocab;
}

Vocabulary load_vocab(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::FileNotFound, path);
  return load_vocab_stream(in, path);
}

}  // namespace treepiece
