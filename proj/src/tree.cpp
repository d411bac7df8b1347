#include "treepiece/tree.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace treepiece {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::UnbalancedBrackets: return "UnbalancedBrackets";
    case Errc::BadLabelPrefix: return "BadLabelPrefix";
    case Errc::TextUnderIntent: return "TextUnderIntent";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InvalidRoot: return "InvalidRoot";
    case Errc::InvalidAttachPosition: return "InvalidAttachPosition";
    case Errc::DisconnectedComponent: return "DisconnectedComponent";
    case Errc::NoOpenPlaceholder: return "NoOpenPlaceholder";
    case Errc::UnfilledPlaceholders: return "UnfilledPlaceholders";
    case Errc::InvalidPartition: return "InvalidPartition";
    case Errc::SkeletonTooLarge: return "SkeletonTooLarge";
    case Errc::OovSkeleton: return "OovSkeleton";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::ParseErrorAtLine: return "ParseErrorAtLine";
    case Errc::CorruptVocabFile: return "CorruptVocabFile";
  }
  return "UnknownError";
}

int Skeleton::Builder::add_node(int parent, OntologyLabel label) {
  int id = static_cast<int>(labels_.size());
  if (parent >= id) fail(Errc::InvalidRoot, "parent index must precede child");
  if (id == 0 && parent != -1) fail(Errc::InvalidRoot, "first node must be the root");
  if (id > 0 && parent < 0) fail(Errc::InvalidRoot, "only the first node may be parentless");
  labels_.push_back(std::move(label));
  parent_.push_back(parent);
  children_.emplace_back();
  if (parent >= 0) children_[parent].push_back(id);
  return id;
}

Skeleton Skeleton::Builder::build() const {
  Skeleton s;
  if (labels_.empty()) fail(Errc::EmptyInput, "skeleton has no nodes");
  if (labels_[0].kind != NodeKind::Intent) fail(Errc::InvalidRoot, "root must be an intent");
  int n = static_cast<int>(labels_.size());
  // Renumber into pre-order.
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> stack = {0};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    const auto& ch = children_[v];
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  if (static_cast<int>(order.size()) != n) fail(Errc::InvalidRoot, "nodes unreachable from root");
  std::vector<int> new_id(n);
  for (int i = 0; i < n; ++i) new_id[order[i]] = i;
  s.labels_.resize(n);
  s.parent_.resize(n);
  s.children_.resize(n);
  s.depth_.resize(n);
  for (int i = 0; i < n; ++i) {
    int old = order[i];
    s.labels_[i] = labels_[old];
    s.parent_[i] = parent_[old] < 0 ? -1 : new_id[parent_[old]];
    s.children_[i].reserve(children_[old].size());
    for (int c : children_[old]) s.children_[i].push_back(new_id[c]);
    s.depth_[i] = s.parent_[i] < 0 ? 1 : s.depth_[s.parent_[i]] + 1;
    s.max_depth_ = std::max(s.max_depth_, s.depth_[i]);
  }
  return s;
}

namespace {

bool parse_label(std::string_view tok, OntologyLabel* out) {
  if (tok.size() < 4) return false;
  char a = static_cast<char>(std::tolower(static_cast<unsigned char>(tok[0])));
  char b = static_cast<char>(std::tolower(static_cast<unsigned char>(tok[1])));
  if (tok[2] != ':') return false;
  if (a == 'i' && b == 'n')
    out->kind = NodeKind::Intent;
  else if (a == 's' && b == 'l')
    out->kind = NodeKind::Slot;
  else
    return false;
  out->name = std::string(tok.substr(3));
  return true;
}

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) toks.push_back(text.substr(i, j - i));
    i = j;
  }
  return toks;
}

struct OpenNode {
  OntologyLabel label;
  int builder_id;
  int child_count = 0;       // leaves + ontology children so far
  std::string pending_text;  // consecutive raw tokens awaiting a flush
  int pending_pos = -1;
};

}  // namespace

ParseTree parse_top(std::string_view text) {
  auto toks = split_ws(text);
  if (toks.empty()) fail(Errc::EmptyInput, "no tokens");

  Skeleton::Builder builder;
  std::vector<OpenNode> stack;
  std::vector<LeafRecord> leaves;
  bool root_closed = false;

  auto flush_text = [&](OpenNode& node) {
    if (node.pending_pos >= 0) {
      leaves.push_back({node.builder_id, node.pending_pos, std::move(node.pending_text)});
      node.pending_text.clear();
      node.pending_pos = -1;
    }
  };

  std::size_t i = 0;
  while (i < toks.size()) {
    std::string_view tok = toks[i++];
    if (tok[0] == '[') {
      if (root_closed) fail(Errc::UnbalancedBrackets, "content after root closes");
      std::string_view label_tok = tok.substr(1);
      if (label_tok.empty()) {
        if (i >= toks.size()) fail(Errc::BadLabelPrefix, "missing label after '['");
        label_tok = toks[i++];
      }
      OntologyLabel label;
      if (!parse_label(label_tok, &label) || label.name.empty())
        fail(Errc::BadLabelPrefix, "expected in:/sl: label, got '" + std::string(label_tok) + "'");
      int parent = stack.empty() ? -1 : stack.back().builder_id;
      if (!stack.empty()) {
        flush_text(stack.back());
        stack.back().child_count++;
      }
      int id = builder.add_node(parent, label);
      stack.push_back({std::move(label), id});
    } else if (tok == "]") {
      if (stack.empty()) fail(Errc::UnbalancedBrackets, "unmatched ']'");
      flush_text(stack.back());
      stack.pop_back();
      if (stack.empty()) root_closed = true;
    } else {
      if (tok.find('[') != std::string_view::npos || tok.find(']') != std::string_view::npos)
        fail(Errc::UnbalancedBrackets, "bracket embedded in token '" + std::string(tok) + "'");
      if (stack.empty())
        fail(Errc::UnbalancedBrackets, "text outside brackets: '" + std::string(tok) + "'");
      OpenNode& top = stack.back();
      if (top.label.kind == NodeKind::Intent)
        fail(Errc::TextUnderIntent, "raw token '" + std::string(tok) + "' under " + top.label.str());
      if (top.pending_pos < 0) {
        top.pending_pos = top.child_count++;
        top.pending_text = std::string(tok);
      } else {
        top.pending_text += ' ';
        top.pending_text += tok;
      }
    }
  }
  if (!stack.empty()) fail(Errc::UnbalancedBrackets, "unclosed '['");
  if (!root_closed) fail(Errc::EmptyInput, "no tree found");

  // Builder ids were assigned in pre-order already (nodes open in pre-order),
  // so leaf slot ids survive the renumbering unchanged.
  ParseTree tree;
  tree.skeleton_ = builder.build();
  std::sort(leaves.begin(), leaves.end(), [](const LeafRecord& a, const LeafRecord& b) {
    return a.slot != b.slot ? a.slot < b.slot : a.child_pos < b.child_pos;
  });
  tree.leaves_ = std::move(leaves);
  return tree;
}

namespace {

// Merged child view of one tree node: ontology children interleaved with
// leaves at their recorded positions.
struct MergedChild {
  bool is_leaf;
  int node = -1;
  const std::string* text = nullptr;
};

std::vector<MergedChild> merged_children(const Skeleton& s, int node,
                                         std::span<const LeafRecord> leaves) {
  std::vector<const LeafRecord*> mine;
  for (const auto& l : leaves)
    if (l.slot == node) mine.push_back(&l);
  auto onto = s.children(node);
  std::size_t total = onto.size() + mine.size();
  std::vector<MergedChild> out(total);
  std::vector<bool> taken(total, false);
  for (const LeafRecord* l : mine) {
    if (l->child_pos < 0 || l->child_pos >= static_cast<int>(total) || taken[l->child_pos])
      fail(Errc::InvalidPartition, "leaf position out of range");
    out[l->child_pos] = {true, -1, &l->text};
    taken[l->child_pos] = true;
  }
  std::size_t next = 0;
  for (int c : onto) {
    while (next < total && taken[next]) ++next;
    out[next] = {false, c, nullptr};
    taken[next++] = true;
  }
  return out;
}

void serialize_node(const Skeleton& s, int node, std::span<const LeafRecord> leaves,
                    std::string* out) {
  out->push_back('[');
  *out += s.label(node).str();
  for (const auto& ch : merged_children(s, node, leaves)) {
    out->push_back(' ');
    if (ch.is_leaf)
      *out += *ch.text;
    else
      serialize_node(s, ch.node, leaves, out);
  }
  *out += " ]";
}

}  // namespace

std::string serialize_top(const ParseTree& tree) {
  std::string out;
  serialize_node(tree.skeleton(), 0, tree.leaves(), &out);
  return out;
}

std::string serialize_top(const Skeleton& skeleton) {
  std::string out;
  serialize_node(skeleton, 0, {}, &out);
  return out;
}

Skeleton extract_skeleton(const ParseTree& tree) { return tree.skeleton(); }
Skeleton extract_skeleton(const Skeleton& skeleton) { return skeleton; }

std::vector<LeafRecord> extract_leaves(const ParseTree& tree) { return tree.leaves(); }

ParseTree ParseTree::from_parts(Skeleton skeleton, std::vector<LeafRecord> leaves) {
  std::sort(leaves.begin(), leaves.end(), [](const LeafRecord& a, const LeafRecord& b) {
    return a.slot != b.slot ? a.slot < b.slot : a.child_pos < b.child_pos;
  });
  for (const auto& l : leaves) {
    if (l.slot < 0 || l.slot >= skeleton.node_count())
      fail(Errc::InvalidPartition, "leaf owner out of range");
    if (skeleton.label(l.slot).kind != NodeKind::Slot)
      fail(Errc::TextUnderIntent, "leaf attached to intent node");
  }
  ParseTree t;
  t.skeleton_ = std::move(skeleton);
  t.leaves_ = std::move(leaves);
  // Validates leaf positions.
  for (int v = 0; v < t.skeleton_.node_count(); ++v) merged_children(t.skeleton_, v, t.leaves_);
  return t;
}

Corpus Corpus::from_records(std::vector<CorpusRecord> records) {
  Corpus c;
  c.skeletons.reserve(records.size());
  for (const auto& r : records) c.skeletons.push_back(extract_skeleton(r.tree));
  c.records = std::move(records);
  return c;
}

}  // namespace treepiece
