#ifndef TREEPIECE_TREE_HPP
#define TREEPIECE_TREE_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treepiece/error.hpp"

namespace treepiece {

enum class NodeKind { Intent, Slot };

// An intent/slot label. Serialized as "in:NAME" / "sl:NAME".
struct OntologyLabel {
  NodeKind kind = NodeKind::Intent;
  std::string name;

  std::string str() const { return (kind == NodeKind::Intent ? "in:" : "sl:") + name; }
  bool operator==(const OntologyLabel&) const = default;
  auto operator<=>(const OntologyLabel&) const = default;
};

// Ontology-only tree stored in pre-order: node 0 is the root, children of a
// node carry larger indices and appear in sibling order. Immutable after
// construction, so equality is memberwise.
class Skeleton {
 public:
  Skeleton() = default;

  int node_count() const { return static_cast<int>(labels_.size()); }
  int depth() const { return max_depth_; }
  const OntologyLabel& label(int i) const { return labels_[i]; }
  int parent(int i) const { return parent_[i]; }
  int node_depth(int i) const { return depth_[i]; }  // root has depth 1
  std::span<const int> children(int i) const { return children_[i]; }

  bool operator==(const Skeleton&) const = default;

  // Collects nodes in any order (parent index must precede the child's) and
  // renumbers them into canonical pre-order at build() time.
  class Builder {
   public:
    int add_node(int parent, OntologyLabel label);
    Skeleton build() const;

   private:
    std::vector<OntologyLabel> labels_;
    std::vector<int> parent_;
    std::vector<std::vector<int>> children_;
  };

 private:
  friend class Builder;
  std::vector<OntologyLabel> labels_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  std::vector<int> depth_;
  int max_depth_ = 0;
};

// A text span attached to a slot. `slot` is the slot's skeleton pre-order
// index; `child_pos` is the span's position in the slot's full child list
// (leaves and ontology children interleave), which makes reconstruction exact.
struct LeafRecord {
  int slot = 0;
  int child_pos = 0;
  std::string text;

  bool operator==(const LeafRecord&) const = default;
};

// Decoupled-form parse tree: a skeleton plus utterance leaves. The skeleton's
// node numbering doubles as the tree's ontology-node numbering.
class ParseTree {
 public:
  ParseTree() = default;

  const Skeleton& skeleton() const { return skeleton_; }
  const std::vector<LeafRecord>& leaves() const { return leaves_; }

  bool operator==(const ParseTree&) const = default;

  // Rebuilds a tree from its parts; inverse of (extract_skeleton, extract_leaves).
  static ParseTree from_parts(Skeleton skeleton, std::vector<LeafRecord> leaves);

 private:
  friend ParseTree parse_top(std::string_view);
  Skeleton skeleton_;
  std::vector<LeafRecord> leaves_;  // sorted by (slot, child_pos)
};

// Parses a bracketed decoupled logical form: `[` label (child | token)* `]`,
// whitespace-separated, labels prefixed in:/sl: (case-insensitive prefix).
// Consecutive raw tokens under one slot coalesce into a single leaf.
ParseTree parse_top(std::string_view text);

// Canonical single-space form with a space before every `]`.
std::string serialize_top(const ParseTree& tree);
std::string serialize_top(const Skeleton& skeleton);

Skeleton extract_skeleton(const ParseTree& tree);
Skeleton extract_skeleton(const Skeleton& skeleton);  // identity

// Leaves in pre-order of their owning slot (then child position).
std::vector<LeafRecord> extract_leaves(const ParseTree& tree);

// One corpus line: optional domain column, utterance, logical form.
struct CorpusRecord {
  std::optional<std::string> domain;
  std::string utterance;
  ParseTree tree;
};

struct Corpus {
  std::vector<CorpusRecord> records;
  std::vector<Skeleton> skeletons;  // skeletons[i] == extract_skeleton(records[i].tree)

  static Corpus from_records(std::vector<CorpusRecord> records);
  std::size_t size() const { return records.size(); }
};

}  // namespace treepiece

#endif  // TREEPIECE_TREE_HPP
