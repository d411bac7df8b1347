#ifndef TREEPIECE_UNIT_HPP
#define TREEPIECE_UNIT_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treepiece/tree.hpp"

namespace treepiece {

inline constexpr std::string_view kPlaceholderToken = "<ph>";

// A subtree token: ontology nodes in pre-order, with optional placeholders at
// child positions. The canonical string (e.g. "[in:A [sl:B ] <ph> ]") is the
// identity: two units are equal iff their canonical strings are equal.
class Unit {
 public:
  struct Node {
    bool placeholder = false;
    OntologyLabel label;        // unset for placeholders
    std::vector<int> children;  // empty for placeholders
  };

  Unit() = default;

  const std::string& canonical() const { return canonical_; }
  bool decorated() const { return placeholder_count_ > 0; }
  int node_count() const { return node_count_; }  // ontology nodes only
  int placeholder_count() const { return placeholder_count_; }
  const std::vector<Node>& nodes() const { return nodes_; }

  bool operator==(const Unit& o) const { return canonical_ == o.canonical_; }
  bool operator<(const Unit& o) const { return canonical_ < o.canonical_; }

  static Unit singleton(const OntologyLabel& label);
  static Unit from_nodes(std::vector<Node> nodes);

 private:
  std::vector<Node> nodes_;  // nodes_[0] is the root, never a placeholder
  std::string canonical_;
  int node_count_ = 0;
  int placeholder_count_ = 0;
};

// Canonical serialization (identical to Unit::canonical; exposed as the
// keying function for vocabularies and CLI output).
std::string canonicalize(const Unit& unit);

// Parses a canonical unit string; placeholders spelled "<ph>".
Unit parse_unit(std::string_view text);

// Grafts `lower`'s root under node `upper_node` of `upper` at child index
// `child_pos` (0..arity inclusive). Both units must be bare.
Unit merge_pair(const Unit& upper, const Unit& lower, int upper_node, int child_pos);

// The decorated unit of a connected component: component shape with a
// placeholder at every child position whose skeleton child lies outside the
// component, in skeleton child order. `component` is a bitmask over skeleton
// pre-order indices.
Unit decorate(const Skeleton& skeleton, std::uint64_t component);

// Component shape with outside children simply omitted (no placeholders).
Unit bare_shape(const Skeleton& skeleton, std::uint64_t component);

// Glues ordered units into a skeleton: each unit after the first replaces the
// earliest open placeholder in pre-order of the partial tree.
Skeleton assemble(std::span<const Unit> units);

// Where a non-initial unit attaches: the host unit's index in the partition
// and the filled placeholder's ordinal within the host (pre-order).
struct Attachment {
  int host_unit = 0;
  int placeholder_ordinal = 0;

  bool operator==(const Attachment&) const = default;
};

// An ordered decomposition of one skeleton into decorated units, listed in
// pre-order of their root positions. Reassembles to exactly that skeleton.
class Partition {
 public:
  Partition() = default;

  const std::vector<Unit>& units() const { return units_; }
  const std::vector<Attachment>& attachments() const { return attach_; }
  const Skeleton& skeleton() const { return skeleton_; }
  const std::vector<std::uint64_t>& masks() const { return masks_; }
  // Vocabulary lookup keys used when the partition was produced (bare
  // canonicals in a bare-phase tokenization, decorated canonicals otherwise).
  const std::vector<std::string>& vocab_keys() const { return vocab_keys_; }

  std::size_t size() const { return units_.size(); }
  int count(const Unit& unit) const;           // n(pi, tau) over decorated units
  int count_key(std::string_view key) const;   // n(pi, tau) over vocab keys

  bool operator==(const Partition& o) const { return units_ == o.units_; }

  // Builds from component masks of `skeleton` (any order; sorted internally
  // by root pre-order index). When `bare_keys` is set the vocab keys are the
  // components' bare canonicals.
  static Partition from_masks(const Skeleton& skeleton, std::vector<std::uint64_t> piece_masks,
                              bool bare_keys = false);
  // Builds from an ordered unit sequence by assembling it.
  static Partition from_units(std::vector<Unit> units);

 private:
  Skeleton skeleton_;
  std::vector<Unit> units_;
  std::vector<std::uint64_t> masks_;
  std::vector<Attachment> attach_;
  std::vector<std::string> vocab_keys_;
};

// Pre-order serialization of a partition with each placeholder immediately
// followed by its filler, wrapped as "<ph>( ... )".
std::string serialize_placeholder_nest(const Skeleton& skeleton, const Partition& partition);

}  // namespace treepiece

#endif  // TREEPIECE_UNIT_HPP
