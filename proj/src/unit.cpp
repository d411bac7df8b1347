#include "treepiece/unit.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <map>

namespace treepiece {

namespace {

void render_node(const std::vector<Unit::Node>& nodes, int idx, std::string* out) {
  const Unit::Node& n = nodes[idx];
  if (n.placeholder) {
    *out += kPlaceholderToken;
    return;
  }
  out->push_back('[');
  *out += n.label.str();
  for (int c : n.children) {
    out->push_back(' ');
    render_node(nodes, c, out);
  }
  *out += " ]";
}

}  // namespace

Unit Unit::from_nodes(std::vector<Node> nodes) {
  if (nodes.empty()) fail(Errc::EmptyInput, "unit has no nodes");
  if (nodes[0].placeholder) fail(Errc::InvalidRoot, "unit root cannot be a placeholder");
  // Normalize storage to pre-order.
  std::vector<Node> ordered;
  ordered.reserve(nodes.size());
  std::vector<int> stack = {0};
  std::vector<int> new_id(nodes.size(), -1);
  std::vector<int> visit;
  visit.reserve(nodes.size());
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    new_id[v] = static_cast<int>(visit.size());
    visit.push_back(v);
    const Node& n = nodes[v];
    if (n.placeholder && !n.children.empty())
      fail(Errc::InvalidAttachPosition, "placeholder cannot have children");
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  if (visit.size() != nodes.size())
    fail(Errc::DisconnectedComponent, "unit nodes unreachable from root");
  Unit u;
  u.nodes_.reserve(nodes.size());
  for (int old : visit) {
    Node n = std::move(nodes[old]);
    for (int& c : n.children) c = new_id[c];
    if (n.placeholder)
      u.placeholder_count_++;
    else
      u.node_count_++;
    u.nodes_.push_back(std::move(n));
  }
  render_node(u.nodes_, 0, &u.canonical_);
  return u;
}

Unit Unit::singleton(const OntologyLabel& label) {
  return from_nodes({Node{false, label, {}}});
}

std::string canonicalize(const Unit& unit) { return unit.canonical(); }

Unit parse_unit(std::string_view text) {
  std::vector<Unit::Node> nodes;
  std::vector<int> stack;
  int root = -1;
  std::size_t i = 0;
  auto next_token = [&]() -> std::string_view {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    auto tok = text.substr(i, j - i);
    i = j;
    return tok;
  };
  auto attach = [&](int id) {
    if (stack.empty()) {
      if (root >= 0) fail(Errc::UnbalancedBrackets, "content after unit root closes");
      if (nodes[id].placeholder) fail(Errc::InvalidRoot, "unit root cannot be a placeholder");
      root = id;
    } else {
      nodes[stack.back()].children.push_back(id);
    }
  };
  for (std::string_view tok = next_token(); !tok.empty(); tok = next_token()) {
    if (tok[0] == '[') {
      OntologyLabel label;
      std::string_view label_tok = tok.substr(1);
      auto lower = [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); };
      bool ok = label_tok.size() >= 4 && label_tok[2] == ':' &&
                ((lower(label_tok[0]) == 'i' && lower(label_tok[1]) == 'n') ||
                 (lower(label_tok[0]) == 's' && lower(label_tok[1]) == 'l'));
      if (!ok) fail(Errc::BadLabelPrefix, "expected in:/sl: label, got '" + std::string(label_tok) + "'");
      label.kind = lower(label_tok[0]) == 'i' ? NodeKind::Intent : NodeKind::Slot;
      label.name = std::string(label_tok.substr(3));
      nodes.push_back({false, std::move(label), {}});
      int id = static_cast<int>(nodes.size()) - 1;
      attach(id);
      stack.push_back(id);
    } else if (tok == "]") {
      if (stack.empty()) fail(Errc::UnbalancedBrackets, "unmatched ']' in unit");
      stack.pop_back();
    } else if (tok == kPlaceholderToken) {
      if (stack.empty()) fail(Errc::UnbalancedBrackets, "placeholder outside brackets");
      nodes.push_back({true, {}, {}});
      attach(static_cast<int>(nodes.size()) - 1);
    } else {
      fail(Errc::BadLabelPrefix, "unexpected token '" + std::string(tok) + "' in unit");
    }
  }
  if (!stack.empty()) fail(Errc::UnbalancedBrackets, "unclosed '[' in unit");
  if (root < 0) fail(Errc::EmptyInput, "empty unit string");
  return Unit::from_nodes(std::move(nodes));
}

Unit merge_pair(const Unit& upper, const Unit& lower, int upper_node, int child_pos) {
  if (upper.decorated() || lower.decorated())
    fail(Errc::InvalidAttachPosition, "merge_pair requires bare units");
  if (upper_node < 0 || upper_node >= static_cast<int>(upper.nodes().size()))
    fail(Errc::InvalidAttachPosition, "no such node in upper unit");
  const auto& host = upper.nodes()[upper_node];
  if (child_pos < 0 || child_pos > static_cast<int>(host.children.size()))
    fail(Errc::InvalidAttachPosition, "child index beyond arity");
  std::vector<Unit::Node> nodes = upper.nodes();
  int offset = static_cast<int>(nodes.size());
  for (Unit::Node n : lower.nodes()) {
    for (int& c : n.children) c += offset;
    nodes.push_back(std::move(n));
  }
  auto& ch = nodes[upper_node].children;
  ch.insert(ch.begin() + child_pos, offset);
  return Unit::from_nodes(std::move(nodes));
}

namespace {

// Root of a connected component: the unique member whose parent lies outside.
int component_root(const Skeleton& s, std::uint64_t mask) {
  if (mask == 0) fail(Errc::DisconnectedComponent, "empty component");
  int root = -1;
  for (int v = 0; v < s.node_count(); ++v) {
    if (!(mask >> v & 1)) continue;
    int p = s.parent(v);
    if (p < 0 || !(mask >> p & 1)) {
      if (root >= 0) fail(Errc::DisconnectedComponent, "component has multiple tops");
      root = v;
    }
  }
  return root;
}

int build_shape(const Skeleton& s, std::uint64_t mask, int v, bool with_placeholders,
                std::vector<Unit::Node>* nodes) {
  int id = static_cast<int>(nodes->size());
  nodes->push_back({false, s.label(v), {}});
  for (int c : s.children(v)) {
    if (mask >> c & 1) {
      int cid = build_shape(s, mask, c, with_placeholders, nodes);
      (*nodes)[id].children.push_back(cid);
    } else if (with_placeholders) {
      nodes->push_back({true, {}, {}});
      (*nodes)[id].children.push_back(static_cast<int>(nodes->size()) - 1);
    }
  }
  return id;
}

Unit shape_of(const Skeleton& s, std::uint64_t mask, bool with_placeholders) {
  int root = component_root(s, mask);
  std::vector<Unit::Node> nodes;
  build_shape(s, mask, root, with_placeholders, &nodes);
  return Unit::from_nodes(std::move(nodes));
}

}  // namespace

Unit decorate(const Skeleton& skeleton, std::uint64_t component) {
  return shape_of(skeleton, component, true);
}

Unit bare_shape(const Skeleton& skeleton, std::uint64_t component) {
  return shape_of(skeleton, component, false);
}

namespace {

// Mutable node of a partially assembled tree.
struct PoolNode {
  bool placeholder = false;
  OntologyLabel label;
  std::vector<int> children;
  int unit = -1;     // partition index of the unit this node came from
  int ordinal = -1;  // placeholder ordinal within that unit
};

// Earliest open placeholder in pre-order, or -1.
int first_placeholder(const std::vector<PoolNode>& pool, int root) {
  std::vector<int> stack = {root};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (pool[v].placeholder) return v;
    const auto& ch = pool[v].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return -1;
}

// Copies `unit` into the pool; returns its root pool id and appends
// placeholder pool ids in pre-order.
int splice_unit(const Unit& unit, int unit_index, std::vector<PoolNode>* pool) {
  int offset = static_cast<int>(pool->size());
  int ordinal = 0;
  for (const auto& n : unit.nodes()) {
    PoolNode pn;
    pn.placeholder = n.placeholder;
    pn.label = n.label;
    pn.unit = unit_index;
    if (n.placeholder) pn.ordinal = ordinal++;
    pn.children.reserve(n.children.size());
    for (int c : n.children) pn.children.push_back(c + offset);
    pool->push_back(std::move(pn));
  }
  return offset;
}

struct AssemblyResult {
  Skeleton skeleton;
  std::vector<Attachment> attachments;        // per unit after the first
  std::vector<std::uint64_t> unit_masks;      // skeleton nodes per unit
};

AssemblyResult assemble_tracked(std::span<const Unit> units) {
  if (units.empty()) fail(Errc::EmptyInput, "no units to assemble");
  std::vector<PoolNode> pool;
  int root = splice_unit(units[0], 0, &pool);
  std::vector<Attachment> attachments;
  for (std::size_t k = 1; k < units.size(); ++k) {
    int ph = first_placeholder(pool, root);
    if (ph < 0) fail(Errc::NoOpenPlaceholder, "unit " + std::to_string(k) + " has no open slot");
    attachments.push_back({pool[ph].unit, pool[ph].ordinal});
    int sub = splice_unit(units[k], static_cast<int>(k), &pool);
    pool[ph] = std::move(pool[sub]);  // replace the placeholder in place
  }
  if (first_placeholder(pool, root) >= 0)
    fail(Errc::UnfilledPlaceholders, "units exhausted with placeholders remaining");

  AssemblyResult out;
  out.attachments = std::move(attachments);
  out.unit_masks.assign(units.size(), 0);
  Skeleton::Builder builder;
  // Pre-order walk mirroring Skeleton::Builder numbering.
  std::vector<std::pair<int, int>> stack = {{root, -1}};  // (pool node, parent skeleton id)
  while (!stack.empty()) {
    auto [v, parent] = stack.back();
    stack.pop_back();
    int id = builder.add_node(parent, pool[v].label);
    if (pool[v].unit >= 0 && id < 64) out.unit_masks[pool[v].unit] |= 1ULL << id;
    const auto& ch = pool[v].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back({*it, id});
  }
  out.skeleton = builder.build();
  return out;
}

}  // namespace

Skeleton assemble(std::span<const Unit> units) { return assemble_tracked(units).skeleton; }

int Partition::count(const Unit& unit) const {
  int n = 0;
  for (const auto& u : units_)
    if (u == unit) ++n;
  return n;
}

int Partition::count_key(std::string_view key) const {
  int n = 0;
  for (const auto& k : vocab_keys_)
    if (k == key) ++n;
  return n;
}

Partition Partition::from_masks(const Skeleton& skeleton, std::vector<std::uint64_t> piece_masks,
                                bool bare_keys) {
  if (piece_masks.empty()) fail(Errc::EmptyInput, "partition has no pieces");
  std::sort(piece_masks.begin(), piece_masks.end(),
            [](std::uint64_t a, std::uint64_t b) { return std::countr_zero(a) < std::countr_zero(b); });
  std::uint64_t all = 0;
  for (std::uint64_t m : piece_masks) {
    if (m == 0 || (all & m)) fail(Errc::InvalidPartition, "pieces empty or overlapping");
    all |= m;
  }
  std::uint64_t full = skeleton.node_count() >= 64 ? ~0ULL : (1ULL << skeleton.node_count()) - 1;
  if (all != full) fail(Errc::InvalidPartition, "pieces do not cover the skeleton");

  Partition p;
  p.skeleton_ = skeleton;
  p.masks_ = std::move(piece_masks);
  p.units_.reserve(p.masks_.size());
  p.vocab_keys_.reserve(p.masks_.size());
  for (std::uint64_t m : p.masks_) {
    p.units_.push_back(decorate(skeleton, m));
    p.vocab_keys_.push_back(bare_keys ? bare_shape(skeleton, m).canonical()
                                      : p.units_.back().canonical());
  }
  // Attachments: the host piece owns the parent of this piece's root; the
  // ordinal is the placeholder's position in the host unit's pre-order, i.e.
  // the same traversal decorate() uses.
  for (std::size_t k = 1; k < p.masks_.size(); ++k) {
    int r = std::countr_zero(p.masks_[k]);
    int parent = skeleton.parent(r);
    int host = -1;
    for (std::size_t h = 0; h < p.masks_.size(); ++h)
      if (p.masks_[h] >> parent & 1) host = static_cast<int>(h);
    if (host < 0) fail(Errc::InvalidPartition, "piece root has no host");
    std::uint64_t host_mask = p.masks_[host];
    int ordinal = 0;
    int found = -1;
    auto walk = [&](auto&& self, int v) -> void {
      for (int c : skeleton.children(v)) {
        if (host_mask >> c & 1) {
          self(self, c);
        } else {
          if (v == parent && c == r) {
            found = ordinal;
            return;
          }
          ++ordinal;
        }
        if (found >= 0) return;
      }
    };
    walk(walk, std::countr_zero(host_mask));
    if (found < 0) fail(Errc::InvalidPartition, "piece does not fill a host placeholder");
    p.attach_.push_back({host, found});
  }
  return p;
}

Partition Partition::from_units(std::vector<Unit> units) {
  AssemblyResult res = assemble_tracked(units);
  Partition p;
  p.skeleton_ = std::move(res.skeleton);
  p.masks_ = std::move(res.unit_masks);
  p.attach_ = std::move(res.attachments);
  p.vocab_keys_.reserve(units.size());
  for (const auto& u : units) p.vocab_keys_.push_back(u.canonical());
  p.units_ = std::move(units);
  return p;
}

namespace {

void render_nest(const Partition& p, const std::vector<std::vector<int>>& fillers, int k,
                 std::string* out) {
  const Unit& u = p.units()[k];
  int ordinal = 0;
  // Iterative pre-order with explicit close markers to interleave fillers.
  struct Item { int node; bool close; };
  std::vector<Item> stack = {{0, false}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    if (it.close) {
      *out += " ]";
      continue;
    }
    const auto& n = u.nodes()[it.node];
    if (n.placeholder) {
      out->push_back(' ');
      *out += kPlaceholderToken;
      *out += "( ";
      render_nest(p, fillers, fillers[k][ordinal++], out);
      *out += " )";
      continue;
    }
    if (it.node != 0) out->push_back(' ');
    out->push_back('[');
    *out += n.label.str();
    stack.push_back({it.node, true});
    for (auto cit = n.children.rbegin(); cit != n.children.rend(); ++cit)
      stack.push_back({*cit, false});
  }
}

}  // namespace

std::string serialize_placeholder_nest(const Skeleton& skeleton, const Partition& partition) {
  if (partition.units().empty()) fail(Errc::InvalidPartition, "empty partition");
  if (!(partition.skeleton() == skeleton))
    fail(Errc::InvalidPartition, "partition does not reassemble to the given skeleton");
  std::vector<std::vector<int>> fillers(partition.size());
  for (std::size_t k = 0; k < partition.size(); ++k)
    fillers[k].assign(partition.units()[k].placeholder_count(), -1);
  for (std::size_t k = 1; k < partition.size(); ++k) {
    const Attachment& a = partition.attachments()[k - 1];
    fillers[a.host_unit][a.placeholder_ordinal] = static_cast<int>(k);
  }
  std::string out;
  render_nest(partition, fillers, 0, &out);
  return out;
}

}  // namespace treepiece
