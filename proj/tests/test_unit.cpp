#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "testutil.hpp"
#include "treepiece/unit.hpp"

using namespace treepiece;
using tptest::skel;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::EmptyInput;
}

std::vector<Unit> units_of(const std::vector<std::string>& canons) {
  std::vector<Unit> out;
  for (const auto& c : canons) out.push_back(parse_unit(c));
  return out;
}

// Random partition of a skeleton by cutting a random subset of edges.
std::vector<std::uint64_t> random_cut(std::mt19937_64& rng, const Skeleton& s) {
  int n = s.node_count();
  std::uint64_t cut = n > 1 ? rng() & ((1ULL << (n - 1)) - 1) : 0;
  std::vector<int> rep(n);
  rep[0] = 0;
  for (int v = 1; v < n; ++v) rep[v] = (cut >> (v - 1)) & 1 ? v : rep[s.parent(v)];
  std::vector<std::uint64_t> masks(n, 0);
  for (int v = 0; v < n; ++v) masks[rep[v]] |= 1ULL << v;
  std::vector<std::uint64_t> out;
  for (int v = 0; v < n; ++v)
    if (masks[v]) out.push_back(masks[v]);
  return out;
}

}  // namespace

TEST_CASE("canonical serialization") {
  CHECK(parse_unit("[in:A <ph> <ph> ]").canonical() == "[in:A <ph> <ph> ]");
  CHECK(parse_unit("[in:A [sl:B ] ]").canonical() == "[in:A [sl:B ] ]");
  CHECK(parse_unit("[in:A [sl:B ] <ph> ]").canonical() != parse_unit("[in:A <ph> [sl:B ] ]").canonical());
  CHECK(Unit::singleton({NodeKind::Intent, "A"}).canonical() == "[in:A ]");
  CHECK(parse_unit("[in:A <ph> ]").decorated());
  CHECK_FALSE(parse_unit("[in:A [sl:B ] ]").decorated());
}

TEST_CASE("merge_pair grafts at the requested position") {
  Unit a = parse_unit("[in:A ]");
  Unit b = parse_unit("[sl:B ]");
  Unit c = parse_unit("[sl:C ]");
  Unit ab = merge_pair(a, b, 0, 0);
  CHECK(ab.canonical() == "[in:A [sl:B ] ]");
  CHECK(ab.node_count() == 2);
  CHECK(merge_pair(ab, c, 0, 1).canonical() == "[in:A [sl:B ] [sl:C ] ]");
  CHECK(merge_pair(ab, c, 0, 0).canonical() == "[in:A [sl:C ] [sl:B ] ]");
  CHECK(code_of([&] { merge_pair(ab, c, 0, 3); }) == Errc::InvalidAttachPosition);
  CHECK(code_of([&] { merge_pair(parse_unit("[in:A <ph> ]"), b, 0, 0); }) ==
        Errc::InvalidAttachPosition);
}

TEST_CASE("decorate marks missing children in order") {
  Skeleton s = skel("[in:A [sl:B ] [sl:C ] ]");
  CHECK(decorate(s, 0b001).canonical() == "[in:A <ph> <ph> ]");
  CHECK(decorate(s, 0b011).canonical() == "[in:A [sl:B ] <ph> ]");
  CHECK(decorate(s, 0b101).canonical() == "[in:A <ph> [sl:C ] ]");
  CHECK(decorate(s, 0b111).canonical() == "[in:A [sl:B ] [sl:C ] ]");
  CHECK_FALSE(decorate(s, 0b111).decorated());
  CHECK(code_of([&] { decorate(s, 0b110); }) == Errc::DisconnectedComponent);
  CHECK(code_of([&] { decorate(s, 0); }) == Errc::DisconnectedComponent);
}

TEST_CASE("decoration is a pure function of shape and missing pattern") {
  Skeleton s = skel("[in:A [sl:B [sl:D ] ] [sl:B [sl:D ] ] ]");
  // Components {B, D} on both branches decorate identically.
  CHECK(decorate(s, 0b00110).canonical() == decorate(s, 0b11000).canonical());
  // Singleton B with one missing child on both branches.
  CHECK(decorate(s, 0b00010).canonical() == decorate(s, 0b01000).canonical());
}

TEST_CASE("assemble follows the pre-order fill rule") {
  Skeleton got = assemble(units_of({"[in:A <ph> <ph> ]", "[sl:B ]", "[sl:C ]"}));
  CHECK(serialize_top(got) == "[in:A [sl:B ] [sl:C ] ]");

  CHECK(serialize_top(assemble(units_of({"[in:A [sl:B ] ]"}))) == "[in:A [sl:B ] ]");

  // Fillers consume placeholders in pre-order even when nested.
  Skeleton deep = assemble(units_of({"[in:A [sl:B <ph> ] <ph> ]", "[in:D ]", "[sl:C ]"}));
  CHECK(serialize_top(deep) == "[in:A [sl:B [in:D ] ] [sl:C ] ]");

  CHECK(code_of([&] { assemble(units_of({"[in:A <ph> ]"})); }) == Errc::UnfilledPlaceholders);
  CHECK(code_of([&] { assemble(units_of({"[in:A ]", "[sl:B ]"})); }) == Errc::NoOpenPlaceholder);
  CHECK(code_of([&] { assemble({}); }) == Errc::EmptyInput);
  CHECK(code_of([&] { assemble(units_of({"[sl:B ]"})); }) == Errc::InvalidRoot);
}

TEST_CASE("gluing uniqueness and conservation on random partitions") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    Skeleton s = tptest::random_skeleton(rng, 8);
    auto masks = random_cut(rng, s);
    Partition p = Partition::from_masks(s, masks);
    CHECK(assemble(p.units()) == s);
    CHECK(p.skeleton() == s);

    int node_sum = 0, ph_sum = 0;
    for (const Unit& u : p.units()) {
      node_sum += u.node_count();
      ph_sum += u.placeholder_count();
    }
    CHECK(node_sum == s.node_count());
    CHECK(ph_sum == static_cast<int>(p.size()) - 1);

    // from_units round-trips the same partition.
    Partition q = Partition::from_units(p.units());
    CHECK(q == p);
    CHECK(q.skeleton() == s);
    CHECK(q.attachments() == p.attachments());
  }
}

TEST_CASE("partition vocab keys distinguish bare phase") {
  Skeleton s = skel("[in:A [sl:B ] ]");
  Partition decorated = Partition::from_masks(s, {0b01, 0b10}, false);
  CHECK(decorated.vocab_keys()[0] == "[in:A <ph> ]");
  Partition bare = Partition::from_masks(s, {0b01, 0b10}, true);
  CHECK(bare.vocab_keys()[0] == "[in:A ]");
  CHECK(bare.units()[0].canonical() == "[in:A <ph> ]");  // units stay decorated
  CHECK(bare.count_key("[in:A ]") == 1);
  CHECK(decorated.count(parse_unit("[in:A <ph> ]")) == 1);
}

TEST_CASE("placeholder nest serialization") {
  Skeleton s = skel("[in:A [sl:B ] ]");
  Partition two = Partition::from_masks(s, {0b01, 0b10});
  CHECK(serialize_placeholder_nest(s, two) == "[in:A <ph>( [sl:B ] ) ]");

  Partition one = Partition::from_masks(s, {0b11});
  CHECK(serialize_placeholder_nest(s, one) == "[in:A [sl:B ] ]");

  Skeleton wide = skel("[in:A [sl:B ] [sl:C ] ]");
  Partition three = Partition::from_masks(wide, {0b001, 0b010, 0b100});
  CHECK(serialize_placeholder_nest(wide, three) ==
        "[in:A <ph>( [sl:B ] ) <ph>( [sl:C ] ) ]");

  CHECK(code_of([&] { serialize_placeholder_nest(wide, two); }) == Errc::InvalidPartition);
}

TEST_CASE("nested placeholder nest keeps pre-order") {
  Skeleton s = skel("[in:A [sl:B [in:C ] ] [sl:D ] ]");
  Partition p = Partition::from_masks(s, {0b0011, 0b0100, 0b1000});
  CHECK(serialize_placeholder_nest(s, p) ==
        "[in:A [sl:B <ph>( [in:C ] ) ] <ph>( [sl:D ] ) ]");
}

TEST_CASE("unit parsing rejects malformed strings") {
  CHECK(code_of([] { parse_unit("[in:A"); }) == Errc::UnbalancedBrackets);
  CHECK(code_of([] { parse_unit("[xx:A ]"); }) == Errc::BadLabelPrefix);
  CHECK(code_of([] { parse_unit("[in:A word ]"); }) == Errc::BadLabelPrefix);
  CHECK(code_of([] { parse_unit(""); }) == Errc::EmptyInput);
  CHECK(code_of([] { parse_unit("<ph>"); }) == Errc::UnbalancedBrackets);
}
