#include <algorithm>
#include <cstdint>

#include "cotran/group.hpp"
#include "cotran/group_checks.hpp"
#include "doctest.h"

using namespace cotran;

TEST_CASE("integer group composition and windows") {
  GroupHandle g = GroupHandle::integers();
  CHECK(g.compose(GroupElement::from_int(2), GroupElement::from_int(3)).as_int() == 5);
  CHECK(g.inverse(GroupElement::from_int(4)).as_int() == -4);
  CHECK(g.identity().as_int() == 0);
  auto win = g.window(3);
  CHECK(win.size() == 7);
  for (std::int64_t n = -3; n <= 3; ++n)
    CHECK(std::find(win.begin(), win.end(), GroupElement::from_int(n)) != win.end());
  // composing near the guard must refuse instead of wrapping
  const std::int64_t big = std::int64_t(1) << 60;
  CHECK_THROWS_AS(g.compose(GroupElement::from_int(big - 1), GroupElement::from_int(2)),
                  SpecError);
}

TEST_CASE("integer lattice composition and window size") {
  GroupHandle g = GroupHandle::integer_lattice(2);
  auto a = GroupElement::from_vec({1, -2});
  auto b = GroupElement::from_vec({3, 5});
  CHECK(g.compose(a, b) == GroupElement::from_vec({4, 3}));
  CHECK(g.inverse(a) == GroupElement::from_vec({-1, 2}));
  CHECK(g.window(2).size() == 25);
  // one commutator relation between the two generators
  CHECK(g.relations().size() == 1);
}

TEST_CASE("free reduction cancels adjacent inverses") {
  CHECK(reduce_word({1, -1}).letters.empty());
  CHECK(reduce_word({1, 2, -2, -1}).letters.empty());
  CHECK(reduce_word({1, 2, -2, 1}).letters == std::vector<std::int32_t>{1, 1});
  CHECK(reduce_word({-2, 2, 1}).letters == std::vector<std::int32_t>{1});
  CHECK_THROWS_AS(reduce_word({1, 0}), SpecError);
}

TEST_CASE("free group composition reduces across the seam") {
  GroupHandle g = GroupHandle::free_group(2);
  auto ab = GroupElement::from_word(reduce_word({1, 2}));
  auto binva = GroupElement::from_word(reduce_word({-2, 1}));
  // (ab)(b^-1 a) = a a when the right factor acts first
  GroupElement p = g.compose(ab, binva);
  GroupElement q = g.compose(binva, ab);
  CHECK((p.as_word().letters == std::vector<std::int32_t>{1, 1} ||
         q.as_word().letters == std::vector<std::int32_t>{1, 1}));
  CHECK(g.compose(ab, g.inverse(ab)) == g.identity());
  CHECK(g.relations().empty());
}

TEST_CASE("free group windows are deterministic per seed") {
  GroupHandle g = GroupHandle::free_group(2);
  auto w1 = g.window(6, 42);
  auto w2 = g.window(6, 42);
  CHECK(w1 == w2);
  CHECK(!w1.empty());
  // all short words are present
  CHECK(std::find(w1.begin(), w1.end(), g.identity()) != w1.end());
  CHECK(std::find(w1.begin(), w1.end(), g.generator(1)) != w1.end());
  CHECK(std::find(w1.begin(), w1.end(), g.generator(2)) != w1.end());
}

TEST_CASE("finite table group from the cyclic table") {
  std::vector<std::vector<std::uint32_t>> c3 = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  GroupHandle g = GroupHandle::finite(c3);
  CHECK(g.finite_order() == 3);
  CHECK(g.identity() == GroupElement::from_index(0));
  CHECK(g.inverse(GroupElement::from_index(1)) == GroupElement::from_index(2));
  CHECK(g.compose(GroupElement::from_index(2), GroupElement::from_index(2)) ==
        GroupElement::from_index(1));
  CHECK(g.window(10).size() == 3);
}

TEST_CASE("finite table validation rejects non-groups") {
  CHECK_THROWS_AS(GroupHandle::finite({{0, 0}, {1, 1}}), SpecError);       // repeated row entry
  CHECK_THROWS_AS(GroupHandle::finite({{1, 0}, {0, 3}}), SpecError);      // out of range
  CHECK_THROWS_AS(GroupHandle::finite({{0, 1}, {1, 0}, {0, 1}}), SpecError);  // not square
  // Latin square whose left identity is not a right identity
  CHECK_THROWS_AS(GroupHandle::finite({{0, 1, 2}, {2, 0, 1}, {1, 2, 0}}), SpecError);
}

TEST_CASE("element keys round trip and reject junk") {
  auto roundtrip = [](const GroupElement& e) { return GroupElement::from_key(e.key()) == e; };
  CHECK(roundtrip(GroupElement::from_int(-17)));
  CHECK(roundtrip(GroupElement::from_vec({4, 0, -9})));
  CHECK(roundtrip(GroupElement::from_word(reduce_word({1, -2, 1}))));
  CHECK(roundtrip(GroupElement::from_index(5)));
  CHECK_THROWS_AS(GroupElement::from_key({}), SpecError);
  CHECK_THROWS_AS(GroupElement::from_key({9, 1}), SpecError);
  CHECK_THROWS_AS(GroupElement::from_key({2, 1, 0}), SpecError);  // word letter 0
  CHECK_THROWS_AS(GroupElement::from_key({1, 3, 1, 2}), SpecError);  // vec size mismatch
}

TEST_CASE("grid group carries step and bounds") {
  GroupHandle g = GroupHandle::real_grid(0.5, 1.0, -4, 4);
  CHECK(g.grid_step() == 0.5);
  CHECK(g.grid_origin() == 1.0);
  CHECK(g.compose(GroupElement::from_int(2), GroupElement::from_int(1)).as_int() == 3);
  auto win = g.window(2);
  CHECK(win.size() == 5);
}

TEST_CASE("relation products of generator images") {
  GroupHandle g = GroupHandle::integer_lattice(2);
  const int dim = 2;
  std::vector<GeneratorMap> commuting = {
      [](const GroupElement&) { return Mat(2, {2, 0, 0, 1}); },
      [](const GroupElement&) { return Mat(2, {1, 0, 0, 3}); },
  };
  CHECK(relation_residual(g, commuting, dim, 0, g.identity()) == 0.0);
  std::vector<GeneratorMap> skew = {
      [](const GroupElement&) { return Mat(2, {2, 0, 0, 1}); },
      [](const GroupElement&) { return Mat(2, {1, 2, 0, 1}); },
  };
  // the commutator of diag(2,1) with this shear lands a full unit away
  CHECK(relation_residual(g, skew, dim, 0, g.identity()) > 0.5);
  CHECK_THROWS_AS(relation_residual(g, skew, dim, 7, g.identity()), RangeError);

  auto win = g.window(2);
  VerificationReport ok = check_preserves_relations(g, commuting, dim, win, 1e-9);
  CHECK(ok.aggregate_pass());
  VerificationReport bad = check_preserves_relations(g, skew, dim, win, 1e-9);
  CHECK_FALSE(bad.aggregate_pass());
  CHECK(bad.entries.front().max_residual > 0.5);
}
