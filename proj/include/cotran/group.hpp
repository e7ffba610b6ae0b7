#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "cotran/errors.hpp"
#include "cotran/matrix.hpp"

namespace cotran {

// Composition of these elements must stay within +/- 2^60 per coordinate;
// beyond that the library refuses rather than risking wraparound.
inline constexpr std::int64_t kIntBound = std::int64_t(1) << 60;

// Freely reduced word in signed 1-based generator indices (+i for the i-th
// generator, -i for its inverse), rightmost letter applied first.
struct Word {
  std::vector<std::int32_t> letters;
  bool operator==(const Word& o) const { return letters == o.letters; }
};

Word reduce_word(std::vector<std::int32_t> letters);

// An element of one of the supported groups.  The meaning of each variant is
// fixed by its GroupHandle: Int for the integers and grid points, IntVec for
// integer lattices, Word for free groups, index for finite table groups.
class GroupElement {
 public:
  GroupElement() : v_(std::int64_t(0)) {}
  static GroupElement from_int(std::int64_t n) { return GroupElement(n); }
  static GroupElement from_vec(std::vector<std::int64_t> v) { return GroupElement(std::move(v)); }
  static GroupElement from_word(Word w) { return GroupElement(std::move(w)); }
  static GroupElement from_index(std::uint32_t i) { return GroupElement(i); }

  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_vec() const { return std::holds_alternative<std::vector<std::int64_t>>(v_); }
  bool is_word() const { return std::holds_alternative<Word>(v_); }
  bool is_index() const { return std::holds_alternative<std::uint32_t>(v_); }

  std::int64_t as_int() const;
  const std::vector<std::int64_t>& as_vec() const;
  const Word& as_word() const;
  std::uint32_t as_index() const;

  // Canonical encoding usable as an ordered map key.
  std::vector<std::int64_t> key() const;
  // Inverse of key(); rejects malformed encodings.
  static GroupElement from_key(const std::vector<std::int64_t>& key);
  std::string str() const;

  bool operator==(const GroupElement& o) const { return v_ == o.v_; }
  bool operator<(const GroupElement& o) const { return key() < o.key(); }

 private:
  explicit GroupElement(std::int64_t n) : v_(n) {}
  explicit GroupElement(std::vector<std::int64_t> v) : v_(std::move(v)) {}
  explicit GroupElement(Word w) : v_(std::move(w)) {}
  explicit GroupElement(std::uint32_t i) : v_(i) {}
  std::variant<std::int64_t, std::vector<std::int64_t>, Word, std::uint32_t> v_;
};

enum class GroupKind { Z, Zk, Free, Finite, GridR };

// Relation word in signed 1-based generator indices, stored in application
// order (first entry acts first).
using RelationWord = std::vector<std::int32_t>;

struct FiniteTable {
  // table[a][b] is the index of a*b.  Must be a Latin square.
  std::vector<std::vector<std::uint32_t>> table;
  std::uint32_t identity = 0;
  std::vector<std::uint32_t> inverse;
  std::vector<std::uint32_t> generators;  // element indices addressed by relations
};

// Handle describing a concrete group together with exact composition,
// inversion, and deterministic verification windows.
class GroupHandle {
 public:
  static GroupHandle integers();
  static GroupHandle integer_lattice(int k);  // with pairwise commutator relations
  static GroupHandle free_group(int n);
  static GroupHandle finite(std::vector<std::vector<std::uint32_t>> table,
                            std::vector<RelationWord> relations = {},
                            std::vector<std::uint32_t> generators = {});
  // Uniform grid on the reals: element i stands for the point t_origin + i*step
  // when used as a base point and for the displacement i*step otherwise.
  static GroupHandle real_grid(double step, double t_origin, std::int64_t index_min,
                               std::int64_t index_max);

  GroupKind kind() const { return kind_; }
  int lattice_dim() const { return k_; }
  int generator_count() const;
  double grid_step() const { return grid_step_; }
  double grid_origin() const { return grid_origin_; }
  std::int64_t grid_index_min() const { return grid_imin_; }
  std::int64_t grid_index_max() const { return grid_imax_; }
  std::size_t finite_order() const { return finite_.table.size(); }
  const FiniteTable& finite_table() const { return finite_; }
  const std::vector<RelationWord>& relations() const { return relations_; }

  GroupElement identity() const;
  GroupElement compose(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;
  GroupElement generator(int i) const;  // 1-based

  // Deterministic verification window.  Integer groups enumerate the max-norm
  // ball of the given radius; free groups enumerate all reduced words up to
  // length min(radius, 4) and pad with seeded random words up to the radius;
  // finite groups return every element.
  std::vector<GroupElement> window(int radius, std::uint64_t seed = 0) const;

  // Expresses an element as a word in the generators (groups with a canonical
  // normal form only; finite table groups are rejected).
  Word word_for(const GroupElement& g) const;

  bool same_as(const GroupHandle& o) const;

 private:
  GroupKind kind_ = GroupKind::Z;
  int k_ = 1;
  FiniteTable finite_;
  std::vector<RelationWord> relations_;
  double grid_step_ = 0.0;
  double grid_origin_ = 0.0;
  std::int64_t grid_imin_ = 0;
  std::int64_t grid_imax_ = 0;
};

inline GroupElement compose(const GroupHandle& g, const GroupElement& a, const GroupElement& b) {
  return g.compose(a, b);
}
inline GroupElement inverse(const GroupHandle& g, const GroupElement& a) { return g.inverse(a); }
inline std::vector<GroupElement> sample_window(const GroupHandle& g, int radius,
                                               std::uint64_t seed = 0) {
  return g.window(radius, seed);
}

// Per-generator coefficient map: eta |-> A_i(eta).
using GeneratorMap = std::function<Mat(const GroupElement&)>;

// Value of the letter map at a base point: A_i(eta) for letter +i, and the
// inverse of A_i at the shifted base for letter -i.
Mat letter_matrix(const GroupHandle& g, const std::vector<GeneratorMap>& maps,
                  std::int32_t letter, const GroupElement& base);

// Ordered product of letter maps along a word starting at base;
// left-multiplies factors in application order.
Mat word_product(const GroupHandle& g, const std::vector<GeneratorMap>& maps, int dim,
                 const Word& w, const GroupElement& base);

}  // namespace cotran
