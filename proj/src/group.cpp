#include "cotran/group.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "cotran/group_checks.hpp"

namespace cotran {

Word reduce_word(std::vector<std::int32_t> letters) {
  Word w;
  w.letters.reserve(letters.size());
  for (std::int32_t s : letters) {
    if (s == 0) throw SpecError("word letter 0 is not a generator");
    if (!w.letters.empty() && w.letters.back() == -s) {
      w.letters.pop_back();
    } else {
      w.letters.push_back(s);
    }
  }
  return w;
}

std::int64_t GroupElement::as_int() const {
  if (!is_int()) throw SpecError("element is not an integer");
  return std::get<std::int64_t>(v_);
}

const std::vector<std::int64_t>& GroupElement::as_vec() const {
  if (!is_vec()) throw SpecError("element is not a lattice vector");
  return std::get<std::vector<std::int64_t>>(v_);
}

const Word& GroupElement::as_word() const {
  if (!is_word()) throw SpecError("element is not a word");
  return std::get<Word>(v_);
}

std::uint32_t GroupElement::as_index() const {
  if (!is_index()) throw SpecError("element is not a table index");
  return std::get<std::uint32_t>(v_);
}

std::vector<std::int64_t> GroupElement::key() const {
  std::vector<std::int64_t> k;
  if (is_int()) {
    k = {0, as_int()};
  } else if (is_vec()) {
    const auto& v = as_vec();
    k.push_back(1);
    k.push_back(static_cast<std::int64_t>(v.size()));
    k.insert(k.end(), v.begin(), v.end());
  } else if (is_word()) {
    const auto& w = as_word().letters;
    k.push_back(2);
    k.push_back(static_cast<std::int64_t>(w.size()));
    for (std::int32_t s : w) k.push_back(s);
  } else {
    k = {3, static_cast<std::int64_t>(as_index())};
  }
  return k;
}

GroupElement GroupElement::from_key(const std::vector<std::int64_t>& key) {
  auto bad = [&] { throw SpecError("GroupElement: malformed key encoding"); };
  if (key.empty()) bad();
  switch (key[0]) {
    case 0:
      if (key.size() != 2) bad();
      return from_int(key[1]);
    case 1: {
      if (key.size() < 2 || key[1] < 0 ||
          key.size() != static_cast<std::size_t>(key[1]) + 2)
        bad();
      return from_vec(std::vector<std::int64_t>(key.begin() + 2, key.end()));
    }
    case 2: {
      if (key.size() < 2 || key[1] < 0 ||
          key.size() != static_cast<std::size_t>(key[1]) + 2)
        bad();
      Word w;
      for (std::size_t i = 2; i < key.size(); ++i) {
        if (key[i] == 0 || key[i] < INT32_MIN || key[i] > INT32_MAX) bad();
        w.letters.push_back(static_cast<std::int32_t>(key[i]));
      }
      return from_word(std::move(w));
    }
    case 3:
      if (key.size() != 2 || key[1] < 0 || key[1] > UINT32_MAX) bad();
      return from_index(static_cast<std::uint32_t>(key[1]));
    default:
      bad();
  }
  return GroupElement();
}

std::string GroupElement::str() const {
  std::ostringstream os;
  if (is_int()) {
    os << as_int();
  } else if (is_vec()) {
    os << "(";
    const auto& v = as_vec();
    for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ")";
  } else if (is_word()) {
    const auto& w = as_word().letters;
    if (w.empty()) return "e";
    // Written form: last applied letter leftmost.
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      if (it != w.rbegin()) os << "*";
      os << "x" << std::abs(*it);
      if (*it < 0) os << "^-1";
    }
  } else {
    os << "#" << as_index();
  }
  return os.str();
}

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  const std::int64_t s = a + b;  // |a|,|b| <= 2^60, no wraparound possible
  if (s > kIntBound || s < -kIntBound)
    throw SpecError("integer composition exceeds the +/-2^60 guard");
  return s;
}

void check_bound(std::int64_t a) {
  if (a > kIntBound || a < -kIntBound)
    throw SpecError("integer coordinate exceeds the +/-2^60 guard");
}

}  // namespace

GroupHandle GroupHandle::integers() {
  GroupHandle g;
  g.kind_ = GroupKind::Z;
  g.k_ = 1;
  return g;
}

GroupHandle GroupHandle::integer_lattice(int k) {
  if (k < 1) throw SpecError("integer lattice needs k >= 1");
  GroupHandle g;
  g.kind_ = GroupKind::Zk;
  g.k_ = k;
  // Free abelian presentation: generators commute pairwise.
  for (int i = 1; i <= k; ++i) {
    for (int j = i + 1; j <= k; ++j) {
      g.relations_.push_back({static_cast<std::int32_t>(j), static_cast<std::int32_t>(i),
                              static_cast<std::int32_t>(-j), static_cast<std::int32_t>(-i)});
    }
  }
  return g;
}

GroupHandle GroupHandle::free_group(int n) {
  if (n < 1) throw SpecError("free group needs n >= 1");
  GroupHandle g;
  g.kind_ = GroupKind::Free;
  g.k_ = n;
  return g;
}

GroupHandle GroupHandle::finite(std::vector<std::vector<std::uint32_t>> table,
                                std::vector<RelationWord> relations,
                                std::vector<std::uint32_t> generators) {
  const std::size_t n = table.size();
  if (n == 0) throw SpecError("finite group table is empty");
  for (const auto& row : table) {
    if (row.size() != n) throw SpecError("finite group table is not square");
    for (std::uint32_t x : row)
      if (x >= n) throw SpecError("finite group table entry out of range");
  }
  // Latin square: every row and every column is a permutation.
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<bool> seen_row(n, false), seen_col(n, false);
    for (std::size_t j = 0; j < n; ++j) {
      if (seen_row[table[i][j]]) throw SpecError("finite group table row repeats an element");
      seen_row[table[i][j]] = true;
      if (seen_col[table[j][i]]) throw SpecError("finite group table column repeats an element");
      seen_col[table[j][i]] = true;
    }
  }
  GroupHandle g;
  g.kind_ = GroupKind::Finite;
  FiniteTable& ft = g.finite_;
  ft.table = std::move(table);
  // Two-sided identity must exist.
  bool found = false;
  for (std::uint32_t e = 0; e < n; ++e) {
    bool ok = true;
    for (std::uint32_t x = 0; x < n; ++x)
      if (ft.table[e][x] != x || ft.table[x][e] != x) ok = false;
    if (ok) {
      ft.identity = e;
      found = true;
      break;
    }
  }
  if (!found) throw SpecError("finite group table has no two-sided identity");
  ft.inverse.resize(n);
  for (std::uint32_t x = 0; x < n; ++x) {
    bool has = false;
    for (std::uint32_t y = 0; y < n; ++y) {
      if (ft.table[x][y] == ft.identity && ft.table[y][x] == ft.identity) {
        ft.inverse[x] = y;
        has = true;
        break;
      }
    }
    if (!has) throw SpecError("finite group table element has no inverse");
  }
  for (std::uint32_t gen : generators)
    if (gen >= n) throw SpecError("finite group generator index out of range");
  ft.generators = std::move(generators);
  g.relations_ = std::move(relations);
  // Relation words must evaluate to the identity.
  for (const auto& rel : g.relations_) {
    std::uint32_t acc = ft.identity;
    for (std::int32_t s : rel) {
      const std::size_t i = static_cast<std::size_t>(std::abs(s));
      if (s == 0 || i > ft.generators.size())
        throw SpecError("relation references undefined generator index");
      std::uint32_t gen = ft.generators[i - 1];
      if (s < 0) gen = ft.inverse[gen];
      acc = ft.table[gen][acc];  // left-multiply: letters act in application order
    }
    if (acc != ft.identity) throw SpecError("relation word does not evaluate to the identity");
  }
  return g;
}

GroupHandle GroupHandle::real_grid(double step, double t_origin, std::int64_t index_min,
                                   std::int64_t index_max) {
  if (!(step > 0.0) || !std::isfinite(step)) throw SpecError("grid step must be positive");
  if (index_min > index_max) throw SpecError("grid index range is empty");
  GroupHandle g;
  g.kind_ = GroupKind::GridR;
  g.k_ = 1;
  g.grid_step_ = step;
  g.grid_origin_ = t_origin;
  g.grid_imin_ = index_min;
  g.grid_imax_ = index_max;
  return g;
}

int GroupHandle::generator_count() const {
  switch (kind_) {
    case GroupKind::Z:
    case GroupKind::GridR:
      return 1;
    case GroupKind::Zk:
    case GroupKind::Free:
      return k_;
    case GroupKind::Finite:
      return static_cast<int>(finite_.generators.size());
  }
  return 0;
}

GroupElement GroupHandle::identity() const {
  switch (kind_) {
    case GroupKind::Z:
    case GroupKind::GridR:
      return GroupElement::from_int(0);
    case GroupKind::Zk:
      return GroupElement::from_vec(std::vector<std::int64_t>(k_, 0));
    case GroupKind::Free:
      return GroupElement::from_word(Word{});
    case GroupKind::Finite:
      return GroupElement::from_index(finite_.identity);
  }
  throw SpecError("unknown group kind");
}

GroupElement GroupHandle::compose(const GroupElement& a, const GroupElement& b) const {
  switch (kind_) {
    case GroupKind::Z:
    case GroupKind::GridR:
      return GroupElement::from_int(checked_add(a.as_int(), b.as_int()));
    case GroupKind::Zk: {
      const auto& x = a.as_vec();
      const auto& y = b.as_vec();
      if (x.size() != static_cast<size_t>(k_) || y.size() != static_cast<size_t>(k_))
        throw SpecError("lattice element has wrong length");
      std::vector<std::int64_t> z(k_);
      for (int i = 0; i < k_; ++i) z[i] = checked_add(x[i], y[i]);
      return GroupElement::from_vec(std::move(z));
    }
    case GroupKind::Free: {
      std::vector<std::int32_t> letters = b.as_word().letters;  // b acts first in a*b
      letters.insert(letters.end(), a.as_word().letters.begin(), a.as_word().letters.end());
      return GroupElement::from_word(reduce_word(std::move(letters)));
    }
    case GroupKind::Finite: {
      const auto& t = finite_.table;
      const std::uint32_t i = a.as_index(), j = b.as_index();
      if (i >= t.size() || j >= t.size()) throw SpecError("finite element index out of range");
      return GroupElement::from_index(t[i][j]);
    }
  }
  throw SpecError("unknown group kind");
}

GroupElement GroupHandle::inverse(const GroupElement& a) const {
  switch (kind_) {
    case GroupKind::Z:
    case GroupKind::GridR: {
      check_bound(a.as_int());
      return GroupElement::from_int(-a.as_int());
    }
    case GroupKind::Zk: {
      std::vector<std::int64_t> z = a.as_vec();
      for (auto& x : z) {
        check_bound(x);
        x = -x;
      }
      return GroupElement::from_vec(std::move(z));
    }
    case GroupKind::Free: {
      const auto& w = a.as_word().letters;
      std::vector<std::int32_t> inv(w.rbegin(), w.rend());
      for (auto& s : inv) s = -s;
      return GroupElement::from_word(Word{std::move(inv)});
    }
    case GroupKind::Finite: {
      const std::uint32_t i = a.as_index();
      if (i >= finite_.inverse.size()) throw SpecError("finite element index out of range");
      return GroupElement::from_index(finite_.inverse[i]);
    }
  }
  throw SpecError("unknown group kind");
}

GroupElement GroupHandle::generator(int i) const {
  if (i < 1 || i > generator_count()) throw SpecError("generator index out of range");
  switch (kind_) {
    case GroupKind::Z:
    case GroupKind::GridR:
      return GroupElement::from_int(1);
    case GroupKind::Zk: {
      std::vector<std::int64_t> v(k_, 0);
      v[i - 1] = 1;
      return GroupElement::from_vec(std::move(v));
    }
    case GroupKind::Free:
      return GroupElement::from_word(Word{{static_cast<std::int32_t>(i)}});
    case GroupKind::Finite:
      return GroupElement::from_index(finite_.generators[i - 1]);
  }
  throw SpecError("unknown group kind");
}

namespace {

void lattice_window(std::vector<GroupElement>& out, std::vector<std::int64_t>& cur, int coord,
                    int k, int radius) {
  if (coord == k) {
    out.push_back(GroupElement::from_vec(cur));
    return;
  }
  for (std::int64_t v = -radius; v <= radius; ++v) {
    cur[coord] = v;
    lattice_window(out, cur, coord + 1, k, radius);
  }
}

}  // namespace

std::vector<GroupElement> GroupHandle::window(int radius, std::uint64_t seed) const {
  if (radius < 1) throw SpecError("window radius must be >= 1");
  std::vector<GroupElement> out;
  switch (kind_) {
    case GroupKind::Z: {
      for (std::int64_t n = -radius; n <= radius; ++n) out.push_back(GroupElement::from_int(n));
      break;
    }
    case GroupKind::GridR: {
      const std::int64_t lo = std::max<std::int64_t>(grid_imin_, -radius);
      const std::int64_t hi = std::min<std::int64_t>(grid_imax_, radius);
      for (std::int64_t n = lo; n <= hi; ++n) out.push_back(GroupElement::from_int(n));
      break;
    }
    case GroupKind::Zk: {
      std::vector<std::int64_t> cur(k_, 0);
      lattice_window(out, cur, 0, k_, radius);
      break;
    }
    case GroupKind::Free: {
      // All reduced words up to length min(radius, 4), breadth first in a
      // fixed letter order, then seeded random padding out to the radius.
      const int full = std::min(radius, 4);
      std::vector<std::int32_t> alphabet;
      for (int i = 1; i <= k_; ++i) {
        alphabet.push_back(i);
        alphabet.push_back(-i);
      }
      std::vector<std::vector<std::int32_t>> frontier = {{}};
      out.push_back(GroupElement::from_word(Word{}));
      for (int len = 1; len <= full; ++len) {
        std::vector<std::vector<std::int32_t>> next;
        for (const auto& w : frontier) {
          for (std::int32_t s : alphabet) {
            if (!w.empty() && w.back() == -s) continue;
            auto ext = w;
            ext.push_back(s);
            out.push_back(GroupElement::from_word(Word{ext}));
            next.push_back(std::move(ext));
          }
        }
        frontier = std::move(next);
      }
      if (radius > 4) {
        std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL);
        std::set<std::vector<std::int32_t>> seen;
        for (int len = 5; len <= radius; ++len) {
          for (int rep = 0; rep < 8; ++rep) {
            for (int attempt = 0; attempt < 64; ++attempt) {
              std::vector<std::int32_t> w;
              while (static_cast<int>(w.size()) < len) {
                const std::int32_t s = alphabet[rng() % alphabet.size()];
                if (!w.empty() && w.back() == -s) continue;
                w.push_back(s);
              }
              if (seen.insert(w).second) {
                out.push_back(GroupElement::from_word(Word{w}));
                break;
              }
            }
          }
        }
      }
      break;
    }
    case GroupKind::Finite: {
      for (std::uint32_t i = 0; i < finite_.table.size(); ++i)
        out.push_back(GroupElement::from_index(i));
      break;
    }
  }
  return out;
}

Word GroupHandle::word_for(const GroupElement& g) const {
  std::vector<std::int32_t> letters;
  switch (kind_) {
    case GroupKind::Z:
    case GroupKind::GridR: {
      const std::int64_t m = g.as_int();
      for (std::int64_t i = 0; i < std::abs(m); ++i) letters.push_back(m > 0 ? 1 : -1);
      break;
    }
    case GroupKind::Zk: {
      const auto& v = g.as_vec();
      // Canonical order: generator 1 acts first.
      for (int c = 0; c < k_; ++c) {
        const std::int64_t m = v[c];
        for (std::int64_t i = 0; i < std::abs(m); ++i)
          letters.push_back(m > 0 ? (c + 1) : -(c + 1));
      }
      break;
    }
    case GroupKind::Free:
      return g.as_word();
    case GroupKind::Finite:
      throw SpecError("finite table groups have no canonical generator words");
  }
  return Word{std::move(letters)};
}

bool GroupHandle::same_as(const GroupHandle& o) const {
  if (kind_ != o.kind_) return false;
  switch (kind_) {
    case GroupKind::Z:
      return true;
    case GroupKind::Zk:
    case GroupKind::Free:
      return k_ == o.k_;
    case GroupKind::Finite:
      return finite_.table == o.finite_.table;
    case GroupKind::GridR:
      return grid_step_ == o.grid_step_ && grid_origin_ == o.grid_origin_ &&
             grid_imin_ == o.grid_imin_ && grid_imax_ == o.grid_imax_;
  }
  return false;
}

Mat letter_matrix(const GroupHandle& g, const std::vector<GeneratorMap>& maps,
                  std::int32_t letter, const GroupElement& base) {
  const int i = std::abs(letter);
  if (letter == 0 || i > static_cast<int>(maps.size()))
    throw SpecError("letter references undefined generator index");
  if (letter > 0) return maps[i - 1](base);
  // Inverse letter: the step from xi^-1 * base up to base, inverted.
  const GroupElement shifted = g.compose(g.inverse(g.generator(i)), base);
  return try_inverse(maps[i - 1](shifted));
}

Mat word_product(const GroupHandle& g, const std::vector<GeneratorMap>& maps, int dim,
                 const Word& w, const GroupElement& base) {
  Mat acc = identity(dim);
  GroupElement at = base;
  for (std::int32_t s : w.letters) {
    acc = mul(letter_matrix(g, maps, s, at), acc);
    const int i = std::abs(s);
    GroupElement step = g.generator(i);
    if (s < 0) step = g.inverse(step);
    at = g.compose(step, at);
  }
  return acc;
}

double relation_residual(const GroupHandle& g, const std::vector<GeneratorMap>& maps, int dim,
                         std::size_t relation_index, const GroupElement& eta) {
  if (relation_index >= g.relations().size())
    throw RangeError("relation_residual: relation index out of range");
  const Word w{g.relations()[relation_index]};
  return op_norm(sub(word_product(g, maps, dim, w, eta), identity(dim)));
}

VerificationReport check_preserves_relations(const GroupHandle& g,
                                             const std::vector<GeneratorMap>& maps, int dim,
                                             const std::vector<GroupElement>& window,
                                             double tol) {
  VerificationReport rep;
  LawEntry e;
  e.law = "relations";
  e.tol = tol;
  if (g.relations().empty()) {
    e.note = "no relations declared";
    rep.entries.push_back(e);
    return rep;
  }
  std::size_t worst_rel = 0;
  for (std::size_t ri = 0; ri < g.relations().size(); ++ri) {
    for (const auto& eta : window) {
      const double r = relation_residual(g, maps, dim, ri, eta);
      ++e.samples;
      if (r > e.max_residual || e.samples == 1) {
        e.max_residual = r;
        e.argmax = {eta};
        worst_rel = ri;
      }
    }
  }
  e.pass = e.max_residual <= tol;
  e.metrics["relation_index"] = static_cast<double>(worst_rel);
  rep.entries.push_back(e);
  return rep;
}

}  // namespace cotran
