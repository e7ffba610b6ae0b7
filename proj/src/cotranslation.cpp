#include "cotran/cotranslation.hpp"

#include "cotran/group_checks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace cotran {

namespace {

std::vector<std::int64_t> pair_key(const GroupElement& g, const GroupElement& h) {
  std::vector<std::int64_t> k = g.key();
  const auto hk = h.key();
  k.insert(k.end(), hk.begin(), hk.end());
  return k;
}

}  // namespace

DifferenceSeq DifferenceSeq::periodic(std::vector<Mat> table) {
  if (table.empty()) throw SpecError("difference sequence table is empty");
  const int d = table[0].dim();
  for (const Mat& m : table)
    if (m.dim() != d) throw SpecError("difference sequence table mixes dimensions");
  const auto shared = std::make_shared<std::vector<Mat>>(std::move(table));
  return DifferenceSeq(d, [shared](std::int64_t n) {
    const std::int64_t len = static_cast<std::int64_t>(shared->size());
    std::int64_t i = n % len;
    if (i < 0) i += len;
    return (*shared)[static_cast<size_t>(i)];
  });
}

DifferenceSeq DifferenceSeq::constant(Mat a) {
  const int d = a.dim();
  return DifferenceSeq(d, [a = std::move(a)](std::int64_t) { return a; });
}

DifferenceSeq DifferenceSeq::from_fn(int dim, std::function<Mat(std::int64_t)> f) {
  if (dim < 1) throw SpecError("difference sequence needs dim >= 1");
  return DifferenceSeq(dim, std::move(f));
}

struct Cotranslation::Impl {
  GroupHandle group;
  int dim = 0;
  Kind kind = Kind::Explicit;
  PairEvaluator eval;
  mutable std::map<std::vector<std::int64_t>, Mat> cache;
  mutable std::map<std::vector<std::int64_t>, Mat> inv_cache;
  mutable std::map<std::vector<std::int64_t>, double> norm_cache;
  mutable std::mutex mu;
};

Cotranslation Cotranslation::from_evaluator(GroupHandle group, int dim, Kind kind,
                                            PairEvaluator eval) {
  if (dim < 1) throw SpecError("cotranslation needs dim >= 1");
  Cotranslation z;
  z.impl_ = std::make_shared<Impl>();
  z.impl_->group = std::move(group);
  z.impl_->dim = dim;
  z.impl_->kind = kind;
  z.impl_->eval = std::move(eval);
  return z;
}

const GroupHandle& Cotranslation::group() const { return impl_->group; }
int Cotranslation::dim() const { return impl_->dim; }
Cotranslation::Kind Cotranslation::kind() const { return impl_->kind; }

Mat Cotranslation::operator()(const GroupElement& g, const GroupElement& h) const {
  const auto key = pair_key(g, h);
  {
    std::lock_guard<std::mutex> lock(impl_->mu);
    const auto it = impl_->cache.find(key);
    if (it != impl_->cache.end()) return it->second;
  }
  Mat value = impl_->eval(g, h);
  if (value.dim() != impl_->dim) throw SpecError("evaluator returned wrong dimension");
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->cache.emplace(key, std::move(value)).first->second;
}

Mat Cotranslation::inv(const GroupElement& g, const GroupElement& h) const {
  const auto key = pair_key(g, h);
  {
    std::lock_guard<std::mutex> lock(impl_->mu);
    const auto it = impl_->inv_cache.find(key);
    if (it != impl_->inv_cache.end()) return it->second;
  }
  Mat value = try_inverse((*this)(g, h));
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->inv_cache.emplace(key, std::move(value)).first->second;
}

double Cotranslation::value_norm(const GroupElement& g, const GroupElement& h) const {
  const auto key = pair_key(g, h);
  {
    std::lock_guard<std::mutex> lock(impl_->mu);
    const auto it = impl_->norm_cache.find(key);
    if (it != impl_->norm_cache.end()) return it->second;
  }
  const double n = op_norm((*this)(g, h));
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->norm_cache.emplace(key, n).first->second;
}

namespace {

// Memoizing wrapper for a one-argument matrix map.
class ElementCache {
 public:
  explicit ElementCache(std::function<Mat(const GroupElement&)> f) : f_(std::move(f)) {}
  Mat operator()(const GroupElement& g) const {
    const auto key = g.key();
    {
      std::lock_guard<std::mutex> lock(mu_);
      const auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    Mat v = f_(g);
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(key, std::move(v)).first->second;
  }

 private:
  std::function<Mat(const GroupElement&)> f_;
  mutable std::map<std::vector<std::int64_t>, Mat> cache_;
  mutable std::mutex mu_;
};

struct MorphismCheck {
  double worst = 0.0;
  GroupElement g, h;
};

// Worst scale-normalized deviation of gamma from multiplicativity over the
// window, plus the identity value check.
MorphismCheck morphism_residual(const GroupHandle& grp, int dim, const MorphismFn& gamma,
                                const std::vector<GroupElement>& window) {
  MorphismCheck out;
  const GroupElement e = grp.identity();
  out.g = e;
  out.h = e;
  out.worst = op_norm(sub(gamma(e), identity(dim)));
  for (const auto& g : window) {
    for (const auto& h : window) {
      const double r = morphism_pair_residual(grp, gamma, g, h);
      if (r > out.worst) {
        out.worst = r;
        out.g = g;
        out.h = h;
      }
    }
  }
  return out;
}

}  // namespace

double morphism_pair_residual(const GroupHandle& grp, const MorphismFn& gamma,
                              const GroupElement& a, const GroupElement& b) {
  const Mat ga = gamma(a);
  const Mat gb = gamma(b);
  const Mat lhs = gamma(grp.compose(a, b));
  return op_norm(sub(lhs, mul(ga, gb))) / std::max(1.0, op_norm(ga) * op_norm(gb));
}

double commutation_residual(const Cotranslation& z, const MorphismFn& gamma,
                            const GroupElement& g, const GroupElement& h,
                            const GroupElement& k) {
  const Mat zv = z(g, h);
  const Mat gv = gamma(k);
  return op_norm(sub(mul(gv, zv), mul(zv, gv))) /
         std::max(1.0, z.value_norm(g, h) * op_norm(gv));
}

Cotranslation from_morphism(const GroupHandle& g, int dim, MorphismFn gamma,
                            const std::vector<GroupElement>& window, double tol) {
  auto cached = std::make_shared<ElementCache>(std::move(gamma));
  const MorphismCheck chk =
      morphism_residual(g, dim, [&](const GroupElement& x) { return (*cached)(x); }, window);
  if (chk.worst > tol) {
    std::ostringstream os;
    os << "from_morphism: gamma is not a morphism on the window; worst pair (" << chk.g.str()
       << ", " << chk.h.str() << ") residual " << chk.worst;
    throw ConstructionError(os.str());
  }
  return Cotranslation::from_evaluator(
      g, dim, Cotranslation::Kind::FromMorphism,
      [cached](const GroupElement&, const GroupElement& h) { return (*cached)(h); });
}

Cotranslation from_difference_seq(const DifferenceSeq& a) {
  const int dim = a.dim();
  auto fwd = std::make_shared<ElementCache>(
      [a](const GroupElement& n) { return a(n.as_int()); });
  auto bwd = std::make_shared<ElementCache>(
      [fwd](const GroupElement& n) { return try_inverse((*fwd)(n)); });
  auto eval = [fwd, bwd, dim](const GroupElement& ge, const GroupElement& he) {
    const std::int64_t n = ge.as_int();
    const std::int64_t m = he.as_int();
    if (m == 0) return identity(dim);
    if (m > 0) {
      Mat acc = (*fwd)(GroupElement::from_int(n));
      for (std::int64_t i = 1; i < m; ++i)
        acc = mul((*fwd)(GroupElement::from_int(n + i)), acc);
      return acc;
    }
    Mat acc = (*bwd)(GroupElement::from_int(n - 1));
    for (std::int64_t j = n - 2; j >= n + m; --j)
      acc = mul((*bwd)(GroupElement::from_int(j)), acc);
    return acc;
  };
  return Cotranslation::from_evaluator(GroupHandle::integers(), dim,
                                       Cotranslation::Kind::FromDifferenceSeq, std::move(eval));
}

Cotranslation from_generator_maps(const GroupHandle& g, int dim, std::vector<GeneratorMap> maps,
                                  const std::vector<GroupElement>& window, double tol) {
  if (g.kind() == GroupKind::Finite)
    throw SpecError("from_generator_maps needs a group with canonical generator words");
  if (static_cast<int>(maps.size()) != g.generator_count())
    throw SpecError("from_generator_maps: one map per generator required");
  auto shared_maps = std::make_shared<std::vector<GeneratorMap>>();
  for (auto& m : maps) {
    auto cached = std::make_shared<ElementCache>(std::move(m));
    shared_maps->push_back([cached](const GroupElement& x) { return (*cached)(x); });
  }
  if (!g.relations().empty()) {
    const VerificationReport rel = check_preserves_relations(g, *shared_maps, dim, window, tol);
    if (!rel.aggregate_pass()) {
      const LawEntry& e = rel.entries.front();
      std::ostringstream os;
      os << "from_generator_maps: relation " << e.metrics.at("relation_index")
         << " not preserved at base " << e.argmax.front().str() << "; residual "
         << e.max_residual;
      throw ConstructionError(os.str());
    }
  }
  if (g.kind() == GroupKind::Zk) {
    // Cross-check well-definedness: evaluating along the reversed coordinate
    // order must agree with the canonical order.
    const GroupElement e = g.identity();
    std::size_t checked = 0;
    for (const auto& h : window) {
      if (checked >= 16) break;
      const Word canon = g.word_for(h);
      std::vector<std::int32_t> rev;
      const auto& v = h.as_vec();
      for (int c = g.lattice_dim() - 1; c >= 0; --c) {
        for (std::int64_t i = 0; i < std::abs(v[c]); ++i)
          rev.push_back(v[c] > 0 ? (c + 1) : -(c + 1));
      }
      const Mat a = word_product(g, *shared_maps, dim, canon, e);
      const Mat b = word_product(g, *shared_maps, dim, Word{rev}, e);
      const double r = op_norm(sub(a, b)) / std::max(1.0, op_norm(a));
      if (r > tol) {
        std::ostringstream os;
        os << "from_generator_maps: product at " << h.str()
           << " depends on the word chosen; residual " << r;
        throw ConstructionError(os.str());
      }
      ++checked;
    }
  }
  auto eval = [g, shared_maps, dim](const GroupElement& base, const GroupElement& h) {
    return word_product(g, *shared_maps, dim, g.word_for(h), base);
  };
  return Cotranslation::from_evaluator(g, dim, Cotranslation::Kind::FromGeneratorMaps,
                                       std::move(eval));
}

Cotranslation shift_by_morphism(const Cotranslation& z, MorphismFn gamma,
                                const std::vector<GroupElement>& window, double tol) {
  const GroupHandle& g = z.group();
  const int dim = z.dim();
  auto cached = std::make_shared<ElementCache>(std::move(gamma));
  const MorphismCheck mc =
      morphism_residual(g, dim, [&](const GroupElement& x) { return (*cached)(x); }, window);
  if (mc.worst > tol) {
    std::ostringstream os;
    os << "shift_by_morphism: gamma is not a morphism on the window; worst pair (" << mc.g.str()
       << ", " << mc.h.str() << ") residual " << mc.worst;
    throw ConstructionError(os.str());
  }
  // Every gamma value must commute with every Z value on the window.
  const MorphismFn gamma_fn = [cached](const GroupElement& x) { return (*cached)(x); };
  double worst = 0.0;
  GroupElement wg, wh, wk;
  for (const auto& gg : window) {
    for (const auto& hh : window) {
      for (const auto& kk : window) {
        const double r = commutation_residual(z, gamma_fn, gg, hh, kk);
        if (r > worst) {
          worst = r;
          wg = gg;
          wh = hh;
          wk = kk;
        }
      }
    }
  }
  if (worst > tol) {
    std::ostringstream os;
    os << "shift_by_morphism: gamma does not commute with Z; worst triple (" << wg.str() << ", "
       << wh.str() << ", " << wk.str() << ") residual " << worst;
    throw ConstructionError(os.str());
  }
  Cotranslation w = Cotranslation::from_evaluator(
      g, dim, Cotranslation::Kind::ShiftedByMorphism,
      [z, cached](const GroupElement& gg, const GroupElement& hh) {
        return mul(z(gg, hh), (*cached)(hh));
      });
  const VerificationReport post = cocycle_check(w, window, window, std::max(tol, 1e-10));
  if (!post.aggregate_pass()) {
    throw ConstructionError("shift_by_morphism: shifted family violates the composition law");
  }
  return w;
}

Cotranslation with_overrides(const Cotranslation& z, std::vector<PairOverride> overrides) {
  auto table = std::make_shared<std::map<std::vector<std::int64_t>, Mat>>();
  for (auto& o : overrides) {
    if (o.value.dim() != z.dim()) throw SpecError("override has wrong dimension");
    (*table)[pair_key(o.g, o.h)] = std::move(o.value);
  }
  return Cotranslation::from_evaluator(
      z.group(), z.dim(), Cotranslation::Kind::Explicit,
      [z, table](const GroupElement& g, const GroupElement& h) {
        const auto it = table->find(pair_key(g, h));
        if (it != table->end()) return it->second;
        return z(g, h);
      });
}

double cocycle_residual(const Cotranslation& z, const GroupElement& g, const GroupElement& h,
                        const GroupElement& k) {
  const GroupHandle& grp = z.group();
  const GroupElement kh = grp.compose(k, h);
  const GroupElement hg = grp.compose(h, g);
  const Mat lhs = z(g, kh);
  const Mat a = z(hg, k);
  const Mat b = z(g, h);
  const double scale = std::max(1.0, z.value_norm(hg, k) * z.value_norm(g, h));
  return op_norm(sub(lhs, mul(a, b))) / scale;
}

VerificationReport cocycle_check(const Cotranslation& z, const std::vector<GroupElement>& bases,
                                 const std::vector<GroupElement>& disps, double tol) {
  VerificationReport rep;
  rep.entries.push_back(max_over("cocycle", tol, base_disp_triples(bases, disps),
                                 [&](const std::vector<GroupElement>& t) {
                                   return cocycle_residual(z, t[0], t[1], t[2]);
                                 }));
  return rep;
}

double unit_residual(const Cotranslation& z, const GroupElement& g) {
  return op_norm(sub(z(g, z.group().identity()), identity(z.dim())));
}

double involution_residual(const Cotranslation& z, const GroupElement& g,
                           const GroupElement& h) {
  // Multiplicative form of Z(hg,h^-1) = Z(g,h)^-1: their composition must be
  // the unit.  Comparing explicit inverses instead would pick up a factor of
  // cond(Z(g,h)) in float, failing well-posed families for no algebraic
  // reason.
  const GroupHandle& grp = z.group();
  const GroupElement hg = grp.compose(h, g);
  const GroupElement hinv = grp.inverse(h);
  const double scale = std::max(1.0, z.value_norm(hg, hinv) * z.value_norm(g, h));
  return op_norm(sub(mul(z(hg, hinv), z(g, h)), identity(z.dim()))) / scale;
}

double autonomy_residual(const Cotranslation& z, const GroupElement& g, const GroupElement& k,
                         const GroupElement& h) {
  // Compare base points g and k at displacement h.
  const double scale = std::max(1.0, z.value_norm(k, h));
  return op_norm(sub(z(g, h), z(k, h))) / scale;
}

VerificationReport cot_inverse_law_check(const Cotranslation& z,
                                         const std::vector<GroupElement>& window, double tol) {
  VerificationReport rep;
  rep.entries.push_back(max_over("unit", tol, all_singles(window),
                                 [&](const std::vector<GroupElement>& t) {
                                   return unit_residual(z, t[0]);
                                 }));
  rep.entries.push_back(max_over("involution", tol, all_pairs(window),
                                 [&](const std::vector<GroupElement>& t) {
                                   return involution_residual(z, t[0], t[1]);
                                 }));
  return rep;
}

bool is_autonomous(const Cotranslation& z, const std::vector<GroupElement>& window, double tol,
                   LawEntry* detail) {
  LawEntry e = max_over("autonomy", tol, all_triples(window),
                        [&](const std::vector<GroupElement>& t) {
                          return autonomy_residual(z, t[0], t[1], t[2]);
                        });
  if (detail) *detail = e;
  return e.pass;
}

MorphismFn extract_morphism(const Cotranslation& z) {
  const GroupElement e = z.group().identity();
  return [z, e](const GroupElement& g) { return z(e, g); };
}

struct Hull::Impl {
  GroupHandle group;
  int dim = 0;
  PairEvaluator psi;
};

Hull::Hull(GroupHandle group, int dim, PairEvaluator psi) {
  impl_ = std::make_shared<Impl>();
  impl_->group = std::move(group);
  impl_->dim = dim;
  impl_->psi = std::move(psi);
}

const GroupHandle& Hull::group() const { return impl_->group; }
int Hull::dim() const { return impl_->dim; }
Mat Hull::time_slice(const GroupElement& g, const GroupElement& h) const {
  return impl_->psi(g, h);
}

Hull to_hull(const Cotranslation& z) {
  return Hull(z.group(), z.dim(),
              [z](const GroupElement& g, const GroupElement& h) { return z(g, h); });
}

Hull corrupt_hull(const Hull& h, const GroupElement& at) {
  const int dim = h.dim();
  return Hull(h.group(), dim, [h, at, dim](const GroupElement& g, const GroupElement& x) {
    if (g == at) return identity(dim);
    return h.time_slice(g, x);
  });
}

double hull_unit_residual(const Hull& h, const GroupElement& g) {
  return op_norm(sub(h.time_slice(g, h.group().identity()), identity(h.dim())));
}

double hull_axiom_residual(const Hull& h, const GroupElement& g, const GroupElement& hh,
                           const GroupElement& k) {
  const GroupHandle& grp = h.group();
  const GroupElement hg = grp.compose(hh, g);
  const Mat a = h.time_slice(hg, k);
  const Mat b = h.time_slice(g, hh);
  const Mat lhs = h.time_slice(g, grp.compose(k, hh));
  return op_norm(sub(mul(a, b), lhs)) / std::max(1.0, op_norm(a) * op_norm(b));
}

VerificationReport hull_axiom_check(const Hull& h, const std::vector<GroupElement>& bases,
                                    const std::vector<GroupElement>& disps, double tol) {
  VerificationReport rep;
  rep.entries.push_back(max_over("hull_admissible", tol, all_singles(bases),
                                 [&](const std::vector<GroupElement>& t) {
                                   return hull_unit_residual(h, t[0]);
                                 }));
  rep.entries.push_back(max_over("hull_axiom_iii", tol, base_disp_triples(bases, disps),
                                 [&](const std::vector<GroupElement>& t) {
                                   return hull_axiom_residual(h, t[0], t[1], t[2]);
                                 }));
  return rep;
}

Cotranslation from_hull(const Hull& h) {
  return Cotranslation::from_evaluator(
      h.group(), h.dim(), Cotranslation::Kind::Explicit,
      [h](const GroupElement& g, const GroupElement& x) { return h.time_slice(g, x); });
}

}  // namespace cotran
