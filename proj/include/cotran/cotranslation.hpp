#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "cotran/group.hpp"
#include "cotran/matrix.hpp"
#include "cotran/report.hpp"

namespace cotran {

using MorphismFn = std::function<Mat(const GroupElement&)>;
using PairEvaluator = std::function<Mat(const GroupElement&, const GroupElement&)>;

// One-sided coefficient sequence n |-> A(n) driving a linear difference
// equation x(n+1) = A(n) x(n) over the integers.
class DifferenceSeq {
 public:
  static DifferenceSeq periodic(std::vector<Mat> table);
  static DifferenceSeq constant(Mat a);
  static DifferenceSeq from_fn(int dim, std::function<Mat(std::int64_t)> f);

  int dim() const { return dim_; }
  Mat operator()(std::int64_t n) const { return f_(n); }

 private:
  DifferenceSeq(int dim, std::function<Mat(std::int64_t)> f) : dim_(dim), f_(std::move(f)) {}
  int dim_ = 0;
  std::function<Mat(std::int64_t)> f_;
};

// Two-argument family Z(g, h) of invertible matrices satisfying
// Z(g, kh) = Z(hg, k) Z(g, h).  Values and their inverses are memoized;
// the caches tolerate concurrent readers and idempotent concurrent writes.
class Cotranslation {
 public:
  enum class Kind {
    FromMorphism,
    FromDifferenceSeq,
    FromGeneratorMaps,
    FromEvolution,
    Conjugated,
    ShiftedByMorphism,
    Explicit,
  };

  Cotranslation() = default;
  static Cotranslation from_evaluator(GroupHandle group, int dim, Kind kind, PairEvaluator eval);

  const GroupHandle& group() const;
  int dim() const;
  Kind kind() const;

  Mat operator()(const GroupElement& g, const GroupElement& h) const;
  // Memoized try_inverse of the value at (g, h).
  Mat inv(const GroupElement& g, const GroupElement& h) const;
  // Memoized operator norm of the value at (g, h).
  double value_norm(const GroupElement& g, const GroupElement& h) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// Autonomous cotranslation Z(g, h) = gamma(h).  The morphism property of
// gamma is verified on the window first; failure names the worst pair.
Cotranslation from_morphism(const GroupHandle& g, int dim, MorphismFn gamma,
                            const std::vector<GroupElement>& window, double tol = 1e-9);

// Cotranslation of the difference equation driven by A: ordered products of
// A values for positive displacements, of their inverses for negative ones.
Cotranslation from_difference_seq(const DifferenceSeq& a);

// Multivariable difference system: A_i(eta) steps along generator i from eta.
// Requires a group with canonical generator words; declared relations are
// verified on the window first.
Cotranslation from_generator_maps(const GroupHandle& g, int dim, std::vector<GeneratorMap> maps,
                                  const std::vector<GroupElement>& window, double tol = 1e-9);

// W(g, h) = Z(g, h) gamma(h); valid when gamma's values commute with every
// value of Z (checked on the window, as is the result's cocycle law).
Cotranslation shift_by_morphism(const Cotranslation& z, MorphismFn gamma,
                                const std::vector<GroupElement>& window, double tol = 1e-9);

struct PairOverride {
  GroupElement g, h;
  Mat value;
};
// Copy of z with finitely many values replaced; the workhorse for
// negative-control fixtures.
Cotranslation with_overrides(const Cotranslation& z, std::vector<PairOverride> overrides);

// Scale-normalized residual of the composition law at one triple:
// ||Z(g, kh) - Z(hg, k) Z(g, h)|| / max(1, ||Z(hg, k)|| ||Z(g, h)||).
double cocycle_residual(const Cotranslation& z, const GroupElement& g, const GroupElement& h,
                        const GroupElement& k);

// Pointwise residuals of the remaining laws, shared by the window checks
// below and by report replay (re-evaluating a recorded worst location).
double unit_residual(const Cotranslation& z, const GroupElement& g);
double involution_residual(const Cotranslation& z, const GroupElement& g, const GroupElement& h);
double autonomy_residual(const Cotranslation& z, const GroupElement& g, const GroupElement& k,
                         const GroupElement& h);
double morphism_pair_residual(const GroupHandle& grp, const MorphismFn& gamma,
                              const GroupElement& a, const GroupElement& b);
double commutation_residual(const Cotranslation& z, const MorphismFn& gamma,
                            const GroupElement& g, const GroupElement& h, const GroupElement& k);

VerificationReport cocycle_check(const Cotranslation& z, const std::vector<GroupElement>& bases,
                                 const std::vector<GroupElement>& disps, double tol = 1e-10);
inline VerificationReport cocycle_check(const Cotranslation& z,
                                        const std::vector<GroupElement>& window,
                                        double tol = 1e-10) {
  return cocycle_check(z, window, window, tol);
}

// Unit law Z(g, e) = Id and the inversion law Z(g, h)^-1 = Z(hg, h^-1).
VerificationReport cot_inverse_law_check(const Cotranslation& z,
                                         const std::vector<GroupElement>& window,
                                         double tol = 1e-10);

// True iff Z(g, h) is independent of the base point g on the window.
// When detail is given, the observed worst deviation is recorded there.
bool is_autonomous(const Cotranslation& z, const std::vector<GroupElement>& window,
                   double tol = 1e-9, LawEntry* detail = nullptr);

// g |-> Z(e, g); a group morphism exactly when z is autonomous.
MorphismFn extract_morphism(const Cotranslation& z);

// Skew-product hull: for each g the family of time slices h |-> psi_g(h),
// with the shift acting by sigma(h, psi_g) = psi_{hg}.
class Hull {
 public:
  Hull() = default;
  Hull(GroupHandle group, int dim, PairEvaluator psi);
  const GroupHandle& group() const;
  int dim() const;
  Mat time_slice(const GroupElement& g, const GroupElement& h) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

Hull to_hull(const Cotranslation& z);
// Replaces the whole slice family of one base point by identity maps.
Hull corrupt_hull(const Hull& h, const GroupElement& at);
double hull_unit_residual(const Hull& h, const GroupElement& g);
double hull_axiom_residual(const Hull& h, const GroupElement& g, const GroupElement& hh,
                           const GroupElement& k);
// Admissibility (psi_g(e) = Id) plus the shift-compatibility identity
// psi_{hg}(k) psi_g(h) = psi_g(kh).
VerificationReport hull_axiom_check(const Hull& h, const std::vector<GroupElement>& bases,
                                    const std::vector<GroupElement>& disps, double tol = 1e-10);
Cotranslation from_hull(const Hull& h);

}  // namespace cotran
