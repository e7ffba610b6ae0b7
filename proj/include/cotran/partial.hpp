#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "cotran/cotranslation.hpp"
#include "cotran/group.hpp"
#include "cotran/matrix.hpp"
#include "cotran/report.hpp"

namespace cotran {

// Like a Cotranslation but the values may be singular.  Same composition law,
// same memoization behavior.
class PartialCotranslation {
 public:
  enum class Kind { Explicit, Restricted, Sum, Conjugated, ConstantBlock };

  PartialCotranslation() = default;
  static PartialCotranslation from_evaluator(GroupHandle group, int dim, Kind kind,
                                             PairEvaluator eval);

  const GroupHandle& group() const;
  int dim() const;
  Kind kind() const;

  Mat operator()(const GroupElement& g, const GroupElement& h) const;
  double value_norm(const GroupElement& g, const GroupElement& h) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// Family of idempotents g |-> P(g), memoized.
class ProjectorMap {
 public:
  ProjectorMap() = default;
  ProjectorMap(GroupHandle group, int dim, std::function<Mat(const GroupElement&)> p);
  const GroupHandle& group() const;
  int dim() const;
  Mat operator()(const GroupElement& g) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// Family of invertible matrices g |-> T(g) with cached inverses.
class ConjugationMap {
 public:
  ConjugationMap() = default;
  ConjugationMap(GroupHandle group, int dim, std::function<Mat(const GroupElement&)> t);
  const GroupHandle& group() const;
  int dim() const;
  Mat operator()(const GroupElement& g) const;
  Mat inv(const GroupElement& g) const;
  // Largest value / inverse operator norms over the window.
  double sup_norm(const std::vector<GroupElement>& window) const;
  double sup_inv_norm(const std::vector<GroupElement>& window) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// A full cotranslation regarded as a (nowhere singular) partial one.
PartialCotranslation as_partial(const Cotranslation& z);

PartialCotranslation with_overrides(const PartialCotranslation& w,
                                    std::vector<PairOverride> overrides);

double partial_cocycle_residual(const PartialCotranslation& w, const GroupElement& g,
                                const GroupElement& h, const GroupElement& k);

// Pointwise residuals of the partial-cotranslation laws, shared by the window
// checks and by report replay.
double units_idempotency_residual(const PartialCotranslation& w, const GroupElement& g);
double kernel_agreement_residual(const PartialCotranslation& w, const GroupElement& h,
                                 const GroupElement& d1, const GroupElement& d2,
                                 double rank_tol_rel = kRankTol);
int value_rank(const PartialCotranslation& w, const GroupElement& g, const GroupElement& h,
               double rank_tol_rel = kRankTol);
double invariance_residual(const PartialCotranslation& v, const ProjectorMap& p,
                           const GroupElement& g, const GroupElement& h);
double projectors_orthogonality_residual(const ProjectorMap& p, const ProjectorMap& q,
                                         const GroupElement& g);
double mutual_orthogonality_residual(const PartialCotranslation& w, const PartialCotranslation& v,
                                     const GroupElement& g, const GroupElement& h,
                                     const GroupElement& k);
double restriction_recovery_residual(const PartialCotranslation& s, const PartialCotranslation& w,
                                     const GroupElement& g, const GroupElement& h);
double conjugation_residual(const PartialCotranslation& w, const PartialCotranslation& v,
                            const ConjugationMap& t, const GroupElement& g,
                            const GroupElement& h);
double normalized_units_residual(const PartialCotranslation& w, const ConjugationMap& t, int rank,
                                 const GroupElement& g);
double similarity_bound_excess(const ConjugationMap& t, int dim, double projector_bound,
                               const GroupElement& g);
double invertibility_residual(const Cotranslation& z, const GroupElement& g,
                              const GroupElement& h);

// Composition law plus idempotency of the unit values W(g, e).
VerificationReport law_check(const PartialCotranslation& w,
                             const std::vector<GroupElement>& bases,
                             const std::vector<GroupElement>& disps, double tol = 1e-9);
inline VerificationReport law_check(const PartialCotranslation& w,
                                    const std::vector<GroupElement>& window, double tol = 1e-9) {
  return law_check(w, window, window, tol);
}

// P(g) = W(g, e).
ProjectorMap units_projector(const PartialCotranslation& w);

// Kernels of W(h, .) agree across displacements and the rank is constant.
// Borderline singular-value gaps make the entries inconclusive, not failed.
VerificationReport kernel_constancy_check(const PartialCotranslation& w,
                                          const std::vector<GroupElement>& bases,
                                          const std::vector<GroupElement>& disps,
                                          double tol = 1e-8, double rank_tol_rel = kRankTol);

// ||P(hg) V(g, h) - V(g, h) P(g)|| over the window, scale-normalized.
VerificationReport check_invariant_projector(const PartialCotranslation& v,
                                             const ProjectorMap& p,
                                             const std::vector<GroupElement>& bases,
                                             const std::vector<GroupElement>& disps,
                                             double tol = 1e-9);

VerificationReport check_projectors_orthogonal(const ProjectorMap& p, const ProjectorMap& q,
                                               const std::vector<GroupElement>& window,
                                               double tol = 1e-9);

// W(g, h) = V(g, h) P(g) for an invariant projector P (invariance checked).
PartialCotranslation restrict_cotranslation(const Cotranslation& v, const ProjectorMap& p,
                                            const std::vector<GroupElement>& bases,
                                            const std::vector<GroupElement>& disps,
                                            double tol = 1e-9);

// Mutual orthogonality residual W(hg, k) V(g, h) = V(hg, k) W(g, h) = 0.
VerificationReport check_mutually_orthogonal(const PartialCotranslation& w,
                                             const PartialCotranslation& v,
                                             const std::vector<GroupElement>& bases,
                                             const std::vector<GroupElement>& disps,
                                             double tol = 1e-9);

// Pointwise sum of two mutually orthogonal partial cotranslations; verifies
// orthogonality, the law of the sum, and that the units projector of w stays
// invariant for the sum with restriction giving w back.
PartialCotranslation orthogonal_sum(const PartialCotranslation& w, const PartialCotranslation& v,
                                    const std::vector<GroupElement>& bases,
                                    const std::vector<GroupElement>& disps, double tol = 1e-9);

// W_T(g, h) = T(hg)^-1 W(g, h) T(g); rank is preserved pointwise.
PartialCotranslation conjugate(const PartialCotranslation& w, const ConjugationMap& t);

struct NormalizedUnits {
  PartialCotranslation normalized;  // conjugated family with constant unit block
  ConjugationMap t;
  int rank = 0;
  double projector_bound = 1.0;  // sup over the window of max(||P||, ||Id-P||)
  VerificationReport report;     // normalized_units + prop bounds entries
};

// Builds T(g) from orthonormal bases of the image and kernel of P(g) = W(g,e),
// so that T(g)^-1 W(g,e) T(g) is the constant block diag(Id_r, 0).
NormalizedUnits normalize_units(const PartialCotranslation& w,
                                const std::vector<GroupElement>& window, double tol = 1e-8);

struct ContinuityProbe {
  double max_jump = 0.0;
  GroupElement at_a, at_b;
  std::size_t steps = 0;
};

// Informational: largest ||T(a) - T(b)|| over consecutive path elements.
// Small jumps suggest a continuous selection; nothing is asserted.
ContinuityProbe continuity_probe(const ConjugationMap& t,
                                 const std::vector<GroupElement>& path);

struct CompletionResult {
  PartialCotranslation complement;  // V with W + V invertible
  Cotranslation full;               // Z = W + V
  ConjugationMap t;
  int rank = 0;
  VerificationReport report;  // completion_* entries
};

// Completes w to a full-rank cotranslation: builds an orthogonal complement V
// so that W + V is invertible everywhere and restricting W + V back to the
// units projector of W recovers W.  Throws CompletionError when one of the
// five verification entries fails.
CompletionResult complete(const PartialCotranslation& w,
                          const std::vector<GroupElement>& bases,
                          const std::vector<GroupElement>& disps, double tol = 1e-9);

// Conjugation identity T(hg) V(g, h) = W(g, h) T(g) plus the recorded bounds
// for T and its inverse over the window.
VerificationReport kinematic_similarity_report(const PartialCotranslation& w,
                                               const PartialCotranslation& v,
                                               const ConjugationMap& t,
                                               const std::vector<GroupElement>& bases,
                                               const std::vector<GroupElement>& disps,
                                               double tol = 1e-9);

}  // namespace cotran
