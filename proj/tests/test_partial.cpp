#include <cmath>

#include "cotran/partial.hpp"
#include "doctest.h"

using namespace cotran;

namespace {

GroupElement zi(std::int64_t n) { return GroupElement::from_int(n); }

// W(m, n) = diag(0, 2^n): every law holds although no value is invertible
PartialCotranslation counterexample() {
  return PartialCotranslation::from_evaluator(
      GroupHandle::integers(), 2, PartialCotranslation::Kind::Explicit,
      [](const GroupElement&, const GroupElement& h) {
        const double n = static_cast<double>(h.as_int());
        return Mat(2, {0, 0, 0, std::pow(2.0, n)});
      });
}

PartialCotranslation diag_powers(double a, double b) {
  return PartialCotranslation::from_evaluator(
      GroupHandle::integers(), 2, PartialCotranslation::Kind::Explicit,
      [a, b](const GroupElement&, const GroupElement& h) {
        const double n = static_cast<double>(h.as_int());
        Mat m(2);
        if (a != 0.0) m(0, 0) = std::pow(a, n);
        if (b != 0.0) m(1, 1) = std::pow(b, n);
        return m;
      });
}

Cotranslation period2() {
  return from_difference_seq(
      DifferenceSeq::periodic({Mat(2, {2, 1, 0, 1}), Mat(2, {1, 0, 1, 1})}));
}

}  // namespace

TEST_CASE("the singular family satisfies the law exactly") {
  PartialCotranslation w = counterexample();
  auto win = w.group().window(6);
  VerificationReport rep = law_check(w, win);
  CHECK(rep.aggregate_pass());
  CHECK(rep.find("partial_law")->max_residual == 0.0);
  CHECK(rep.find("lemma_331_idempotent")->max_residual == 0.0);
  CHECK(units_projector(w)(zi(3)) == Mat(2, {0, 0, 0, 1}));
  CHECK(value_rank(w, zi(0), zi(5)) == 1);
  CHECK(partial_cocycle_residual(w, zi(-2), zi(3), zi(1)) == 0.0);
  CHECK(kernel_constancy_check(w, win, win).aggregate_pass());
}

TEST_CASE("an invariant projector of a partial family may have varying rank") {
  PartialCotranslation w = counterexample();
  auto win = w.group().window(5);
  ProjectorMap p(w.group(), 2, [](const GroupElement& g) {
    return g.as_int() % 2 == 0 ? Mat(2, {0, 0, 0, 1}) : identity(2);
  });
  VerificationReport rep = check_invariant_projector(w, p, win, win);
  CHECK(rep.aggregate_pass());
  CHECK(rep.entries.front().max_residual == 0.0);
  CHECK(rank_eps(p(zi(0))) == 1);
  CHECK(rank_eps(p(zi(1))) == 2);
  CHECK(rank_eps(p(zi(2))) == 1);
}

TEST_CASE("restriction to a conjugated constant idempotent") {
  Cotranslation z = period2();
  auto win = z.group().window(4);
  Mat p0(2, {1, 0, 0, 0});
  ProjectorMap p(z.group(), 2, [&z, p0](const GroupElement& g) {
    const GroupHandle& grp = z.group();
    return mul(z(grp.identity(), g), mul(p0, z(g, grp.inverse(g))));
  });
  PartialCotranslation w = restrict_cotranslation(z, p, win, win);
  CHECK(law_check(w, win).aggregate_pass());
  CHECK(value_rank(w, zi(0), zi(2)) == 1);
  CHECK(kernel_constancy_check(w, win, win).aggregate_pass());
  // units of the restriction are exactly the projector family
  CHECK(op_norm(sub(units_projector(w)(zi(2)), p(zi(2)))) < 1e-12);
}

TEST_CASE("restriction edge ranks zero and full") {
  Cotranslation z = period2();
  auto win = z.group().window(3);
  ProjectorMap none(z.group(), 2, [](const GroupElement&) { return zero(2); });
  PartialCotranslation w0 = restrict_cotranslation(z, none, win, win);
  CHECK(law_check(w0, win).aggregate_pass());
  CHECK(value_rank(w0, zi(0), zi(1)) == 0);

  ProjectorMap all(z.group(), 2, [](const GroupElement&) { return identity(2); });
  PartialCotranslation w2 = restrict_cotranslation(z, all, win, win);
  CHECK(value_rank(w2, zi(0), zi(1)) == 2);
  CHECK(w2(zi(0), zi(1)) == z(zi(0), zi(1)));
}

TEST_CASE("a non-invariant projector is refused") {
  Cotranslation z = period2();
  auto win = z.group().window(3);
  ProjectorMap fixed(z.group(), 2, [](const GroupElement&) { return Mat(2, {1, 0, 0, 0}); });
  CHECK_THROWS_AS(restrict_cotranslation(z, fixed, win, win), ConstructionError);
}

TEST_CASE("orthogonal sums recombine complementary supports") {
  auto win = GroupHandle::integers().window(4);
  PartialCotranslation w = diag_powers(2, 0);
  PartialCotranslation v = diag_powers(0, 3);
  CHECK(check_mutually_orthogonal(w, v, win, win).aggregate_pass());
  PartialCotranslation s = orthogonal_sum(w, v, win, win);
  CHECK(s(zi(0), zi(2)) == Mat(2, {4, 0, 0, 9}));
  CHECK(law_check(s, win).aggregate_pass());
  CHECK(value_rank(s, zi(0), zi(1)) == 2);

  PartialCotranslation clash = diag_powers(3, 0);
  CHECK_FALSE(check_mutually_orthogonal(w, clash, win, win).aggregate_pass());
  CHECK_THROWS_AS(orthogonal_sum(w, clash, win, win), ConstructionError);
}

TEST_CASE("conjugation preserves rank and reports bounded frames") {
  auto grp = GroupHandle::integers();
  auto win = grp.window(4);
  PartialCotranslation w = diag_powers(2, 0);
  ConjugationMap t(grp, 2, [](const GroupElement& g) {
    return Mat(2, {1, 0.25 * static_cast<double>(g.as_int()), 0, 1});
  });
  PartialCotranslation v = conjugate(w, t);
  CHECK(value_rank(v, zi(1), zi(2)) == 1);
  CHECK(law_check(v, win).aggregate_pass());
  VerificationReport rep = kinematic_similarity_report(w, v, t, win, win);
  CHECK(rep.aggregate_pass());
  CHECK(rep.find("conjugation") != nullptr);
  CHECK(rep.find("t_invertibility") != nullptr);
  CHECK(t.sup_norm(win) >= 1.0);
  CHECK(t.sup_inv_norm(win) >= 1.0);
}

TEST_CASE("continuity probe records the largest consecutive jump") {
  auto grp = GroupHandle::integers();
  ConjugationMap t(grp, 2, [](const GroupElement& g) {
    return Mat(2, {1, 0.25 * static_cast<double>(g.as_int()), 0, 1});
  });
  ContinuityProbe probe = continuity_probe(t, {zi(0), zi(1), zi(2)});
  CHECK(probe.max_jump == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(probe.steps == 2);
}

TEST_CASE("normalizing already orthogonal units is the identity move") {
  auto win = GroupHandle::integers().window(4);
  PartialCotranslation w = diag_powers(2, 0);
  NormalizedUnits nu = normalize_units(w, win);
  CHECK(nu.rank == 1);
  CHECK(nu.report.aggregate_pass());
  CHECK(op_norm(sub(nu.normalized(zi(0), zi(0)), Mat(2, {1, 0, 0, 0}))) < 1e-12);
  for (const auto& g : win) CHECK(op_norm(nu.t(g)) <= 2.0 * (1.0 + 1e-9));
}

TEST_CASE("normalizing an oblique constant projector straightens it") {
  auto grp = GroupHandle::integers();
  auto win = grp.window(4);
  // constant family equal to the oblique idempotent [[1,1],[0,0]]
  PartialCotranslation w = PartialCotranslation::from_evaluator(
      grp, 2, PartialCotranslation::Kind::Explicit,
      [](const GroupElement&, const GroupElement&) { return Mat(2, {1, 1, 0, 0}); });
  CHECK(law_check(w, win).aggregate_pass());
  NormalizedUnits nu = normalize_units(w, win);
  CHECK(nu.rank == 1);
  CHECK(nu.report.aggregate_pass());
  Mat block = nu.normalized(zi(0), zi(0));
  CHECK(op_norm(sub(block, Mat(2, {1, 0, 0, 0}))) < 1e-8);
  for (const auto& g : win) {
    CHECK(op_norm(nu.t(g)) <= 2.0 * (1.0 + 1e-9));
    CHECK(normalized_units_residual(w, nu.t, nu.rank, g) < 1e-8);
  }
}

TEST_CASE("completion rebuilds an invertible family around the partial one") {
  auto win = GroupHandle::integers().window(4);
  PartialCotranslation w = diag_powers(2, 0);
  CompletionResult out = complete(w, win, win);
  CHECK(out.rank == 1);
  CHECK(out.report.aggregate_pass());
  CHECK(op_norm(sub(out.full(zi(0), zi(3)), Mat(2, {8, 0, 0, 1}))) < 1e-9);
  CHECK(op_norm(sub(out.complement(zi(0), zi(3)), Mat(2, {0, 0, 0, 1}))) < 1e-9);
  // reconstruction: the completed family restricted to the old units is w
  for (const auto& g : win)
    for (const auto& h : win)
      CHECK(restriction_recovery_residual(as_partial(out.full), w, g, h) < 1e-9);
}

TEST_CASE("a full cotranslation viewed as partial keeps its values") {
  Cotranslation z = period2();
  PartialCotranslation w = as_partial(z);
  CHECK(w(zi(0), zi(2)) == z(zi(0), zi(2)));
  CHECK(value_rank(w, zi(0), zi(2)) == 2);
  CHECK(invertibility_residual(z, zi(0), zi(2)) < 1e-14);
}
