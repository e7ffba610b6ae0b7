// End-to-end acceptance gate.  Each criterion prints one [PASS]/[FAIL] line;
// the process exits with the number of failed criteria.  All tolerances are
// pinned here as constants next to the check that uses them.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cotran/cotranslation.hpp"
#include "cotran/evolution.hpp"
#include "cotran/group_checks.hpp"
#include "cotran/harness.hpp"
#include "cotran/partial.hpp"

using namespace cotran;

namespace {

int g_failures = 0;

void report(int number, bool ok, const std::string& text) {
  std::printf("[%s] %2d. %s\n", ok ? "PASS" : "FAIL", number, text.c_str());
  if (!ok) ++g_failures;
}

GroupElement zi(std::int64_t n) { return GroupElement::from_int(n); }

Mat random_mat(std::mt19937_64& rng, int d, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Mat m(d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) m(r, c) = u(rng);
  return m;
}

Mat random_invertible(std::mt19937_64& rng, int d, double cond_cap) {
  for (;;) {
    Mat m = random_mat(rng, d);
    if (cond_2(m) <= cond_cap) return m;
  }
}

// product of seeded plane rotations times a diagonal close to the identity:
// invertible with condition number below 1.3 in every dimension
Mat tame_invertible(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> angle(-3.14, 3.14);
  std::uniform_real_distribution<double> stretch(0.9, 1.1);
  Mat m(d);
  for (int i = 0; i < d; ++i) m(i, i) = stretch(rng);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double th = angle(rng);
      Mat g = identity(d);
      g(i, i) = std::cos(th);
      g(j, j) = std::cos(th);
      g(i, j) = std::sin(th);
      g(j, i) = -std::sin(th);
      m = mul(g, m);
    }
  return m;
}

Cotranslation seeded_difference_system(std::uint64_t seed, int d, int period, double cond_cap) {
  std::mt19937_64 rng(seed);
  std::vector<Mat> table;
  for (int i = 0; i < period; ++i) table.push_back(random_invertible(rng, d, cond_cap));
  return from_difference_seq(DifferenceSeq::periodic(std::move(table)));
}

Cotranslation tame_difference_system(std::uint64_t seed, int d, int period) {
  std::mt19937_64 rng(seed);
  std::vector<Mat> table;
  for (int i = 0; i < period; ++i) table.push_back(tame_invertible(rng, d));
  return from_difference_seq(DifferenceSeq::periodic(std::move(table)));
}

Mat closed_form_rotation(double theta) {
  return Mat(2, {std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta)});
}

// ---------------------------------------------------------------------------

void criterion_1() {
  // 100 seeded random difference systems, d in {2,3,4}, entries in [-1,1]
  // rejected above condition 1e3; cocycle + unit + inversion laws on the
  // radius-8 window with scale-normalized residual at most 1e-10.
  constexpr double kTol = 1e-10;
  double worst = 0.0;
  bool ok = true;
  for (int i = 0; i < 100; ++i) {
    const int d = 2 + i % 3;
    Cotranslation z = seeded_difference_system(1000 + static_cast<std::uint64_t>(i), d, 24, 1e3);
    auto win = z.group().window(8);
    VerificationReport coc = cocycle_check(z, win, win, kTol);
    VerificationReport inv = cot_inverse_law_check(z, win, kTol);
    for (const auto& e : coc.entries) worst = std::max(worst, e.max_residual);
    for (const auto& e : inv.entries) worst = std::max(worst, e.max_residual);
    ok = ok && coc.aggregate_pass() && inv.aggregate_pass();
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "100 seeded difference systems satisfy all laws on radius-8 windows "
                "(worst residual %.2e, tol 1e-10)",
                worst);
  report(1, ok, buf);
}

void criterion_2() {
  // 50 seeded autonomous families round trip bitwise through morphism
  // extraction, and base-point-dependent families are detected as such.
  bool ok = true;
  for (int i = 0; i < 50; ++i) {
    const int d = 2 + i % 3;
    std::mt19937_64 rng(2000 + static_cast<std::uint64_t>(i));
    const Mat m = random_invertible(rng, d, 20.0);
    const Mat minv = try_inverse(m);
    MorphismFn gamma = [m, minv, d](const GroupElement& h) {
      std::int64_t n = h.as_int();
      Mat acc = identity(d);
      const Mat& f = n >= 0 ? m : minv;
      for (std::int64_t k = 0; k < std::llabs(n); ++k) acc = mul(f, acc);
      return acc;
    };
    GroupHandle grp = GroupHandle::integers();
    auto win = grp.window(6);
    Cotranslation z = from_morphism(grp, d, gamma, win);
    ok = ok && is_autonomous(z, win);
    Cotranslation z2 = from_morphism(grp, d, extract_morphism(z), win);
    for (const auto& g : win)
      for (const auto& h : win) ok = ok && z2(g, h) == z(g, h);
  }
  // the other direction: genuinely base-point-dependent systems must fail
  for (int i = 0; i < 5; ++i) {
    Cotranslation z = seeded_difference_system(2500 + static_cast<std::uint64_t>(i), 2, 2, 50.0);
    auto win = z.group().window(6);
    LawEntry detail;
    if (is_autonomous(z, win, 1e-9, &detail) || detail.max_residual <= 1e-9) ok = false;
  }
  report(2, ok,
         "50 autonomous families round trip exactly through morphism extraction; "
         "non-constant systems are rejected by the autonomy test");
}

void criterion_3() {
  // hull round trip is exact on radius-6 windows; composition axiom <= 1e-10
  constexpr double kAxiomTol = 1e-10;
  bool ok = true;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    Cotranslation z = tame_difference_system(3000 + static_cast<std::uint64_t>(i), 3, 10);
    auto win = z.group().window(6);
    Hull h = to_hull(z);
    VerificationReport rep = hull_axiom_check(h, win, win, kAxiomTol);
    ok = ok && rep.aggregate_pass();
    for (const auto& e : rep.entries) worst = std::max(worst, e.max_residual);
    Cotranslation back = from_hull(h);
    for (const auto& g : win)
      for (const auto& hh : win) ok = ok && back(g, hh) == z(g, hh);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "hull round trip reproduces 20 seeded systems exactly on radius-6 windows "
                "(worst axiom residual %.2e, tol 1e-10)",
                worst);
  report(3, ok, buf);
}

void criterion_4() {
  // RK4 rotation propagator vs the closed form at 200 seeded index pairs
  constexpr double kFlowTol = 1e-6;
  constexpr double kCocycleTol = 1e-9;
  const double two_pi = 2.0 * std::acos(-1.0);
  EvolutionGrid grid = EvolutionGrid::integrate(CoeffFn::rotation(1.0), 0.0, two_pi, 1e-3);
  const std::int64_t n = grid.steps();
  std::mt19937_64 rng(4000);
  std::uniform_int_distribution<std::int64_t> pick(0, n);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const std::int64_t i = pick(rng), j = pick(rng);
    const double theta = grid.time_at(i) - grid.time_at(j);
    worst = std::max(worst, op_norm(sub(grid.psi(i, j), closed_form_rotation(theta))));
  }
  VerificationReport coc = check_psi_cocycle(grid, 200, 4001, kCocycleTol);
  const bool ok = worst <= kFlowTol && coc.aggregate_pass();
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "rotation propagator matches the closed form at 200 sampled pairs "
                "(worst %.2e, tol 1e-6) and composes to 1e-9",
                worst);
  report(4, ok, buf);
}

void criterion_5() {
  // central differences at h_fd = 1e-2 recover the coefficient to 5e-4 with a
  // half-step Richardson ratio in [3.5, 4.5]
  constexpr double kTol = 5e-4;
  bool ok = true;
  double worst = 0.0;
  auto run = [&](CoeffFn a, double t1) {
    EvolutionGrid grid = EvolutionGrid::integrate(std::move(a), 0.0, t1, 1e-3);
    Cotranslation z = cotranslation_of(grid);
    const std::int64_t n = grid.steps();
    LawEntry e = check_generator_recovery(grid, z, {n / 4, n / 2, 3 * n / 4}, 1e-2, kTol);
    worst = std::max(worst, e.max_residual);
    const double ratio = e.metrics.at("richardson_ratio");
    ok = ok && e.pass && ratio >= 3.5 && ratio <= 4.5;
  };
  run(CoeffFn::rotation(1.0), 6.4);
  run(CoeffFn::constant(Mat(2, {-0.5, 0, 0, 0.3})), 4.0);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "generator recovery within 5e-4 at h_fd=1e-2 for rotation and constant "
                "diagonal families (worst %.2e), Richardson ratio in [3.5, 4.5]",
                worst);
  report(5, ok, buf);
}

void criterion_6() {
  // all five derivative identities at second order on a periodic, genuinely
  // non-commuting coefficient family
  CoeffFn a = CoeffFn::custom(
      2, [](double t) { return Mat(2, {0.0, 1.0 + 0.5 * std::sin(t), -1.0, 0.0}); });
  EvolutionGrid grid = EvolutionGrid::integrate(a, 0.0, 6.4, 1e-3);
  Cotranslation z = cotranslation_of(grid);
  const std::vector<std::pair<std::int64_t, std::int64_t>> pts = {
      {700, 10}, {700, -10}, {2400, 30}, {4000, -20}, {5500, 15}};
  VerificationReport rep = check_derivative_identities(z, pts, 1e-2);
  bool ok = rep.entries.size() == 5 && rep.aggregate_pass();
  // Two of the identities are algebraic consequences of the grid composition
  // rule, so their residuals sit at rounding for any h_fd; the ratio test is
  // meaningful only where a genuine h_fd^2 term exists.  Require a clean
  // second-order ratio on every informative suite, and at least three of
  // them, so the criterion cannot pass vacuously.
  constexpr double kFloor = 1e-9;
  int informative = 0;
  double worst_ratio_gap = 0.0;
  for (const auto& e : rep.entries) {
    if (e.max_residual <= kFloor) continue;
    ++informative;
    const double ratio = e.metrics.at("richardson_ratio");
    ok = ok && ratio >= 3.5 && ratio <= 4.5;
    worst_ratio_gap = std::max(worst_ratio_gap, std::abs(ratio - 4.0));
  }
  ok = ok && informative >= 3;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "all five derivative identity suites pass on the periodic family; %d have "
                "residuals above rounding and their Richardson ratios lie within %.2f of "
                "4.0, the rest are exact",
                informative, worst_ratio_gap);
  report(6, ok, buf);
}

void criterion_7() {
  // the rank-1 singular family satisfies every law exactly, and the
  // even/odd projector is invariant for it although its rank alternates
  PartialCotranslation w = PartialCotranslation::from_evaluator(
      GroupHandle::integers(), 2, PartialCotranslation::Kind::Explicit,
      [](const GroupElement&, const GroupElement& h) {
        return Mat(2, {0, 0, 0, std::pow(2.0, static_cast<double>(h.as_int()))});
      });
  auto win = w.group().window(6);
  VerificationReport law = law_check(w, win);
  bool ok = law.aggregate_pass();
  for (const auto& e : law.entries) ok = ok && e.max_residual == 0.0;
  ProjectorMap p(w.group(), 2, [](const GroupElement& g) {
    return g.as_int() % 2 == 0 ? Mat(2, {0, 0, 0, 1}) : identity(2);
  });
  VerificationReport inv = check_invariant_projector(w, p, win, win);
  ok = ok && inv.aggregate_pass() && inv.entries.front().max_residual == 0.0;
  ok = ok && rank_eps(p(zi(0))) == 1 && rank_eps(p(zi(1))) == 2 && rank_eps(p(zi(2))) == 1;
  report(7, ok,
         "singular diag(0, 2^n) family passes all laws with residual exactly 0; the "
         "even/odd projector is invariant yet alternates between rank 1 and rank 2");
}

struct SeededPartial {
  PartialCotranslation w;
  int d = 0;
  int r = 0;
};

SeededPartial seeded_partial(int i, const std::vector<GroupElement>& win) {
  const int d = 2 + i % 4;
  const int r = 1 + i % (d - 1 > 0 ? d - 1 : 1);
  std::mt19937_64 rng(8000 + static_cast<std::uint64_t>(i));
  std::vector<Mat> table;
  for (int k = 0; k < 10; ++k) table.push_back(tame_invertible(rng, d));
  Cotranslation z = from_difference_seq(DifferenceSeq::periodic(std::move(table)));
  // oblique constant idempotent of rank r, conjugated along the family so it
  // becomes an invariant projector
  Mat s(d);
  do {
    Mat noise = random_mat(rng, d, -0.3, 0.3);
    s = add(identity(d), noise);
  } while (cond_2(s) > 5.0);
  Mat block(d);
  for (int k = 0; k < r; ++k) block(k, k) = 1.0;
  const Mat p0 = mul(s, mul(block, try_inverse(s)));
  ProjectorMap p(z.group(), d, [z, p0](const GroupElement& g) {
    const GroupHandle& grp = z.group();
    return mul(z(grp.identity(), g), mul(p0, z(g, grp.inverse(g))));
  });
  return {restrict_cotranslation(z, p, win, win), d, r};
}

void criterion_8() {
  // 100 seeded rank-deficient families complete to invertible ones: the
  // complement is orthogonal, the sum obeys the law, has full rank, and
  // restricting back recovers the input -- all within 1e-9
  constexpr double kTol = 1e-9;
  bool ok = true;
  double worst = 0.0;
  auto win = GroupHandle::integers().window(4);
  for (int i = 0; i < 100; ++i) {
    SeededPartial sp = seeded_partial(i, win);
    CompletionResult out = complete(sp.w, win, win, kTol);
    ok = ok && out.report.aggregate_pass() && out.rank == sp.r;
    for (const auto& e : out.report.entries)
      if (e.law != "completion_rank") worst = std::max(worst, e.max_residual);
    // full rank spot check straight from the singular values
    for (const auto& g : win)
      ok = ok && rank_eps(out.full(g, win[i % win.size()])) == sp.d;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "100 seeded partial families complete to full rank with orthogonality, "
                "law, and reconstruction residuals at most %.2e (tol 1e-9)",
                worst);
  report(8, ok, buf);
}

void criterion_9() {
  // the same 100 families normalize to the constant unit block within 1e-8,
  // with ||T|| <= d and ||T^-1|| <= d*M, M measured on the window
  constexpr double kBlockTol = 1e-8;
  constexpr double kSlack = 1.0 + 1e-9;
  bool ok = true;
  double worst_norm_margin = 0.0;
  auto win = GroupHandle::integers().window(4);
  for (int i = 0; i < 100; ++i) {
    SeededPartial sp = seeded_partial(i, win);
    NormalizedUnits nu = normalize_units(sp.w, win, kBlockTol);
    ok = ok && nu.report.aggregate_pass() && nu.rank == sp.r;
    // measure M = sup max(||P||, ||Id - P||) ourselves
    ProjectorMap p = units_projector(sp.w);
    double m = 1.0;
    for (const auto& g : win)
      m = std::max({m, op_norm(p(g)), op_norm(sub(identity(sp.d), p(g)))});
    const double d = sp.d;
    for (const auto& g : win) {
      const double tn = op_norm(nu.t(g));
      const double tin = op_norm(nu.t.inv(g));
      ok = ok && tn <= d * kSlack && tin <= d * m * kSlack;
      worst_norm_margin = std::max(worst_norm_margin, std::max(tn / d, tin / (d * m)));
      ok = ok && normalized_units_residual(sp.w, nu.t, nu.rank, g) <= kBlockTol;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "100 normalizations reach the constant unit block within 1e-8; frame "
                "bounds ||T|| <= d and ||T^-1|| <= d*M hold (worst fill %.3f of the bound)",
                worst_norm_margin);
  report(9, ok, buf);
}

void criterion_10() {
  // relation preservation over the lattice, and the two constructions of a
  // one-generator system agree bitwise
  GroupHandle zz = GroupHandle::integer_lattice(2);
  auto latwin = zz.window(3);
  std::vector<GeneratorMap> commuting = {
      [](const GroupElement&) { return Mat(2, {2, 0, 0, 1}); },
      [](const GroupElement&) { return Mat(2, {1, 0, 0, 3}); },
  };
  VerificationReport good = check_preserves_relations(zz, commuting, 2, latwin, 1e-9);
  bool ok = good.aggregate_pass() && good.entries.front().max_residual == 0.0;

  std::vector<GeneratorMap> clashing = {
      [](const GroupElement&) { return Mat(2, {2, 0, 0, 1}); },
      [](const GroupElement&) { return Mat(2, {1, 2, 0, 1}); },
  };
  VerificationReport bad = check_preserves_relations(zz, clashing, 2, latwin, 1e-9);
  ok = ok && !bad.aggregate_pass() && bad.entries.front().max_residual > 0.5;

  GroupHandle ints = GroupHandle::integers();
  auto win = ints.window(6);
  for (int i = 0; i < 5; ++i) {
    std::mt19937_64 rng(10000 + static_cast<std::uint64_t>(i));
    const Mat a = random_invertible(rng, 3, 100.0);
    Cotranslation via_maps =
        from_generator_maps(ints, 3, {[a](const GroupElement&) { return a; }}, win);
    Cotranslation via_seq = from_difference_seq(DifferenceSeq::constant(a));
    for (const auto& g : win)
      for (const auto& h : win) ok = ok && via_maps(g, h) == via_seq(g, h);
  }
  report(10, ok,
         "commuting lattice images pass with residual 0, the clashing fixture fails above "
         "0.5, and both one-generator constructions agree bitwise on radius-6 windows");
}

void criterion_11() {
  // every example spec: two executions give byte-identical reports modulo the
  // wall clock, and replay confirms each stored entry
  namespace fs = std::filesystem;
  using harness::Json;
  bool ok = true;
  int reports = 0, schema_rejects = 0, divergers = 0;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(std::string(COTRAN_SOURCE_DIR) + "/specs"))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    try {
      harness::ProblemSpec spec = harness::load_spec(path.string(), {});
      harness::RunResult a = harness::execute(spec);
      harness::RunResult b = harness::execute(spec);
      Json ja = harness::report_to_json(a, spec);
      Json jb = harness::report_to_json(b, spec);
      ja.erase("wall_time_sec");
      jb.erase("wall_time_sec");
      if (ja.dump() != jb.dump()) {
        ok = false;
        std::printf("      determinism broke on %s\n", name.c_str());
      }
      std::string why;
      if (!harness::replay(harness::report_to_json(a, spec), spec, &why)) {
        ok = false;
        std::printf("      replay failed on %s: %s\n", name.c_str(), why.c_str());
      }
      ++reports;
    } catch (const SpecError&) {
      ok = ok && name.rfind("error_", 0) == 0;
      ++schema_rejects;
    } catch (const DivergenceError&) {
      ok = ok && name.find("divergent") != std::string::npos;
      ++divergers;
    }
  }
  ok = ok && reports >= 18 && schema_rejects == 3 && divergers == 1;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%d example specs produce byte-identical reports modulo wall time and all "
                "replay cleanly (%d schema rejects, %d divergent by design)",
                reports, schema_rejects, divergers);
  report(11, ok, buf);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  if (g_failures == 0)
    std::printf("all acceptance criteria hold\n");
  else
    std::printf("%d acceptance criteria failed\n", g_failures);
  return g_failures;
}
