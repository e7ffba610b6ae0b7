#include <cmath>

#include "cotran/evolution.hpp"
#include "doctest.h"

using namespace cotran;

namespace {

// closed-form propagator of x' = [[0, w], [-w, 0]] x over time theta/w
Mat rot(double theta) {
  return Mat(2, {std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta)});
}

GroupElement zi(std::int64_t n) { return GroupElement::from_int(n); }

}  // namespace

TEST_CASE("rotation propagator matches the closed form") {
  EvolutionGrid grid = EvolutionGrid::integrate(CoeffFn::rotation(1.0), 0.0, 6.4, 1e-3);
  const std::int64_t n = grid.steps();
  CHECK(grid.dim() == 2);
  CHECK(grid.psi(0, 0) == identity(2));
  for (auto [i, j] : {std::pair<std::int64_t, std::int64_t>{n, 0},
                      {n / 2, n / 4},
                      {100, 3000},
                      {0, n}}) {
    const double theta = grid.time_at(i) - grid.time_at(j);
    CHECK(op_norm(sub(grid.psi(i, j), rot(theta))) < 1e-6);
  }
  CHECK(check_psi_cocycle(grid, 200, 5).aggregate_pass());
  CHECK(check_step_consistency(grid).aggregate_pass());
}

TEST_CASE("constant diagonal coefficients give exponentials") {
  EvolutionGrid grid =
      EvolutionGrid::integrate(CoeffFn::constant(Mat(2, {-0.5, 0, 0, 0.3})), 0.0, 2.0, 1e-3);
  const std::int64_t n = grid.steps();
  Mat expect(2, {std::exp(-0.5 * 2.0), 0, 0, std::exp(0.3 * 2.0)});
  CHECK(op_norm(sub(grid.psi(n, 0), expect)) < 1e-8);
}

TEST_CASE("zero coefficient freezes the flow") {
  EvolutionGrid grid = EvolutionGrid::integrate(CoeffFn::constant(zero(2)), 0.0, 1.0, 0.01);
  CHECK(grid.step_matrix(0) == identity(2));
  CHECK(grid.psi(grid.steps(), 0) == identity(2));
}

TEST_CASE("scalar shift multiplies the propagator by a decaying exponential") {
  const double lambda = 0.7;
  EvolutionGrid base = EvolutionGrid::integrate(CoeffFn::rotation(1.0), 0.0, 3.0, 1e-3);
  EvolutionGrid shifted = EvolutionGrid::integrate(
      CoeffFn::shifted(CoeffFn::rotation(1.0), lambda), 0.0, 3.0, 1e-3);
  const std::int64_t n = base.steps();
  Mat expect = scale(std::exp(-lambda * 3.0), base.psi(n, 0));
  CHECK(op_norm(sub(shifted.psi(n, 0), expect)) < 1e-7);
}

TEST_CASE("diagonal polynomial coefficient integrates to a gaussian factor") {
  EvolutionGrid grid =
      EvolutionGrid::integrate(CoeffFn::diagonal_poly({{0.0, 1.0}}), 0.0, 1.0, 1e-3);
  const Mat last = grid.psi(grid.steps(), 0);
  CHECK(last.dim() == 1);
  CHECK(last(0, 0) == doctest::Approx(std::exp(0.5)).epsilon(1e-9));
}

TEST_CASE("sampled tables evaluate with the requested interpolation") {
  std::vector<Mat> mats;
  for (int i = 0; i < 10; ++i) mats.push_back(Mat(1, {static_cast<double>(i)}));
  CoeffFn lin = CoeffFn::periodic_table(0.1, mats);
  CHECK(lin(0.25)(0, 0) == doctest::Approx(2.5).epsilon(1e-12));
  // periodic wraparound: the segment after the last sample heads back to 0
  CHECK(lin(1.05)(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CoeffFn near = CoeffFn::periodic_table(0.1, mats, true);
  CHECK(near(0.24)(0, 0) == 2.0);
  CHECK(near(0.26)(0, 0) == 3.0);
}

TEST_CASE("coarse steps are flagged by the consistency check") {
  EvolutionGrid grid = EvolutionGrid::integrate(CoeffFn::rotation(1.0), 0.0, 20.0, 2.0);
  CHECK(step_consistency_residual(grid, 0) > 1e-3);
  CHECK_FALSE(check_step_consistency(grid).aggregate_pass());
}

TEST_CASE("grid cotranslation round trips through the factor view") {
  EvolutionGrid grid = EvolutionGrid::integrate(CoeffFn::rotation(0.8), 0.0, 2.0, 0.01);
  Cotranslation z = cotranslation_of(grid);
  CHECK(z(zi(0), zi(5)) == grid.psi(5, 0));
  CHECK(z(zi(3), zi(-2)) == grid.psi(1, 3));
  CHECK_THROWS_AS(z(zi(0), zi(grid.steps() + 1)), RangeError);
  EvolutionGrid back = evolution_of(z);
  CHECK(back.steps() == grid.steps());
  for (std::int64_t i : {std::int64_t(0), grid.steps() / 2, grid.steps() - 1})
    CHECK(back.step_matrix(i) == grid.step_matrix(i));
}

TEST_CASE("the generator is recovered from central differences") {
  EvolutionGrid grid = EvolutionGrid::integrate(CoeffFn::rotation(1.0), 0.0, 6.4, 1e-3);
  Cotranslation z = cotranslation_of(grid);
  const std::int64_t mid = grid.steps() / 2;
  Mat a = infinitesimal_generator(z, mid, 1e-2);
  CHECK(op_norm(sub(a, grid.coeff()(grid.time_at(mid)))) < 1e-4);
  LawEntry entry = check_generator_recovery(grid, z, {mid - 40, mid, mid + 40}, 1e-2, 5e-4);
  CHECK(entry.pass);
  CHECK(entry.metrics.count("richardson_ratio") == 1);
}

TEST_CASE("derivative identities hold on a commuting family at the noise floor") {
  EvolutionGrid grid = EvolutionGrid::integrate(CoeffFn::rotation(1.0), 0.0, 6.4, 1e-3);
  Cotranslation z = cotranslation_of(grid);
  const std::int64_t mid = grid.steps() / 2;
  std::vector<std::pair<std::int64_t, std::int64_t>> pts = {{mid, 10}, {mid, -10}, {mid + 30, 20}};
  VerificationReport rep = check_derivative_identities(z, pts, 1e-2);
  CHECK(rep.aggregate_pass());
  CHECK(rep.entries.size() == 5);
  VerificationReport probe = two_variable_differentiability_probe(z, pts, 1e-2);
  CHECK(probe.aggregate_pass());
}

TEST_CASE("derivative identities converge at second order off the commuting case") {
  CoeffFn a = CoeffFn::custom(2, [](double t) {
    return Mat(2, {0.0, 1.0 + 0.5 * std::sin(t), -1.0, 0.0});
  });
  EvolutionGrid grid = EvolutionGrid::integrate(a, 0.0, 6.4, 1e-3);
  Cotranslation z = cotranslation_of(grid);
  const std::int64_t mid = grid.steps() / 2;
  std::vector<std::pair<std::int64_t, std::int64_t>> pts = {{mid, 10}, {mid - 50, -20}};
  VerificationReport rep = check_derivative_identities(z, pts, 1e-2);
  CHECK(rep.aggregate_pass());
  for (const auto& e : rep.entries) {
    INFO(e.law << " residual " << e.max_residual << " note " << e.note);
    CHECK(e.pass);
  }
}

TEST_CASE("runaway growth raises the divergence error") {
  // each step factor stays finite; the assembled product overflows
  EvolutionGrid grid =
      EvolutionGrid::integrate(CoeffFn::diagonal_poly({{0.0, 2.0}}), 0.0, 30.0, 0.01);
  CHECK_THROWS_AS(grid.psi(grid.steps(), 0), DivergenceError);
}

TEST_CASE("window construction rejects grids that are too short") {
  EvolutionGrid grid = EvolutionGrid::integrate(CoeffFn::rotation(1.0), 0.0, 0.1, 0.01);
  CHECK_THROWS_AS(grid_windows(grid, 4), SpecError);
  EvolutionGrid longer = EvolutionGrid::integrate(CoeffFn::rotation(1.0), 0.0, 2.0, 0.01);
  GridWindows gw = grid_windows(longer, 4);
  CHECK(!gw.bases.empty());
  CHECK(gw.disps.size() == 9);
}
