#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cotran/cotranslation.hpp"
#include "cotran/group.hpp"
#include "cotran/matrix.hpp"
#include "cotran/report.hpp"

namespace cotran {

// Time-dependent coefficient t |-> A(t) of the linear equation x' = A(t) x.
class CoeffFn {
 public:
  enum class Kind { Constant, PeriodicTable, Rotation, DiagonalPoly, ShiftedByScalar, Custom };

  static CoeffFn constant(Mat a);
  // Samples at t = 0, step, 2*step, ... repeated periodically; linear
  // interpolation between samples, or nearest-sample lookup when `nearest`
  // (which makes A discontinuous -- useful as a negative control).
  static CoeffFn periodic_table(double step, std::vector<Mat> mats, bool nearest = false);
  // A = [[0, omega], [-omega, 0]], the circular rotation family.
  static CoeffFn rotation(double omega);
  // Diagonal matrix whose i-th entry is the polynomial sum_k coeffs[i][k] t^k.
  static CoeffFn diagonal_poly(std::vector<std::vector<double>> coeffs);
  // A(t) - lambda * Id, the scalar-shifted equation.
  static CoeffFn shifted(const CoeffFn& base, double lambda);
  static CoeffFn custom(int dim, std::function<Mat(double)> fn);

  Mat operator()(double t) const;
  int dim() const { return dim_; }
  Kind kind() const { return kind_; }

 private:
  CoeffFn(Kind kind, int dim, std::function<Mat(double)> fn);
  Kind kind_ = Kind::Custom;
  int dim_ = 0;
  std::function<Mat(double)> fn_;
};

// Fixed-step propagators for x' = A(t) x on the uniform grid t_i = t0 + i*h.
// U_i approximates the flow over [t_i, t_{i+1}] (one classical RK4 step on the
// matrix equation); Psi(t_i, t_j) is assembled from the stored factors, with
// backward propagators taken as inverses of forward products.
class EvolutionGrid {
 public:
  EvolutionGrid() = default;
  static EvolutionGrid integrate(CoeffFn a, double t0, double t1, double h);
  static EvolutionGrid from_steps(double t0, double h, std::vector<Mat> steps);

  int dim() const;
  double t0() const;
  double t1() const;
  double h() const;
  std::int64_t steps() const;  // number of intervals N; grid has N+1 points
  double time_at(std::int64_t i) const;

  const Mat& step_matrix(std::int64_t i) const;   // U_i, 0 <= i < N
  Mat psi(std::int64_t i, std::int64_t j) const;  // Psi(t_i, t_j), 0 <= i,j <= N

  bool has_coeff() const;
  const CoeffFn& coeff() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// Z(r, t) = Psi(t + r, r) over the grid group; arguments outside the grid
// raise RangeError.
Cotranslation cotranslation_of(const EvolutionGrid& grid);

// Inverse direction: read the per-step factors U_i = Z(t_i, h) back off a
// cotranslation living on a grid group.  Round trip with cotranslation_of
// reproduces the factors exactly.
EvolutionGrid evolution_of(const Cotranslation& z);

// Central difference (Z(i, m) - Z(i, -m)) / (2 m h) recovering A(t_i); h_fd
// must be a positive multiple of the grid step.
Mat infinitesimal_generator(const Cotranslation& z, std::int64_t i, double h_fd);

// One entry: worst recovery error against the integrated coefficient over the
// sample indices, with a half-step Richardson pair recorded in the metrics.
LawEntry check_generator_recovery(const EvolutionGrid& grid, const Cotranslation& z,
                                  const std::vector<std::int64_t>& points, double h_fd,
                                  double tol);

// Five finite-difference identities tying the partial derivatives of Z, of
// its involution, and of Psi to the generator.  Each entry passes when the
// residual sits at the noise floor or shrinks by ~4x when h_fd is halved.
VerificationReport check_derivative_identities(
    const Cotranslation& z, const std::vector<std::pair<std::int64_t, std::int64_t>>& points,
    double h_fd);

// Joint difference quotients along a few (a, b) rays compared against the
// linearization from the two partial derivatives.  Informational: the entry
// never fails, large deviations are noted.
VerificationReport two_variable_differentiability_probe(
    const Cotranslation& z, const std::vector<std::pair<std::int64_t, std::int64_t>>& points,
    double h_fd, double tol = 1e-5);

// Composition of the stored propagators over seeded index triples.
VerificationReport check_psi_cocycle(const EvolutionGrid& grid, std::size_t triples,
                                     std::uint64_t seed, double tol = 1e-9);

// Compares each U_i against two half steps; large residuals mean the step is
// too coarse for the coefficient.  Needs the coefficient function.
VerificationReport check_step_consistency(const EvolutionGrid& grid, double tol = 1e-7,
                                          std::size_t max_samples = 512);

// Pointwise residuals behind the checks above, shared with report replay.
double generator_recovery_residual(const EvolutionGrid& grid, const Cotranslation& z,
                                   std::int64_t i, double h_fd);
double derivative_identity_residual(const Cotranslation& z, const std::string& law,
                                    std::int64_t i, std::int64_t j, double h_fd);
double two_variable_probe_residual(const Cotranslation& z, std::int64_t i, std::int64_t j,
                                   double h_fd);
double psi_cocycle_residual(const EvolutionGrid& grid, std::int64_t u, std::int64_t v,
                            std::int64_t w);
double step_consistency_residual(const EvolutionGrid& grid, std::int64_t i);

// Interior sample indices and small displacement window for law checks on the
// grid, keeping every composition the checks form inside the index range.
struct GridWindows {
  std::vector<GroupElement> bases;
  std::vector<GroupElement> disps;
  std::vector<std::int64_t> base_indices;
};
GridWindows grid_windows(const EvolutionGrid& grid, std::int64_t radius,
                         std::size_t max_bases = 12);

}  // namespace cotran
