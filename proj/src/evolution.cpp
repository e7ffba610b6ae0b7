#include "cotran/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>

namespace cotran {

namespace {

void rethrow_divergence(const SpecError& e, const char* what, long long step) {
  if (std::string(e.what()).find("non-finite") != std::string::npos)
    throw DivergenceError(what, step);
}

Mat rk4_step(const CoeffFn& a, double t, double h, const Mat& id) {
  const Mat k1 = a(t);
  const Mat k2 = mul(a(t + 0.5 * h), add(id, scale(k1, 0.5 * h)));
  const Mat k3 = mul(a(t + 0.5 * h), add(id, scale(k2, 0.5 * h)));
  const Mat k4 = mul(a(t + h), add(id, scale(k3, h)));
  return add(id, scale(add(add(k1, k4), scale(add(k2, k3), 2.0)), h / 6.0));
}

}  // namespace

CoeffFn::CoeffFn(Kind kind, int dim, std::function<Mat(double)> fn)
    : kind_(kind), dim_(dim), fn_(std::move(fn)) {
  if (dim_ < 1) throw SpecError("coefficient needs dim >= 1");
}

Mat CoeffFn::operator()(double t) const {
  Mat v = fn_(t);
  if (v.dim() != dim_) throw SpecError("coefficient returned wrong dimension");
  return v;
}

CoeffFn CoeffFn::constant(Mat a) {
  const int d = a.dim();
  return CoeffFn(Kind::Constant, d, [a](double) { return a; });
}

CoeffFn CoeffFn::periodic_table(double step, std::vector<Mat> mats, bool nearest) {
  if (step <= 0.0) throw SpecError("periodic_table: step must be positive");
  if (mats.empty()) throw SpecError("periodic_table: no samples");
  const int d = mats.front().dim();
  for (const auto& m : mats)
    if (m.dim() != d) throw SpecError("periodic_table: mixed dimensions");
  const double period = step * static_cast<double>(mats.size());
  return CoeffFn(Kind::PeriodicTable, d, [step, mats, nearest, period](double t) {
    double s = std::fmod(t, period);
    if (s < 0.0) s += period;
    if (s >= period) s = 0.0;
    const double x = s / step;
    std::size_t i = static_cast<std::size_t>(x);
    if (i >= mats.size()) i = mats.size() - 1;
    const double frac = x - static_cast<double>(i);
    const std::size_t j = (i + 1) % mats.size();
    if (nearest) return frac < 0.5 ? mats[i] : mats[j];
    return add(scale(mats[i], 1.0 - frac), scale(mats[j], frac));
  });
}

CoeffFn CoeffFn::rotation(double omega) {
  Mat a = zero(2);
  a(0, 1) = omega;
  a(1, 0) = -omega;
  a.validate();
  return CoeffFn(Kind::Rotation, 2, [a](double) { return a; });
}

CoeffFn CoeffFn::diagonal_poly(std::vector<std::vector<double>> coeffs) {
  const int d = static_cast<int>(coeffs.size());
  if (d < 1) throw SpecError("diagonal_poly: no entries");
  return CoeffFn(Kind::DiagonalPoly, d, [coeffs, d](double t) {
    Mat m = zero(d);
    for (int i = 0; i < d; ++i) {
      double v = 0.0;
      const auto& c = coeffs[static_cast<std::size_t>(i)];
      for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
      m(i, i) = v;
    }
    m.validate();
    return m;
  });
}

CoeffFn CoeffFn::shifted(const CoeffFn& base, double lambda) {
  const int d = base.dim();
  const Mat shift = scale(identity(d), lambda);
  return CoeffFn(Kind::ShiftedByScalar, d,
                 [base, shift](double t) { return sub(base(t), shift); });
}

CoeffFn CoeffFn::custom(int dim, std::function<Mat(double)> fn) {
  return CoeffFn(Kind::Custom, dim, std::move(fn));
}

struct EvolutionGrid::Impl {
  std::optional<CoeffFn> coeff;
  double t0 = 0.0;
  double t1 = 0.0;
  double h = 0.0;
  std::int64_t n = 0;
  int dim = 0;
  std::vector<Mat> steps;
  mutable std::map<std::pair<std::int64_t, std::int64_t>, Mat> psi_cache;
  mutable std::mutex mu;
};

EvolutionGrid EvolutionGrid::integrate(CoeffFn a, double t0, double t1, double h) {
  if (h <= 0.0) throw SpecError("integrate: step must be positive");
  if (!(t1 > t0)) throw SpecError("integrate: need t1 > t0");
  const double raw = (t1 - t0) / h;
  if (raw > 1e6 + 0.5) throw SpecError("integrate: more than 1e6 steps");
  const std::int64_t n = std::llround(raw);
  if (n < 1) throw SpecError("integrate: interval shorter than one step");

  EvolutionGrid grid;
  grid.impl_ = std::make_shared<Impl>();
  Impl& im = *grid.impl_;
  im.coeff = std::move(a);
  im.t0 = t0;
  im.h = h;
  im.n = n;
  im.dim = im.coeff->dim();
  im.t1 = t0 + static_cast<double>(n) * h;  // snap the endpoint to the grid
  im.steps.reserve(static_cast<std::size_t>(n));
  const Mat id = identity(im.dim);
  for (std::int64_t i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    try {
      im.steps.push_back(rk4_step(*im.coeff, t, h, id));
    } catch (const SpecError& e) {
      rethrow_divergence(e, "integration produced non-finite entries", i);
      throw;
    }
  }
  return grid;
}

EvolutionGrid EvolutionGrid::from_steps(double t0, double h, std::vector<Mat> steps) {
  if (h <= 0.0) throw SpecError("from_steps: step must be positive");
  if (steps.empty()) throw SpecError("from_steps: no propagators");
  const int d = steps.front().dim();
  for (const auto& m : steps)
    if (m.dim() != d) throw SpecError("from_steps: mixed dimensions");
  EvolutionGrid grid;
  grid.impl_ = std::make_shared<Impl>();
  Impl& im = *grid.impl_;
  im.t0 = t0;
  im.h = h;
  im.n = static_cast<std::int64_t>(steps.size());
  im.t1 = t0 + static_cast<double>(im.n) * h;
  im.dim = d;
  im.steps = std::move(steps);
  return grid;
}

int EvolutionGrid::dim() const { return impl_->dim; }
double EvolutionGrid::t0() const { return impl_->t0; }
double EvolutionGrid::t1() const { return impl_->t1; }
double EvolutionGrid::h() const { return impl_->h; }
std::int64_t EvolutionGrid::steps() const { return impl_->n; }
double EvolutionGrid::time_at(std::int64_t i) const {
  return impl_->t0 + static_cast<double>(i) * impl_->h;
}

const Mat& EvolutionGrid::step_matrix(std::int64_t i) const {
  if (i < 0 || i >= impl_->n) throw RangeError("step_matrix: index outside the grid");
  return impl_->steps[static_cast<std::size_t>(i)];
}

Mat EvolutionGrid::psi(std::int64_t i, std::int64_t j) const {
  if (i < 0 || i > impl_->n || j < 0 || j > impl_->n)
    throw RangeError("psi: index outside the grid");
  if (i == j) return identity(impl_->dim);
  const auto key = std::make_pair(i, j);
  {
    std::lock_guard<std::mutex> lock(impl_->mu);
    const auto it = impl_->psi_cache.find(key);
    if (it != impl_->psi_cache.end()) return it->second;
  }
  Mat value = identity(impl_->dim);
  if (i > j) {
    for (std::int64_t k = j; k < i; ++k) {
      try {
        value = mul(impl_->steps[static_cast<std::size_t>(k)], value);
      } catch (const SpecError& e) {
        rethrow_divergence(e, "propagator product overflowed", k);
        throw;
      }
    }
  } else {
    value = try_inverse(psi(j, i));
  }
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->psi_cache.emplace(key, std::move(value)).first->second;
}

bool EvolutionGrid::has_coeff() const { return impl_->coeff.has_value(); }
const CoeffFn& EvolutionGrid::coeff() const {
  if (!impl_->coeff) throw SpecError("grid has no coefficient function");
  return *impl_->coeff;
}

Cotranslation cotranslation_of(const EvolutionGrid& grid) {
  const std::int64_t n = grid.steps();
  GroupHandle grp = GroupHandle::real_grid(grid.h(), grid.t0(), 0, n);
  return Cotranslation::from_evaluator(
      grp, grid.dim(), Cotranslation::Kind::FromEvolution,
      [grid, n](const GroupElement& g, const GroupElement& h) {
        const std::int64_t i = g.as_int();
        const std::int64_t j = h.as_int();
        if (i < 0 || i > n || i + j < 0 || i + j > n)
          throw RangeError("cotranslation argument outside the grid");
        return grid.psi(i + j, i);
      });
}

EvolutionGrid evolution_of(const Cotranslation& z) {
  const GroupHandle& grp = z.group();
  if (grp.kind() != GroupKind::GridR)
    throw SpecError("evolution_of: the cotranslation must live on a grid group");
  const std::int64_t imin = grp.grid_index_min();
  const std::int64_t imax = grp.grid_index_max();
  if (imax - imin < 1) throw SpecError("evolution_of: grid has no interval");
  const double h = grp.grid_step();
  const double t0 = grp.grid_origin() + static_cast<double>(imin) * h;
  const GroupElement one = GroupElement::from_int(1);
  std::vector<Mat> steps;
  steps.reserve(static_cast<std::size_t>(imax - imin));
  for (std::int64_t i = imin; i < imax; ++i)
    steps.push_back(z(GroupElement::from_int(i), one));
  return EvolutionGrid::from_steps(t0, h, std::move(steps));
}

namespace {

// Finite-difference step count for h_fd on the grid of step h.
std::int64_t fd_steps(double h, double h_fd, bool need_even) {
  const std::int64_t m = std::llround(h_fd / h);
  if (m < 1 || std::abs(static_cast<double>(m) * h - h_fd) > 1e-9 * std::max(1.0, h_fd))
    throw SpecError("h_fd must be a positive multiple of the grid step");
  if (need_even && m % 2 != 0)
    throw SpecError("h_fd must be an even multiple of the grid step (for the half-step pair)");
  return m;
}

double grid_step_of(const Cotranslation& z) {
  if (z.group().kind() != GroupKind::GridR)
    throw SpecError("this check needs a cotranslation on a grid group");
  return z.group().grid_step();
}

}  // namespace

Mat infinitesimal_generator(const Cotranslation& z, std::int64_t i, double h_fd) {
  const double h = grid_step_of(z);
  const std::int64_t m = fd_steps(h, h_fd, false);
  const GroupElement gi = GroupElement::from_int(i);
  const Mat zp = z(gi, GroupElement::from_int(m));
  const Mat zm = z(gi, GroupElement::from_int(-m));
  return scale(sub(zp, zm), 1.0 / (2.0 * static_cast<double>(m) * h));
}

double generator_recovery_residual(const EvolutionGrid& grid, const Cotranslation& z,
                                   std::int64_t i, double h_fd) {
  if (!grid.has_coeff()) throw SpecError("generator recovery needs the coefficient function");
  return op_norm(sub(infinitesimal_generator(z, i, h_fd), grid.coeff()(grid.time_at(i))));
}

LawEntry check_generator_recovery(const EvolutionGrid& grid, const Cotranslation& z,
                                  const std::vector<std::int64_t>& points, double h_fd,
                                  double tol) {
  if (!grid.has_coeff()) throw SpecError("generator recovery needs the coefficient function");
  if (points.empty()) throw SpecError("generator recovery needs sample points");
  fd_steps(grid.h(), h_fd, true);

  LawEntry entry;
  entry.law = "generator_recovery";
  entry.tol = tol;
  std::int64_t worst = points.front();
  for (const std::int64_t i : points) {
    const double r = generator_recovery_residual(grid, z, i, h_fd);
    ++entry.samples;
    if (entry.samples == 1 || r > entry.max_residual) {
      entry.max_residual = r;
      worst = i;
    }
  }
  entry.argmax = {GroupElement::from_int(worst)};
  const double r_half = generator_recovery_residual(grid, z, worst, 0.5 * h_fd);
  const double ratio = entry.max_residual / std::max(r_half, 1e-300);
  entry.metrics["residual_half"] = r_half;
  entry.metrics["richardson_ratio"] = ratio;
  const bool at_floor = entry.max_residual <= 1e-9;
  entry.pass = entry.max_residual <= tol && (at_floor || (ratio >= 3.5 && ratio <= 4.5));
  if (at_floor) entry.note = "residual at noise floor; convergence ratio not informative";
  return entry;
}

namespace {

struct FdContext {
  const Cotranslation& z;
  double h;

  Mat val(std::int64_t i, std::int64_t j) const {
    return z(GroupElement::from_int(i), GroupElement::from_int(j));
  }
  Mat val_inv(std::int64_t i, std::int64_t j) const {
    return z.inv(GroupElement::from_int(i), GroupElement::from_int(j));
  }
  double quot(std::int64_t m) const { return 1.0 / (2.0 * static_cast<double>(m) * h); }
  // Partial derivative in the base point.
  Mat d1(std::int64_t i, std::int64_t j, std::int64_t m) const {
    return scale(sub(val(i + m, j), val(i - m, j)), quot(m));
  }
  // Partial derivative in the displacement.
  Mat d2(std::int64_t i, std::int64_t j, std::int64_t m) const {
    return scale(sub(val(i, j + m), val(i, j - m)), quot(m));
  }
  Mat d1_inv(std::int64_t i, std::int64_t j, std::int64_t m) const {
    return scale(sub(val_inv(i + m, j), val_inv(i - m, j)), quot(m));
  }
  Mat d2_inv(std::int64_t i, std::int64_t j, std::int64_t m) const {
    return scale(sub(val_inv(i, j + m), val_inv(i, j - m)), quot(m));
  }
};

// One derivative identity evaluated with step count mm at the point (i, j).
double identity_residual_at(const FdContext& c, const std::string& law, std::int64_t i,
                            std::int64_t j, std::int64_t mm) {
  if (law == "lemma_147") {
    // d/dr Z(r,t) = d/dt Z(r,t) - Z(r,t) A(r)
    const Mat rhs = sub(c.d2(i, j, mm), mul(c.val(i, j), c.d2(i, 0, mm)));
    return op_norm(sub(c.d1(i, j, mm), rhs));
  }
  if (law == "lemma_153") {
    // d/dr of the inverse family: dZ^inv = -Z^inv (dZ) Z^inv
    const Mat zi = c.val_inv(i, j);
    const Mat rhs = scale(mul(zi, mul(c.d1(i, j, mm), zi)), -1.0);
    return op_norm(sub(c.d1_inv(i, j, mm), rhs));
  }
  if (law == "lemma_165") {
    // d/dt Z(r,t) = A(r+t) Z(r,t)
    const Mat rhs = mul(c.d2(i + j, 0, mm), c.val(i, j));
    return op_norm(sub(c.d2(i, j, mm), rhs));
  }
  if (law == "lemma_171") {
    // d/dt of the inverse family
    const Mat zi = c.val_inv(i, j);
    const Mat rhs = scale(mul(zi, mul(c.d2(i, j, mm), zi)), -1.0);
    return op_norm(sub(c.d2_inv(i, j, mm), rhs));
  }
  if (law == "prop_178_iii") {
    // d/dv Psi(u,v) = -Psi(u,v) A(v) with Psi(u,v) = Z(v, u-v)
    const Mat dv = scale(sub(c.val(i + mm, j - mm), c.val(i - mm, j + mm)), c.quot(mm));
    const Mat rhs = scale(mul(c.val(i, j), c.d2(i, 0, mm)), -1.0);
    return op_norm(sub(dv, rhs));
  }
  throw SpecError("unknown derivative identity: " + law);
}

LawEntry richardson_entry(const FdContext& ctx, const std::string& law,
                          const std::vector<std::pair<std::int64_t, std::int64_t>>& points,
                          std::int64_t m, double h_fd) {
  LawEntry entry;
  entry.law = law;
  entry.tol = 1e-9;  // noise floor below which the ratio test is skipped
  std::pair<std::int64_t, std::int64_t> worst = points.front();
  for (const auto& p : points) {
    const double r = identity_residual_at(ctx, law, p.first, p.second, m);
    ++entry.samples;
    if (entry.samples == 1 || r > entry.max_residual) {
      entry.max_residual = r;
      worst = p;
    }
  }
  entry.argmax = {GroupElement::from_int(worst.first), GroupElement::from_int(worst.second)};
  const double r_half = identity_residual_at(ctx, law, worst.first, worst.second, m / 2);
  const double ratio = entry.max_residual / std::max(r_half, 1e-300);
  entry.metrics["residual_half"] = r_half;
  entry.metrics["richardson_ratio"] = ratio;
  entry.metrics["c_est"] = (entry.max_residual - r_half) / (0.75 * h_fd * h_fd);
  if (entry.max_residual <= entry.tol) {
    entry.pass = true;
    entry.note = "residual at noise floor; convergence ratio not informative";
  } else {
    entry.pass = ratio >= 3.5 && ratio <= 4.5;
    if (!entry.pass) entry.note = "residual does not shrink like h_fd^2";
  }
  return entry;
}

}  // namespace

double derivative_identity_residual(const Cotranslation& z, const std::string& law,
                                    std::int64_t i, std::int64_t j, double h_fd) {
  const double h = grid_step_of(z);
  const std::int64_t m = fd_steps(h, h_fd, false);
  return identity_residual_at(FdContext{z, h}, law, i, j, m);
}

VerificationReport check_derivative_identities(
    const Cotranslation& z, const std::vector<std::pair<std::int64_t, std::int64_t>>& points,
    double h_fd) {
  if (points.empty()) throw SpecError("derivative identities need sample points");
  const double h = grid_step_of(z);
  const std::int64_t m = fd_steps(h, h_fd, true);
  const FdContext ctx{z, h};
  VerificationReport rep;
  for (const char* law : {"lemma_147", "lemma_153", "lemma_165", "lemma_171", "prop_178_iii"})
    rep.entries.push_back(richardson_entry(ctx, law, points, m, h_fd));
  return rep;
}

namespace {

constexpr std::pair<int, int> kProbeRays[] = {{1, 1}, {1, -1}, {2, 1}};

double probe_ray_residual(const FdContext& ctx, std::int64_t i, std::int64_t j, std::int64_t m,
                          int a, int b) {
  const Mat q = scale(sub(ctx.val(i + a * m, j + b * m), ctx.val(i - a * m, j - b * m)),
                      ctx.quot(m));
  const Mat lin = add(scale(ctx.d1(i, j, m), static_cast<double>(a)),
                      scale(ctx.d2(i, j, m), static_cast<double>(b)));
  return op_norm(sub(q, lin));
}

}  // namespace

double two_variable_probe_residual(const Cotranslation& z, std::int64_t i, std::int64_t j,
                                   double h_fd) {
  const double h = grid_step_of(z);
  const std::int64_t m = fd_steps(h, h_fd, false);
  const FdContext ctx{z, h};
  double worst = 0.0;
  for (const auto& ray : kProbeRays)
    worst = std::max(worst, probe_ray_residual(ctx, i, j, m, ray.first, ray.second));
  return worst;
}

VerificationReport two_variable_differentiability_probe(
    const Cotranslation& z, const std::vector<std::pair<std::int64_t, std::int64_t>>& points,
    double h_fd, double tol) {
  if (points.empty()) throw SpecError("differentiability probe needs sample points");
  const double h = grid_step_of(z);
  const std::int64_t m = fd_steps(h, h_fd, false);
  const FdContext ctx{z, h};

  LawEntry entry;
  entry.law = "two_variable_probe";
  entry.tol = tol;
  std::pair<std::int64_t, std::int64_t> worst = points.front();
  std::pair<int, int> worst_ray = kProbeRays[0];
  for (const auto& p : points) {
    for (const auto& ray : kProbeRays) {
      const double r = probe_ray_residual(ctx, p.first, p.second, m, ray.first, ray.second);
      ++entry.samples;
      if (entry.samples == 1 || r > entry.max_residual) {
        entry.max_residual = r;
        worst = p;
        worst_ray = ray;
      }
    }
  }
  entry.argmax = {GroupElement::from_int(worst.first), GroupElement::from_int(worst.second)};
  entry.metrics["worst_ray_a"] = worst_ray.first;
  entry.metrics["worst_ray_b"] = worst_ray.second;
  entry.pass = true;  // informational probe, never a failure by itself
  if (entry.max_residual > tol)
    entry.note = "joint quotients deviate from the linearization; "
                 "two-variable differentiability unsupported on this grid";
  VerificationReport rep;
  rep.entries.push_back(std::move(entry));
  return rep;
}

double psi_cocycle_residual(const EvolutionGrid& grid, std::int64_t u, std::int64_t v,
                            std::int64_t w) {
  const Mat uv = grid.psi(u, v);
  const Mat vw = grid.psi(v, w);
  const double scale_by = std::max(1.0, op_norm(uv) * op_norm(vw));
  return op_norm(sub(mul(uv, vw), grid.psi(u, w))) / scale_by;
}

VerificationReport check_psi_cocycle(const EvolutionGrid& grid, std::size_t triples,
                                     std::uint64_t seed, double tol) {
  const std::int64_t n = grid.steps();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> draw(0, n);
  LawEntry entry;
  entry.law = "psi_cocycle";
  entry.tol = tol;
  for (std::size_t s = 0; s < triples; ++s) {
    const std::int64_t u = draw(rng), v = draw(rng), w = draw(rng);
    const double r = psi_cocycle_residual(grid, u, v, w);
    ++entry.samples;
    if (entry.samples == 1 || r > entry.max_residual) {
      entry.max_residual = r;
      entry.argmax = {GroupElement::from_int(u), GroupElement::from_int(v),
                      GroupElement::from_int(w)};
    }
  }
  entry.pass = entry.max_residual <= tol;
  VerificationReport rep;
  rep.entries.push_back(std::move(entry));
  return rep;
}

double step_consistency_residual(const EvolutionGrid& grid, std::int64_t i) {
  if (!grid.has_coeff()) throw SpecError("step consistency needs the coefficient function");
  const Mat id = identity(grid.dim());
  const CoeffFn& a = grid.coeff();
  const double t = grid.time_at(i);
  const Mat& u = grid.step_matrix(i);
  const Mat two_half = mul(rk4_step(a, t + 0.5 * grid.h(), 0.5 * grid.h(), id),
                           rk4_step(a, t, 0.5 * grid.h(), id));
  return op_norm(sub(u, two_half)) / std::max(1.0, op_norm(u));
}

VerificationReport check_step_consistency(const EvolutionGrid& grid, double tol,
                                          std::size_t max_samples) {
  if (!grid.has_coeff()) throw SpecError("step consistency needs the coefficient function");
  if (max_samples == 0) throw SpecError("step consistency needs at least one sample");
  const std::int64_t n = grid.steps();
  const std::int64_t stride = std::max<std::int64_t>(1, n / static_cast<std::int64_t>(max_samples));
  LawEntry entry;
  entry.law = "step_consistency";
  entry.tol = tol;
  for (std::int64_t i = 0; i < n; i += stride) {
    const double r = step_consistency_residual(grid, i);
    ++entry.samples;
    if (entry.samples == 1 || r > entry.max_residual) {
      entry.max_residual = r;
      entry.argmax = {GroupElement::from_int(i)};
    }
  }
  entry.pass = entry.max_residual <= tol;
  if (!entry.pass) entry.note = "grid step too coarse for this coefficient";
  VerificationReport rep;
  rep.entries.push_back(std::move(entry));
  return rep;
}

GridWindows grid_windows(const EvolutionGrid& grid, std::int64_t radius, std::size_t max_bases) {
  if (radius < 1) throw SpecError("grid_windows: radius must be positive");
  if (max_bases == 0) throw SpecError("grid_windows: need at least one base");
  const std::int64_t n = grid.steps();
  const std::int64_t lo = 2 * radius;
  const std::int64_t hi = n - 2 * radius;
  if (hi < lo) throw SpecError("grid too short for the requested window radius");
  GridWindows w;
  for (std::int64_t j = -radius; j <= radius; ++j) w.disps.push_back(GroupElement::from_int(j));
  const std::int64_t count =
      std::min<std::int64_t>(static_cast<std::int64_t>(max_bases), hi - lo + 1);
  const std::int64_t stride = count > 1 ? (hi - lo) / (count - 1) : 1;
  for (std::int64_t k = 0; k < count; ++k) {
    const std::int64_t i = lo + k * stride;
    w.bases.push_back(GroupElement::from_int(i));
    w.base_indices.push_back(i);
  }
  return w;
}

}  // namespace cotran
