#include "cotran/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace cotran {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

Mat::Mat(int dim, std::vector<double> entries) : dim_(dim), a_(std::move(entries)) {
  if (dim < 0) throw SpecError("Mat: negative dimension");
  if (a_.size() != static_cast<size_t>(dim) * dim) {
    throw SpecError("Mat: entry count " + std::to_string(a_.size()) +
                    " does not match dimension " + std::to_string(dim));
  }
  validate();
}

void Mat::validate() const {
  if (!all_finite(a_)) throw SpecError("Mat: non-finite entry");
}

Mat identity(int dim) {
  Mat m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Mat zero(int dim) { return Mat(dim); }

Mat mul(const Mat& a, const Mat& b) {
  if (a.dim() != b.dim()) throw SpecError("mul: dimension mismatch");
  const int d = a.dim();
  Mat out(d);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < d; ++j) out(i, j) += aik * b(k, j);
    }
  }
  out.validate();
  return out;
}

Mat add(const Mat& a, const Mat& b) {
  if (a.dim() != b.dim()) throw SpecError("add: dimension mismatch");
  const int d = a.dim();
  Mat out(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = a(i, j) + b(i, j);
  out.validate();
  return out;
}

Mat sub(const Mat& a, const Mat& b) {
  if (a.dim() != b.dim()) throw SpecError("sub: dimension mismatch");
  const int d = a.dim();
  Mat out(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = a(i, j) - b(i, j);
  out.validate();
  return out;
}

Mat scale(double s, const Mat& a) {
  const int d = a.dim();
  Mat out(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = s * a(i, j);
  out.validate();
  return out;
}

Mat transpose(const Mat& a) {
  const int d = a.dim();
  Mat out(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = a(j, i);
  return out;
}

double frob_norm(const Mat& a) {
  double s = 0.0;
  for (double x : a.entries()) s += x * x;
  return std::sqrt(s);
}

namespace {

// Orthonormalizes the columns of b in place by plane rotations, accumulating
// them into v.  On return the column norms of b are the singular values and
// b's normalized columns are the left singular vectors.
void one_sided_jacobi(Mat& b, Mat& v) {
  const int d = b.dim();
  const double eps = 1e-15;
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (int i = 0; i < d - 1; ++i) {
      for (int j = i + 1; j < d; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (int k = 0; k < d; ++k) {
          alpha += b(k, i) * b(k, i);
          beta += b(k, j) * b(k, j);
          gamma += b(k, i) * b(k, j);
        }
        if (gamma == 0.0) continue;
        if (std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int k = 0; k < d; ++k) {
          const double bi = b(k, i), bj = b(k, j);
          b(k, i) = c * bi - s * bj;
          b(k, j) = s * bi + c * bj;
        }
        for (int k = 0; k < d; ++k) {
          const double vi = v(k, i), vj = v(k, j);
          v(k, i) = c * vi - s * vj;
          v(k, j) = s * vi + c * vj;
        }
      }
    }
    if (!rotated) break;
  }
}

// Fills the columns of u listed in holes with an orthonormal completion of
// the columns already placed (two rounds of Gram-Schmidt; unfilled hole
// columns are zero and project to nothing).
void complete_orthonormal(Mat& u, const std::vector<int>& holes) {
  const int d = u.dim();
  for (int hole : holes) {
    std::vector<double> best(d, 0.0);
    double best_norm = -1.0;
    for (int seed = 0; seed < d; ++seed) {
      std::vector<double> cand(d, 0.0);
      cand[seed] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (int c = 0; c < d; ++c) {
          if (c == hole) continue;
          double dot = 0.0;
          for (int k = 0; k < d; ++k) dot += cand[k] * u(k, c);
          for (int k = 0; k < d; ++k) cand[k] -= dot * u(k, c);
        }
      }
      double norm = 0.0;
      for (double x : cand) norm += x * x;
      norm = std::sqrt(norm);
      if (norm > best_norm) {
        best_norm = norm;
        best = cand;
      }
      if (best_norm > 0.9) break;
    }
    for (int k = 0; k < d; ++k) u(k, hole) = best[k] / best_norm;
  }
}

}  // namespace

SvdResult svd(const Mat& a) {
  const int d = a.dim();
  Mat b = a;
  Mat v = identity(d);
  one_sided_jacobi(b, v);

  std::vector<double> sigma(d, 0.0);
  for (int j = 0; j < d; ++j) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += b(k, j) * b(k, j);
    sigma[j] = std::sqrt(s);
  }

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return sigma[x] > sigma[y]; });

  SvdResult r;
  r.u = Mat(d);
  r.v = Mat(d);
  r.sigma.resize(d);
  const double sigma_max = d > 0 ? sigma[order[0]] : 0.0;
  std::vector<int> holes;
  for (int j = 0; j < d; ++j) {
    const int src = order[j];
    r.sigma[j] = sigma[src];
    for (int k = 0; k < d; ++k) r.v(k, j) = v(k, src);
    if (sigma[src] > sigma_max * 1e-300 && sigma[src] > 0.0) {
      for (int k = 0; k < d; ++k) r.u(k, j) = b(k, src) / sigma[src];
    } else {
      holes.push_back(j);
    }
  }
  complete_orthonormal(r.u, holes);
  return r;
}

double op_norm(const Mat& a) {
  if (a.dim() == 0) return 0.0;
  if (a.dim() == 1) return std::abs(a(0, 0));
  return svd(a).sigma[0];
}

double cond_2(const Mat& a) {
  const SvdResult s = svd(a);
  const double lo = s.sigma.back();
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return s.sigma.front() / lo;
}

namespace {

// Pivoted LU inverse.  Assumes singularity has already been screened.
Mat lu_inverse(const Mat& a) {
  const int d = a.dim();
  Mat lu = a;
  std::vector<int> piv(d);
  std::iota(piv.begin(), piv.end(), 0);
  for (int col = 0; col < d; ++col) {
    int p = col;
    for (int r = col + 1; r < d; ++r)
      if (std::abs(lu(r, col)) > std::abs(lu(p, col))) p = r;
    if (p != col) {
      for (int c = 0; c < d; ++c) std::swap(lu(col, c), lu(p, c));
      std::swap(piv[col], piv[p]);
    }
    const double pivval = lu(col, col);
    if (pivval == 0.0) throw SingularError("try_inverse: zero pivot");
    for (int r = col + 1; r < d; ++r) {
      lu(r, col) /= pivval;
      const double f = lu(r, col);
      for (int c = col + 1; c < d; ++c) lu(r, c) -= f * lu(col, c);
    }
  }
  Mat inv(d);
  std::vector<double> x(d);
  for (int rhs = 0; rhs < d; ++rhs) {
    for (int r = 0; r < d; ++r) x[r] = (piv[r] == rhs) ? 1.0 : 0.0;
    for (int r = 1; r < d; ++r)
      for (int c = 0; c < r; ++c) x[r] -= lu(r, c) * x[c];
    for (int r = d - 1; r >= 0; --r) {
      for (int c = r + 1; c < d; ++c) x[r] -= lu(r, c) * x[c];
      x[r] /= lu(r, r);
    }
    for (int r = 0; r < d; ++r) inv(r, rhs) = x[r];
  }
  inv.validate();
  return inv;
}

}  // namespace

Mat try_inverse(const Mat& a, double tol) {
  if (a.dim() == 0) return a;
  const SvdResult s = svd(a);
  if (s.sigma.back() < tol * s.sigma.front() || s.sigma.back() == 0.0) {
    throw SingularError("try_inverse: singular at relative tolerance " + std::to_string(tol));
  }
  return lu_inverse(a);
}

int rank_eps(const Mat& a, double tol_rel) {
  const SvdResult s = svd(a);
  if (s.sigma.empty() || s.sigma[0] == 0.0) return 0;
  const double cut = tol_rel * s.sigma[0];
  int r = 0;
  for (double x : s.sigma)
    if (x > cut) ++r;
  return r;
}

namespace {

void fix_sign(std::vector<double>& col) {
  double amax = 0.0;
  for (double x : col) amax = std::max(amax, std::abs(x));
  if (amax == 0.0) return;
  for (double x : col) {
    if (std::abs(x) > 1e-12 * amax) {
      if (x < 0.0)
        for (double& y : col) y = -y;
      return;
    }
  }
}

SubspaceBasis take_columns(const Mat& m, int from, int count, double tol_used) {
  SubspaceBasis b;
  b.dim = m.dim();
  b.rank = count;
  b.tol_used = tol_used;
  b.columns.resize(static_cast<size_t>(b.dim) * count);
  std::vector<double> col(b.dim);
  for (int c = 0; c < count; ++c) {
    for (int r = 0; r < b.dim; ++r) col[r] = m(r, from + c);
    fix_sign(col);
    for (int r = 0; r < b.dim; ++r) b.columns[static_cast<size_t>(c) * b.dim + r] = col[r];
  }
  return b;
}

}  // namespace

SubspaceBasis image_basis(const Mat& a, double tol_rel) {
  const SvdResult s = svd(a);
  const int r = rank_eps(a, tol_rel);
  return take_columns(s.u, 0, r, tol_rel);
}

SubspaceBasis kernel_basis(const Mat& a, double tol_rel) {
  const SvdResult s = svd(a);
  const int r = rank_eps(a, tol_rel);
  return take_columns(s.v, r, a.dim() - r, tol_rel);
}

IdempotencyResult is_idempotent(const Mat& a, double tol) {
  IdempotencyResult res;
  res.residual = op_norm(sub(mul(a, a), a));
  res.idempotent = res.residual <= tol;
  return res;
}

bool same_kernel(const Mat& a, const Mat& b, double tol, double rank_tol_rel) {
  if (a.dim() != b.dim()) throw SpecError("same_kernel: dimension mismatch");
  const int ra = rank_eps(a, rank_tol_rel);
  const int rb = rank_eps(b, rank_tol_rel);
  if (ra != rb) return false;
  const SubspaceBasis ka = kernel_basis(a, rank_tol_rel);
  const SubspaceBasis kb = kernel_basis(b, rank_tol_rel);
  const int d = a.dim();
  // max_j || a * kb_j || and symmetrically.
  auto hit = [d](const Mat& m, const SubspaceBasis& k) {
    double worst = 0.0;
    for (int c = 0; c < k.rank; ++c) {
      double s = 0.0;
      for (int r = 0; r < d; ++r) {
        double acc = 0.0;
        for (int j = 0; j < d; ++j) acc += m(r, j) * k.col(j, c);
        s += acc * acc;
      }
      worst = std::max(worst, std::sqrt(s));
    }
    return worst;
  };
  return hit(a, kb) <= tol && hit(b, ka) <= tol;
}

Mat columns_to_mat(const SubspaceBasis& left, const SubspaceBasis& right) {
  if (left.dim != right.dim) throw SpecError("columns_to_mat: dimension mismatch");
  const int d = left.dim;
  if (left.rank + right.rank != d)
    throw SpecError("columns_to_mat: blocks do not fill the dimension");
  Mat t(d);
  for (int c = 0; c < left.rank; ++c)
    for (int r = 0; r < d; ++r) t(r, c) = left.col(r, c);
  for (int c = 0; c < right.rank; ++c)
    for (int r = 0; r < d; ++r) t(r, left.rank + c) = right.col(r, c);
  t.validate();
  return t;
}

}  // namespace cotran
