#pragma once

#include <vector>

#include "cotran/errors.hpp"

namespace cotran {

// Default relative threshold separating "numerically zero" singular values.
inline constexpr double kRankTol = 1e-8;
// Default relative threshold below which try_inverse refuses to invert.
inline constexpr double kInverseTol = 1e-12;

// Dense square matrix over the reals, row-major.  Entries are required to be
// finite; the constructors enforce this, which doubles as the divergence
// sentinel for iterated products and integrators.
class Mat {
 public:
  Mat() = default;
  explicit Mat(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim, 0.0) {
    if (dim < 0) throw SpecError("Mat: negative dimension");
  }
  Mat(int dim, std::vector<double> entries);

  int dim() const { return dim_; }
  double operator()(int r, int c) const { return a_[static_cast<size_t>(r) * dim_ + c]; }
  double& operator()(int r, int c) { return a_[static_cast<size_t>(r) * dim_ + c]; }
  const std::vector<double>& entries() const { return a_; }

  // Re-checks finiteness after in-place fills.  Throws SpecError.
  void validate() const;

  bool operator==(const Mat& o) const { return dim_ == o.dim_ && a_ == o.a_; }

 private:
  int dim_ = 0;
  std::vector<double> a_;
};

Mat identity(int dim);
Mat zero(int dim);
Mat mul(const Mat& a, const Mat& b);
Mat add(const Mat& a, const Mat& b);
Mat sub(const Mat& a, const Mat& b);
Mat scale(double s, const Mat& a);
inline Mat scale(const Mat& a, double s) { return scale(s, a); }
Mat transpose(const Mat& a);

inline Mat operator*(const Mat& a, const Mat& b) { return mul(a, b); }
inline Mat operator+(const Mat& a, const Mat& b) { return add(a, b); }
inline Mat operator-(const Mat& a, const Mat& b) { return sub(a, b); }

// Thin SVD of a square matrix: a = u * diag(sigma) * v^T with sigma sorted
// descending and u, v orthogonal.  One-sided Jacobi; adequate and accurate at
// the small dimensions this library works with.
struct SvdResult {
  Mat u;
  std::vector<double> sigma;
  Mat v;
};
SvdResult svd(const Mat& a);

// Largest singular value (the operator 2-norm).
double op_norm(const Mat& a);

// Frobenius norm; cheap helper for internal use.
double frob_norm(const Mat& a);

// Inverse via pivoted LU.  Throws SingularError iff the smallest singular
// value is below tol times the largest.
Mat try_inverse(const Mat& a, double tol = kInverseTol);

// Condition number sigma_max / sigma_min (infinity() when singular).
double cond_2(const Mat& a);

// Number of singular values above tol_rel * sigma_max.
int rank_eps(const Mat& a, double tol_rel = kRankTol);

// Orthonormal basis of a column space or kernel, stored column-major as a
// d x rank block.  Columns follow a deterministic sign convention: the first
// component of noticeable magnitude is positive.
struct SubspaceBasis {
  int dim = 0;
  int rank = 0;
  std::vector<double> columns;  // column-major, dim * rank entries
  double tol_used = 0.0;

  double col(int r, int c) const { return columns[static_cast<size_t>(c) * dim + r]; }
};
SubspaceBasis image_basis(const Mat& a, double tol_rel = kRankTol);
SubspaceBasis kernel_basis(const Mat& a, double tol_rel = kRankTol);

struct IdempotencyResult {
  bool idempotent = false;
  double residual = 0.0;  // ||a*a - a|| in operator norm
};
IdempotencyResult is_idempotent(const Mat& a, double tol = 1e-9);

// True iff a and b have equal rank_eps and each annihilates the other's
// numerical kernel basis within tol.
bool same_kernel(const Mat& a, const Mat& b, double tol, double rank_tol_rel = kRankTol);

// Assembles a square matrix from basis blocks placed side by side; the
// combined rank must equal the dimension.
Mat columns_to_mat(const SubspaceBasis& left, const SubspaceBasis& right);

}  // namespace cotran
