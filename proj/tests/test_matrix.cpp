#include <cmath>
#include <random>

#include "cotran/matrix.hpp"
#include "doctest.h"

using namespace cotran;

namespace {

Mat random_mat(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat m(d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) m(r, c) = u(rng);
  return m;
}

}  // namespace

TEST_CASE("construction rejects malformed input") {
  CHECK_THROWS_AS(Mat(2, {1.0, 2.0, 3.0}), SpecError);
  CHECK_THROWS_AS(Mat(1, {std::nan("")}), SpecError);
  CHECK_THROWS_AS(Mat(-1), SpecError);
  Mat a(2, {1, 2, 3, 4});
  Mat b(3);
  CHECK_THROWS_AS(mul(a, b), SpecError);
  CHECK_THROWS_AS(add(a, b), SpecError);
}

TEST_CASE("arithmetic on hand-computed values") {
  Mat a(2, {1, 1, 0, 1});
  Mat b(2, {1, 0, 1, 1});
  CHECK(mul(a, b) == Mat(2, {2, 1, 1, 1}));
  CHECK(mul(b, a) == Mat(2, {1, 1, 1, 2}));
  CHECK(add(a, b) == Mat(2, {2, 1, 1, 2}));
  CHECK(sub(a, b) == Mat(2, {0, 1, -1, 0}));
  CHECK(scale(3.0, a) == Mat(2, {3, 3, 0, 3}));
  CHECK(transpose(a) == b);
  CHECK(mul(identity(2), a) == a);
  CHECK(add(zero(2), a) == a);
}

TEST_CASE("inverse on hand-computed values") {
  // rotation by a quarter turn
  Mat j(2, {0, 1, -1, 0});
  CHECK(op_norm(sub(try_inverse(j), Mat(2, {0, -1, 1, 0}))) < 1e-14);
  Mat shear(2, {1, 5, 0, 1});
  CHECK(op_norm(sub(try_inverse(shear), Mat(2, {1, -5, 0, 1}))) < 1e-13);
  CHECK_THROWS_AS(try_inverse(Mat(2, {1, 2, 2, 4})), SingularError);
  CHECK_THROWS_AS(try_inverse(zero(3)), SingularError);
}

TEST_CASE("svd of a nilpotent matrix") {
  Mat n(2, {0, 2, 0, 0});
  SvdResult s = svd(n);
  CHECK(s.sigma.size() == 2);
  CHECK(s.sigma[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(s.sigma[1]) < 1e-12);
  CHECK(op_norm(n) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(frob_norm(n) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rank_eps(n) == 1);
}

TEST_CASE("norms and conditioning of diagonal matrices") {
  Mat d(2, {3, 0, 0, -5});
  CHECK(op_norm(d) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(cond_2(Mat(2, {4, 0, 0, 2})) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cond_2(Mat(2, {1, 0, 0, 0})) == std::numeric_limits<double>::infinity());
  CHECK(rank_eps(Mat(2, {1, 0, 0, 1e-12})) == 1);
  CHECK(rank_eps(identity(3)) == 3);
  CHECK(rank_eps(zero(2)) == 0);
}

TEST_CASE("svd factors stay orthogonal and reconstruct the input") {
  std::mt19937_64 rng(20240814);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 6);
    Mat a = random_mat(rng, d);
    SvdResult s = svd(a);
    CHECK(op_norm(sub(mul(transpose(s.u), s.u), identity(d))) < 1e-10);
    CHECK(op_norm(sub(mul(transpose(s.v), s.v), identity(d))) < 1e-10);
    for (std::size_t i = 0; i + 1 < s.sigma.size(); ++i) CHECK(s.sigma[i] >= s.sigma[i + 1]);
    CHECK(s.sigma.back() >= 0.0);
    Mat usv(d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        double acc = 0.0;
        for (int k = 0; k < d; ++k) acc += s.u(r, k) * s.sigma[static_cast<std::size_t>(k)] * s.v(c, k);
        usv(r, c) = acc;
      }
    CHECK(op_norm(sub(usv, a)) < 1e-9 * std::max(1.0, s.sigma[0]));
  }
}

TEST_CASE("inverse round trip on seeded well-conditioned matrices") {
  std::mt19937_64 rng(7);
  int accepted = 0;
  for (int trial = 0; trial < 400 && accepted < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 4);
    Mat a = random_mat(rng, d);
    if (cond_2(a) > 1e6) continue;
    ++accepted;
    CHECK(op_norm(sub(mul(a, try_inverse(a)), identity(d))) < 1e-8);
    CHECK(op_norm(sub(mul(try_inverse(a), a), identity(d))) < 1e-8);
  }
  CHECK(accepted >= 100);
}

TEST_CASE("subspace bases of a rank-1 matrix") {
  Mat a(2, {1, 2, 2, 4});
  SubspaceBasis im = image_basis(a);
  SubspaceBasis ker = kernel_basis(a);
  CHECK(im.rank == 1);
  CHECK(ker.rank == 1);
  // image spans (1,2)/sqrt5, kernel spans (2,-1)/sqrt5
  CHECK(std::abs(std::abs(im.col(0, 0)) - 1.0 / std::sqrt(5.0)) < 1e-12);
  CHECK(std::abs(a(0, 0) * ker.col(0, 0) + a(0, 1) * ker.col(1, 0)) < 1e-12);
  CHECK(std::abs(a(1, 0) * ker.col(0, 0) + a(1, 1) * ker.col(1, 0)) < 1e-12);
  // the two spans are orthogonal complements here because a is symmetric
  CHECK(std::abs(im.col(0, 0) * ker.col(0, 0) + im.col(1, 0) * ker.col(1, 0)) < 1e-9);
  Mat t = columns_to_mat(im, ker);
  CHECK(rank_eps(t) == 2);
  CHECK_THROWS_AS(columns_to_mat(im, kernel_basis(identity(2))), SpecError);
}

TEST_CASE("idempotency detection") {
  CHECK(is_idempotent(Mat(2, {1, 5, 0, 0})).idempotent);
  CHECK(is_idempotent(identity(3)).idempotent);
  CHECK(is_idempotent(zero(2)).idempotent);
  IdempotencyResult r = is_idempotent(Mat(2, {1, 1, 0, 1}));
  CHECK_FALSE(r.idempotent);
  CHECK(r.residual == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("kernel comparison") {
  CHECK(same_kernel(Mat(2, {1, 0, 0, 0}), Mat(2, {2, 0, 0, 0}), 1e-9));
  CHECK_FALSE(same_kernel(Mat(2, {1, 0, 0, 0}), Mat(2, {0, 0, 0, 1}), 1e-9));
  CHECK_FALSE(same_kernel(Mat(2, {1, 0, 0, 0}), identity(2), 1e-9));
  CHECK(same_kernel(zero(2), zero(2), 1e-9));
}
