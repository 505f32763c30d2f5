#include <random>

#include "doctest.h"
#include "ftpit/banded.hpp"
#include "test_util.hpp"

using namespace ftpit;
using namespace ftpit::testing;

TEST_SUITE("banded") {

TEST_CASE("banded LU agrees with a dense solve") {
  std::mt19937_64 rng(11);
  for (const auto [kl, ku] : {std::pair{1, 1}, std::pair{2, 3}, std::pair{4, 0}, std::pair{0, 2}}) {
    const Eigen::Index n = 40;
    BandedMatrix A(n, kl, ku);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = std::max<Eigen::Index>(0, i - kl); j <= std::min(n - 1, i + ku); ++j) {
        A(i, j) = d(rng);
      }
    }
    const Matrix D = A.to_dense();
    const Vector x = random_vector(rng, n);
    CHECK(max_abs(A.multiply(x) - D * x) < 1e-13);
    const Vector b = random_vector(rng, n);
    const Vector expect = D.partialPivLu().solve(b);
    CHECK(max_abs(BandedLU(A).solve(b) - expect) < 1e-9 * (1.0 + max_abs(expect)));
  }
}

TEST_CASE("banded LU needs pivoting on a zero leading entry") {
  BandedMatrix A(3, 1, 1);
  A(0, 0) = 0.0; A(0, 1) = 1.0;
  A(1, 0) = 1.0; A(1, 1) = 0.0; A(1, 2) = 1.0;
  A(2, 1) = 1.0; A(2, 2) = 2.0;
  Vector b(3);
  b << 1, 2, 3;
  const Vector x = BandedLU(A).solve(b);
  CHECK(max_abs(A.multiply(x) - b) < 1e-14);
}

TEST_CASE("cyclic banded solve agrees with a dense solve") {
  std::mt19937_64 rng(5);
  for (const int w : {1, 2, 3}) {
    const Eigen::Index n = 32;
    CyclicBandedMatrix A(n, w);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int o = -w; o <= w; ++o) A.at(i, o) = d(rng);
      A.at(i, 0) += 4.0 * w;
    }
    const Matrix D = A.to_dense();
    CHECK(D(0, n - 1) == A.at(0, -1));
    const Vector b = random_vector(rng, n);
    CHECK(max_abs(CyclicBandedLU(A).solve(b) - D.partialPivLu().solve(b)) < 1e-12);
  }
}

}  // TEST_SUITE
