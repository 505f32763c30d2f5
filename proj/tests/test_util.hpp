#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "ftpit/sweeper.hpp"
#include "ftpit/types.hpp"

namespace ftpit::testing {

inline double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

inline double max_diff(const NodeValues& a, const NodeValues& b) {
  double d = 0.0;
  for (size_t m = 0; m < a.size(); ++m) d = std::max(d, (a[m] - b[m]).lpNorm<Eigen::Infinity>());
  return d;
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix a(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) a(i, j) = dist(rng);
  return a;
}

/// A level state with U spread from u0 and F evaluated.
inline LevelState spread_level(LevelSpecPtr spec, double dt, const Vector& u0, double t_left = 0.0) {
  LevelState s(std::move(spec), dt, t_left);
  spread_initial_value(s, u0);
  return s;
}

/// Matrix of a linear operator on R^n, probed column by column.
template <class F>
Matrix probe_operator(Eigen::Index n_in, F&& apply) {
  Matrix A;
  for (Eigen::Index j = 0; j < n_in; ++j) {
    Vector e = Vector::Zero(n_in);
    e(j) = 1.0;
    const Vector col = apply(e);
    if (j == 0) A.resize(col.size(), n_in);
    A.col(j) = col;
  }
  return A;
}

}  // namespace ftpit::testing
