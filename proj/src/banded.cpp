#include "ftpit/banded.hpp"

#include <algorithm>
#include <cmath>

#include "ftpit/errors.hpp"

namespace ftpit {

BandedMatrix::BandedMatrix(Eigen::Index n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), data_(static_cast<size_t>(n * (kl + ku + 1)), 0.0) {}

double& BandedMatrix::operator()(Eigen::Index i, Eigen::Index j) {
  return data_[i * (kl_ + ku_ + 1) + (j - i + kl_)];
}

double BandedMatrix::operator()(Eigen::Index i, Eigen::Index j) const {
  if (j - i > ku_ || i - j > kl_) return 0.0;
  return data_[i * (kl_ + ku_ + 1) + (j - i + kl_)];
}

Vector BandedMatrix::multiply(const Vector& x) const {
  Vector y = Vector::Zero(n_);
  for (Eigen::Index i = 0; i < n_; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - kl_);
    const Eigen::Index hi = std::min<Eigen::Index>(n_ - 1, i + ku_);
    double s = 0.0;
    for (Eigen::Index j = lo; j <= hi; ++j) s += (*this)(i, j) * x(j);
    y(i) = s;
  }
  return y;
}

Matrix BandedMatrix::to_dense() const {
  Matrix D = Matrix::Zero(n_, n_);
  for (Eigen::Index i = 0; i < n_; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - kl_);
    const Eigen::Index hi = std::min<Eigen::Index>(n_ - 1, i + ku_);
    for (Eigen::Index j = lo; j <= hi; ++j) D(i, j) = (*this)(i, j);
  }
  return D;
}

BandedLU::BandedLU(const BandedMatrix& A)
    : n_(A.n_), kl_(A.kl_), ku_(A.ku_), width_(2 * A.kl_ + A.ku_ + 1),
      lu_(static_cast<size_t>(A.n_ * (2 * A.kl_ + A.ku_ + 1)), 0.0),
      pivots_(static_cast<size_t>(A.n_)) {
  for (Eigen::Index i = 0; i < n_; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - kl_);
    const Eigen::Index hi = std::min<Eigen::Index>(n_ - 1, i + ku_);
    for (Eigen::Index j = lo; j <= hi; ++j) at(i, j) = A(i, j);
  }
  const int uw = kl_ + ku_;
  for (Eigen::Index k = 0; k < n_; ++k) {
    const Eigen::Index last_row = std::min<Eigen::Index>(n_ - 1, k + kl_);
    const Eigen::Index last_col = std::min<Eigen::Index>(n_ - 1, k + uw);
    Eigen::Index p = k;
    for (Eigen::Index i = k + 1; i <= last_row; ++i) {
      if (std::abs(at(i, k)) > std::abs(at(p, k))) p = i;
    }
    pivots_[static_cast<size_t>(k)] = p;
    if (at(p, k) == 0.0) throw NumericalError("singular banded matrix");
    if (p != k) {
      for (Eigen::Index j = k; j <= last_col; ++j) std::swap(at(k, j), at(p, j));
    }
    const double inv = 1.0 / at(k, k);
    for (Eigen::Index i = k + 1; i <= last_row; ++i) {
      const double l = at(i, k) * inv;
      at(i, k) = l;
      if (l == 0.0) continue;
      for (Eigen::Index j = k + 1; j <= last_col; ++j) at(i, j) -= l * at(k, j);
    }
  }
}

Vector BandedLU::solve(const Vector& b) const {
  Vector x = b;
  for (Eigen::Index k = 0; k < n_; ++k) {
    const Eigen::Index p = pivots_[static_cast<size_t>(k)];
    if (p != k) std::swap(x(k), x(p));
    const Eigen::Index last_row = std::min<Eigen::Index>(n_ - 1, k + kl_);
    for (Eigen::Index i = k + 1; i <= last_row; ++i) x(i) -= at(i, k) * x(k);
  }
  const int uw = kl_ + ku_;
  for (Eigen::Index k = n_ - 1; k >= 0; --k) {
    const Eigen::Index last_col = std::min<Eigen::Index>(n_ - 1, k + uw);
    double s = x(k);
    for (Eigen::Index j = k + 1; j <= last_col; ++j) s -= at(k, j) * x(j);
    x(k) = s / at(k, k);
  }
  return x;
}

Matrix BandedLU::solve(const Matrix& B) const {
  Matrix X(B.rows(), B.cols());
  for (Eigen::Index c = 0; c < B.cols(); ++c) X.col(c) = solve(Vector(B.col(c)));
  return X;
}

CyclicBandedMatrix::CyclicBandedMatrix(Eigen::Index n, int halfwidth)
    : n_(n), w_(halfwidth), data_(static_cast<size_t>(n * (2 * halfwidth + 1)), 0.0) {
  if (n <= 2 * halfwidth) throw ConfigError("cyclic band wider than the matrix");
}

Vector CyclicBandedMatrix::multiply(const Vector& x) const {
  Vector y(n_);
  for (Eigen::Index i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int o = -w_; o <= w_; ++o) s += at(i, o) * x((i + o + n_) % n_);
    y(i) = s;
  }
  return y;
}

Matrix CyclicBandedMatrix::to_dense() const {
  Matrix D = Matrix::Zero(n_, n_);
  for (Eigen::Index i = 0; i < n_; ++i) {
    for (int o = -w_; o <= w_; ++o) D(i, (i + o + n_) % n_) += at(i, o);
  }
  return D;
}

namespace {

BandedMatrix band_part(const CyclicBandedMatrix& A) {
  const auto n = A.size();
  const int w = A.halfwidth();
  BandedMatrix B(n, w, w);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int o = -w; o <= w; ++o) {
      const Eigen::Index j = i + o;
      if (j >= 0 && j < n) B(i, j) = A.at(i, o);
    }
  }
  return B;
}

}  // namespace

CyclicBandedLU::CyclicBandedLU(const CyclicBandedMatrix& A) : band_(band_part(A)) {
  const auto n = A.size();
  const int w = A.halfwidth();
  if (w == 0) return;
  // Corner entries live only in the first and last w rows.
  const int r = 2 * w;
  Matrix U = Matrix::Zero(n, r);
  Vt_ = Matrix::Zero(r, n);
  for (int c = 0; c < r; ++c) {
    const Eigen::Index row = c < w ? c : n - r + c;
    U(row, c) = 1.0;
    for (int o = -w; o <= w; ++o) {
      const Eigen::Index j = row + o;
      if (j < 0 || j >= n) Vt_(c, (j + n) % n) += A.at(row, o);
    }
  }
  has_corners_ = Vt_.cwiseAbs().sum() > 0.0;
  if (!has_corners_) return;
  Z_ = band_.solve(U);
  capacitance_.compute(Matrix::Identity(r, r) + Vt_ * Z_);
}

Vector CyclicBandedLU::solve(const Vector& b) const {
  Vector y = band_.solve(b);
  if (!has_corners_) return y;
  const Vector c = capacitance_.solve(Vt_ * y);
  return y - Z_ * c;
}

}  // namespace ftpit
