#pragma once

#include <vector>

#include "ftpit/types.hpp"

namespace ftpit {

/// Square matrix with `kl` sub- and `ku` super-diagonals.
class BandedMatrix {
 public:
  BandedMatrix(Eigen::Index n, int kl, int ku);

  Eigen::Index size() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }

  double& operator()(Eigen::Index i, Eigen::Index j);
  double operator()(Eigen::Index i, Eigen::Index j) const;

  Vector multiply(const Vector& x) const;
  Matrix to_dense() const;

 private:
  friend class BandedLU;
  Eigen::Index n_;
  int kl_, ku_;
  // row i holds columns [i - kl, i + ku]
  std::vector<double> data_;
};

/// LU factorization with partial pivoting that keeps the band structure
/// (pivoting widens the upper band to kl + ku).
class BandedLU {
 public:
  explicit BandedLU(const BandedMatrix& A);
  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& B) const;

 private:
  double& at(Eigen::Index i, Eigen::Index j) { return lu_[i * width_ + (j - i + kl_)]; }
  double at(Eigen::Index i, Eigen::Index j) const { return lu_[i * width_ + (j - i + kl_)]; }

  Eigen::Index n_;
  int kl_, ku_;
  Eigen::Index width_;
  std::vector<double> lu_;
  std::vector<Eigen::Index> pivots_;
};

/// Banded matrix whose band wraps around (periodic stencils). Entries are
/// addressed by row and signed offset in [-w, w].
class CyclicBandedMatrix {
 public:
  CyclicBandedMatrix(Eigen::Index n, int halfwidth);

  Eigen::Index size() const { return n_; }
  int halfwidth() const { return w_; }

  double& at(Eigen::Index row, int offset) { return data_[row * (2 * w_ + 1) + offset + w_]; }
  double at(Eigen::Index row, int offset) const { return data_[row * (2 * w_ + 1) + offset + w_]; }

  Vector multiply(const Vector& x) const;
  Matrix to_dense() const;

 private:
  Eigen::Index n_;
  int w_;
  std::vector<double> data_;
};

/// Solves cyclic banded systems: banded LU of the band part plus a
/// Sherman-Morrison-Woodbury correction for the wrapped corners.
class CyclicBandedLU {
 public:
  explicit CyclicBandedLU(const CyclicBandedMatrix& A);
  Vector solve(const Vector& b) const;

 private:
  BandedLU band_;
  Matrix Z_;      // band^{-1} U
  Matrix Vt_;     // corner rows
  Eigen::PartialPivLU<Matrix> capacitance_;
  bool has_corners_ = false;
};

}  // namespace ftpit
