#include "ftpit/transfer.hpp"

#include <string>

#include "ftpit/errors.hpp"

namespace ftpit {

SpaceTransfer::SpaceTransfer(const Grid1D& fine, const Grid1D& coarse, int components,
                             int prolong_order)
    : fine_(fine), coarse_(coarse), components_(components), order_(prolong_order),
      identity_(fine.N == coarse.N) {
  if (prolong_order < 2 || prolong_order > 8 || prolong_order % 2 != 0) {
    throw ConfigError("prolongation order must be one of 2, 4, 6, 8");
  }
  // Lagrange weights for the midpoint of a symmetric stencil of order_ points
  const int half = order_ / 2;
  for (int k = 0; k < order_; ++k) {
    const double xk = k - half + 1;  // stencil offsets relative to the left point
    double w = 1.0;
    for (int j = 0; j < order_; ++j) {
      if (j == k) continue;
      const double xj = j - half + 1;
      w *= (0.5 - xj) / (xk - xj);
    }
    weights_.push_back(w);
  }
  if (fine.boundary != coarse.boundary) throw ConfigError("levels use different boundaries");
  if (identity_) return;
  bool nested = false;
  switch (fine.boundary) {
    case Boundary::Dirichlet: nested = fine.N == 2 * coarse.N + 1; break;
    case Boundary::Periodic: nested = fine.N == 2 * coarse.N; break;
    case Boundary::Neumann: nested = fine.N == 2 * coarse.N - 1; break;
    case Boundary::None: nested = false; break;
  }
  if (!nested) {
    throw ConfigError("grids " + std::to_string(fine.N) + " and " + std::to_string(coarse.N) +
                      " are not nested by a factor of two");
  }
}

Vector SpaceTransfer::restrict(const Vector& f) const {
  if (identity_) return f;
  const int Nc = coarse_.N;
  const int Nf = fine_.N;
  const int shift = fine_.boundary == Boundary::Dirichlet ? 1 : 0;
  Vector c(static_cast<Eigen::Index>(Nc) * components_);
  auto fine_at = [&](int j, int k) {
    switch (fine_.boundary) {
      case Boundary::Dirichlet: return (j < 0 || j >= Nf) ? 0.0 : f(j * components_ + k);
      case Boundary::Periodic: return f((((j % Nf) + Nf) % Nf) * components_ + k);
      case Boundary::Neumann:
        if (j < 0) j = -j;
        if (j >= Nf) j = 2 * (Nf - 1) - j;
        return f(j * components_ + k);
      case Boundary::None: break;
    }
    return f(j * components_ + k);
  };
  for (int i = 0; i < Nc; ++i) {
    for (int k = 0; k < components_; ++k) {
      const int j = 2 * i + shift;
      c(i * components_ + k) = full_weighting_
                                   ? 0.25 * fine_at(j - 1, k) + 0.5 * fine_at(j, k) + 0.25 * fine_at(j + 1, k)
                                   : f(j * components_ + k);
    }
  }
  return c;
}

// coarse value at index i, extended past the boundary according to the
// boundary condition (odd reflection about the zero-valued Dirichlet edge,
// wrap for periodic, mirror for Neumann)
double SpaceTransfer::coarse_at(const Vector& c, int i, int comp) const {
  const int N = coarse_.N;
  auto v = [&](int j) { return c(j * components_ + comp); };
  switch (coarse_.boundary) {
    case Boundary::Dirichlet:
      if (i == -1 || i == N) return 0.0;
      if (i < -1) return -v(-2 - i);
      if (i > N) return -v(2 * N - i);
      return v(i);
    case Boundary::Periodic: return v(((i % N) + N) % N);
    case Boundary::Neumann:
      if (i < 0) return v(-i);
      if (i >= N) return v(2 * (N - 1) - i);
      return v(i);
    case Boundary::None: break;
  }
  return v(i);
}

double SpaceTransfer::midpoint(const Vector& c, int left, int comp) const {
  const int half = order_ / 2;
  double s = 0.0;
  for (int k = 0; k < order_; ++k) s += weights_[static_cast<size_t>(k)] * coarse_at(c, left + k - half + 1, comp);
  return s;
}

Vector SpaceTransfer::prolong(const Vector& c) const {
  if (identity_) return c;
  const int Nf = fine_.N;
  const bool dirichlet = fine_.boundary == Boundary::Dirichlet;
  Vector f(static_cast<Eigen::Index>(Nf) * components_);
  for (int j = 0; j < Nf; ++j) {
    for (int k = 0; k < components_; ++k) {
      double value;
      if (dirichlet) {
        // fine 2i+1 sits on coarse i; fine 2i between coarse i-1 and i
        value = (j % 2 == 1) ? coarse_at(c, (j - 1) / 2, k) : midpoint(c, j / 2 - 1, k);
      } else {
        value = (j % 2 == 0) ? coarse_at(c, j / 2, k) : midpoint(c, (j - 1) / 2, k);
      }
      f(j * components_ + k) = value;
    }
  }
  return f;
}

TransferPair::TransferPair(const LevelSpec& fine, const LevelSpec& coarse, int prolong_order)
    : space(fine.problem->grid(), coarse.problem->grid(), fine.problem->components(),
            prolong_order) {
  if (fine.problem->components() != coarse.problem->components()) {
    throw ConfigError("levels disagree on the number of components");
  }
  const Vector& nf = fine.table->nodes;
  const Vector& nc = coarse.table->nodes;
  nodes_identity = nf.size() == nc.size() && (nf - nc).cwiseAbs().maxCoeff() == 0.0;
  if (nodes_identity) {
    restrict_nodes = Matrix::Identity(nf.size(), nf.size());
    prolong_nodes = restrict_nodes;
  } else {
    restrict_nodes = lagrange_interpolation_matrix(nf, nc);
    prolong_nodes = lagrange_interpolation_matrix(nc, nf);
  }
}

namespace {

NodeValues apply_nodes(const Matrix& T, const NodeValues& in) {
  NodeValues out(static_cast<size_t>(T.rows()), Vector::Zero(in.front().size()));
  for (Eigen::Index m = 0; m < T.rows(); ++m) {
    for (Eigen::Index j = 0; j < T.cols(); ++j) {
      if (T(m, j) != 0.0) out[static_cast<size_t>(m)] += T(m, j) * in[static_cast<size_t>(j)];
    }
  }
  return out;
}

}  // namespace

NodeValues TransferPair::restrict_values(const NodeValues& fine) const {
  NodeValues spaced;
  spaced.reserve(fine.size());
  for (const auto& v : fine) spaced.push_back(space.restrict(v));
  if (nodes_identity) return spaced;
  return apply_nodes(restrict_nodes, spaced);
}

NodeValues TransferPair::prolong_values(const NodeValues& coarse) const {
  NodeValues spaced;
  spaced.reserve(coarse.size());
  for (const auto& v : coarse) spaced.push_back(space.prolong(v));
  if (nodes_identity) return spaced;
  return apply_nodes(prolong_nodes, spaced);
}

void restrict_level(const LevelState& fine, const TransferPair& pair, LevelState& coarse) {
  if (coarse.u0.size() != pair.space.restrict(fine.u0).size()) {
    throw ConfigError("coarse level size does not match the restriction");
  }
  coarse.U = pair.restrict_values(fine.U);
  coarse.u0 = pair.space.restrict(fine.u0);
  evaluate_rhs(coarse);
}

void compute_fas_tau(const LevelState& fine, LevelState& coarse, const TransferPair& pair) {
  NodeValues fine_int = integrate_rhs(fine);
  for (size_t m = 0; m < fine_int.size(); ++m) fine_int[m] += fine.tau[m];
  NodeValues tau = pair.restrict_values(fine_int);
  const NodeValues coarse_int = integrate_rhs(coarse);
  for (size_t m = 0; m < tau.size(); ++m) tau[m] -= coarse_int[m];
  coarse.tau = std::move(tau);
}

void coarse_correction(LevelState& fine, const NodeValues& coarse_new,
                       const NodeValues& coarse_old_restricted, const TransferPair& pair) {
  NodeValues delta(coarse_new.size());
  for (size_t m = 0; m < coarse_new.size(); ++m) delta[m] = coarse_new[m] - coarse_old_restricted[m];
  const NodeValues corr = pair.prolong_values(delta);
  for (size_t m = 0; m < fine.U.size(); ++m) fine.U[m] += corr[m];
  evaluate_rhs(fine);
}

void correct_initial_value(LevelState& fine, const Vector& coarse_new, const Vector& coarse_old,
                           const TransferPair& pair) {
  fine.u0 += pair.space.prolong(coarse_new - coarse_old);
}

}  // namespace ftpit
