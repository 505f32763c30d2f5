#pragma once

#include <vector>

#include "ftpit/problems.hpp"
#include "ftpit/sweeper.hpp"
#include "ftpit/types.hpp"

namespace ftpit {

/// Restriction by injection or full weighting, prolongation by Lagrange
/// interpolation of order 2, 4, 6 or 8, between two nested grids (factor
/// two). Dirichlet: N_f = 2 N_c + 1, periodic:
/// N_f = 2 N_c, Neumann: N_f = 2 N_c - 1. Equal sizes give the identity.
class SpaceTransfer {
 public:
  SpaceTransfer(const Grid1D& fine, const Grid1D& coarse, int components, int prolong_order = 2);
  void set_full_weighting(bool on) { full_weighting_ = on; }

  bool is_identity() const { return identity_; }
  Vector restrict(const Vector& fine) const;
  Vector prolong(const Vector& coarse) const;

 private:
  double coarse_at(const Vector& c, int i, int comp) const;
  double midpoint(const Vector& c, int left, int comp) const;

  Grid1D fine_;
  Grid1D coarse_;
  int components_;
  int order_;
  bool identity_;
  bool full_weighting_ = false;
  std::vector<double> weights_;
};

/// Space transfer plus collocation-node interpolation between two levels.
struct TransferPair {
  SpaceTransfer space;
  Matrix restrict_nodes;  // M_c x M_f
  Matrix prolong_nodes;   // M_f x M_c
  bool nodes_identity = true;

  TransferPair(const LevelSpec& fine, const LevelSpec& coarse, int prolong_order = 2);

  NodeValues restrict_values(const NodeValues& fine) const;
  NodeValues prolong_values(const NodeValues& coarse) const;
};

/// Coarse U and u0 become the restriction of the fine values; coarse F is
/// re-evaluated with the coarse right-hand side.
void restrict_level(const LevelState& fine, const TransferPair& pair, LevelState& coarse);

/// FAS correction on the coarse level:
/// tau_c = R (dt Q_f F_f + tau_f) - dt Q_c F_c(R U_f).
/// Expects `coarse` to already hold the restricted values.
void compute_fas_tau(const LevelState& fine, LevelState& coarse, const TransferPair& pair);

/// U_f += P (U_c^new - U_c^old) followed by a refresh of the fine F.
void coarse_correction(LevelState& fine, const NodeValues& coarse_new,
                       const NodeValues& coarse_old_restricted, const TransferPair& pair);

/// u0_f += P (u0_c^new - u0_c^old).
void correct_initial_value(LevelState& fine, const Vector& coarse_new, const Vector& coarse_old,
                           const TransferPair& pair);

}  // namespace ftpit
