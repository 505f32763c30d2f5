#pragma once

#include <memory>

#include "ftpit/collocation.hpp"
#include "ftpit/problems.hpp"
#include "ftpit/types.hpp"

namespace ftpit {

/// Immutable description of one level of the space-time hierarchy.
struct LevelSpec {
  ProblemPtr problem;
  std::shared_ptr<const CollocationTable> table;
  /// Preconditioner for the implicit part of the right-hand side.
  std::shared_ptr<const Preconditioner> implicit_precond;
  /// Strictly lower preconditioner for the explicit part (IMEX problems only).
  std::shared_ptr<const Preconditioner> explicit_precond;
  int sweeps = 1;

  static std::shared_ptr<const LevelSpec> make(ProblemPtr problem, NodeKind nodes, int M,
                                               PreconditionerKind precond, int sweeps = 1);
};

using LevelSpecPtr = std::shared_ptr<const LevelSpec>;

/// Mutable per-step data of one level: initial value, node values,
/// right-hand side at the nodes and the FAS correction (cumulative form,
/// tau[m] corresponds to the integral from the step start to node m).
struct LevelState {
  LevelSpecPtr spec;
  double dt = 0.0;
  double t_left = 0.0;
  Vector u0;
  NodeValues U;
  NodeValues F_impl;
  NodeValues F_expl;  // empty unless the problem has an explicit part
  NodeValues tau;

  LevelState() = default;
  LevelState(LevelSpecPtr spec, double dt, double t_left);

  const Problem& problem() const { return *spec->problem; }
  const CollocationTable& table() const { return *spec->table; }
  int num_nodes() const { return spec->table->M; }
  double node_time(int m) const { return t_left + dt * spec->table->nodes(m); }
  bool has_explicit() const { return !F_expl.empty(); }

  /// f(U_m) summed over both parts.
  Vector F(int m) const;
  const Vector& end_value() const { return U.back(); }
};

/// Recomputes F at node m (or all nodes) from the current U.
void evaluate_rhs(LevelState& level, int m);
void evaluate_rhs(LevelState& level);

/// Sets u0 and every node value to `u0`, then refreshes F.
void spread_initial_value(LevelState& level, const Vector& u0);

/// One preconditioned node-by-node pass in matrix form:
/// (I - dt QD_I F_I - dt QD_E F_E)(U^{k+1}) = U0 + dt (Q - QD) F(U^k) + tau.
void sweep(LevelState& level);

/// dt * (Q F)_m for every node m.
NodeValues integrate_rhs(const LevelState& level);

/// Per-node residual vectors u0 + dt (Q F)_m + tau_m - U_m.
NodeValues residual_vectors(const LevelState& level);

/// max over nodes of the spatial max-norm of the residual.
double compute_residual(const LevelState& level);

/// Solution of the collocation problem U = U0 + dt Q F(U) by a dense solve
/// (linear problems) or Picard iteration (nonlinear problems).
NodeValues solve_collocation_direct(const Problem& problem, const Vector& u0, double dt,
                                    double t_left, const CollocationTable& table);

}  // namespace ftpit
