#include "ftpit/sweeper.hpp"

#include <cmath>
#include <string>

#include "ftpit/errors.hpp"

namespace ftpit {

std::shared_ptr<const LevelSpec> LevelSpec::make(ProblemPtr problem, NodeKind nodes, int M,
                                                 PreconditionerKind precond, int sweeps) {
  auto spec = std::make_shared<LevelSpec>();
  auto table = std::make_shared<const CollocationTable>(make_collocation_table(nodes, M));
  spec->implicit_precond =
      std::make_shared<const Preconditioner>(build_preconditioner(precond, *table));
  if (problem->has_explicit_part()) {
    spec->explicit_precond = std::make_shared<const Preconditioner>(
        build_preconditioner(PreconditionerKind::ExplicitEuler, *table));
  }
  spec->problem = std::move(problem);
  spec->table = std::move(table);
  spec->sweeps = sweeps;
  return spec;
}

LevelState::LevelState(LevelSpecPtr s, double dt_, double t_left_)
    : spec(std::move(s)), dt(dt_), t_left(t_left_) {
  const auto n = spec->problem->size();
  const auto M = static_cast<size_t>(spec->table->M);
  u0 = Vector::Zero(n);
  U.assign(M, Vector::Zero(n));
  F_impl.assign(M, Vector::Zero(n));
  if (spec->problem->has_explicit_part()) F_expl.assign(M, Vector::Zero(n));
  tau.assign(M, Vector::Zero(n));
}

Vector LevelState::F(int m) const {
  const auto i = static_cast<size_t>(m);
  return has_explicit() ? Vector(F_impl[i] + F_expl[i]) : F_impl[i];
}

void evaluate_rhs(LevelState& level, int m) {
  const auto i = static_cast<size_t>(m);
  const double t = level.node_time(m);
  level.problem().eval_implicit(level.U[i], t, level.F_impl[i]);
  if (level.has_explicit()) level.problem().eval_explicit(level.U[i], t, level.F_expl[i]);
}

void evaluate_rhs(LevelState& level) {
  for (int m = 0; m < level.num_nodes(); ++m) evaluate_rhs(level, m);
}

void spread_initial_value(LevelState& level, const Vector& u0) {
  level.u0 = u0;
  for (auto& u : level.U) u = u0;
  evaluate_rhs(level);
}

NodeValues integrate_rhs(const LevelState& level) {
  const int M = level.num_nodes();
  const Matrix& Q = level.table().Q;
  NodeValues out(static_cast<size_t>(M), Vector::Zero(level.u0.size()));
  for (int j = 0; j < M; ++j) {
    const Vector f = level.F(j);
    for (int m = 0; m < M; ++m) {
      if (Q(m, j) != 0.0) out[static_cast<size_t>(m)] += (level.dt * Q(m, j)) * f;
    }
  }
  return out;
}

void sweep(LevelState& level) {
  const int M = level.num_nodes();
  const double dt = level.dt;
  const Matrix& QI = level.spec->implicit_precond->QDelta;
  const bool imex = level.has_explicit();
  const Matrix* QE = imex ? &level.spec->explicit_precond->QDelta : nullptr;

  // Contributions of the previous iterate.
  NodeValues rhs = integrate_rhs(level);
  for (int m = 0; m < M; ++m) {
    auto& r = rhs[static_cast<size_t>(m)];
    r += level.u0 + level.tau[static_cast<size_t>(m)];
    for (int j = 0; j <= m; ++j) {
      const auto jj = static_cast<size_t>(j);
      if (QI(m, j) != 0.0) r -= (dt * QI(m, j)) * level.F_impl[jj];
      if (imex && (*QE)(m, j) != 0.0) r -= (dt * (*QE)(m, j)) * level.F_expl[jj];
    }
  }

  for (int m = 0; m < M; ++m) {
    const auto mm = static_cast<size_t>(m);
    Vector b = std::move(rhs[mm]);
    for (int j = 0; j < m; ++j) {
      const auto jj = static_cast<size_t>(j);
      if (QI(m, j) != 0.0) b += (dt * QI(m, j)) * level.F_impl[jj];
      if (imex && (*QE)(m, j) != 0.0) b += (dt * (*QE)(m, j)) * level.F_expl[jj];
    }
    const double a = dt * QI(m, m);
    if (a == 0.0) {
      level.U[mm] = std::move(b);
    } else {
      try {
        level.U[mm] = level.problem().implicit_solve(a, b, level.node_time(m), level.U[mm]);
      } catch (const SolverError& e) {
        throw SolverError(std::string(e.what()) + " at collocation node " + std::to_string(m));
      }
    }
    evaluate_rhs(level, m);
  }
}

NodeValues residual_vectors(const LevelState& level) {
  NodeValues r = integrate_rhs(level);
  for (size_t m = 0; m < r.size(); ++m) r[m] += level.u0 + level.tau[m] - level.U[m];
  return r;
}

double compute_residual(const LevelState& level) {
  double res = 0.0;
  for (const auto& r : residual_vectors(level)) res = std::max(res, r.lpNorm<Eigen::Infinity>());
  return res;
}

NodeValues solve_collocation_direct(const Problem& problem, const Vector& u0, double dt,
                                    double t_left, const CollocationTable& table) {
  const int M = table.M;
  const auto n = problem.size();
  auto node_time = [&](int m) { return t_left + dt * table.nodes(m); };

  if (problem.is_linear()) {
    // f(u, t) = A u + g(t) with A probed column by column at t_left
    const Vector zero = Vector::Zero(n);
    const Vector g0 = problem.eval(zero, t_left);
    Matrix A(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      A.col(i) = problem.eval(Vector::Unit(n, i), t_left) - g0;
    }
    const Eigen::Index N = n * M;
    Matrix K = Matrix::Identity(N, N);
    Vector rhs(N);
    for (int m = 0; m < M; ++m) {
      rhs.segment(m * n, n) = u0;
      for (int j = 0; j < M; ++j) {
        const double q = dt * table.Q(m, j);
        if (q == 0.0) continue;
        K.block(m * n, j * n, n, n) -= q * A;
        rhs.segment(m * n, n) += q * problem.eval(zero, node_time(j));
      }
    }
    const Vector sol = K.partialPivLu().solve(rhs);
    NodeValues U(static_cast<size_t>(M));
    for (int m = 0; m < M; ++m) U[static_cast<size_t>(m)] = sol.segment(m * n, n);
    return U;
  }

  NodeValues U(static_cast<size_t>(M), u0);
  for (int it = 0; it < 10000; ++it) {
    NodeValues next(static_cast<size_t>(M), u0);
    for (int j = 0; j < M; ++j) {
      const Vector f = problem.eval(U[static_cast<size_t>(j)], node_time(j));
      for (int m = 0; m < M; ++m) next[static_cast<size_t>(m)] += (dt * table.Q(m, j)) * f;
    }
    double change = 0.0;
    for (int m = 0; m < M; ++m) {
      change = std::max(change, (next[static_cast<size_t>(m)] - U[static_cast<size_t>(m)])
                                    .lpNorm<Eigen::Infinity>());
    }
    U = std::move(next);
    if (change < 1e-14) return U;
  }
  throw NumericalError("picard iteration for the collocation problem did not converge");
}

}  // namespace ftpit
