#include "ftpit/collocation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "ftpit/errors.hpp"

namespace ftpit {

NodeKind parse_node_kind(std::string_view name) {
  if (name == "gauss-lobatto") return NodeKind::GaussLobatto;
  if (name == "gauss-radau-right") return NodeKind::GaussRadauRight;
  throw ConfigError("unknown node kind '" + std::string(name) + "'");
}

std::string to_string(NodeKind kind) {
  return kind == NodeKind::GaussLobatto ? "gauss-lobatto" : "gauss-radau-right";
}

PreconditionerKind parse_preconditioner_kind(std::string_view name) {
  if (name == "implicit-euler") return PreconditionerKind::ImplicitEuler;
  if (name == "lu") return PreconditionerKind::LU;
  if (name == "explicit-euler") return PreconditionerKind::ExplicitEuler;
  throw ConfigError("unknown preconditioner '" + std::string(name) + "'");
}

std::string to_string(PreconditionerKind kind) {
  switch (kind) {
    case PreconditionerKind::ImplicitEuler: return "implicit-euler";
    case PreconditionerKind::LU: return "lu";
    case PreconditionerKind::ExplicitEuler: return "explicit-euler";
  }
  return "?";
}

namespace {

// Eigenvalues of the symmetric Jacobi matrix for the weight (1-x)^a (1+x)^b.
// Returns the n Gauss-Jacobi nodes in ascending order; `first_components`
// receives the squared first eigenvector entries (scaled weights).
Vector gauss_jacobi_nodes(int n, double a, double b, Vector* first_components = nullptr) {
  if (n == 0) return Vector(0);
  Matrix J = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    J(k, k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (k + 1 < n) {
      const double m = k + 1.0;
      const double sm = 2.0 * m + a + b;
      const double beta = 4.0 * m * (m + a) * (m + b) * (m + a + b) /
                          (sm * sm * (sm + 1.0) * (sm - 1.0));
      J(k, k + 1) = J(k + 1, k) = std::sqrt(beta);
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(J);
  if (first_components) {
    *first_components = eig.eigenvectors().row(0).transpose().array().square();
  }
  return eig.eigenvalues();
}

struct Legendre {
  double p, dp, d2p;
};

// P_n and its first two derivatives via the three-term recurrences.
Legendre legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  double d0 = 0.0, d1 = 1.0;
  double s0 = 0.0, s1 = 0.0;
  if (n == 0) return {1.0, 0.0, 0.0};
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
    const double d2 = d0 + (2.0 * k + 1.0) * p1;
    const double s2 = s0 + (2.0 * k + 1.0) * d1;
    p0 = p1; p1 = p2;
    d0 = d1; d1 = d2;
    s0 = s1; s1 = s2;
  }
  return {p1, d1, s1};
}

template <class Fn>
double newton_polish(double x, Fn&& value_and_slope) {
  for (int it = 0; it < 8; ++it) {
    const auto [f, df] = value_and_slope(x);
    if (df == 0.0) break;
    const double step = f / df;
    x -= step;
    if (std::abs(step) < 1e-17) break;
  }
  return x;
}

}  // namespace

void gauss_legendre(int n, Vector& x, Vector& w) {
  Vector v;
  x = gauss_jacobi_nodes(n, 0.0, 0.0, &v);
  w = 2.0 * v;
}

Vector generate_nodes(NodeKind kind, int M) {
  Vector x(M);
  if (kind == NodeKind::GaussLobatto) {
    if (M < 2) throw ConfigError("gauss-lobatto needs at least 2 nodes");
    const Vector inner = gauss_jacobi_nodes(M - 2, 1.0, 1.0);
    x(0) = -1.0;
    x(M - 1) = 1.0;
    for (int i = 0; i < M - 2; ++i) {
      // interior Lobatto nodes are the roots of P'_{M-1}
      x(i + 1) = newton_polish(inner(i), [M](double s) {
        const auto l = legendre(M - 1, s);
        return std::pair{l.dp, l.d2p};
      });
    }
  } else {
    if (M < 1) throw ConfigError("gauss-radau-right needs at least 1 node");
    const Vector inner = gauss_jacobi_nodes(M - 1, 1.0, 0.0);
    x(M - 1) = 1.0;
    for (int i = 0; i < M - 1; ++i) {
      // roots of P_M - P_{M-1} other than x = 1
      x(i) = newton_polish(inner(i), [M](double s) {
        const auto a = legendre(M, s);
        const auto b = legendre(M - 1, s);
        return std::pair{a.p - b.p, a.dp - b.dp};
      });
    }
  }
  Vector tau = 0.5 * (x.array() + 1.0);
  if (kind == NodeKind::GaussLobatto) {
    tau(0) = 0.0;
    // exact symmetry about 1/2
    for (int i = 0; i < M / 2; ++i) {
      const double h = 0.5 * (tau(i) + (1.0 - tau(M - 1 - i)));
      tau(i) = h;
      tau(M - 1 - i) = 1.0 - h;
    }
    if (M % 2 == 1) tau(M / 2) = 0.5;
  }
  tau(M - 1) = 1.0;
  return tau;
}

Matrix lagrange_interpolation_matrix(const Vector& from, const Vector& to) {
  const auto n = from.size();
  Matrix L(to.size(), n);
  for (Eigen::Index i = 0; i < to.size(); ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double l = 1.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k != j) l *= (to(i) - from(k)) / (from(j) - from(k));
      }
      L(i, j) = l;
    }
  }
  return L;
}

IntegrationMatrices build_integration_matrices(const Vector& nodes) {
  const int M = static_cast<int>(nodes.size());
  if (M < 1) throw ConfigError("empty node set");
  for (int i = 1; i < M; ++i) {
    if (!(nodes(i) > nodes(i - 1))) {
      throw ConfigError("collocation nodes must be distinct and increasing");
    }
  }
  Vector gx, gw;
  gauss_legendre(M + 2, gx, gw);
  Matrix Q = Matrix::Zero(M, M);
  for (int m = 0; m < M; ++m) {
    const double upper = nodes(m);
    if (upper == 0.0) continue;
    const Vector s = 0.5 * upper * (gx.array() + 1.0);
    const Matrix Ls = lagrange_interpolation_matrix(nodes, s);
    Q.row(m) = 0.5 * upper * (gw.transpose() * Ls);
  }
  Matrix S = Q;
  for (int m = M - 1; m > 0; --m) S.row(m) = Q.row(m) - Q.row(m - 1);
  return {std::move(Q), std::move(S)};
}

namespace {

// Doolittle factorization A = L U without pivoting; returns U.
Matrix lu_upper_no_pivot(const Matrix& A) {
  const auto n = A.rows();
  Matrix U = A;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double pivot = U(k, k);
    if (std::abs(pivot) < 1e-14) {
      throw NumericalError("singular leading minor in LU factorization of Q^T");
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double l = U(i, k) / pivot;
      U.row(i).tail(n - k) -= l * U.row(k).tail(n - k);
      U(i, k) = 0.0;
    }
  }
  return U;
}

}  // namespace

Preconditioner build_preconditioner(PreconditionerKind kind, const CollocationTable& table) {
  const int M = table.M;
  const Vector& tau = table.nodes;
  Matrix QD = Matrix::Zero(M, M);
  switch (kind) {
    case PreconditionerKind::ImplicitEuler:
      for (int m = 0; m < M; ++m) {
        for (int j = 0; j <= m; ++j) QD(m, j) = tau(j) - (j > 0 ? tau(j - 1) : 0.0);
      }
      break;
    case PreconditionerKind::ExplicitEuler:
      for (int m = 1; m < M; ++m) {
        for (int j = 0; j < m; ++j) QD(m, j) = tau(j + 1) - tau(j);
      }
      break;
    case PreconditionerKind::LU: {
      // A leading node at tau = 0 contributes a zero row to Q; factor the rest.
      const int skip = (tau(0) == 0.0) ? 1 : 0;
      const int n = M - skip;
      const Matrix Qt = table.Q.bottomRightCorner(n, n).transpose();
      QD.bottomRightCorner(n, n) = lu_upper_no_pivot(Qt).transpose();
      break;
    }
  }
  return {kind, std::move(QD)};
}

CollocationTable make_collocation_table(NodeKind kind, int M) {
  CollocationTable t;
  t.kind = kind;
  t.M = M;
  t.nodes = generate_nodes(kind, M);
  auto [Q, S] = build_integration_matrices(t.nodes);
  t.Q = std::move(Q);
  t.S = std::move(S);
  t.weights = t.Q.row(M - 1).transpose();
  return t;
}

}  // namespace ftpit
