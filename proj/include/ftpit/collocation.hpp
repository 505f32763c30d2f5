#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "ftpit/types.hpp"

namespace ftpit {

enum class NodeKind { GaussLobatto, GaussRadauRight };

enum class PreconditionerKind { ImplicitEuler, LU, ExplicitEuler };

NodeKind parse_node_kind(std::string_view name);
std::string to_string(NodeKind kind);
PreconditionerKind parse_preconditioner_kind(std::string_view name);
std::string to_string(PreconditionerKind kind);

/// Quadrature data for one collocation rule on the unit interval.
///
/// `Q(m, j)` integrates the j-th Lagrange polynomial from 0 to node m, so the
/// collocation problem on a step of length dt reads U = U0 + dt * Q * F(U).
/// `S` holds the node-to-node rows (S.row(0) = Q.row(0), S.row(m) =
/// Q.row(m) - Q.row(m-1)).
struct CollocationTable {
  NodeKind kind;
  int M = 0;
  Vector nodes;
  Matrix Q;
  Matrix S;
  Vector weights;
};

struct Preconditioner {
  PreconditionerKind kind;
  Matrix QDelta;
};

/// Nodes of the requested rule mapped to [0, 1], strictly increasing.
Vector generate_nodes(NodeKind kind, int M);

struct IntegrationMatrices {
  Matrix Q;
  Matrix S;
};

IntegrationMatrices build_integration_matrices(const Vector& nodes);

Preconditioner build_preconditioner(PreconditionerKind kind, const CollocationTable& table);

CollocationTable make_collocation_table(NodeKind kind, int M);

/// Row-major Lagrange interpolation matrix taking values at `from` to values at `to`.
Matrix lagrange_interpolation_matrix(const Vector& from, const Vector& to);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, Vector& x, Vector& w);

}  // namespace ftpit
