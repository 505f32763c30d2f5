#include "ftpit/problems.hpp"

#include <cmath>
#include <numbers>

#include "ftpit/banded.hpp"
#include "ftpit/errors.hpp"

namespace ftpit {

using std::numbers::pi;

Grid1D Grid1D::make(Boundary boundary, int N, double x_left, double x_right) {
  Grid1D g;
  g.N = N;
  g.boundary = boundary;
  g.x_left = x_left;
  g.x_right = x_right;
  const double L = x_right - x_left;
  switch (boundary) {
    case Boundary::Dirichlet: g.h = L / (N + 1); break;
    case Boundary::Periodic: g.h = L / N; break;
    case Boundary::Neumann:
      if (N < 2) throw ConfigError("neumann grid needs at least 2 points");
      g.h = L / (N - 1);
      break;
    case Boundary::None: g.h = 1.0; break;
  }
  return g;
}

double Grid1D::x(int i) const {
  return boundary == Boundary::Dirichlet ? x_left + (i + 1) * h : x_left + i * h;
}

Vector Grid1D::points() const {
  Vector p(N);
  for (int i = 0; i < N; ++i) p(i) = x(i);
  return p;
}

void Problem::eval_explicit(const Vector& /*u*/, double /*t*/, Vector& out) const {
  out.setZero(size());
}

Vector Problem::eval(const Vector& u, double t) const {
  Vector fi(size()), fe(size());
  eval_implicit(u, t, fi);
  eval_explicit(u, t, fe);
  return fi + fe;
}

std::optional<Vector> Problem::exact_solution(double /*t*/) const { return std::nullopt; }

// ---------------------------------------------------------------- heat

HeatProblem::HeatProblem(double nu, int N)
    : Problem(Grid1D::make(Boundary::Dirichlet, N, 0.0, 1.0), 1), nu_(nu) {
  if (N < 1) throw ConfigError("heat grid needs at least one interior point");
}

void HeatProblem::eval_implicit(const Vector& u, double /*t*/, Vector& out) const {
  const int N = grid().N;
  const double s = nu_ / (grid().h * grid().h);
  out.resize(N);
  for (int i = 0; i < N; ++i) {
    const double left = i > 0 ? u(i - 1) : 0.0;
    const double right = i + 1 < N ? u(i + 1) : 0.0;
    out(i) = s * (left - 2.0 * u(i) + right);
  }
}

void HeatProblem::eval_explicit(const Vector& /*u*/, double t, Vector& out) const {
  const int N = grid().N;
  out.resize(N);
  const double g = -(std::sin(t) - nu_ * pi * pi * std::cos(t));
  for (int i = 0; i < N; ++i) out(i) = std::sin(pi * grid().x(i)) * g;
}

Vector HeatProblem::implicit_solve(double a, const Vector& b, double /*t*/,
                                   const Vector& /*guess*/) const {
  const int N = grid().N;
  const double s = a * nu_ / (grid().h * grid().h);
  BandedMatrix A(N, 1, 1);
  for (int i = 0; i < N; ++i) {
    A(i, i) = 1.0 + 2.0 * s;
    if (i > 0) A(i, i - 1) = -s;
    if (i + 1 < N) A(i, i + 1) = -s;
  }
  return BandedLU(A).solve(b);
}

Vector HeatProblem::initial_condition(double t0) const { return *exact_solution(t0); }

std::optional<Vector> HeatProblem::exact_solution(double t) const {
  const Vector x = grid().points();
  return Vector((pi * x.array()).sin() * std::cos(t));
}

ProblemPtr HeatProblem::with_resolution(int N) const {
  return std::make_shared<HeatProblem>(nu_, N);
}

// ----------------------------------------------------------- advection

namespace {

// centered first-derivative weights for offsets 1..w (antisymmetric)
std::vector<double> centered_weights(int order) {
  if (order == 2) return {0.5};
  if (order == 4) return {2.0 / 3.0, -1.0 / 12.0};
  throw ConfigError("advection stencil order must be 2 or 4");
}

}  // namespace

AdvectionProblem::AdvectionProblem(double c, int N, int order)
    : Problem(Grid1D::make(Boundary::Periodic, N, 0.0, 1.0), 1), c_(c), order_(order) {
  centered_weights(order);
  if (N <= order) throw ConfigError("advection grid too small for the stencil");
}

void AdvectionProblem::eval_implicit(const Vector& u, double /*t*/, Vector& out) const {
  const int N = grid().N;
  const auto w = centered_weights(order_);
  const double s = c_ / grid().h;
  out.resize(N);
  for (int i = 0; i < N; ++i) {
    double d = 0.0;
    for (size_t k = 0; k < w.size(); ++k) {
      const int o = static_cast<int>(k) + 1;
      d += w[k] * (u((i + o) % N) - u((i - o + N) % N));
    }
    out(i) = s * d;
  }
}

Vector AdvectionProblem::implicit_solve(double a, const Vector& b, double /*t*/,
                                        const Vector& /*guess*/) const {
  const int N = grid().N;
  const auto w = centered_weights(order_);
  const int hw = static_cast<int>(w.size());
  const double s = a * c_ / grid().h;
  CyclicBandedMatrix A(N, hw);
  for (int i = 0; i < N; ++i) {
    A.at(i, 0) = 1.0;
    for (int k = 0; k < hw; ++k) {
      A.at(i, k + 1) = -s * w[static_cast<size_t>(k)];
      A.at(i, -(k + 1)) = s * w[static_cast<size_t>(k)];
    }
  }
  return CyclicBandedLU(A).solve(b);
}

Vector AdvectionProblem::initial_condition(double t0) const { return *exact_solution(t0); }

std::optional<Vector> AdvectionProblem::exact_solution(double t) const {
  const Vector x = grid().points();
  return Vector((2.0 * pi * (x.array() + c_ * t)).cos());
}

ProblemPtr AdvectionProblem::with_resolution(int N) const {
  return std::make_shared<AdvectionProblem>(c_, N, order_);
}

// ----------------------------------------------------------- gray-scott

DecayVariant parse_decay_variant(std::string_view name) {
  if (name == "as-printed") return DecayVariant::AsPrinted;
  if (name == "standard") return DecayVariant::Standard;
  throw ConfigError("unknown gray-scott decay variant '" + std::string(name) + "'");
}

std::string to_string(DecayVariant variant) {
  return variant == DecayVariant::AsPrinted ? "as-printed" : "standard";
}

GrayScottProblem::GrayScottProblem(GrayScottParams params, int N)
    : Problem(Grid1D::make(Boundary::Neumann, N, 0.0, params.L), 2), params_(params) {
  if (N < 3) throw ConfigError("gray-scott grid needs at least 3 points");
}

namespace {

// Neumann Laplacian with mirrored ghost points, one component of an
// interleaved two-component state.
inline double neumann_laplace(const Vector& s, int i, int c, int N, double inv_h2) {
  const double mid = s(2 * i + c);
  const double left = i > 0 ? s(2 * (i - 1) + c) : s(2 * (i + 1) + c);
  const double right = i + 1 < N ? s(2 * (i + 1) + c) : s(2 * (i - 1) + c);
  return (left - 2.0 * mid + right) * inv_h2;
}

}  // namespace

void GrayScottProblem::eval_implicit(const Vector& s, double /*t*/, Vector& out) const {
  const int N = grid().N;
  const double inv_h2 = 1.0 / (grid().h * grid().h);
  const auto& p = params_;
  out.resize(2 * N);
  for (int i = 0; i < N; ++i) {
    const double u = s(2 * i);
    const double v = s(2 * i + 1);
    const double uvv = u * v * v;
    const double decay = p.decay == DecayVariant::AsPrinted ? u : v;
    out(2 * i) = neumann_laplace(s, i, 0, N, inv_h2) - uvv + p.A * (1.0 - u);
    out(2 * i + 1) = p.D * neumann_laplace(s, i, 1, N, inv_h2) + uvv - p.B * decay;
  }
}

namespace {

// Jacobian of the Gray-Scott right-hand side in interleaved banded form
// (two sub- and super-diagonals), scaled as I - a J.
BandedMatrix shifted_jacobian(const Vector& s, double a, int N, double h,
                              const GrayScottParams& p) {
  BandedMatrix J(2 * N, 2, 2);
  const double inv_h2 = 1.0 / (h * h);
  const double Dc[2] = {1.0, p.D};
  for (int i = 0; i < N; ++i) {
    const double u = s(2 * i);
    const double v = s(2 * i + 1);
    for (int c = 0; c < 2; ++c) {
      const int row = 2 * i + c;
      const double d = Dc[c] * inv_h2;
      J(row, row) += -2.0 * d;
      const int left = i > 0 ? i - 1 : i + 1;
      const int right = i + 1 < N ? i + 1 : i - 1;
      J(row, 2 * left + c) += d;
      J(row, 2 * right + c) += d;
    }
    J(2 * i, 2 * i) += -v * v - p.A;
    J(2 * i, 2 * i + 1) += -2.0 * u * v;
    J(2 * i + 1, 2 * i) += v * v - (p.decay == DecayVariant::AsPrinted ? p.B : 0.0);
    J(2 * i + 1, 2 * i + 1) += 2.0 * u * v - (p.decay == DecayVariant::Standard ? p.B : 0.0);
  }
  const auto n = 2 * N;
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = std::max<Eigen::Index>(0, r - 2); c <= std::min<Eigen::Index>(n - 1, r + 2); ++c) {
      J(r, c) = (r == c ? 1.0 : 0.0) - a * J(r, c);
    }
  }
  return J;
}

}  // namespace

Matrix GrayScottProblem::jacobian_dense(const Vector& s) const {
  // I - a J at a = -1 gives I + J
  Matrix M = shifted_jacobian(s, -1.0, grid().N, grid().h, params_).to_dense();
  M -= Matrix::Identity(M.rows(), M.cols());
  return M;
}

Vector GrayScottProblem::implicit_solve(double a, const Vector& b, double t,
                                        const Vector& guess) const {
  if (a == 0.0) return b;
  const int N = grid().N;
  Vector w = guess.size() == b.size() ? guess : b;
  Vector f(2 * N);
  auto residual = [&](const Vector& x) {
    eval_implicit(x, t, f);
    return Vector(x - a * f - b);
  };
  Vector r = residual(w);
  const double r0 = r.lpNorm<Eigen::Infinity>();
  double rn = r0;
  for (int it = 0; it < params_.newton_max_iter; ++it) {
    if (rn <= params_.newton_atol || rn <= params_.newton_rtol * r0) return w;
    const BandedMatrix J = shifted_jacobian(w, a, N, grid().h, params_);
    w -= BandedLU(J).solve(r);
    r = residual(w);
    rn = r.lpNorm<Eigen::Infinity>();
  }
  if (rn <= params_.newton_atol || rn <= params_.newton_rtol * r0) return w;
  throw SolverError("gray-scott newton did not converge (residual " + std::to_string(rn) + ")");
}

Vector GrayScottProblem::initial_condition(double /*t0*/) const {
  const int N = grid().N;
  Vector s(2 * N);
  for (int i = 0; i < N; ++i) {
    const double p = std::pow(std::sin(pi * grid().x(i) / params_.L), 100);
    s(2 * i) = 1.0 - 0.5 * p;
    s(2 * i + 1) = 0.25 * p;
  }
  return s;
}

ProblemPtr GrayScottProblem::with_resolution(int N) const {
  return std::make_shared<GrayScottProblem>(params_, N);
}

// ------------------------------------------------------------ dahlquist

DahlquistProblem::DahlquistProblem(double lambda, double u0)
    : Problem(Grid1D{}, 1), lambda_(lambda), u0_(u0) {}

void DahlquistProblem::eval_implicit(const Vector& u, double /*t*/, Vector& out) const {
  out = lambda_ * u;
}

Vector DahlquistProblem::implicit_solve(double a, const Vector& b, double /*t*/,
                                        const Vector& /*guess*/) const {
  const double d = 1.0 - a * lambda_;
  if (d == 0.0) throw SolverError("dahlquist implicit solve is singular (a * lambda = 1)");
  return b / d;
}

Vector DahlquistProblem::initial_condition(double t0) const { return *exact_solution(t0); }

std::optional<Vector> DahlquistProblem::exact_solution(double t) const {
  return Vector::Constant(1, u0_ * std::exp(lambda_ * t));
}

ProblemPtr DahlquistProblem::with_resolution(int /*N*/) const {
  return std::make_shared<DahlquistProblem>(lambda_, u0_);
}

}  // namespace ftpit
