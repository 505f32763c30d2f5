#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "ftpit/types.hpp"

namespace ftpit {

enum class Boundary { Dirichlet, Periodic, Neumann, None };

/// Uniform 1D grid. Dirichlet grids store interior points only, periodic
/// grids omit the duplicated right edge, Neumann grids include both edges.
struct Grid1D {
  int N = 1;
  double h = 1.0;
  Boundary boundary = Boundary::None;
  double x_left = 0.0;
  double x_right = 1.0;

  static Grid1D make(Boundary boundary, int N, double x_left, double x_right);
  double x(int i) const;
  Vector points() const;
};

/// An initial-value problem u' = f_I(u, t) + f_E(u, t) in method-of-lines form.
///
/// The implicit part is handled by `implicit_solve`, which returns u with
/// u - a * f_I(u, t) = b. Multi-component states are stored interleaved
/// (component c of grid point i at index i * components() + c).
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  const Grid1D& grid() const { return grid_; }
  int components() const { return components_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(grid_.N) * components_; }

  virtual bool has_explicit_part() const { return false; }
  virtual bool is_linear() const = 0;

  virtual void eval_implicit(const Vector& u, double t, Vector& out) const = 0;
  virtual void eval_explicit(const Vector& u, double t, Vector& out) const;
  Vector eval(const Vector& u, double t) const;

  virtual Vector implicit_solve(double a, const Vector& b, double t, const Vector& guess) const = 0;

  virtual Vector initial_condition(double t0) const = 0;
  virtual std::optional<Vector> exact_solution(double t) const;

  /// Same problem on a grid with N points (used to build coarse levels).
  virtual std::shared_ptr<const Problem> with_resolution(int N) const = 0;

 protected:
  Problem(Grid1D grid, int components) : grid_(grid), components_(components) {}

 private:
  Grid1D grid_;
  int components_;
};

using ProblemPtr = std::shared_ptr<const Problem>;

/// u_t = nu u_xx + f(x, t) on [0, 1], homogeneous Dirichlet, with the forcing
/// chosen so that u = sin(pi x) cos(t). Diffusion is implicit, forcing explicit.
class HeatProblem final : public Problem {
 public:
  HeatProblem(double nu, int N);

  std::string name() const override { return "heat"; }
  bool has_explicit_part() const override { return true; }
  bool is_linear() const override { return true; }
  double nu() const { return nu_; }

  void eval_implicit(const Vector& u, double t, Vector& out) const override;
  void eval_explicit(const Vector& u, double t, Vector& out) const override;
  Vector implicit_solve(double a, const Vector& b, double t, const Vector& guess) const override;
  Vector initial_condition(double t0) const override;
  std::optional<Vector> exact_solution(double t) const override;
  ProblemPtr with_resolution(int N) const override;

 private:
  double nu_;
};

/// u_t = c u_x on the periodic unit interval with centered differences.
class AdvectionProblem final : public Problem {
 public:
  AdvectionProblem(double c, int N, int order = 2);

  std::string name() const override { return "advection"; }
  bool is_linear() const override { return true; }
  int order() const { return order_; }

  void eval_implicit(const Vector& u, double t, Vector& out) const override;
  Vector implicit_solve(double a, const Vector& b, double t, const Vector& guess) const override;
  Vector initial_condition(double t0) const override;
  std::optional<Vector> exact_solution(double t) const override;
  ProblemPtr with_resolution(int N) const override;

 private:
  double c_;
  int order_;
};

enum class DecayVariant { AsPrinted, Standard };

DecayVariant parse_decay_variant(std::string_view name);
std::string to_string(DecayVariant variant);

struct GrayScottParams {
  double A = 0.09;
  double B = 0.086;
  double D = 0.01;
  double L = 100.0;
  DecayVariant decay = DecayVariant::AsPrinted;
  double newton_atol = 1e-9;
  double newton_rtol = 1e-8;
  int newton_max_iter = 50;
};

/// Two-component Gray-Scott reaction-diffusion with homogeneous Neumann
/// boundaries, solved fully implicitly by Newton's method.
///
///   u_t = u_xx - u v^2 + A (1 - u)
///   v_t = D v_xx + u v^2 - B w,   w = u (as printed) or v (standard model)
class GrayScottProblem final : public Problem {
 public:
  GrayScottProblem(GrayScottParams params, int N);

  std::string name() const override { return "grayscott"; }
  bool is_linear() const override { return false; }
  const GrayScottParams& params() const { return params_; }

  void eval_implicit(const Vector& u, double t, Vector& out) const override;
  Vector implicit_solve(double a, const Vector& b, double t, const Vector& guess) const override;
  Vector initial_condition(double t0) const override;
  ProblemPtr with_resolution(int N) const override;

  /// Jacobian of the right-hand side as a dense matrix (testing aid).
  Matrix jacobian_dense(const Vector& u) const;

 private:
  GrayScottParams params_;
};

/// Scalar u' = lambda u.
class DahlquistProblem final : public Problem {
 public:
  explicit DahlquistProblem(double lambda, double u0 = 1.0);

  std::string name() const override { return "dahlquist"; }
  bool is_linear() const override { return true; }
  double lambda() const { return lambda_; }

  void eval_implicit(const Vector& u, double t, Vector& out) const override;
  Vector implicit_solve(double a, const Vector& b, double t, const Vector& guess) const override;
  Vector initial_condition(double t0) const override;
  std::optional<Vector> exact_solution(double t) const override;
  ProblemPtr with_resolution(int N) const override;

 private:
  double lambda_;
  double u0_;
};

}  // namespace ftpit
