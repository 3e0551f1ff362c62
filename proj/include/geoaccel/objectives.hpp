#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "geoaccel/linalg.hpp"

namespace geoaccel {

// f(x) = 1/2 (x - x*)^T H (x - x*)
struct QuadraticSpec {
  Matrix H;
  Vector x_star;
};

// f(x) = 1/4 ||A x||^4
struct QuarticSpec {
  Matrix A;
};

// Options for the damped Newton solve of grad f(x) = g used to evaluate the
// conjugate gradient of non-quadratic objectives.
struct InverseGradientOptions {
  double abs_tolerance = 1e-12;
  int max_iterations = 100;
  int max_halvings = 60;
};

// Evaluator interface behind Objective. Implementations are immutable.
class ObjectiveModel {
 public:
  virtual ~ObjectiveModel() = default;

  virtual std::string kind() const = 0;
  virtual int dimension() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual Matrix hessian(const Vector& x) const = 0;
  // grad f*(g); `start` is an optional warm start for iterative models.
  virtual Vector conjugate_gradient(const Vector& g, const Vector* start) const = 0;

  virtual double mu() const = 0;
  virtual double lipschitz() const = 0;
  virtual std::optional<Vector> minimizer() const { return std::nullopt; }
  virtual const QuadraticSpec* quadratic() const { return nullptr; }
  virtual bool geodesic_demo_only() const { return false; }
  // Throws DomainError when x lies where the Hessian is singular.
  virtual void check_domain(const Vector& /*x*/) const {}
};

// Value-semantic handle over an immutable ObjectiveModel. Copies share the
// model; all evaluators are pure and safe to call concurrently.
class Objective {
 public:
  explicit Objective(std::shared_ptr<const ObjectiveModel> model);

  std::string kind() const { return model_->kind(); }
  int dimension() const { return model_->dimension(); }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  Matrix hessian(const Vector& x) const;
  Vector conjugate_gradient(const Vector& g) const;
  Vector conjugate_gradient(const Vector& g, const Vector& start) const;

  double mu() const { return model_->mu(); }
  double lipschitz() const { return model_->lipschitz(); }
  std::optional<Vector> minimizer() const { return model_->minimizer(); }
  // Non-null for quadratics; gives exact-solve paths access to H and x*.
  const QuadraticSpec* quadratic() const { return model_->quadratic(); }
  bool geodesic_demo_only() const { return model_->geodesic_demo_only(); }
  void check_domain(const Vector& x) const { model_->check_domain(x); }

 private:
  void check_size(const Vector& x, const char* what) const;

  std::shared_ptr<const ObjectiveModel> model_;
};

Objective make_quadratic(QuadraticSpec spec);
Objective make_quartic(QuarticSpec spec);

// 1/2 ||x||^2 in dimension n.
Objective make_euclidean(int n);

// The convex conjugate f* as an objective in its own right: gradient grad f*,
// Hessian (hess f(grad f*(g)))^{-1}, conjugate gradient grad f. Used as the
// Bregman generator phi = f*.
Objective make_conjugate(const Objective& f);

// x -> f(x) - <c, x>.
Objective make_tilted(const Objective& f, Vector c);

// Extreme eigenvalues (mu, L) of a quadratic's Hessian. Throws
// UnsupportedError for non-quadratic objectives.
std::pair<double, double> strong_convexity_bounds(const Objective& obj);

// Damped Newton on r(x) = grad(x) - g, minimising psi(x) = value(x) - <g, x>
// with halving backtracking. Throws SolverError on non-convergence.
Vector solve_inverse_gradient(const ObjectiveModel& model, const Vector& g, Vector start,
                              const InverseGradientOptions& options = {});

// {"kind":"quadratic","H":[[...]],"x_star":[...]} or {"kind":"quartic","A":[[...]]}.
Objective objective_from_json(const nlohmann::json& spec);

}  // namespace geoaccel
