#include "geoaccel/objectives.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "geoaccel/errors.hpp"
#include "geoaccel/io.hpp"

namespace geoaccel {

Objective::Objective(std::shared_ptr<const ObjectiveModel> model) : model_(std::move(model)) {
  if (!model_) throw ConstructionError("objective model is null");
}

void Objective::check_size(const Vector& x, const char* what) const {
  if (x.size() != model_->dimension()) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(model_->dimension()) + ", got " +
                                std::to_string(x.size()));
  }
}

double Objective::value(const Vector& x) const {
  check_size(x, "value");
  return model_->value(x);
}

Vector Objective::gradient(const Vector& x) const {
  check_size(x, "gradient");
  return model_->gradient(x);
}

Matrix Objective::hessian(const Vector& x) const {
  check_size(x, "hessian");
  return model_->hessian(x);
}

Vector Objective::conjugate_gradient(const Vector& g) const {
  check_size(g, "conjugate_gradient");
  return model_->conjugate_gradient(g, nullptr);
}

Vector Objective::conjugate_gradient(const Vector& g, const Vector& start) const {
  check_size(g, "conjugate_gradient");
  check_size(start, "conjugate_gradient start");
  return model_->conjugate_gradient(g, &start);
}

Vector solve_inverse_gradient(const ObjectiveModel& model, const Vector& g, Vector start,
                              const InverseGradientOptions& options) {
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  Vector x = std::move(start);
  Vector r = model.gradient(x) - g;
  double rn = r.norm();
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    // Rounding floor: below this the residual is noise in grad(x) - g.
    const double floor = 64.0 * kEps * (g.norm() + (r + g).norm());
    if (rn <= options.abs_tolerance || rn <= floor) return x;

    const Eigen::LDLT<Matrix> ldlt(model.hessian(x));
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw SolverError("inverse-gradient Newton: Hessian not positive definite", rn, it);
    }
    const Vector dx = ldlt.solve(-r);
    const double psi0 = model.value(x) - g.dot(x);
    const double slope = r.dot(dx);

    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, step *= 0.5) {
      const Vector xn = x + step * dx;
      const Vector rnew = model.gradient(xn) - g;
      const double psi = model.value(xn) - g.dot(xn);
      if (psi <= psi0 + 1e-4 * step * slope || rnew.norm() < rn) {
        x = xn;
        r = rnew;
        rn = rnew.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) throw SolverError("inverse-gradient Newton: line search failed", rn, it);
  }
  if (rn <= options.abs_tolerance) return x;
  throw SolverError("inverse-gradient Newton did not converge", rn, it);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class QuadraticModel final : public ObjectiveModel {
 public:
  explicit QuadraticModel(QuadraticSpec spec) : spec_(std::move(spec)) {
    const Matrix& H = spec_.H;
    if (H.rows() == 0 || H.rows() != H.cols()) {
      throw ConstructionError("quadratic: H must be a non-empty square matrix");
    }
    if (spec_.x_star.size() != H.rows()) {
      throw ConstructionError("quadratic: x_star dimension does not match H");
    }
    if (!H.allFinite() || !spec_.x_star.allFinite()) {
      throw ConstructionError("quadratic: non-finite entries");
    }
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw ConstructionError("quadratic: H is not symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
    mu_ = eig.eigenvalues().minCoeff();
    lipschitz_ = eig.eigenvalues().maxCoeff();
    if (!(mu_ > 0.0)) throw ConstructionError("quadratic: H is not positive definite");
    llt_.compute(H);
    if (llt_.info() != Eigen::Success) {
      throw ConstructionError("quadratic: H is not positive definite");
    }
  }

  std::string kind() const override { return "quadratic"; }
  int dimension() const override { return static_cast<int>(spec_.H.rows()); }

  double value(const Vector& x) const override {
    const Vector d = x - spec_.x_star;
    return 0.5 * d.dot(spec_.H * d);
  }
  Vector gradient(const Vector& x) const override { return spec_.H * (x - spec_.x_star); }
  Matrix hessian(const Vector&) const override { return spec_.H; }
  Vector conjugate_gradient(const Vector& g, const Vector*) const override {
    return spec_.x_star + llt_.solve(g);
  }

  double mu() const override { return mu_; }
  double lipschitz() const override { return lipschitz_; }
  std::optional<Vector> minimizer() const override { return spec_.x_star; }
  const QuadraticSpec* quadratic() const override { return &spec_; }

 private:
  QuadraticSpec spec_;
  Eigen::LLT<Matrix> llt_;
  double mu_ = 0.0;
  double lipschitz_ = 0.0;
};

class QuarticModel final : public ObjectiveModel {
 public:
  // Below this ||Ax|| the Hessian is numerically singular.
  static constexpr double kOriginRadius = 1e-6;

  explicit QuarticModel(QuarticSpec spec) : A_(std::move(spec.A)) {
    if (A_.rows() == 0 || A_.rows() != A_.cols()) {
      throw ConstructionError("quartic: A must be a non-empty square matrix");
    }
    if (!A_.allFinite()) throw ConstructionError("quartic: non-finite entries");
    lu_.compute(A_.transpose());
    if (!lu_.isInvertible()) throw ConstructionError("quartic: A is not invertible");
    M_ = A_.transpose() * A_;
  }

  std::string kind() const override { return "quartic"; }
  int dimension() const override { return static_cast<int>(A_.rows()); }

  double value(const Vector& x) const override {
    const double s = (A_ * x).squaredNorm();
    return 0.25 * s * s;
  }
  Vector gradient(const Vector& x) const override {
    return (A_ * x).squaredNorm() * (M_ * x);
  }
  Matrix hessian(const Vector& x) const override {
    const Vector Mx = M_ * x;
    return (A_ * x).squaredNorm() * M_ + 2.0 * Mx * Mx.transpose();
  }

  Vector conjugate_gradient(const Vector& g, const Vector* start) const override {
    // At the solution ||Ax|| = ||A^{-T} g||^{1/3}; reject before iterating.
    const double radius = std::cbrt(lu_.solve(g).norm());
    if (!(radius >= kOriginRadius)) {
      throw DomainError("quartic: conjugate gradient queried too close to the origin (||Ax|| = " +
                        std::to_string(radius) + ")");
    }
    Vector x0 = start != nullptr ? *start : Vector(M_.ldlt().solve(g));
    if ((A_ * x0).norm() < kOriginRadius) x0 = M_.ldlt().solve(g);
    return solve_inverse_gradient(*this, g, std::move(x0));
  }

  double mu() const override { return 0.0; }
  double lipschitz() const override { return kInf; }
  std::optional<Vector> minimizer() const override { return Vector::Zero(A_.rows()); }
  bool geodesic_demo_only() const override { return true; }

  void check_domain(const Vector& x) const override {
    if ((A_ * x).norm() < kOriginRadius) {
      throw DomainError("quartic: point within the singular region ||Ax|| < 1e-6");
    }
  }

 private:
  Matrix A_;
  Matrix M_;
  Eigen::FullPivLU<Matrix> lu_;  // of A^T
};

class ConjugateModel final : public ObjectiveModel {
 public:
  explicit ConjugateModel(Objective f) : f_(std::move(f)) {}

  std::string kind() const override { return "conjugate(" + f_.kind() + ")"; }
  int dimension() const override { return f_.dimension(); }

  double value(const Vector& g) const override {
    const Vector x = f_.conjugate_gradient(g);
    return g.dot(x) - f_.value(x);
  }
  Vector gradient(const Vector& g) const override { return f_.conjugate_gradient(g); }
  Matrix hessian(const Vector& g) const override {
    const Vector x = f_.conjugate_gradient(g);
    f_.check_domain(x);
    const Matrix h = f_.hessian(x);
    return h.ldlt().solve(Matrix::Identity(h.rows(), h.cols()));
  }
  Vector conjugate_gradient(const Vector& x, const Vector*) const override {
    return f_.gradient(x);
  }

  double mu() const override {
    const double L = f_.lipschitz();
    return std::isfinite(L) ? 1.0 / L : 0.0;
  }
  double lipschitz() const override { return f_.mu() > 0.0 ? 1.0 / f_.mu() : kInf; }
  std::optional<Vector> minimizer() const override {
    return Vector(f_.gradient(Vector::Zero(f_.dimension())));
  }
  bool geodesic_demo_only() const override { return f_.geodesic_demo_only(); }
  void check_domain(const Vector& g) const override {
    f_.check_domain(f_.conjugate_gradient(g));
  }

 private:
  Objective f_;
};

class TiltedModel final : public ObjectiveModel {
 public:
  TiltedModel(Objective f, Vector c) : f_(std::move(f)), c_(std::move(c)) {
    if (c_.size() != f_.dimension()) throw ConstructionError("tilt: dimension mismatch");
  }

  std::string kind() const override { return "tilted(" + f_.kind() + ")"; }
  int dimension() const override { return f_.dimension(); }
  double value(const Vector& x) const override { return f_.value(x) - c_.dot(x); }
  Vector gradient(const Vector& x) const override { return f_.gradient(x) - c_; }
  Matrix hessian(const Vector& x) const override { return f_.hessian(x); }
  Vector conjugate_gradient(const Vector& g, const Vector* start) const override {
    return start != nullptr ? f_.conjugate_gradient(g + c_, *start)
                            : f_.conjugate_gradient(g + c_);
  }
  double mu() const override { return f_.mu(); }
  double lipschitz() const override { return f_.lipschitz(); }
  bool geodesic_demo_only() const override { return f_.geodesic_demo_only(); }
  void check_domain(const Vector& x) const override { f_.check_domain(x); }

 private:
  Objective f_;
  Vector c_;
};

}  // namespace

Objective make_quadratic(QuadraticSpec spec) {
  return Objective(std::make_shared<QuadraticModel>(std::move(spec)));
}

Objective make_quartic(QuarticSpec spec) {
  return Objective(std::make_shared<QuarticModel>(std::move(spec)));
}

Objective make_euclidean(int n) {
  if (n <= 0) throw ConstructionError("euclidean: dimension must be positive");
  return make_quadratic({Matrix::Identity(n, n), Vector::Zero(n)});
}

Objective make_conjugate(const Objective& f) {
  return Objective(std::make_shared<ConjugateModel>(f));
}

Objective make_tilted(const Objective& f, Vector c) {
  return Objective(std::make_shared<TiltedModel>(f, std::move(c)));
}

std::pair<double, double> strong_convexity_bounds(const Objective& obj) {
  const QuadraticSpec* q = obj.quadratic();
  if (q == nullptr) {
    throw UnsupportedError("strong_convexity_bounds: objective '" + obj.kind() +
                           "' is not quadratic");
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(q->H, Eigen::EigenvaluesOnly);
  return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
}

Objective objective_from_json(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("kind")) {
    throw ConfigError("objective: expected an object with a \"kind\" field");
  }
  const std::string kind = spec.at("kind").get<std::string>();
  try {
    if (kind == "quadratic") {
      Matrix H = matrix_from_json(spec.at("H"));
      Vector x_star =
          spec.contains("x_star") ? vector_from_json(spec.at("x_star")) : Vector::Zero(H.rows());
      return make_quadratic({std::move(H), std::move(x_star)});
    }
    if (kind == "quartic") return make_quartic({matrix_from_json(spec.at("A"))});
    if (kind == "euclidean") return make_euclidean(spec.at("n").get<int>());
  } catch (const ConstructionError& e) {
    throw ConfigError(std::string("objective: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("objective: ") + e.what());
  }
  throw ConfigError("objective: unknown kind '" + kind + "'");
}

}  // namespace geoaccel
