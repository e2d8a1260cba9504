#include "tadapt/verification.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "tadapt/estimators.hpp"

namespace tadapt {

namespace {

class ScalarOde : public ManufacturedProblem {
 public:
  ScalarOde() {
    auto p = std::make_shared<ComponentPartition>();
    p->add("u", 1);
    partition_ = std::move(p);
  }

  [[nodiscard]] std::shared_ptr<const ComponentPartition> partition() const override {
    return partition_;
  }

  [[nodiscard]] StateVector initial_state(double t0) const override {
    return exact_state(t0);
  }

 protected:
  [[nodiscard]] StateVector scalar_state(double v) const {
    Vector x(1);
    x[0] = v;
    return StateVector{std::move(x), partition_};
  }

  [[nodiscard]] Eigen::SparseMatrix<double> scalar_jacobian(double value) const {
    Eigen::SparseMatrix<double> j(1, 1);
    j.insert(0, 0) = value;
    j.makeCompressed();
    return j;
  }

  std::shared_ptr<const ComponentPartition> partition_;
};

class PolynomialOde final : public ScalarOde {
 public:
  explicit PolynomialOde(int degree) : degree_(degree) {
    if (degree < 1) throw InvalidInputError("polynomial degree must be at least 1");
  }

  [[nodiscard]] StateVector exact_state(double t) const override {
    return scalar_state(1.0 + std::pow(t, degree_));
  }
  [[nodiscard]] StateVector exact_derivative(double t) const override {
    return scalar_state(rate(t));
  }
  [[nodiscard]] Vector residual(double t, const StateVector& udot,
                                const StateVector& u) const override {
    (void)u;
    Vector r(1);
    r[0] = udot.values[0] - rate(t);
    return r;
  }
  [[nodiscard]] Eigen::SparseMatrix<double> jacobian(double, const StateVector&,
                                                     const StateVector&,
                                                     double shift) const override {
    return scalar_jacobian(shift);
  }
  [[nodiscard]] std::string description() const override {
    return "polynomial ode of degree " + std::to_string(degree_);
  }

 private:
  [[nodiscard]] double rate(double t) const {
    return degree_ * std::pow(t, degree_ - 1);
  }
  int degree_;
};

class StiffRelaxationOde final : public ScalarOde {
 public:
  explicit StiffRelaxationOde(double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0)) throw InvalidInputError("lambda must be positive");
  }

  [[nodiscard]] StateVector exact_state(double t) const override {
    return scalar_state(std::sin(t));
  }
  [[nodiscard]] StateVector exact_derivative(double t) const override {
    return scalar_state(std::cos(t));
  }
  [[nodiscard]] Vector residual(double t, const StateVector& udot,
                                const StateVector& u) const override {
    Vector r(1);
    r[0] = udot.values[0] + lambda_ * (u.values[0] - std::sin(t)) - std::cos(t);
    return r;
  }
  [[nodiscard]] Eigen::SparseMatrix<double> jacobian(double, const StateVector&,
                                                     const StateVector&,
                                                     double shift) const override {
    return scalar_jacobian(shift + lambda_);
  }
  [[nodiscard]] std::string description() const override {
    return "stiff relaxation ode, lambda = " + std::to_string(lambda_);
  }

 private:
  double lambda_;
};

class QuadraticDecayOde final : public ScalarOde {
 public:
  explicit QuadraticDecayOde(double u0) : u0_(u0) {
    if (!(u0 > 0.0)) throw InvalidInputError("u0 must be positive");
  }

  [[nodiscard]] StateVector exact_state(double t) const override {
    return scalar_state(u0_ / (1.0 + u0_ * t));
  }
  [[nodiscard]] StateVector exact_derivative(double t) const override {
    const double u = u0_ / (1.0 + u0_ * t);
    return scalar_state(-u * u);
  }
  [[nodiscard]] Vector residual(double, const StateVector& udot,
                                const StateVector& u) const override {
    Vector r(1);
    r[0] = udot.values[0] + u.values[0] * u.values[0];
    return r;
  }
  [[nodiscard]] Eigen::SparseMatrix<double> jacobian(double, const StateVector&,
                                                     const StateVector& u,
                                                     double shift) const override {
    return scalar_jacobian(shift + 2.0 * u.values[0]);
  }
  [[nodiscard]] std::string description() const override { return "quadratic decay ode"; }

 private:
  double u0_;
};

/// M u' + K u + B^T p = f, B u = g. Everything dense inside; the Jacobian is
/// exported sparse to match the Problem interface.
class LinearSaddleDae final : public ManufacturedProblem {
 public:
  static constexpr int kNu = 8;
  static constexpr int kNp = 3;

  LinearSaddleDae() {
    auto part = std::make_shared<ComponentPartition>();
    part->add("velocity", kNu);
    part->add("pressure", kNp);
    partition_ = std::move(part);

    mass_ = Eigen::MatrixXd::Identity(kNu, kNu);
    for (int i = 0; i + 1 < kNu; ++i) {
      mass_(i, i + 1) = -0.15;
      mass_(i + 1, i) = -0.15;
    }

    stiff_.resize(kNu, kNu);
    for (int i = 0; i < kNu; ++i) {
      for (int j = 0; j < kNu; ++j) {
        stiff_(i, j) = (i == j) ? 2.0 : 0.2 * std::sin(1.0 + 3.0 * i + j);
      }
    }

    constraint_.resize(kNp, kNu);
    for (int j = 0; j < kNu; ++j) {
      constraint_(0, j) = 1.0;
      constraint_(1, j) = (j % 2 == 0) ? 1.0 : -1.0;
      constraint_(2, j) = (j + 1) / 8.0;
    }
  }

  [[nodiscard]] std::shared_ptr<const ComponentPartition> partition() const override {
    return partition_;
  }

  [[nodiscard]] StateVector exact_state(double t) const override {
    Vector x(kNu + kNp);
    for (int i = 0; i < kNu; ++i) x[i] = std::sin(t + 0.7 * i);
    for (int l = 0; l < kNp; ++l) x[kNu + l] = std::cos(0.6 * (l + 1) * t);
    return StateVector{std::move(x), partition_};
  }

  [[nodiscard]] StateVector exact_derivative(double t) const override {
    Vector x(kNu + kNp);
    for (int i = 0; i < kNu; ++i) x[i] = std::cos(t + 0.7 * i);
    for (int l = 0; l < kNp; ++l) x[kNu + l] = -0.6 * (l + 1) * std::sin(0.6 * (l + 1) * t);
    return StateVector{std::move(x), partition_};
  }

  [[nodiscard]] StateVector initial_state(double t0) const override {
    return exact_state(t0);
  }

  [[nodiscard]] Vector residual(double t, const StateVector& udot,
                                const StateVector& u) const override {
    const auto uex = exact_state(t);
    const auto uex_dot = exact_derivative(t);
    const auto uv = u.values.head(kNu);
    const auto pv = u.values.tail(kNp);

    // Manufactured forcing: whatever makes the exact solution solve the system.
    const Vector f = mass_ * uex_dot.values.head(kNu) + stiff_ * uex.values.head(kNu) +
                     constraint_.transpose() * uex.values.tail(kNp);
    const Vector g = constraint_ * uex.values.head(kNu);

    Vector r(kNu + kNp);
    r.head(kNu) =
        mass_ * udot.values.head(kNu) + stiff_ * uv + constraint_.transpose() * pv - f;
    r.tail(kNp) = constraint_ * uv - g;
    return r;
  }

  [[nodiscard]] Eigen::SparseMatrix<double> jacobian(double, const StateVector&,
                                                     const StateVector&,
                                                     double shift) const override {
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(kNu + kNp, kNu + kNp);
    dense.topLeftCorner(kNu, kNu) = shift * mass_ + stiff_;
    dense.topRightCorner(kNu, kNp) = constraint_.transpose();
    dense.bottomLeftCorner(kNp, kNu) = constraint_;
    return dense.sparseView();
  }

  [[nodiscard]] std::string description() const override {
    return "linear saddle point dae (8 differential + 3 algebraic)";
  }

 private:
  std::shared_ptr<const ComponentPartition> partition_;
  Eigen::MatrixXd mass_;
  Eigen::MatrixXd stiff_;
  Eigen::MatrixXd constraint_;
};

StateVector extrapolate(const HistoryBuffer& history, double dt) {
  const StateVector& newest = history.state(0);
  if (history.size() < 2) return StateVector{newest.values, newest.layout};
  const double h0 = history.step(0);
  Vector v = newest.values + (dt / h0) * (newest.values - history.state(1).values);
  return StateVector{std::move(v), newest.layout};
}

}  // namespace

std::shared_ptr<ManufacturedProblem> make_polynomial_ode(int degree) {
  return std::make_shared<PolynomialOde>(degree);
}

std::shared_ptr<ManufacturedProblem> make_stiff_relaxation_ode(double lambda) {
  return std::make_shared<StiffRelaxationOde>(lambda);
}

std::shared_ptr<ManufacturedProblem> make_quadratic_decay_ode(double u0) {
  return std::make_shared<QuadraticDecayOde>(u0);
}

std::shared_ptr<ManufacturedProblem> make_linear_saddle_dae() {
  return std::make_shared<LinearSaddleDae>();
}

double residual_defect(const ManufacturedProblem& problem, double t0, double t1,
                       int samples) {
  if (samples < 2) throw InvalidInputError("residual_defect: need at least two samples");
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = t0 + (t1 - t0) * i / (samples - 1);
    const Vector r = problem.residual(t, problem.exact_derivative(t), problem.exact_state(t));
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::bdf1: return "bdf1";
    case Scheme::bdf2: return "bdf2";
    case Scheme::bdf3: return "bdf3";
    case Scheme::li_bdf3: return "li_bdf3";
  }
  return "unknown";
}

ConstantStepResult constant_step_run(const ManufacturedProblem& problem, Scheme scheme,
                                     double h, double t0, double t_end,
                                     const NewtonConfig& config) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInputError("h must be positive");
  const int seed_states = (scheme == Scheme::bdf1)   ? 1
                          : (scheme == Scheme::bdf2) ? 2
                                                     : 3;
  const int solve_order = (scheme == Scheme::bdf3) ? 3 : (scheme == Scheme::bdf1) ? 1 : 2;
  if (!(t_end > t0 + seed_states * h)) {
    throw InvalidInputError("interval too short for the requested scheme and step");
  }

  const auto partition = problem.partition();
  HistoryBuffer history(4);
  for (int j = 0; j < seed_states; ++j) {
    history.push(t0 + j * h, problem.exact_state(t0 + j * h));
  }

  ConstantStepResult result;
  for (const auto& c : partition->components()) {
    result.component_max_error.emplace_back(c.name, 0.0);
  }

  double t = t0 + (seed_states - 1) * h;
  const double time_tol = 1e-12 * std::max(1.0, std::abs(t_end));
  while (t < t_end - time_tol) {
    double t_new = t + h;
    if (t_new > t_end - time_tol) t_new = t_end;
    const double dt = t_new - t;

    const BdfStencil stencil =
        compute_coefficients(solve_order, history.steps_for(dt, solve_order));
    const NewtonResult solve = solve_implicit_step(problem, stencil, history, t_new,
                                                   extrapolate(history, dt), config);
    if (!solve.converged) {
      throw NotConvergedError("constant step march failed at t = " + std::to_string(t_new) +
                              ": " + solve.message);
    }

    StateVector next = solve.state;
    if (scheme == Scheme::li_bdf3) {
      const auto corrected = linear_implicit_bdf3(problem, history, t_new, solve.state,
                                                  history.steps_for(dt, 3));
      if (!corrected) {
        throw NotConvergedError("third order correction failed at t = " +
                                std::to_string(t_new));
      }
      next = corrected->corrected;
    }

    history.push(t_new, next);
    ++result.steps;
    t = t_new;

    const StateVector exact = problem.exact_state(t_new);
    const Vector diff = next.values - exact.values;
    for (std::size_t ci = 0; ci < result.component_max_error.size(); ++ci) {
      const auto& c = partition->components()[ci];
      const double e = partition->norm(c, diff.segment(c.offset, c.size));
      result.component_max_error[ci].second =
          std::max(result.component_max_error[ci].second, e);
      result.max_error = std::max(result.max_error, e);
    }
  }
  return result;
}

double observed_order(const std::vector<double>& hs, const std::vector<double>& errors) {
  if (hs.size() != errors.size() || hs.size() < 2) {
    throw InvalidInputError("observed_order: need matching lists with at least two points");
  }
  std::vector<double> xs(hs.size()), ys(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0.0) || !(errors[i] > 0.0)) {
      throw InvalidInputError("observed_order: steps and errors must be positive");
    }
    xs[i] = std::log(hs[i]);
    ys[i] = std::log(errors[i]);
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  if (den == 0.0) throw InvalidInputError("observed_order: all step sizes equal");
  return num / den;
}

ConvergenceStudy convergence_study(const ManufacturedProblem& problem, Scheme scheme,
                                   const std::vector<double>& hs, double t0, double t_end,
                                   const NewtonConfig& config) {
  if (hs.size() < 2) {
    throw InvalidInputError("convergence_study: need at least two step sizes");
  }
  ConvergenceStudy study;
  study.scheme = scheme;
  std::vector<double> errors;
  for (const double h : hs) {
    const auto run = constant_step_run(problem, scheme, h, t0, t_end, config);
    study.rows.push_back(ConvergenceRow{h, run.max_error});
    errors.push_back(run.max_error);
  }
  study.order = observed_order(hs, errors);
  return study;
}

}  // namespace tadapt
