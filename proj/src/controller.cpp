#include "tadapt/controller.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace tadapt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Linear extrapolation of the two newest states; the newest alone if the
/// history is too short. Only a Newton guess, never part of the answer.
StateVector extrapolate_guess(const HistoryBuffer& history, double dt) {
  const StateVector& newest = history.state(0);
  if (history.size() < 2) return StateVector{newest.values, newest.layout};
  const double h0 = history.step(0);
  Vector v = newest.values + (dt / h0) * (newest.values - history.state(1).values);
  return StateVector{std::move(v), newest.layout};
}

void fill_slot(EstimateSlot& slot, const std::optional<EstimateReport>& report) {
  slot.attempted = true;
  if (!report) {
    slot.failed = true;
    return;
  }
  slot.total = report->total;
  slot.seconds = report->cost_seconds;
  slot.newton_iterations = report->newton_iterations;
  slot.components = report->per_component;
}

constexpr int kLevelCap = 5'000'000;  // guards against runaway loops, not a tuning knob

}  // namespace

const char* to_string(DriveEstimator kind) {
  switch (kind) {
    case DriveEstimator::implicit_bdf3: return "implicit";
    case DriveEstimator::linear_implicit: return "li";
    case DriveEstimator::both: return "both";
  }
  return "unknown";
}

void ControllerConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidInputError("controller: epsilon must be positive");
  }
  if (accuracy_order < 1) {
    throw InvalidInputError("controller: accuracy_order must be at least 1");
  }
  if (!(kappa_min > 0.0) || !(kappa_min <= 1.0)) {
    throw InvalidInputError("controller: kappa_min must lie in (0, 1]");
  }
  if (!(kappa_max >= 1.0) || !std::isfinite(kappa_max)) {
    throw InvalidInputError("controller: kappa_max must be finite and at least 1");
  }
  if (!(kappa_min < kappa_max)) {
    throw InvalidInputError("controller: kappa_min must be below kappa_max");
  }
  if (!(kappa_safety > 0.0) || !(kappa_safety <= 1.0)) {
    throw InvalidInputError("controller: kappa_safety must lie in (0, 1]");
  }
  if (!(dt_min > 0.0) || !(dt_min <= dt_max) || !std::isfinite(dt_max)) {
    throw InvalidInputError("controller: need 0 < dt_min <= dt_max < inf");
  }
  if (!(alpha0 >= 0.0) || !(alpha1 >= 0.0) || std::abs(alpha0 + alpha1 - 1.0) > 1e-12) {
    throw InvalidInputError("controller: smoothing weights must be a convex pair");
  }
  if (max_retries < 0) {
    throw InvalidInputError("controller: max_retries must be nonnegative");
  }
  for (const double c : checkpoints) {
    if (!std::isfinite(c)) throw InvalidInputError("controller: checkpoints must be finite");
  }
}

double StepRecord::driving_total() const {
  const EstimateSlot& slot = driving_slot();
  if (!slot.attempted) return std::numeric_limits<double>::quiet_NaN();
  if (slot.failed) return std::numeric_limits<double>::infinity();
  return slot.total;
}

const EstimateSlot& StepRecord::driving_slot() const {
  return (driving == DriveEstimator::implicit_bdf3) ? implicit_estimate : li_estimate;
}

double kappa_star(double est, const ControllerConfig& config) {
  if (std::isnan(est) || est < 0.0) return config.kappa_min;
  if (est == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(config.epsilon / est, 1.0 / (config.accuracy_order + 1));
}

double predict_step(double dt, double kappa, const ControllerConfig& config) {
  const double k = std::clamp(config.kappa_safety * kappa, config.kappa_min, config.kappa_max);
  return std::clamp(k * dt, config.dt_min, config.dt_max);
}

double smooth_step(double dt_accepted, double dt_star, const ControllerConfig& config) {
  return std::clamp(config.alpha0 * dt_accepted + config.alpha1 * dt_star, config.dt_min,
                    config.dt_max);
}

RunLog run(const Problem& problem, const ControllerConfig& config, double t0, double t_end,
           const AcceptObserver& on_accept) {
  config.validate();
  if (!(t_end >= t0)) throw InvalidInputError("run: t_end must not precede t0");
  const auto wall_start = Clock::now();

  RunLog log;
  log.summary.final_time = t0;
  const double time_tol = 1e-12 * std::max(1.0, std::abs(t_end));
  const double horizon = t_end - t0;
  if (horizon <= time_tol) {
    log.summary.wall_seconds = seconds_since(wall_start);
    return log;
  }

  HistoryBuffer history(4);
  history.push(t0, problem.initial_state(t0));
  double t = t0;
  int level = 1;

  // Times the run must land on exactly: interior checkpoints, then t_end.
  std::vector<double> targets;
  for (const double c : config.checkpoints) {
    if (c > t0 + time_tol && c < t_end - time_tol) targets.push_back(c);
  }
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end(),
                            [&](double a, double b) { return std::abs(a - b) <= time_tol; }),
                targets.end());
  targets.push_back(t_end);
  std::size_t target_index = 0;
  const auto next_target = [&] {
    while (target_index + 1 < targets.size() && targets[target_index] <= t + time_tol) {
      ++target_index;
    }
    return targets[target_index];
  };

  auto accept = [&](StepRecord& rec, const StateVector& state) {
    rec.accepted = true;
    log.summary.accepted_steps += 1;
    if (rec.forced) log.summary.forced_accepts += 1;
    history.push(rec.t_end, state);
    t = rec.t_end;
    log.summary.final_time = t;
    log.records.push_back(rec);
    if (on_accept) on_accept(log.records.back(), state);
  };

  auto abort_run = [&](std::string reason) {
    log.summary.aborted = true;
    log.summary.abort_reason = std::move(reason);
    log.summary.wall_seconds = seconds_since(wall_start);
  };

  // Ramp-up: one backward Euler step, then one second order step, both at a
  // fixed small size. Estimation needs three states behind it, which is
  // exactly what these two accepted steps plus the initial state provide.
  const double h_start = std::min(config.dt_min, horizon / 2.0);
  for (int k = 1; k <= 2 && t < t_end - time_tol; ++k) {
    const int order = (k == 1) ? 1 : 2;
    const double target = next_target();
    const double h_k = std::min(h_start, target - t);
    StepRecord rec;
    rec.level = level;
    rec.t_start = t;
    rec.t_end = t + h_k;
    rec.dt = h_k;
    rec.startup = true;
    rec.shortened = h_k < h_start * (1.0 - 1e-12);
    rec.driving = config.estimator;
    if (std::abs(rec.t_end - target) <= time_tol) rec.t_end = target;

    const BdfStencil stencil = compute_coefficients(order, history.steps_for(h_k, order));
    const NewtonResult solve = solve_implicit_step(
        problem, stencil, history, rec.t_end, extrapolate_guess(history, h_k),
        config.newton);
    rec.newton_converged = solve.converged;
    rec.newton_iterations = solve.iterations;
    log.summary.newton_iterations += solve.iterations;
    if (!solve.converged) {
      log.records.push_back(rec);
      abort_run("ramp-up solve failed at t = " + std::to_string(rec.t_end) + ": " +
                solve.message);
      return log;
    }
    accept(rec, solve.state);
    ++level;
  }

  double dt_proposal = config.dt_min;

  while (t < t_end - time_tol) {
    if (level > kLevelCap) {
      abort_run("step level cap reached");
      return log;
    }

    double dt = dt_proposal;
    int attempt = 0;
    for (;;) {
      // Land exactly on the next checkpoint (or t_end) and never strand a
      // remainder below dt_min: take the remainder in one step when it
      // fits, otherwise split it.
      bool shortened = false;
      double dt_try = std::min(dt, config.dt_max);
      const double target = next_target();
      const double rem = target - t;
      if (rem <= dt_try + config.dt_min) {
        if (rem <= config.dt_max) {
          shortened = std::abs(rem - dt_try) > time_tol;
          dt_try = rem;
        } else {
          dt_try = std::clamp(rem / 2.0, config.dt_min, config.dt_max);
          shortened = true;
        }
      }

      StepRecord rec;
      rec.level = level;
      rec.attempt = attempt;
      rec.t_start = t;
      rec.t_end = t + dt_try;
      rec.dt = dt_try;
      rec.shortened = shortened;
      rec.driving = config.estimator;
      if (std::abs(rec.t_end - target) <= time_tol) rec.t_end = target;

      const BdfStencil stencil = compute_coefficients(2, history.steps_for(dt_try, 2));
      const NewtonResult solve = solve_implicit_step(
          problem, stencil, history, rec.t_end, extrapolate_guess(history, dt_try),
          config.newton);
      rec.newton_converged = solve.converged;
      rec.newton_iterations = solve.iterations;
      log.summary.newton_iterations += solve.iterations;

      if (!solve.converged) {
        const double dt_next = predict_step(dt_try, config.kappa_min, config);
        log.records.push_back(rec);
        if (attempt >= config.max_retries) {
          abort_run("no convergence at t = " + std::to_string(rec.t_end) +
                    " after " + std::to_string(attempt) + " retries: " + solve.message);
          return log;
        }
        if (dt_next >= dt_try * (1.0 - 1e-12)) {
          // Already at the floor; the same step would fail the same way.
          abort_run("solver failed at the minimum step, t = " + std::to_string(rec.t_end) +
                    ": " + solve.message);
          return log;
        }
        log.summary.rejected_attempts += 1;
        dt = dt_next;
        ++attempt;
        continue;
      }

      const Eigen::VectorXd steps3 = history.steps_for(dt_try, 3);
      EstimatorOptions eopt;
      eopt.newton = config.newton;
      eopt.relative_components = config.relative_component_norms;
      if (config.estimator != DriveEstimator::linear_implicit) {
        fill_slot(rec.implicit_estimate,
                  estimate_implicit(problem, history, rec.t_end, solve.state, steps3, eopt));
      }
      if (config.estimator != DriveEstimator::implicit_bdf3) {
        fill_slot(rec.li_estimate, estimate_linear_implicit(problem, history, rec.t_end,
                                                            solve.state, steps3, eopt));
      }
      log.summary.total_estimator_seconds += rec.estimator_seconds();

      const double est = rec.driving_total();
      if (est <= config.epsilon) {
        accept(rec, solve.state);
        dt_proposal = smooth_step(
            dt_try, predict_step(dt_try, kappa_star(est, config), config), config);
        break;
      }

      // Rejected (or the estimate itself failed, which counts as est = inf).
      const double kappa =
          std::isfinite(est) ? kappa_star(est, config) : config.kappa_min;
      const double dt_next = predict_step(dt_try, kappa, config);
      const bool no_progress = dt_next >= dt_try * (1.0 - 1e-12);
      if (attempt >= config.max_retries || no_progress) {
        rec.forced = true;
        accept(rec, solve.state);
        dt_proposal = smooth_step(dt_try, predict_step(dt_try, kappa, config), config);
        break;
      }
      log.summary.rejected_attempts += 1;
      log.records.push_back(rec);
      dt = dt_next;
      ++attempt;
    }
    ++level;
  }

  log.summary.wall_seconds = seconds_since(wall_start);
  return log;
}

RunLog reference_run(const Problem& problem, const ControllerConfig& config, double t0,
                     double t_end, double dt, const AcceptObserver& on_accept) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidInputError("reference_run: dt must be positive");
  }
  if (!(t_end >= t0)) throw InvalidInputError("reference_run: t_end must not precede t0");
  const auto wall_start = Clock::now();

  RunLog log;
  log.summary.final_time = t0;
  const double horizon = t_end - t0;
  const double time_tol = 1e-12 * std::max(1.0, std::abs(t_end));
  if (horizon <= time_tol) {
    log.summary.wall_seconds = seconds_since(wall_start);
    return log;
  }

  const long n = std::max(1L, static_cast<long>(std::ceil(horizon / dt - 1e-9)));
  const double h = horizon / static_cast<double>(n);

  HistoryBuffer history(4);
  history.push(t0, problem.initial_state(t0));
  double t = t0;

  for (long i = 1; i <= n; ++i) {
    const double t_new = (i == n) ? t_end : t0 + static_cast<double>(i) * h;
    const int order = (i == 1) ? 1 : 2;
    StepRecord rec;
    rec.level = static_cast<int>(i);
    rec.t_start = t;
    rec.t_end = t_new;
    rec.dt = t_new - t;
    rec.startup = (i == 1);
    rec.driving = config.estimator;

    const BdfStencil stencil = compute_coefficients(order, history.steps_for(rec.dt, order));
    const NewtonResult solve = solve_implicit_step(
        problem, stencil, history, t_new, extrapolate_guess(history, rec.dt), config.newton);
    rec.newton_converged = solve.converged;
    rec.newton_iterations = solve.iterations;
    log.summary.newton_iterations += solve.iterations;
    if (!solve.converged) {
      log.records.push_back(rec);
      log.summary.aborted = true;
      log.summary.abort_reason = "fixed-step solve failed at t = " + std::to_string(t_new) +
                                 ": " + solve.message;
      log.summary.wall_seconds = seconds_since(wall_start);
      return log;
    }
    rec.accepted = true;
    log.summary.accepted_steps += 1;
    history.push(t_new, solve.state);
    t = t_new;
    log.summary.final_time = t;
    log.records.push_back(rec);
    if (on_accept) on_accept(log.records.back(), history.state(0));
  }

  log.summary.wall_seconds = seconds_since(wall_start);
  return log;
}

}  // namespace tadapt
