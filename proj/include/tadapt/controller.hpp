#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tadapt/estimators.hpp"
#include "tadapt/newton.hpp"
#include "tadapt/problem.hpp"

namespace tadapt {

/// Which temporal error estimate drives step-size decisions. `both`
/// evaluates the two estimators on every attempt (for side-by-side
/// comparison) and lets the cheaper linear-implicit one drive.
enum class DriveEstimator { implicit_bdf3, linear_implicit, both };

[[nodiscard]] const char* to_string(DriveEstimator kind);

struct ControllerConfig {
  double epsilon = 1e-3;       // target for the per-step error estimate
  int accuracy_order = 2;      // q of the advancing scheme; kappa uses q + 1
  double kappa_min = 0.1;      // harshest allowed shrink factor
  double kappa_max = 1.5;      // largest allowed growth factor
  double kappa_safety = 0.9;
  double dt_min = 1e-4;
  double dt_max = 1e-1;
  double alpha0 = 0.3;         // smoothing weight on the accepted step
  double alpha1 = 0.7;         // smoothing weight on the new prediction
  int max_retries = 5;         // rejections per level before forcing acceptance
  DriveEstimator estimator = DriveEstimator::linear_implicit;
  NewtonConfig newton;
  bool relative_component_norms = false;
  /// Interior times the run must land on exactly (for snapshot comparison).
  /// Steps shortened to hit one are marked `shortened` in the log. Order and
  /// duplicates do not matter; entries outside (t0, t_end) are ignored.
  std::vector<double> checkpoints;

  /// Throws InvalidInputError on out-of-range settings
  /// (e.g. dt_min > dt_max, alpha0 + alpha1 != 1).
  void validate() const;
};

/// Outcome of one estimator on one attempt.
struct EstimateSlot {
  bool attempted = false;
  bool failed = false;  // attempted, but the estimate could not be formed
  double total = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
  int newton_iterations = 0;
  std::vector<std::pair<std::string, double>> components;
};

/// One solve attempt (accepted or rejected) of one step level.
struct StepRecord {
  int level = 0;    // accepted-step index this attempt works toward, 1-based
  int attempt = 0;  // 0 is the first try at this level
  double t_start = 0.0;
  double t_end = 0.0;
  double dt = 0.0;
  bool startup = false;    // fixed-step ramp-up before estimation begins
  bool accepted = false;
  bool forced = false;     // accepted despite est > epsilon or a failed estimate
  bool shortened = false;  // step adjusted to land on the final time
  bool newton_converged = false;
  int newton_iterations = 0;
  EstimateSlot implicit_estimate;
  EstimateSlot li_estimate;
  DriveEstimator driving = DriveEstimator::linear_implicit;

  /// Estimate the controller acted on: NaN when none was attempted
  /// (startup, Newton failure), +inf when the driving estimator failed.
  [[nodiscard]] double driving_total() const;
  [[nodiscard]] const EstimateSlot& driving_slot() const;
  [[nodiscard]] double estimator_seconds() const {
    return implicit_estimate.seconds + li_estimate.seconds;
  }
};

struct RunSummary {
  int accepted_steps = 0;
  int rejected_attempts = 0;
  int forced_accepts = 0;
  long newton_iterations = 0;
  double total_estimator_seconds = 0.0;  // all attempts, all estimators
  double final_time = 0.0;
  double wall_seconds = 0.0;
  bool aborted = false;
  std::string abort_reason;
};

struct RunLog {
  std::vector<StepRecord> records;  // every attempt, in order
  RunSummary summary;
};

/// Called after each accepted step with its record and the new state.
using AcceptObserver = std::function<void(const StepRecord&, const StateVector&)>;

/// Growth factor kappa* = (epsilon / est)^(1 / (q + 1)), unclamped.
/// est of zero maps to +inf; the clamp in predict_step handles it.
[[nodiscard]] double kappa_star(double est, const ControllerConfig& config);

/// dt proposal from an unclamped kappa:
/// clamp(kappa_safety * kappa, kappa_min, kappa_max) * dt, then clamped to
/// [dt_min, dt_max].
[[nodiscard]] double predict_step(double dt, double kappa, const ControllerConfig& config);

/// Smoothed proposal alpha0 * dt_accepted + alpha1 * dt_star, clamped to
/// [dt_min, dt_max]. Applied only after acceptance, never inside retries.
[[nodiscard]] double smooth_step(double dt_accepted, double dt_star,
                                 const ControllerConfig& config);

/// Adaptive integration from t0 to t_end: two fixed ramp-up steps (backward
/// Euler, then the second order stencil) at the minimum step, then second
/// order steps sized by the configured error estimator. Returns a log of
/// every attempt; check summary.aborted before trusting the final state.
[[nodiscard]] RunLog run(const Problem& problem, const ControllerConfig& config,
                         double t0, double t_end, const AcceptObserver& on_accept = {});

/// Fixed-step second order march (backward Euler start) with no estimation,
/// using ceil((t_end - t0) / dt) uniform steps. The workhorse for reference
/// solutions against which the adaptive run is judged.
[[nodiscard]] RunLog reference_run(const Problem& problem, const ControllerConfig& config,
                                   double t0, double t_end, double dt,
                                   const AcceptObserver& on_accept = {});

}  // namespace tadapt
