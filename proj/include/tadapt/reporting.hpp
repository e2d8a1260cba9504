#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "tadapt/controller.hpp"
#include "tadapt/fem/navier_stokes.hpp"
#include "tadapt/run_config.hpp"
#include "tadapt/verification.hpp"

namespace tadapt {

/// Shortest decimal form of x that round-trips (printf %.17g). Every number
/// in the text outputs goes through this so reruns diff clean.
[[nodiscard]] std::string format_number(double x);

/// One row per accepted step:
///   n,t,dt,est_total,est_velocity,est_pressure,retries,newton_iters,estimator_seconds
/// plus est_total_impl,est_total_li when both estimators ran. Components the
/// problem does not have — and estimates the startup steps never made — are
/// written as nan.
void write_steps_csv(std::ostream& out, const RunLog& log, bool both_estimators);
void write_steps_csv(const std::filesystem::path& file, const RunLog& log,
                     bool both_estimators);

/// Key/value lines (`key = value`) with counts, totals, and mean estimator
/// costs. `front` entries are emitted first, for run identity.
void write_summary(std::ostream& out, const RunLog& log,
                   const std::vector<std::pair<std::string, std::string>>& front = {});
void write_summary(const std::filesystem::path& file, const RunLog& log,
                   const std::vector<std::pair<std::string, std::string>>& front = {});

/// Sample mean and standard deviation of the wall time of one estimator
/// evaluation, over every attempt on which that estimator produced a value.
struct EstimatorCost {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double stddev = std::numeric_limits<double>::quiet_NaN();
  int samples = 0;
};
struct EstimatorCostComparison {
  EstimatorCost implicit_cost;
  EstimatorCost li_cost;
};
[[nodiscard]] EstimatorCostComparison estimator_costs(const RunLog& log);

/// Side-by-side estimator table, one row per accepted step on which both
/// estimators produced a value:
///   n,t,est_total_impl,est_total_li,ratio,impl_seconds,li_seconds
/// where ratio = est_total_li / est_total_impl.
void write_estimators_csv(std::ostream& out, const RunLog& log);
void write_estimators_csv(const std::filesystem::path& file, const RunLog& log);

/// Constant-step convergence table `scheme,h,error,observed_order` with the
/// pairwise order between consecutive rows (nan on each scheme's first row).
void write_orders_csv(std::ostream& out, const std::vector<ConvergenceStudy>& studies);
void write_orders_csv(const std::filesystem::path& file,
                      const std::vector<ConvergenceStudy>& studies);

/// Plain-text mesh tables for external plotting:
///   mesh_nodes.txt     `# node x y`            one row per velocity node
///   mesh_elements.txt  `# element v0 v1 v2 m01 m12 m20`  node ids per triangle
void write_mesh_tables(const std::filesystem::path& directory,
                       const fem::TaylorHoodSpace& space);

/// Solution tables for one state:
///   velocity_<tag>.txt  `# node x y ux uy`   one row per velocity node
///   pressure_<tag>.txt  `# vertex x y p`     one row per mesh vertex
void write_flow_snapshot(const std::filesystem::path& directory,
                         const fem::NavierStokesProblem& problem,
                         const StateVector& state, const std::string& tag);

/// What execute_run left on disk, plus the in-memory log it came from.
struct RunOutputs {
  RunLog log;
  std::filesystem::path directory;
  std::filesystem::path steps_csv;
  std::filesystem::path summary_txt;
  std::filesystem::path resolved_config;
};

/// The whole batch pipeline: validate, create the output directory, write
/// the resolved config, integrate (adaptive, or constant dt_min when
/// config.reference_run), then flush steps.csv and summary.txt — plus mesh
/// tables and a final-state snapshot for flow problems. A solver abort
/// still writes every file; check log.summary.aborted.
[[nodiscard]] RunOutputs execute_run(const RunConfig& config);

}  // namespace tadapt
