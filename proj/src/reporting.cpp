#include "tadapt/reporting.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <system_error>

namespace tadapt {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::ofstream open_for_write(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) {
    throw Error("cannot open " + file.string() + " for writing");
  }
  return out;
}

/// The estimate a slot produced, or nan when it was skipped or failed.
double slot_total(const EstimateSlot& slot) {
  return (slot.attempted && !slot.failed) ? slot.total : kNan;
}

double component_value(const EstimateSlot& slot, const char* name) {
  for (const auto& [component, value] : slot.components) {
    if (component == name) return value;
  }
  return kNan;
}

struct Welford {
  int n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  [[nodiscard]] EstimatorCost cost() const {
    EstimatorCost c;
    c.samples = n;
    if (n > 0) c.mean = mean;
    if (n > 0) c.stddev = (n > 1) ? std::sqrt(m2 / (n - 1)) : 0.0;
    return c;
  }
};

}  // namespace

std::string format_number(double x) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), x);
  return std::string(buffer, result.ptr);
}

void write_steps_csv(std::ostream& out, const RunLog& log, bool both_estimators) {
  out << "n,t,dt,est_total,est_velocity,est_pressure,retries,newton_iters,"
         "estimator_seconds";
  if (both_estimators) out << ",est_total_impl,est_total_li";
  out << "\n";
  int n = 0;
  for (const auto& rec : log.records) {
    if (!rec.accepted) continue;
    ++n;
    const EstimateSlot& driving = rec.driving_slot();
    out << n << ',' << format_number(rec.t_end) << ',' << format_number(rec.dt) << ','
        << format_number(rec.driving_total()) << ','
        << format_number(component_value(driving, "velocity")) << ','
        << format_number(component_value(driving, "pressure")) << ',' << rec.attempt
        << ',' << rec.newton_iterations << ',' << format_number(rec.estimator_seconds());
    if (both_estimators) {
      out << ',' << format_number(slot_total(rec.implicit_estimate)) << ','
          << format_number(slot_total(rec.li_estimate));
    }
    out << "\n";
  }
}

void write_steps_csv(const std::filesystem::path& file, const RunLog& log,
                     bool both_estimators) {
  auto out = open_for_write(file);
  write_steps_csv(out, log, both_estimators);
}

EstimatorCostComparison estimator_costs(const RunLog& log) {
  Welford implicit_cost;
  Welford li_cost;
  for (const auto& rec : log.records) {
    if (rec.implicit_estimate.attempted && !rec.implicit_estimate.failed) {
      implicit_cost.add(rec.implicit_estimate.seconds);
    }
    if (rec.li_estimate.attempted && !rec.li_estimate.failed) {
      li_cost.add(rec.li_estimate.seconds);
    }
  }
  return {implicit_cost.cost(), li_cost.cost()};
}

void write_summary(std::ostream& out, const RunLog& log,
                   const std::vector<std::pair<std::string, std::string>>& front) {
  for (const auto& [key, value] : front) {
    out << key << " = " << value << "\n";
  }
  int startup = 0;
  int shortened = 0;
  for (const auto& rec : log.records) {
    if (!rec.accepted) continue;
    if (rec.startup) ++startup;
    if (rec.shortened) ++shortened;
  }
  const RunSummary& s = log.summary;
  out << "accepted_steps = " << s.accepted_steps << "\n";
  out << "rejected_attempts = " << s.rejected_attempts << "\n";
  out << "forced_accepts = " << s.forced_accepts << "\n";
  out << "startup_steps = " << startup << "\n";
  out << "shortened_steps = " << shortened << "\n";
  out << "newton_iterations = " << s.newton_iterations << "\n";
  out << "final_time = " << format_number(s.final_time) << "\n";
  out << "wall_seconds = " << format_number(s.wall_seconds) << "\n";
  out << "total_estimator_seconds = " << format_number(s.total_estimator_seconds) << "\n";
  const auto costs = estimator_costs(log);
  out << "implicit_estimates = " << costs.implicit_cost.samples << "\n";
  out << "implicit_mean_seconds = " << format_number(costs.implicit_cost.mean) << "\n";
  out << "implicit_stddev_seconds = " << format_number(costs.implicit_cost.stddev) << "\n";
  out << "li_estimates = " << costs.li_cost.samples << "\n";
  out << "li_mean_seconds = " << format_number(costs.li_cost.mean) << "\n";
  out << "li_stddev_seconds = " << format_number(costs.li_cost.stddev) << "\n";
  out << "aborted = " << (s.aborted ? "true" : "false") << "\n";
  out << "abort_reason = " << s.abort_reason << "\n";
}

void write_summary(const std::filesystem::path& file, const RunLog& log,
                   const std::vector<std::pair<std::string, std::string>>& front) {
  auto out = open_for_write(file);
  write_summary(out, log, front);
}

void write_estimators_csv(std::ostream& out, const RunLog& log) {
  out << "n,t,est_total_impl,est_total_li,ratio,impl_seconds,li_seconds\n";
  int n = 0;
  for (const auto& rec : log.records) {
    if (!rec.accepted) continue;
    ++n;
    const double impl = slot_total(rec.implicit_estimate);
    const double li = slot_total(rec.li_estimate);
    if (std::isnan(impl) || std::isnan(li)) continue;
    out << n << ',' << format_number(rec.t_end) << ',' << format_number(impl) << ','
        << format_number(li) << ',' << format_number(li / impl) << ','
        << format_number(rec.implicit_estimate.seconds) << ','
        << format_number(rec.li_estimate.seconds) << "\n";
  }
}

void write_estimators_csv(const std::filesystem::path& file, const RunLog& log) {
  auto out = open_for_write(file);
  write_estimators_csv(out, log);
}

void write_orders_csv(std::ostream& out, const std::vector<ConvergenceStudy>& studies) {
  out << "scheme,h,error,observed_order\n";
  for (const auto& study : studies) {
    double h_prev = 0.0;
    double e_prev = 0.0;
    bool first = true;
    for (const auto& row : study.rows) {
      double order = kNan;
      if (!first && row.error > 0.0 && e_prev > 0.0 && row.h != h_prev) {
        order = std::log(e_prev / row.error) / std::log(h_prev / row.h);
      }
      out << to_string(study.scheme) << ',' << format_number(row.h) << ','
          << format_number(row.error) << ',' << format_number(order) << "\n";
      h_prev = row.h;
      e_prev = row.error;
      first = false;
    }
  }
}

void write_orders_csv(const std::filesystem::path& file,
                      const std::vector<ConvergenceStudy>& studies) {
  auto out = open_for_write(file);
  write_orders_csv(out, studies);
}

void write_mesh_tables(const std::filesystem::path& directory,
                       const fem::TaylorHoodSpace& space) {
  {
    auto out = open_for_write(directory / "mesh_nodes.txt");
    out << "# node x y\n";
    const auto& coords = space.node_coords();
    for (Eigen::Index node = 0; node < coords.rows(); ++node) {
      out << node << ' ' << format_number(coords(node, 0)) << ' '
          << format_number(coords(node, 1)) << "\n";
    }
  }
  auto out = open_for_write(directory / "mesh_elements.txt");
  out << "# element v0 v1 v2 m01 m12 m20\n";
  for (Eigen::Index t = 0; t < space.element_count(); ++t) {
    const auto& el = space.element(t);
    out << t;
    for (const int node : el.nodes) out << ' ' << node;
    out << "\n";
  }
}

void write_flow_snapshot(const std::filesystem::path& directory,
                         const fem::NavierStokesProblem& problem,
                         const StateVector& state, const std::string& tag) {
  const fem::TaylorHoodSpace& space = problem.space();
  if (state.values.size() != problem.size()) {
    throw LayoutError("snapshot state does not match the problem size");
  }
  const auto& coords = space.node_coords();
  {
    auto out = open_for_write(directory / ("velocity_" + tag + ".txt"));
    out << "# node x y ux uy\n";
    for (Eigen::Index node = 0; node < space.node_count(); ++node) {
      out << node << ' ' << format_number(coords(node, 0)) << ' '
          << format_number(coords(node, 1)) << ' '
          << format_number(state.values[space.velocity_dof(node, 0)]) << ' '
          << format_number(state.values[space.velocity_dof(node, 1)]) << "\n";
    }
  }
  auto out = open_for_write(directory / ("pressure_" + tag + ".txt"));
  out << "# vertex x y p\n";
  for (Eigen::Index vertex = 0; vertex < space.vertex_count(); ++vertex) {
    out << vertex << ' ' << format_number(coords(vertex, 0)) << ' '
        << format_number(coords(vertex, 1)) << ' '
        << format_number(state.values[space.pressure_dof(vertex)]) << "\n";
  }
}

RunOutputs execute_run(const RunConfig& config) {
  config.validate();
  RunOutputs outputs;
  outputs.directory = config.output_dir;
  std::filesystem::create_directories(outputs.directory);

  outputs.resolved_config = outputs.directory / "config.json";
  {
    auto out = open_for_write(outputs.resolved_config);
    out << serialize_run_config(config);
  }

  const auto problem = instantiate_problem(config);
  StateVector last_state = problem->initial_state(config.t0);
  const auto keep_state = [&last_state](const StepRecord&, const StateVector& s) {
    last_state = s;
  };
  outputs.log = config.reference_run
                    ? reference_run(*problem, config.controller, config.t0,
                                    config.t_end, config.controller.dt_min, keep_state)
                    : run(*problem, config.controller, config.t0, config.t_end,
                          keep_state);

  outputs.steps_csv = outputs.directory / "steps.csv";
  const bool both = config.controller.estimator == DriveEstimator::both;
  write_steps_csv(outputs.steps_csv, outputs.log, both);
  if (both) {
    write_estimators_csv(outputs.directory / "estimators.csv", outputs.log);
  }

  outputs.summary_txt = outputs.directory / "summary.txt";
  write_summary(outputs.summary_txt, outputs.log,
                {{"problem", config.problem},
                 {"estimator", to_string(config.controller.estimator)},
                 {"reference_run", config.reference_run ? "true" : "false"},
                 {"t0", format_number(config.t0)},
                 {"t_end", format_number(config.t_end)}});

  if (const auto* flow = dynamic_cast<const fem::NavierStokesProblem*>(problem.get())) {
    write_mesh_tables(outputs.directory, flow->space());
    write_flow_snapshot(outputs.directory, *flow, last_state, "final");
  }
  return outputs;
}

}  // namespace tadapt
