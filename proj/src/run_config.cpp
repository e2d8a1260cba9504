#include "tadapt/run_config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <sstream>
#include <string>

#include "tadapt/fem/navier_stokes.hpp"
#include "tadapt/verification.hpp"

namespace tadapt {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& object, const char* where,
                         std::initializer_list<const char*> allowed) {
  for (const auto& item : object.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) {
      throw InvalidInputError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

/// Overwrite `out` with object[key] when the key is present.
template <typename T>
void read_into(const json& object, const char* key, T& out) {
  if (const auto it = object.find(key); it != object.end()) {
    out = it->template get<T>();
  }
}

void parse_controller(const json& object, ControllerConfig& c) {
  reject_unknown_keys(object, "controller",
                      {"epsilon", "accuracy_order", "kappa_min", "kappa_max",
                       "kappa_safety", "dt_min", "dt_max", "alpha0", "alpha1",
                       "max_retries", "relative_component_norms", "checkpoints",
                       "newton"});
  read_into(object, "epsilon", c.epsilon);
  read_into(object, "accuracy_order", c.accuracy_order);
  read_into(object, "kappa_min", c.kappa_min);
  read_into(object, "kappa_max", c.kappa_max);
  read_into(object, "kappa_safety", c.kappa_safety);
  read_into(object, "dt_min", c.dt_min);
  read_into(object, "dt_max", c.dt_max);
  read_into(object, "alpha0", c.alpha0);
  read_into(object, "alpha1", c.alpha1);
  read_into(object, "max_retries", c.max_retries);
  read_into(object, "relative_component_norms", c.relative_component_norms);
  read_into(object, "checkpoints", c.checkpoints);
  if (const auto it = object.find("newton"); it != object.end()) {
    reject_unknown_keys(*it, "newton", {"abs_tol", "rel_tol", "max_iterations", "damping"});
    read_into(*it, "abs_tol", c.newton.abs_tol);
    read_into(*it, "rel_tol", c.newton.rel_tol);
    read_into(*it, "max_iterations", c.newton.max_iterations);
    read_into(*it, "damping", c.newton.damping);
  }
}

}  // namespace

void RunConfig::validate() const {
  controller.validate();
  if (!std::isfinite(t0) || !std::isfinite(t_end) || t_end < t0) {
    throw InvalidInputError("run config: need finite t0 <= t_end");
  }
  if (refine < 0 || refine > 8) {
    throw InvalidInputError("run config: refine must be in [0, 8]");
  }
  if (degree < 0) {
    throw InvalidInputError("run config: degree must be nonnegative");
  }
  if (!(viscosity >= 0.0) || !std::isfinite(viscosity)) {
    throw InvalidInputError("run config: viscosity must be finite and nonnegative");
  }
  if (output_dir.empty()) {
    throw InvalidInputError("run config: output_dir must not be empty");
  }
  // Fail on an unknown problem id at load time, not at instantiation.
  const char* known[] = {"stiff-ode", "poly-ode", "saddle-dae", "backward-step",
                         "pressure-channel"};
  if (std::none_of(std::begin(known), std::end(known),
                   [&](const char* id) { return problem == id; })) {
    throw InvalidInputError("unknown problem id '" + problem +
                            "' (expected stiff-ode, poly-ode, saddle-dae, "
                            "backward-step, or pressure-channel)");
  }
}

DriveEstimator parse_estimator_token(const std::string& token) {
  if (token == "implicit") return DriveEstimator::implicit_bdf3;
  if (token == "li") return DriveEstimator::linear_implicit;
  if (token == "both") return DriveEstimator::both;
  throw InvalidInputError("unknown estimator '" + token +
                          "' (expected implicit, li, or both)");
}

RunConfig parse_run_config(const std::string& json_text) {
  RunConfig config;
  try {
    const json root = json::parse(json_text);
    if (!root.is_object()) {
      throw InvalidInputError("run config: top level must be a JSON object");
    }
    reject_unknown_keys(root, "run config",
                        {"problem", "refine", "degree", "viscosity", "advection",
                         "t0", "t_end", "estimator", "output_dir", "reference_run",
                         "controller"});
    read_into(root, "problem", config.problem);
    read_into(root, "refine", config.refine);
    read_into(root, "degree", config.degree);
    read_into(root, "viscosity", config.viscosity);
    read_into(root, "advection", config.advection);
    read_into(root, "t0", config.t0);
    read_into(root, "t_end", config.t_end);
    read_into(root, "output_dir", config.output_dir);
    read_into(root, "reference_run", config.reference_run);
    if (const auto it = root.find("estimator"); it != root.end()) {
      config.controller.estimator = parse_estimator_token(it->get<std::string>());
    }
    if (const auto it = root.find("controller"); it != root.end()) {
      parse_controller(*it, config.controller);
    }
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("run config: ") + e.what());
  }
  config.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw InvalidInputError("cannot open config file " + file.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

std::string serialize_run_config(const RunConfig& config) {
  json root;
  root["problem"] = config.problem;
  root["refine"] = config.refine;
  root["degree"] = config.degree;
  root["viscosity"] = config.viscosity;
  root["advection"] = config.advection;
  root["t0"] = config.t0;
  root["t_end"] = config.t_end;
  root["estimator"] = to_string(config.controller.estimator);
  root["output_dir"] = config.output_dir;
  root["reference_run"] = config.reference_run;
  const ControllerConfig& c = config.controller;
  json controller;
  controller["epsilon"] = c.epsilon;
  controller["accuracy_order"] = c.accuracy_order;
  controller["kappa_min"] = c.kappa_min;
  controller["kappa_max"] = c.kappa_max;
  controller["kappa_safety"] = c.kappa_safety;
  controller["dt_min"] = c.dt_min;
  controller["dt_max"] = c.dt_max;
  controller["alpha0"] = c.alpha0;
  controller["alpha1"] = c.alpha1;
  controller["max_retries"] = c.max_retries;
  controller["relative_component_norms"] = c.relative_component_norms;
  controller["checkpoints"] = c.checkpoints;
  json newton;
  newton["abs_tol"] = c.newton.abs_tol;
  newton["rel_tol"] = c.newton.rel_tol;
  newton["max_iterations"] = c.newton.max_iterations;
  newton["damping"] = c.newton.damping;
  controller["newton"] = std::move(newton);
  root["controller"] = std::move(controller);
  return root.dump(2) + "\n";
}

std::shared_ptr<Problem> instantiate_problem(const RunConfig& config) {
  if (config.problem == "stiff-ode") {
    return make_stiff_relaxation_ode();
  }
  if (config.problem == "poly-ode") {
    return make_polynomial_ode(config.degree);
  }
  if (config.problem == "saddle-dae") {
    return make_linear_saddle_dae();
  }
  if (config.problem == "backward-step") {
    return config.viscosity > 0.0
               ? fem::make_backward_step_problem(config.refine, config.advection,
                                                 config.viscosity)
               : fem::make_backward_step_problem(config.refine, config.advection);
  }
  if (config.problem == "pressure-channel") {
    return config.viscosity > 0.0
               ? fem::make_pressure_channel_problem(config.refine, config.advection,
                                                    config.viscosity)
               : fem::make_pressure_channel_problem(config.refine, config.advection);
  }
  throw InvalidInputError("unknown problem id '" + config.problem +
                          "' (expected stiff-ode, poly-ode, saddle-dae, "
                          "backward-step, or pressure-channel)");
}

}  // namespace tadapt
