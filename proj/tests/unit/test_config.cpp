#include "tadapt/run_config.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tadapt/fem/navier_stokes.hpp"
#include "tadapt/reporting.hpp"
#include "tadapt/verification.hpp"

using namespace tadapt;
namespace fs = std::filesystem;

namespace {

/// Fresh directory under the system temp dir, removed when the test ends.
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("tadapt-test-" + std::to_string(std::rand()) + "-" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this) & 0xffff));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<std::string> read_lines(const fs::path& file) {
  std::ifstream in(file);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

RunConfig fast_ode_config(const fs::path& out) {
  RunConfig config;
  config.problem = "stiff-ode";
  config.t0 = 0.0;
  config.t_end = 0.5;
  config.output_dir = out.string();
  return config;
}

}  // namespace

TEST_CASE("config defaults round-trip through serialization") {
  RunConfig config;
  config.problem = "saddle-dae";
  config.t_end = 0.25;
  config.controller.estimator = DriveEstimator::both;
  config.controller.checkpoints = {0.1, 0.2};
  const std::string text = serialize_run_config(config);
  const RunConfig back = parse_run_config(text);
  CHECK(back.problem == config.problem);
  CHECK(back.t0 == config.t0);
  CHECK(back.t_end == config.t_end);
  CHECK(back.refine == config.refine);
  CHECK(back.degree == config.degree);
  CHECK(back.viscosity == config.viscosity);
  CHECK(back.advection == config.advection);
  CHECK(back.output_dir == config.output_dir);
  CHECK(back.reference_run == config.reference_run);
  CHECK(back.controller.estimator == DriveEstimator::both);
  CHECK(back.controller.epsilon == config.controller.epsilon);
  CHECK(back.controller.dt_min == config.controller.dt_min);
  CHECK(back.controller.dt_max == config.controller.dt_max);
  CHECK(back.controller.kappa_min == config.controller.kappa_min);
  CHECK(back.controller.kappa_max == config.controller.kappa_max);
  CHECK(back.controller.kappa_safety == config.controller.kappa_safety);
  CHECK(back.controller.alpha0 == config.controller.alpha0);
  CHECK(back.controller.alpha1 == config.controller.alpha1);
  CHECK(back.controller.max_retries == config.controller.max_retries);
  CHECK(back.controller.checkpoints == config.controller.checkpoints);
  CHECK(back.controller.newton.rel_tol == config.controller.newton.rel_tol);
  // Serializing the parsed config reproduces the text exactly.
  CHECK(serialize_run_config(back) == text);
}

TEST_CASE("partial configs keep defaults for everything unspecified") {
  const RunConfig config = parse_run_config(R"({
    "problem": "poly-ode",
    "degree": 3,
    "t_end": 0.1,
    "controller": {"epsilon": 1e-5}
  })");
  CHECK(config.problem == "poly-ode");
  CHECK(config.degree == 3);
  CHECK(config.controller.epsilon == 1e-5);
  CHECK(config.controller.dt_min == ControllerConfig{}.dt_min);
  CHECK(config.controller.dt_max == ControllerConfig{}.dt_max);
  CHECK(config.controller.estimator == DriveEstimator::linear_implicit);
  CHECK(!config.reference_run);
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK_THROWS_AS((void)parse_run_config(R"({"problem": "stiff-ode", "dt_min": 1e-3})"),
                  InvalidInputError);
  CHECK_THROWS_AS(
      (void)parse_run_config(R"({"problem": "stiff-ode", "controller": {"eps": 1e-3}})"),
      InvalidInputError);
  CHECK_THROWS_AS((void)parse_run_config(
                      R"({"controller": {"newton": {"tol": 1e-8}}})"),
                  InvalidInputError);
}

TEST_CASE("malformed configs fail with input errors, not JSON internals") {
  CHECK_THROWS_AS((void)parse_run_config("not json at all"), InvalidInputError);
  CHECK_THROWS_AS((void)parse_run_config("[1, 2, 3]"), InvalidInputError);
  CHECK_THROWS_AS((void)parse_run_config(R"({"t_end": "soon"})"), InvalidInputError);
  CHECK_THROWS_AS((void)parse_run_config(R"({"estimator": "fastest"})"),
                  InvalidInputError);
  CHECK_THROWS_AS((void)parse_run_config(R"({"problem": "heat-equation"})"),
                  InvalidInputError);
  CHECK_THROWS_AS((void)parse_run_config(R"({"t0": 1.0, "t_end": 0.0})"),
                  InvalidInputError);
  CHECK_THROWS_AS((void)parse_run_config(R"({"refine": 9})"), InvalidInputError);
  CHECK_THROWS_AS((void)parse_run_config(R"({"viscosity": -0.1})"), InvalidInputError);
  CHECK_THROWS_AS((void)parse_run_config(R"({"controller": {"dt_min": 0.2}})"),
                  InvalidInputError);
  CHECK_THROWS_AS((void)load_run_config("/nonexistent/config.json"), InvalidInputError);
}

TEST_CASE("estimator tokens parse to the matching enum") {
  CHECK(parse_estimator_token("implicit") == DriveEstimator::implicit_bdf3);
  CHECK(parse_estimator_token("li") == DriveEstimator::linear_implicit);
  CHECK(parse_estimator_token("both") == DriveEstimator::both);
  CHECK_THROWS_AS((void)parse_estimator_token("BOTH"), InvalidInputError);
  for (const auto kind : {DriveEstimator::implicit_bdf3, DriveEstimator::linear_implicit,
                          DriveEstimator::both}) {
    CHECK(parse_estimator_token(to_string(kind)) == kind);
  }
}

TEST_CASE("every problem id instantiates to its advertised shape") {
  RunConfig config;
  config.problem = "stiff-ode";
  CHECK(instantiate_problem(config)->size() == 1);
  config.problem = "poly-ode";
  config.degree = 4;
  CHECK(instantiate_problem(config)->size() == 1);
  config.problem = "saddle-dae";
  CHECK(instantiate_problem(config)->size() == 11);
  config.problem = "backward-step";
  config.refine = 0;
  CHECK(instantiate_problem(config)->size() == 1594);
  config.problem = "pressure-channel";
  CHECK(instantiate_problem(config)->size() == 1928);

  // The viscosity knob reaches the assembled problem.
  config.viscosity = 0.25;
  const auto problem = instantiate_problem(config);
  const auto* flow = dynamic_cast<const fem::NavierStokesProblem*>(problem.get());
  REQUIRE(flow != nullptr);
  CHECK(flow->options().viscosity == 0.25);
}

TEST_CASE("the shipped configs load and pass validation") {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(TADAPT_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    const RunConfig config = load_run_config(entry.path());
    CHECK(!config.problem.empty());
    CHECK(config.t_end > config.t0);
  }
  CHECK(seen >= 4);
}

TEST_CASE("steps csv has the pinned schema and one row per accepted step") {
  TempDir dir;
  const auto outputs = execute_run(fast_ode_config(dir.path / "run"));
  REQUIRE(!outputs.log.summary.aborted);

  const auto lines = read_lines(outputs.steps_csv);
  REQUIRE(!lines.empty());
  CHECK(lines[0] ==
        "n,t,dt,est_total,est_velocity,est_pressure,retries,newton_iters,"
        "estimator_seconds");
  CHECK(static_cast<int>(lines.size()) - 1 == outputs.log.summary.accepted_steps);

  double t_prev = 0.0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_csv(lines[i]);
    REQUIRE(fields.size() == 9);
    CHECK(std::stoi(fields[0]) == static_cast<int>(i));
    const double t = std::stod(fields[1]);
    const double dt = std::stod(fields[2]);
    CHECK(t > t_prev);
    CHECK(t == doctest::Approx(t_prev + dt).epsilon(1e-9));
    t_prev = t;
    CHECK(std::stoi(fields[6]) >= 0);  // retries
    CHECK(std::stoi(fields[7]) >= 0);  // newton iterations
    // A scalar ODE has neither a velocity nor a pressure component.
    CHECK(std::isnan(std::stod(fields[4])));
    CHECK(std::isnan(std::stod(fields[5])));
  }

  // The resolved config written next to the outputs loads back identically.
  const RunConfig resolved = load_run_config(outputs.resolved_config);
  CHECK(resolved.problem == "stiff-ode");
  CHECK(resolved.t_end == 0.5);
  CHECK(serialize_run_config(resolved) ==
        serialize_run_config(fast_ode_config(dir.path / "run")));

  // Summary carries the headline counts.
  bool saw_accepted = false;
  for (const auto& line : read_lines(outputs.summary_txt)) {
    if (line == "accepted_steps = " + std::to_string(outputs.log.summary.accepted_steps)) {
      saw_accepted = true;
    }
  }
  CHECK(saw_accepted);
}

TEST_CASE("both-estimator runs grow the comparison columns") {
  TempDir dir;
  RunConfig config = fast_ode_config(dir.path / "run");
  config.controller.estimator = DriveEstimator::both;
  const auto outputs = execute_run(config);
  REQUIRE(!outputs.log.summary.aborted);

  const auto lines = read_lines(outputs.steps_csv);
  CHECK(lines[0] ==
        "n,t,dt,est_total,est_velocity,est_pressure,retries,newton_iters,"
        "estimator_seconds,est_total_impl,est_total_li");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    REQUIRE(split_csv(lines[i]).size() == 11);
  }

  // The side-by-side table exists and its ratio column is consistent.
  const auto est_lines = read_lines(outputs.directory / "estimators.csv");
  CHECK(est_lines[0] == "n,t,est_total_impl,est_total_li,ratio,impl_seconds,li_seconds");
  REQUIRE(est_lines.size() > 2);
  for (std::size_t i = 1; i < est_lines.size(); ++i) {
    const auto fields = split_csv(est_lines[i]);
    REQUIRE(fields.size() == 7);
    const double impl = std::stod(fields[2]);
    const double li = std::stod(fields[3]);
    const double ratio = std::stod(fields[4]);
    CHECK(ratio == doctest::Approx(li / impl).epsilon(1e-12));
  }

  const auto costs = estimator_costs(outputs.log);
  CHECK(costs.implicit_cost.samples > 0);
  CHECK(costs.li_cost.samples > 0);
  CHECK(costs.implicit_cost.mean >= 0.0);
  CHECK(costs.li_cost.mean >= 0.0);
  CHECK(costs.implicit_cost.stddev >= 0.0);
}

TEST_CASE("csv output is deterministic apart from the timing column") {
  TempDir dir;
  const auto strip_timings = [](const std::vector<std::string>& lines) {
    std::vector<std::string> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      auto fields = split_csv(lines[i]);
      fields[8].clear();
      std::string joined;
      for (const auto& f : fields) joined += f + "|";
      rows.push_back(joined);
    }
    return rows;
  };
  const auto first = execute_run(fast_ode_config(dir.path / "a"));
  const auto second = execute_run(fast_ode_config(dir.path / "b"));
  CHECK(strip_timings(read_lines(first.steps_csv)) ==
        strip_timings(read_lines(second.steps_csv)));
}

TEST_CASE("a zero-length interval runs cleanly with zero steps") {
  TempDir dir;
  RunConfig config = fast_ode_config(dir.path / "empty");
  config.t_end = config.t0;
  const auto outputs = execute_run(config);
  CHECK(!outputs.log.summary.aborted);
  CHECK(outputs.log.summary.accepted_steps == 0);
  CHECK(read_lines(outputs.steps_csv).size() == 1);  // header only
}

TEST_CASE("reference runs march at the constant minimum step") {
  TempDir dir;
  RunConfig config = fast_ode_config(dir.path / "ref");
  config.reference_run = true;
  config.t_end = 0.01;
  config.controller.dt_min = 1e-3;
  const auto outputs = execute_run(config);
  REQUIRE(!outputs.log.summary.aborted);
  CHECK(outputs.log.summary.accepted_steps == 10);
  for (const auto& rec : outputs.log.records) {
    CHECK(rec.dt == doctest::Approx(1e-3).epsilon(1e-12));
  }
}

TEST_CASE("orders csv lists pairwise observed orders per scheme") {
  const auto problem = make_polynomial_ode(5);
  const std::vector<double> steps = {2e-2, 1e-2, 5e-3};
  const std::vector<ConvergenceStudy> studies = {
      convergence_study(*problem, Scheme::bdf2, steps, 0.0, 1.0),
      convergence_study(*problem, Scheme::bdf3, steps, 0.0, 1.0)};
  std::ostringstream out;
  write_orders_csv(out, studies);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "scheme,h,error,observed_order");
  int rows = 0;
  while (std::getline(in, line)) {
    const auto fields = split_csv(line);
    REQUIRE(fields.size() == 4);
    const bool first_of_scheme = rows % 3 == 0;
    if (first_of_scheme) {
      CHECK(std::isnan(std::stod(fields[3])));
    } else {
      // u = 1 + t^5 is smooth: pairwise orders sit near the scheme order.
      const double order = std::stod(fields[3]);
      const double expected = fields[0] == "bdf2" ? 2.0 : 3.0;
      CHECK(order == doctest::Approx(expected).epsilon(0.2));
    }
    ++rows;
  }
  CHECK(rows == 6);
}

TEST_CASE("flow runs leave mesh tables and a final snapshot behind") {
  TempDir dir;
  RunConfig config;
  config.problem = "pressure-channel";
  config.refine = 0;
  config.advection = false;  // keep the smoke test cheap
  config.t0 = 0.0;
  config.t_end = 0.0;        // no time stepping: snapshot of the resting state
  config.output_dir = (dir.path / "flow").string();
  const auto outputs = execute_run(config);
  CHECK(!outputs.log.summary.aborted);

  const auto nodes = read_lines(outputs.directory / "mesh_nodes.txt");
  const auto elements = read_lines(outputs.directory / "mesh_elements.txt");
  const auto velocity = read_lines(outputs.directory / "velocity_final.txt");
  const auto pressure = read_lines(outputs.directory / "pressure_final.txt");
  CHECK(nodes.size() == 1 + 851);      // header + one row per velocity node
  CHECK(elements.size() == 1 + 400);   // header + one row per triangle
  CHECK(velocity.size() == 1 + 851);
  CHECK(pressure.size() == 1 + 226);   // header + one row per vertex
  CHECK(nodes[0] == "# node x y");
  CHECK(elements[0] == "# element v0 v1 v2 m01 m12 m20");
  CHECK(velocity[0] == "# node x y ux uy");
  CHECK(pressure[0] == "# vertex x y p");

  // Element rows reference valid node ids.
  std::istringstream row(elements[1]);
  int id = 0;
  int value = 0;
  row >> id;
  for (int k = 0; k < 6; ++k) {
    REQUIRE((row >> value));
    CHECK(value >= 0);
    CHECK(value < 851);
  }
  CHECK(id == 0);

  // The resting state is all zeros.
  std::istringstream vrow(velocity[1]);
  int node = 0;
  double x = 0.0;
  double y = 0.0;
  double ux = 1.0;
  double uy = 1.0;
  vrow >> node >> x >> y >> ux >> uy;
  CHECK(ux == 0.0);
  CHECK(uy == 0.0);
}

TEST_CASE("number formatting round-trips and keeps short spellings") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-4) == "1e-04");
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-2.5) == "-2.5");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
}
