#include "bcpinn/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace bcpinn {

using nlohmann::json;

namespace {

// Helper with contextual error messages for missing/mistyped fields.
template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config field '" + key + "': " + e.what());
  }
}

PdeKind parse_kind(const std::string& name) {
  if (name == "allen_cahn" || name == "ac") return PdeKind::AllenCahn;
  if (name == "cahn_hilliard4" || name == "ch4") return PdeKind::CahnHilliard4;
  if (name == "cahn_hilliard_phase_space" || name == "chps" || name == "ch")
    return PdeKind::CahnHilliardPhaseSpace;
  throw ConfigError("config: unknown problem kind '" + name + "'");
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config: parse error in " + path + ": " + e.what());
  }
  return from_json(j);
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig cfg;

  const json problem = j.value("problem", json::object());
  const std::string kind = get_or<std::string>(problem, "kind", "allen_cahn");
  cfg.problem.kind = parse_kind(kind);
  cfg.problem.ac.c1_sq = get_or(problem, "c1_sq", cfg.problem.ac.c1_sq);
  cfg.problem.ac.c2 = get_or(problem, "c2", cfg.problem.ac.c2);
  cfg.problem.ch.alpha = get_or(problem, "alpha", cfg.problem.ch.alpha);
  cfg.problem.ch.kappa = get_or(problem, "kappa", cfg.problem.ch.kappa);
  cfg.problem.boundary_order = get_or(
      problem, "boundary_order",
      cfg.problem.kind == PdeKind::CahnHilliardPhaseSpace ? 1 : 2);

  const json domain = j.value("domain", json::object());
  cfg.domain = DomainBox(get_or(domain, "x_min", -1.0), get_or(domain, "x_max", 1.0),
                         get_or(domain, "t_min", 0.0),
                         get_or(domain, "t_max", get_or(domain, "t_final", 1.0)));

  const json schedule = j.value("schedule", json::object());
  const bool is_ch = cfg.problem.kind != PdeKind::AllenCahn;
  cfg.schedule.t_final = cfg.domain.t_max - cfg.domain.t_min;
  cfg.schedule.segments = get_or(schedule, "segments", is_ch ? 20 : 5);
  cfg.schedule.steps_per_segment = get_or(schedule, "steps_per_segment", is_ch ? 10 : 40);
  cfg.schedule.snapshot_dt = get_or(schedule, "snapshot_dt", 0.005);
  cfg.schedule.n_initial = get_or(schedule, "n_initial", 512);
  cfg.schedule.n_boundary = get_or(schedule, "n_boundary", is_ch ? 10 : 40);
  cfg.schedule.n_collocation = get_or(schedule, "n_collocation", is_ch ? 5000 : 20000);
  cfg.schedule.adam_iterations = get_or(schedule, "adam_iterations", 10000);
  cfg.schedule.lbfgs_iterations = get_or(schedule, "lbfgs_iterations", 2000);

  const json network = j.value("network", json::object());
  cfg.train.hidden_layers =
      get_or(network, "hidden_layers", std::vector<int>{200, 200, 200, 200});

  cfg.train.seed = get_or<std::uint64_t>(j, "seed", 1);
  const std::string mode = get_or<std::string>(j, "mode", "bc");
  if (mode == "bc")
    cfg.standard_mode = false;
  else if (mode == "standard")
    cfg.standard_mode = true;
  else
    throw ConfigError("config: mode must be 'bc' or 'standard', got '" + mode + "'");

  const json adam = j.value("adam", json::object());
  cfg.train.adam.learning_rate = get_or(adam, "learning_rate", 1e-3);
  cfg.train.adam.beta1 = get_or(adam, "beta1", 0.9);
  cfg.train.adam.beta2 = get_or(adam, "beta2", 0.999);
  cfg.train.adam.epsilon = get_or(adam, "epsilon", 1e-8);

  const json lbfgs = j.value("lbfgs", json::object());
  cfg.train.lbfgs.max_function_evals = get_or(lbfgs, "max_function_evals", 50000);
  cfg.train.lbfgs.max_line_search = get_or(lbfgs, "max_line_search", 50);
  cfg.train.lbfgs.history = get_or(lbfgs, "history", 50);
  cfg.train.lbfgs.ftol = get_or(lbfgs, "ftol", 2.22044604925e-16);
  cfg.train.lbfgs.gradient_norm_stop = get_or(lbfgs, "gradient_norm_stop", false);
  cfg.train.lbfgs.gradient_norm_tol = get_or(lbfgs, "gradient_norm_tol", 1e-12);

  const json variants = j.value("variants", json::object());
  cfg.train.log_residual = get_or(variants, "log_residual", false);
  cfg.train.reset_adam_per_segment = get_or(variants, "reset_adam_per_segment", true);
  cfg.train.log_stride = get_or(j, "log_stride", 1);

  cfg.validate();
  return cfg;
}

json RunConfig::to_json() const {
  json j;
  j["problem"] = {{"kind", problem.name()}, {"boundary_order", problem.boundary_order}};
  if (problem.kind == PdeKind::AllenCahn) {
    j["problem"]["c1_sq"] = problem.ac.c1_sq;
    j["problem"]["c2"] = problem.ac.c2;
  } else {
    j["problem"]["alpha"] = problem.ch.alpha;
    j["problem"]["kappa"] = problem.ch.kappa;
  }
  j["domain"] = {{"x_min", domain.x_min},
                 {"x_max", domain.x_max},
                 {"t_min", domain.t_min},
                 {"t_max", domain.t_max}};
  j["schedule"] = {{"segments", schedule.segments},
                   {"steps_per_segment", schedule.steps_per_segment},
                   {"snapshot_dt", schedule.snapshot_dt},
                   {"n_initial", schedule.n_initial},
                   {"n_boundary", schedule.n_boundary},
                   {"n_collocation", schedule.n_collocation},
                   {"adam_iterations", schedule.adam_iterations},
                   {"lbfgs_iterations", schedule.lbfgs_iterations}};
  j["network"] = {{"hidden_layers", train.hidden_layers}};
  j["seed"] = train.seed;
  j["mode"] = standard_mode ? "standard" : "bc";
  j["adam"] = {{"learning_rate", train.adam.learning_rate},
               {"beta1", train.adam.beta1},
               {"beta2", train.adam.beta2},
               {"epsilon", train.adam.epsilon}};
  j["lbfgs"] = {{"max_function_evals", train.lbfgs.max_function_evals},
                {"max_line_search", train.lbfgs.max_line_search},
                {"history", train.lbfgs.history},
                {"ftol", train.lbfgs.ftol},
                {"gradient_norm_stop", train.lbfgs.gradient_norm_stop},
                {"gradient_norm_tol", train.lbfgs.gradient_norm_tol}};
  j["variants"] = {{"log_residual", train.log_residual},
                   {"reset_adam_per_segment", train.reset_adam_per_segment}};
  j["log_stride"] = train.log_stride;
  return j;
}

std::vector<int> RunConfig::layer_dims() const {
  std::vector<int> dims;
  dims.push_back(2);
  for (int h : train.hidden_layers) dims.push_back(h);
  dims.push_back(problem.output_width());
  return dims;
}

void RunConfig::validate() const {
  try {
    problem.validate();
    schedule.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (train.hidden_layers.empty())
    throw ConfigError("config: network needs at least one hidden layer");
  for (int h : train.hidden_layers)
    if (h < 1) throw ConfigError("config: hidden layer widths must be positive");
  if (standard_mode && schedule.segments != 1)
    throw ConfigError("config: standard mode requires a single segment");
  if (train.log_stride < 1) throw ConfigError("config: log_stride must be positive");
  const double covered =
      schedule.segments * schedule.steps_per_segment * schedule.snapshot_dt;
  if (std::abs(covered - (domain.t_max - domain.t_min)) > 1e-9)
    throw ConfigError("config: schedule does not cover the time domain");
}

RunConfig RunConfig::preset(const std::string& name) {
  json j;
  if (name == "ac-paper") {
    j["problem"] = {{"kind", "allen_cahn"}};
    j["schedule"] = {{"segments", 5},       {"steps_per_segment", 40},
                     {"n_boundary", 40},    {"n_collocation", 20000},
                     {"adam_iterations", 10000}, {"lbfgs_iterations", 2000}};
    j["network"] = {{"hidden_layers", std::vector<int>{200, 200, 200, 200}}};
  } else if (name == "ac-desk") {
    j["problem"] = {{"kind", "allen_cahn"}};
    j["schedule"] = {{"segments", 5},      {"steps_per_segment", 40},
                     {"n_boundary", 40},   {"n_collocation", 5000},
                     {"adam_iterations", 3000}, {"lbfgs_iterations", 1000}};
    j["network"] = {{"hidden_layers", std::vector<int>{64, 64, 64}}};
  } else if (name == "ch-paper") {
    j["problem"] = {{"kind", "cahn_hilliard_phase_space"}};
    j["schedule"] = {{"segments", 20},     {"steps_per_segment", 10},
                     {"n_boundary", 10},   {"n_collocation", 5000},
                     {"adam_iterations", 10000}, {"lbfgs_iterations", 2000}};
    j["network"] = {{"hidden_layers", std::vector<int>{200, 200, 200, 200}}};
  } else if (name == "ch-desk") {
    j["problem"] = {{"kind", "cahn_hilliard_phase_space"}};
    j["schedule"] = {{"segments", 20},     {"steps_per_segment", 10},
                     {"n_boundary", 10},   {"n_collocation", 2000},
                     {"adam_iterations", 3000}, {"lbfgs_iterations", 1000}};
    j["network"] = {{"hidden_layers", std::vector<int>{64, 64, 64}}};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return from_json(j);
}

}  // namespace bcpinn
