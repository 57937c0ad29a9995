#pragma once

#include <nlohmann/json_fwd.hpp>
#include <stdexcept>
#include <string>

#include "bcpinn/sampling.hpp"
#include "bcpinn/trainer.hpp"

namespace bcpinn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One experiment: problem, domain, segment schedule, training options.
struct RunConfig {
  PdeProblem problem;
  DomainBox domain;
  SegmentSchedule schedule;
  TrainOptions train;
  bool standard_mode = false;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  std::vector<int> layer_dims() const;
  void validate() const;

  /// Built-in presets: "ac-desk", "ac-paper", "ch-desk", "ch-paper".
  static RunConfig preset(const std::string& name);
};

}  // namespace bcpinn
