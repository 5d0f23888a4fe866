#pragma once

#include <map>
#include <optional>
#include <string>

#include "conullity/fields.hpp"
#include "conullity/gluing.hpp"
#include "conullity/interval.hpp"
#include "conullity/metric.hpp"

namespace conullity::cli {

// One run: a scenario plus optional model or glue overrides and the shared
// knobs. Optional members left empty keep each scenario's built-in defaults.
struct RunConfig {
  std::string scenario = "all";
  unsigned long long seed = 20260819ull;
  std::string output_dir = "out";
  int workers = 1;
  int samples = 0;  // 0 keeps each scenario's documented sample count

  std::optional<ModelSpec> model;
  std::optional<GlueSpec> glue;

  Field1 foliation_H;  // null picks the built-in turning function
  Interval foliation_window{-3.0, 3.0};
  int foliation_samples = 500;

  std::map<std::string, double> tol;

  RunConfig();
  double tolerance(const std::string& key) const;  // ConfigError on unknown keys
};

// The tolerance keys a [tolerances] section may override, with defaults.
const std::map<std::string, double>& default_tolerances();

// Profile grammar shared by [model], [glue] and [foliation] values:
//   const(c)
//   flat_bump(center, radius, amplitude)
//   poly_bump(center, radius, amplitude)
//   pow_ramp(x0, scale, power)
//   ramp_turn(x0, x1, scale, power)
//   expr: <expression in x>
Field1 make_field1(const std::string& text);

// Conformal-factor grammar:
//   const(c)
//   ch_eta(<any field1 value>)
//   expr2: <expression in x and u>
Field2 make_eta(const std::string& text);

// Line-oriented config file: [run] [model] [glue] [foliation] [tolerances]
// sections of key = value lines, # comments. Anything unrecognized throws
// ConfigError naming the section and key; a model or glue section that fails
// structural validation is a ConfigError too.
RunConfig load_config(const std::string& path);

}  // namespace conullity::cli
