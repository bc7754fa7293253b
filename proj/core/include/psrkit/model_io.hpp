#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "psrkit/markov_model.hpp"
#include "psrkit/model.hpp"
#include "psrkit/pomdp_model.hpp"
#include "psrkit/psr_model.hpp"

namespace psr {

// JSON model files. Every file carries "type" ("pomdp" | "markov" | "psr"),
// "actions", and "observations"; the rest is type-specific:
//   pomdp:  "T" {action: k*k row-major}, "O" {action: {obs: k diagonal}},
//           "b0" [k]
//   markov: "order" n, "obs" {action: (|A||O|+1)^n * |O| row-major}
//   psr:    "core_tests" [rendered], "p0" [k], "m" {step-token: [k]},
//           "M" {step-token: k*k row-major}
// Loading validates every type invariant and throws SchemaError naming the
// offending field path. Serialization is deterministic (sorted keys).

nlohmann::json model_to_json(const Model& model);
std::unique_ptr<Model> model_from_json(const nlohmann::json& j);

std::unique_ptr<Model> load_model(const std::string& path);
void save_model(const Model& model, const std::string& path);

}  // namespace psr
