#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sparse_jacobi/bigint.hpp"
#include "sparse_jacobi/sparse_model.hpp"
#include "sparse_jacobi/spectral_measure.hpp"

namespace sparse_jacobi::io {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kCommands[] = {"model",          "density",    "decay-scan",
                                                 "resonance",      "corput",     "lemma-main",
                                                 "gevrey-verify",  "kronecker",  "report"};

bool is_command(std::string_view name);

struct ModelSection {
  std::string family;  // free, exponential, log_squared, factorial, explicit
  model::SparsenessSpec spec{};
  double p = 1.0;
  model::PhiWindow phi_window{0.1, 3.0};

  model::SparseModel build() const;
};

struct NumericsSection {
  spectral::IntegrationOptions integration{};
  std::string precision = "double";  // double or extended
  unsigned threads = 0;              // 0 picks the hardware count
};

struct OutputSection {
  std::string dir = "runs";
  bool csv = true;
  bool json = true;
};

// Validated configuration with every default filled in.
struct RunConfig {
  std::string command;
  ModelSection model;
  Json task;  // command parameters, defaults applied
  NumericsSection numerics;
  OutputSection output;
  Json resolved;  // full config as written to artifacts

  // SHA-256 of the canonical resolved config without the thread count.
  std::string hash() const;
};

// key=value with a dotted key path; the value is read as YAML.
struct Override {
  std::string path;
  std::string value;
};

Override parse_override(std::string_view text);

// Unknown keys, wrong types and missing keys raise ConfigError naming the key path.
RunConfig load_config(std::string_view command, const std::string& yaml_text,
                      const std::vector<Override>& overrides = {});
RunConfig load_config_file(std::string_view command, const std::string& path,
                           const std::vector<Override>& overrides = {});

// Parameters of the task section for a command, with defaults.
const Json& task_defaults(std::string_view command);

// "auto" picks the truncation just past the last barrier.
BigInt resolve_N(const Json& value, const model::SparseModel& model, const char* key);

}  // namespace sparse_jacobi::io
