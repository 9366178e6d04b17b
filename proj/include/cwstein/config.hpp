#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cwstein/spin_measures.hpp"

namespace cwstein {

const std::vector<std::string>& command_names();

// Schema for experiment configs (draft-07 subset plus a command discriminator).
const Json& config_schema();

struct SchemaIssue {
  std::string path;  // JSON pointer
  std::string message;
};

// Validates `doc` and fills defaults in place. Returns all issues found.
std::vector<SchemaIssue> validate_and_fill(const Json& schema, Json& doc);

struct ExperimentConfig {
  std::string command;
  Json effective;  // validated, defaults filled, overrides applied
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
};

// Parse errors report line and column; schema errors report the field path.
ExperimentConfig parse_config_text(const std::string& text, const std::string& command_hint = "",
                                   const Overrides& overrides = {}, const std::string& source = "<config>");
ExperimentConfig parse_config(const std::string& path, const std::string& command_hint = "",
                              const Overrides& overrides = {});

}  // namespace cwstein
