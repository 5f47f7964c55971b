#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "sparse_recover/io.hpp"
#include "sparse_recover/types.hpp"

namespace sparse_recover::cli {

// Flag values layered on top of the config file.
struct Overrides {
  std::optional<long> n, p, s;
  std::optional<double> a, sigma;
  std::optional<std::string> regime;
  std::optional<long> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> data;
  bool strict = false;
  bool quiet = false;
};

// Every recognized key with its default value.
nlohmann::json default_config();

// File config over defaults, flags over both. Unknown keys are
// rejected so typos fail loudly.
nlohmann::json resolve_config(const nlohmann::json& file_config,
                              const Overrides& overrides);

ProblemInstance problem_from(const nlohmann::json& config);

int run_cli(int argc, char** argv);

}  // namespace sparse_recover::cli
