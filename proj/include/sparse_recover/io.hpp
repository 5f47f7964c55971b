#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sparse_recover/sim.hpp"
#include "sparse_recover/types.hpp"

namespace sparse_recover::io {

// Malformed input files or JSON.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration values.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

std::string base64_encode(const std::uint8_t* data, std::size_t size);
std::vector<std::uint8_t> base64_decode(std::string_view text);

struct DatasetHeader {
  Index n = 0;
  Index p = 0;
  std::string dtype = "float64";
  std::string layout = "row-major";
  std::optional<std::uint64_t> seed;
};

// One JSON header line, then base64 blocks with the row-major X bytes
// and the Y bytes, little endian float64.
void write_dataset(std::ostream& out, const Dataset& data,
                   std::optional<std::uint64_t> seed);
std::pair<Dataset, DatasetHeader> read_dataset(std::istream& in);

void write_dataset_file(const std::string& path, const Dataset& data,
                        std::optional<std::uint64_t> seed);
std::pair<Dataset, DatasetHeader> read_dataset_file(const std::string& path);

inline constexpr int kCsvSchemaVersion = 1;

std::string csv_header(bool sweep);
std::string csv_risk_row(const ProblemInstance& problem, const std::string& method,
                         const std::string& regime, const sim::RiskEstimate& risk,
                         std::uint64_t seed);
std::string csv_sweep_row(const sim::SweepPoint& point, const std::string& method,
                          const std::string& regime, std::uint64_t seed,
                          const std::string& grid_parameter);

}  // namespace sparse_recover::io
