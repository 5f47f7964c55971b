#include "sparse_recover/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sparse_recover::io {

std::string format_double(double value) {
  char buffer[32];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buffer, end);
}

namespace {

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

static_assert(std::endian::native == std::endian::little,
              "dataset block writer assumes a little endian host");

std::string encode_doubles(const double* data, std::size_t count) {
  return base64_encode(reinterpret_cast<const std::uint8_t*>(data),
                       count * sizeof(double));
}

void decode_doubles(const std::string& text, double* out, std::size_t count,
                    const char* what) {
  std::vector<std::uint8_t> bytes = base64_decode(text);
  if (bytes.size() != count * sizeof(double)) {
    std::ostringstream msg;
    msg << "dataset: " << what << " block has " << bytes.size()
        << " bytes, expected " << count * sizeof(double);
    throw ParseError(msg.str());
  }
  std::memcpy(out, bytes.data(), bytes.size());
}

}  // namespace

std::string base64_encode(const std::uint8_t* data, std::size_t size) {
  std::string out;
  out.reserve((size + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= size; i += 3) {
    std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(kAlphabet[(v >> 6) & 63]);
    out.push_back(kAlphabet[v & 63]);
  }
  if (i + 1 == size) {
    std::uint32_t v = data[i] << 16;
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.append("==");
  } else if (i + 2 == size) {
    std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(kAlphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.remove_suffix(1);
  if (text.size() % 4 != 0) throw ParseError("base64: length is not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int pad = 0;
    std::uint32_t v = 0;
    for (int j = 0; j < 4; ++j) {
      char c = text[i + j];
      if (c == '=') {
        if (i + 4 != text.size() || j < 2) throw ParseError("base64: misplaced padding");
        ++pad;
        v <<= 6;
        continue;
      }
      if (pad > 0) throw ParseError("base64: data after padding");
      int d = decode_char(c);
      if (d < 0) throw ParseError("base64: invalid character");
      v = (v << 6) | static_cast<std::uint32_t>(d);
    }
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  return out;
}

void write_dataset(std::ostream& out, const Dataset& data,
                   std::optional<std::uint64_t> seed) {
  if (data.X.rows() != data.Y.size())
    throw std::invalid_argument("write_dataset: X row count and Y length differ");
  nlohmann::json header{{"format", "sparse-recover-dataset"},
                        {"version", 1},
                        {"n", data.rows()},
                        {"p", data.cols()},
                        {"dtype", "float64"},
                        {"layout", "row-major"}};
  if (seed) header["seed"] = *seed;
  out << header.dump() << "\n";
  // Eigen stores column-major; emit row-major bytes.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = data.X;
  out << encode_doubles(rm.data(), static_cast<std::size_t>(rm.size())) << "\n";
  out << encode_doubles(data.Y.data(), static_cast<std::size_t>(data.Y.size())) << "\n";
}

std::pair<Dataset, DatasetHeader> read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("dataset: missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& err) {
    throw ParseError(std::string("dataset: bad header json: ") + err.what());
  }
  DatasetHeader meta;
  try {
    if (header.value("format", "") != "sparse-recover-dataset")
      throw ParseError("dataset: unrecognized format field");
    meta.n = header.at("n").get<Index>();
    meta.p = header.at("p").get<Index>();
    meta.dtype = header.value("dtype", "float64");
    meta.layout = header.value("layout", "row-major");
    if (header.contains("seed") && !header["seed"].is_null())
      meta.seed = header["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& err) {
    throw ParseError(std::string("dataset: bad header fields: ") + err.what());
  }
  if (meta.n < 1 || meta.p < 1) throw ParseError("dataset: n and p must be positive");
  if (meta.dtype != "float64") throw ParseError("dataset: unsupported dtype " + meta.dtype);
  if (meta.layout != "row-major")
    throw ParseError("dataset: unsupported layout " + meta.layout);

  std::string x_line, y_line;
  if (!std::getline(in, x_line)) throw ParseError("dataset: missing matrix block");
  if (!std::getline(in, y_line)) throw ParseError("dataset: missing response block");

  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(meta.n, meta.p);
  decode_doubles(x_line, rm.data(), static_cast<std::size_t>(rm.size()), "matrix");
  Dataset data;
  data.X = rm;
  data.Y.resize(meta.n);
  decode_doubles(y_line, data.Y.data(), static_cast<std::size_t>(meta.n), "response");
  return {std::move(data), std::move(meta)};
}

void write_dataset_file(const std::string& path, const Dataset& data,
                        std::optional<std::uint64_t> seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open for writing: " + path);
  write_dataset(out, data, seed);
  if (!out) throw ParseError("write failed: " + path);
}

std::pair<Dataset, DatasetHeader> read_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open dataset file: " + path);
  return read_dataset(in);
}

namespace {

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += "\"\"";
    else quoted.push_back(c);
  }
  quoted.push_back('"');
  return quoted;
}

}  // namespace

std::string csv_header(bool sweep) {
  std::string header =
      "schema_version,n,p,s,a,sigma,method,regime,trials,hamming_mean,"
      "hamming_se,recovery_rate,seed";
  if (sweep) header += ",grid,status";
  return header;
}

std::string csv_risk_row(const ProblemInstance& problem, const std::string& method,
                         const std::string& regime, const sim::RiskEstimate& risk,
                         std::uint64_t seed) {
  std::ostringstream row;
  row << kCsvSchemaVersion << ',' << problem.n << ',' << problem.p << ','
      << problem.s << ',' << format_double(problem.a) << ','
      << format_double(problem.sigma) << ',' << csv_quote(method) << ','
      << csv_quote(regime) << ',' << risk.trials << ','
      << format_double(risk.hamming_mean) << ','
      << (risk.hamming_se ? format_double(*risk.hamming_se) : std::string()) << ','
      << format_double(risk.exact_recovery_rate) << ',' << seed;
  return row.str();
}

std::string csv_sweep_row(const sim::SweepPoint& point, const std::string& method,
                          const std::string& regime, std::uint64_t seed,
                          const std::string& grid_parameter) {
  (void)grid_parameter;
  if (point.status == "ok") {
    return csv_risk_row(point.problem, method, regime, point.risk, seed) + "," +
           format_double(point.grid_value) + ",ok";
  }
  std::ostringstream row;
  row << kCsvSchemaVersion << ',' << point.problem.n << ',' << point.problem.p << ','
      << point.problem.s << ',' << format_double(point.problem.a) << ','
      << format_double(point.problem.sigma) << ',' << csv_quote(method) << ','
      << csv_quote(regime) << ",,,,," << seed << ','
      << format_double(point.grid_value) << ',' << csv_quote(point.status);
  return row.str();
}

}  // namespace sparse_recover::io
