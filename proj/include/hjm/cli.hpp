#pragma once

// Command-line plumbing: CSV ingest, JSON report serialization, SVG
// diagrams, atomic file output and command dispatch.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hjm/arrangement.hpp"
#include "hjm/core.hpp"
#include "hjm/error.hpp"
#include "hjm/tiling.hpp"

namespace hjm {

inline constexpr int kJsonSchema = 1;
inline constexpr const char* kVersion = "0.1.0";

std::vector<TimeSeriesRecord> parse_csv(std::istream& in, const std::string& source);
std::vector<TimeSeriesRecord> ingest_csv(const std::string& path);

/// Doubles with 17 significant digits; non-finite numbers become null.
std::string to_json_text(const nlohmann::json& j);

std::string fnv1a_hex(std::string_view bytes);

/// Writes to path.tmp then renames over path.
void write_atomic(const std::string& path, const std::string& content);

struct SvgInput {
  const LineFamily* family = nullptr;
  const SweepResult* sweep = nullptr;
  const RhombicTiling* tiling = nullptr;
  std::optional<Snake> highlight;  // Sn(lambda) for the observed output order
};

std::string render_svg(const SvgInput& in);

/// Elements the SVG writer may emit.
const std::vector<std::string>& svg_element_whitelist();

struct RunConfig {
  std::string command;
  std::string input_path;
  std::string output_path;  // empty: stdout
  std::string svg_path;     // empty: no SVG
  std::optional<double> rho;
  std::optional<double> tol;
  std::uint64_t seed = 12345;
  bool timing = false;
};

const std::vector<std::string>& cli_commands();

struct RunOutcome {
  nlohmann::json report;
  int exit_code = 0;
  std::string error;
};

int exit_code_for(ErrorKind kind);

/// Dispatches the command, writes the JSON report (and SVG when requested).
RunOutcome run(const RunConfig& config);

}  // namespace hjm
