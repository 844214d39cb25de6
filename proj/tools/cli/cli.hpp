#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "infodesign/design.hpp"
#include "infodesign/error.hpp"

namespace infodesign::cli {

enum class Command { SolveSysopt, SolveUe, SolveBue, Design, Poa, CheckTheorems, Sweep };

std::string to_string(Command command);
/// Throws ConfigParse for unknown names.
Command command_from_name(const std::string& name);

/// Inclusive arithmetic progression min, min + step, ... <= max (up to 1e-9
/// relative slack). Empty when min > max.
struct Range {
  double min = 0.0;
  double max = 0.0;
  double step = 0.0;

  std::vector<double> values() const;
};

struct SweepSpec {
  Range a1;
  Range a2;
  /// check-theorems or design
  Command per_point = Command::CheckTheorems;
  /// Keep only points with a1 <= a2.
  bool ordered = false;
};

struct RunConfig {
  Command command = Command::Design;
  /// Raw graph and scenario specs; null graph means parallel links.
  nlohmann::json graph;
  nlohmann::json scenarios;
  /// Policy matrix (scenarios x paths) for solve-bue and poa.
  nlohmann::json policy;
  DesignOptions design;
  std::uint64_t seed = 0;
  std::size_t grid_n = 200;
  std::optional<SweepSpec> sweep;
  std::filesystem::path out_dir = ".";
  bool plot = true;

  /// Resolved configuration including defaults.
  nlohmann::json to_json() const;
};

/// Command-line values; each one wins over the file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::size_t> grid_n;
  std::optional<std::size_t> restarts;
  std::optional<double> tolerance;
};

/// Throws FileIO when the file cannot be read and ConfigParse on malformed
/// content or missing command-specific fields.
RunConfig load_config(const std::filesystem::path& file, Command command, const Overrides& overrides = {});
RunConfig config_from_json(const nlohmann::json& j, Command command, const Overrides& overrides = {});

using Cell = std::variant<double, long long, std::string>;

struct PlotTable {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

struct RunOutput {
  /// Deterministic part of result.json (config echo, seed, results).
  nlohmann::json result;
  std::optional<PlotTable> plot;
};

/// Runs the command without touching the filesystem.
RunOutput execute(const RunConfig& config);

/// CSV with a header row; doubles use 12 significant digits. Throws FileIO.
void emit_plot_data(const PlotTable& table, const std::filesystem::path& path);
void write_csv(const PlotTable& table, std::ostream& os);

/// Executes and writes result.json (plus plot.csv when present) to
/// config.out_dir. Returns the paths written.
std::vector<std::filesystem::path> run(const RunConfig& config);

/// 0 success, 1 solver failure, 2 configuration error, 3 I/O error.
int exit_code_for(ErrorCode code);

/// Full command-line entry point; errors go to `err` as one JSON object.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace infodesign::cli
