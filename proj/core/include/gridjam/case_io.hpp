#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridjam/attack_design.hpp"
#include "gridjam/grid_model.hpp"

namespace gridjam {

/// Edge-list topology: "from_bus to_bus [susceptance]" per line, '#'
/// comments.  Missing susceptances default to 1.0.
Grid parse_topology(const std::filesystem::path& path);
Grid parse_topology_text(std::string_view text);

/// A resolved measurement configuration with its cost parameters.
struct Scenario {
  std::vector<Measurement> measurements;
  CostParams params;
  std::optional<double> lambda;
};

/// Key-value scenario file:
///
///   flows: all | none | <line index>...   (0-based, topology order)
///   phasors: all | none | <bus id>...
///   secure: none | <measurement id>...    (flows first, then phasors)
///   p_I: <real>   p_J: <real>   lambda: <real>   seed: <int>
///   beta: finite | inf   gamma: <real>
Scenario parse_scenario(const std::filesystem::path& path, const Grid& grid);
Scenario parse_scenario_text(std::string_view text, const Grid& grid);

struct ResultRow {
  std::string system;
  double secure_fraction = 0.0;
  std::string attack;          // hidden | detectable | jamming
  std::optional<double> p_jam;  // NA when the attack does not jam
  std::string beta;            // finite | inf | NA
  int trials = 0;
  std::optional<double> mean_cost;  // NA iff feasible_fraction == 0
  double feasible_fraction = 0.0;
  double mean_runtime_ms = 0.0;

  bool operator==(const ResultRow&) const = default;
};

inline constexpr std::string_view kResultHeader =
    "system,secure_fraction,attack,p_J,beta,trials,mean_cost,"
    "feasible_fraction,mean_runtime_ms";

std::string format_results(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_results(std::string_view csv);
/// Throws IoError.
void write_results(const std::vector<ResultRow>& rows,
                   const std::filesystem::path& path);

}  // namespace gridjam
