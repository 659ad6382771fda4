#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecomplex/complexity.hpp"
#include "ecomplex/harness.hpp"
#include "ecomplex/ingest.hpp"

namespace ecomplex::pipeline {

enum class OutputFormat { Csv, Structured };

struct RunConfig {
  std::filesystem::path firms;
  std::filesystem::path panel;
  std::filesystem::path out = "ecomplex-out";
  int year_from = 2000;
  int year_to = 2015;
  int window_from = 2010;
  int window_to = 2015;
  double threshold = 1.0;
  double tol = 1e-10;
  int max_iter = 10'000;
  OutputFormat format = OutputFormat::Csv;
  std::vector<std::string> columns = {"eci", "fitness", "diversity", "entropy", "gdp_pc", "ricu", "ricr", "ricd"};
  // synth
  std::uint64_t seed = 7;
  int synth_regions = 31;
  int synth_industries = 40;
  double synth_noise = 0.1;

  /// Throws Error(InvalidArgument) on an empty year range, a nonpositive
  /// threshold or tol, max_iter < 1, or fewer than two correlation columns.
  void validate() const;
  ScoreOptions score_options() const;
};

/// Reads a JSON config; keys mirror the long CLI flags with dashes replaced by
/// underscores ("years": "2000:2015"). Unknown keys are rejected.
RunConfig load_config(const std::filesystem::path& path);
/// Parses "A:B" or "A" into an inclusive year range.
std::pair<int, int> parse_years(const std::string& text);

struct CommandReport {
  std::string command;
  std::vector<std::filesystem::path> outputs;
  std::vector<std::string> failures;
  std::vector<std::string> warnings;

  bool ok() const noexcept { return failures.empty(); }
  void merge(const CommandReport& other);
};

CommandReport cmd_metrics(const RunConfig& config);
CommandReport cmd_correlate(const RunConfig& config);
CommandReport cmd_regress(const RunConfig& config);
CommandReport run_all(const RunConfig& config);
/// Writes firms.csv, panel.csv and synth_spec.json into config.out.
CommandReport cmd_synth(const RunConfig& config);

/// The eight Table-style specifications: ECI then Fitness, each alone, with
/// ln population + urbanization, with schooling + ln innovation, with ln trade.
struct Specification {
  std::string name;
  std::string family;
  std::vector<std::string> predictors;
};
std::vector<Specification> table_specifications();

/// FNV-1a 64-bit digest as 16 hex digits.
std::string checksum(std::string_view bytes);

}  // namespace ecomplex::pipeline
