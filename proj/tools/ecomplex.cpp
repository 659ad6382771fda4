// Command-line front end: metrics, correlate, regress, run-all, synth.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

#include "ecomplex/error.hpp"
#include "ecomplex/kernels.hpp"
#include "ecomplex/pipeline.hpp"
#include "ecomplex/version.hpp"

namespace {

using namespace ecomplex;
using pipeline::RunConfig;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("ecomplex");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("ECOMPLEX_LOG")) spdlog::set_level(spdlog::level::from_str(level));
}

/// Flag values as parsed; only those given on the command line override the
/// config file.
struct Flags {
  std::string config, firms, panel, out, years, window, format, columns;
  double threshold = 0.0, tol = 0.0;
  int max_iter = 0, regions = 0, industries = 0;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

std::vector<std::string> split_columns(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

RunConfig resolve(const CLI::App& sub, const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : pipeline::load_config(f.config);
  auto given = [&](const char* name) {
    const auto* opt = sub.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--firms")) c.firms = f.firms;
  if (given("--panel")) c.panel = f.panel;
  if (given("--out")) c.out = f.out;
  if (given("--years")) std::tie(c.year_from, c.year_to) = pipeline::parse_years(f.years);
  if (given("--window")) std::tie(c.window_from, c.window_to) = pipeline::parse_years(f.window);
  if (given("--threshold")) c.threshold = f.threshold;
  if (given("--tol")) c.tol = f.tol;
  if (given("--max-iter")) c.max_iter = f.max_iter;
  if (given("--seed")) c.seed = f.seed;
  if (given("--format")) c.format = f.format == "csv" ? pipeline::OutputFormat::Csv : pipeline::OutputFormat::Structured;
  if (given("--columns")) c.columns = split_columns(f.columns);
  if (given("--regions")) c.synth_regions = f.regions;
  if (given("--industries")) c.synth_industries = f.industries;
  if (given("--noise")) c.synth_noise = f.noise;
  return c;
}

void add_common(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config, "JSON file with default option values")->check(CLI::ExistingFile);
  sub.add_option("--out", f.out, "Output directory");
  sub.add_option("--years", f.years, "Inclusive year range, e.g. 2000:2015");
}

void add_analysis(CLI::App& sub, Flags& f, bool panel) {
  add_common(sub, f);
  sub.add_option("--firms", f.firms, "Firm listing CSV");
  if (panel) {
    sub.add_option("--panel", f.panel, "Region-year indicator CSV");
    sub.add_option("--window", f.window, "Averaging and regression window, e.g. 2010:2015");
  }
  sub.add_option("--threshold", f.threshold, "RCA threshold for comparative advantage");
  sub.add_option("--tol", f.tol, "Fitness convergence tolerance");
  sub.add_option("--max-iter", f.max_iter, "Fitness iteration cap");
}

int report_result(const pipeline::CommandReport& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& e : r.failures) std::cerr << "error: " << e << '\n';
  std::cout << r.command << ": wrote " << r.outputs.size() << " files";
  if (!r.failures.empty()) std::cout << ", " << r.failures.size() << " failures";
  std::cout << '\n';
  return r.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Economic complexity of regional industry structure"};
  app.set_version_flag("--version", std::string(ECOMPLEX_VERSION));
  app.require_subcommand(1);

  Flags f;
  auto* metrics = app.add_subcommand("metrics", "Per-year ECI, Fitness, diversity, entropy and rank evolution");
  add_analysis(*metrics, f, false);
  metrics->add_option("--format", f.format, "Score output format")->check(CLI::IsMember({"csv", "structured"}));

  auto* correlate = app.add_subcommand("correlate", "Window-averaged correlation matrix");
  add_analysis(*correlate, f, true);
  correlate->add_option("--columns", f.columns, "Comma-separated columns to correlate");

  auto* regress = app.add_subcommand("regress", "Year fixed-effects regressions of ln GDP per capita");
  add_analysis(*regress, f, true);

  auto* all = app.add_subcommand("run-all", "metrics, correlate and regress in one pass");
  add_analysis(*all, f, true);
  all->add_option("--format", f.format, "Score output format")->check(CLI::IsMember({"csv", "structured"}));
  all->add_option("--columns", f.columns, "Comma-separated columns to correlate");

  auto* synth = app.add_subcommand("synth", "Generate synthetic firm and panel inputs");
  add_common(*synth, f);
  synth->add_option("--seed", f.seed, "Generator seed");
  synth->add_option("--regions", f.regions, "Number of regions");
  synth->add_option("--industries", f.industries, "Number of industries");
  synth->add_option("--noise", f.noise, "Cell flip probability");

  CLI11_PARSE(app, argc, argv);
  spdlog::debug("kernel isa: {}", kernels::isa_name(kernels::active_isa()));

  try {
    for (auto* sub : app.get_subcommands()) {
      const RunConfig config = resolve(*sub, f);
      const std::string name = sub->get_name();
      if (name == "metrics") return report_result(pipeline::cmd_metrics(config));
      if (name == "correlate") return report_result(pipeline::cmd_correlate(config));
      if (name == "regress") return report_result(pipeline::cmd_regress(config));
      if (name == "run-all") return report_result(pipeline::run_all(config));
      if (name == "synth") return report_result(pipeline::cmd_synth(config));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
