#include "ecomplex/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ecomplex/csv.hpp"
#include "ecomplex/error.hpp"
#include "ecomplex/provinces.hpp"
#include "ecomplex/report.hpp"
#include "ecomplex/stats.hpp"
#include "ecomplex/version.hpp"

namespace ecomplex::pipeline {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string format_name(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "structured"; }

/// Writes files under the output directory and remembers their digests.
class Writer {
 public:
  Writer(fs::path dir, CommandReport& report) : dir_(std::move(dir)), report_(report) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(Errc::Io, "cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    csv::write_file_atomic(dir_ / name, content);
    report_.outputs.push_back(dir_ / name);
    digests_[name] = checksum(content);
  }

  const std::map<std::string, std::string>& digests() const { return digests_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  CommandReport& report_;
  std::map<std::string, std::string> digests_;
};

struct Inputs {
  FirmFile firms;
  std::optional<PanelTable> panel;
  std::vector<std::pair<std::string, std::string>> checksums;  // role, digest
  std::vector<std::string> names;
};

Inputs load_inputs(const RunConfig& config, bool need_firms, bool need_panel, CommandReport& report) {
  Inputs in;
  auto record = [&](const char* role, const fs::path& path) {
    if (!fs::exists(path)) throw Error(Errc::Io, std::string(role) + " file not found: " + path.string());
    in.checksums.emplace_back(role, checksum(csv::read_file(path)));
    in.names.push_back(path.filename().string());
  };
  if (need_firms) {
    if (config.firms.empty()) throw Error(Errc::InvalidArgument, "--firms is required");
    record("firms", config.firms);
    in.firms = parse_firm_records(config.firms);
    if (!in.firms.rejected.empty()) {
      const auto msg = std::to_string(in.firms.rejected.size()) + " firm rows rejected for blank fields (first at line " +
                       std::to_string(in.firms.rejected.front().line) + ": " + in.firms.rejected.front().message + ")";
      spdlog::warn("{}", msg);
      report.warnings.push_back(msg);
    }
    spdlog::info("read {} firm records from {}", in.firms.records.size(), config.firms.string());
  }
  if (need_panel) {
    if (config.panel.empty()) throw Error(Errc::InvalidArgument, "--panel is required");
    record("panel", config.panel);
    in.panel = parse_panel(config.panel);
    spdlog::info("read {} panel rows from {}", in.panel->size(), config.panel.string());
  }
  return in;
}

std::vector<int> year_range(int from, int to) {
  std::vector<int> out;
  for (int y = from; y <= to; ++y) out.push_back(y);
  return out;
}

/// Scores for each year; failed years are reported and skipped. When `writer`
/// is set the per-year matrices and score files are written too.
std::map<int, ComplexityScores> compute_years(const RunConfig& config, const FirmFile& firms,
                                              const std::vector<int>& years, CommandReport& report,
                                              Writer* writer) {
  std::map<int, ComplexityScores> out;
  for (int year : years) {
    try {
      const auto counts = build_count_matrix(firms.records, year);
      auto scores = compute_scores(counts, config.score_options());
      if (writer) {
        const auto pruned = prune(counts);
        const auto r = rca(pruned.counts);
        const auto adv = binarize(r, config.threshold);
        const auto y = std::to_string(year);
        writer->write("rca_" + y + ".csv", report::rca_csv(r));
        writer->write("advantage_" + y + ".csv", report::advantage_csv(adv));
        writer->write("diversity_ubiquity_" + y + ".csv", report::diversity_ubiquity_csv(adv));
        if (config.format == OutputFormat::Csv) {
          writer->write("scores_" + y + ".csv", report::scores_csv(scores));
          writer->write("industry_scores_" + y + ".csv", report::industry_scores_csv(scores));
        } else {
          writer->write("scores_" + y + ".json", report::scores_json(scores).dump(2) + "\n");
        }
        if (!pruned.dropped_regions.empty() || !pruned.dropped_industries.empty())
          spdlog::info("{}: pruned {} empty regions and {} empty industries", year, pruned.dropped_regions.size(),
                       pruned.dropped_industries.size());
      }
      spdlog::debug("{}: {} regions, fitness converged in {} iterations", year, scores.regions.size(),
                    scores.iterations_used);
      out.emplace(year, std::move(scores));
    } catch (const Error& e) {
      const auto msg = "year " + std::to_string(year) + ": " + e.what();
      spdlog::error("{}", msg);
      report.failures.push_back(msg);
    }
  }
  return out;
}

void rank_outputs(const std::map<int, ComplexityScores>& scores, Writer& writer, CommandReport& report) {
  std::vector<ComplexityScores> series;
  for (const auto& [y, s] : scores) series.push_back(s);
  if (series.size() < 2) {
    report.warnings.push_back("rank evolution skipped: fewer than two successful years");
    return;
  }
  std::ostringstream summary;
  summary << "metric,first_year,last_year,r,p,n\n";
  for (const char* metric : {"eci", "fitness"}) {
    try {
      const auto evo = rank_evolution(series, metric);
      writer.write(std::string("rank_evolution_") + metric + ".csv", report::rank_evolution_csv(evo));
      summary << metric << ',' << evo.years.front() << ',' << evo.years.back() << ','
              << csv::format_double(evo.endpoint.r) << ',' << csv::format_double(evo.endpoint.p) << ','
              << evo.endpoint.n << '\n';
    } catch (const Error& e) {
      report.failures.push_back(std::string("rank evolution (") + metric + "): " + e.what());
    }
  }
  writer.write("rank_evolution_summary.csv", summary.str());
}

std::optional<double> log_of(std::optional<double> v, const std::string& what, const RowKey& key) {
  if (!v) return std::nullopt;
  if (!(*v > 0.0))
    throw Error(Errc::InvalidValue, "cannot take ln of nonpositive " + what + " " + csv::format_double(*v) + " at (" +
                                        key.region + ", " + std::to_string(key.year) + ")");
  return std::log(*v);
}

MetricTable build_table(const std::map<int, ComplexityScores>& scores, const PanelTable& panel, bool with_logs) {
  MetricTable t;
  for (const auto& [year, s] : scores) {
    for (std::size_t p = 0; p < s.regions.size(); ++p) {
      const RowKey key{s.regions[p], year};
      t.set(key, "eci", s.eci[p]);
      t.set(key, "fitness", s.fitness[p]);
      t.set(key, "diversity", static_cast<double>(s.diversity[p]));
      t.set(key, "entropy", s.entropy[p]);
      const PanelRow* row = panel.find(s.regions[p], year);
      const PanelRow empty;
      const PanelRow& r = row ? *row : empty;
      for (std::size_t c = 0; c < kPanelColumnCount; ++c) t.set(key, kPanelColumnNames[c], r.values[c]);
      std::optional<double> inequality;
      if (r[PanelColumn::Ricu] && r[PanelColumn::Ricr]) inequality = ricd(*r[PanelColumn::Ricu], *r[PanelColumn::Ricr]);
      t.set(key, "ricd", inequality);
      if (with_logs) {
        t.set(key, "ln_gdp_pc", log_of(r[PanelColumn::GdpPc], "gdp_pc", key));
        t.set(key, "ln_population", log_of(r[PanelColumn::Population], "population", key));
        t.set(key, "ln_innovation", log_of(r[PanelColumn::Innovation], "innovation", key));
        t.set(key, "ln_trade", log_of(r[PanelColumn::Trade], "trade", key));
      }
    }
  }
  return t;
}

void correlate_stage(const RunConfig& config, const PanelTable& panel, const std::map<int, ComplexityScores>& scores,
                     Writer& writer, CommandReport& report) {
  std::map<int, ComplexityScores> window;
  for (const auto& [y, s] : scores)
    if (y >= config.window_from && y <= config.window_to) window.emplace(y, s);
  if (window.empty()) {
    const auto msg = "correlation window " + std::to_string(config.window_from) + "-" +
                     std::to_string(config.window_to) + " has no computed years; nothing written";
    spdlog::warn("{}", msg);
    report.warnings.push_back(msg);
  } else {
    try {
      const auto table = build_table(window, panel, false);
      const auto averaged = average_window(table, config.columns, config.window_from, config.window_to);
      writer.write("window_average.csv", report::metric_table_csv(averaged, config.columns));
      writer.write("correlation_matrix.csv", report::correlation_csv(correlation_matrix(averaged, config.columns)));
    } catch (const Error& e) {
      report.failures.push_back(std::string("correlation matrix: ") + e.what());
    }
  }

  std::ostringstream series;
  series << "year,basis,r,p,n\n";
  for (const auto& [year, s] : scores) {
    auto emit = [&](const char* basis, const OptionalVector& a, const OptionalVector& b) {
      try {
        const auto r = pearson(a, b);
        series << year << ',' << basis << ',' << csv::format_double(r.r) << ',' << csv::format_double(r.p) << ','
               << r.n << '\n';
      } catch (const Error& e) {
        report.warnings.push_back("eci-fitness " + std::string(basis) + " correlation " + std::to_string(year) +
                                  ": " + e.what());
      }
    };
    emit("values", s.eci, s.fitness);
    emit("ranks", rank(s.eci), rank(s.fitness));
  }
  writer.write("eci_fitness_by_year.csv", series.str());
}

void regress_stage(const RunConfig& config, const PanelTable& panel, const std::map<int, ComplexityScores>& scores,
                   Writer& writer, CommandReport& report) {
  std::map<int, ComplexityScores> window;
  for (const auto& [y, s] : scores)
    if (y >= config.window_from && y <= config.window_to) window.emplace(y, s);
  if (window.empty()) {
    report.failures.push_back("regression: no computed years inside the window " + std::to_string(config.window_from) +
                              "-" + std::to_string(config.window_to));
    return;
  }
  MetricTable table;
  try {
    table = build_table(window, panel, true);
  } catch (const Error& e) {
    report.failures.push_back(std::string("regression: ") + e.what());
    return;
  }

  std::vector<report::NamedRegression> models;
  for (const auto& spec : table_specifications()) {
    try {
      for (const auto& p : spec.predictors) {
        const auto col = table.column(p);
        if (std::none_of(col.begin(), col.end(), [](const auto& v) { return v.has_value(); }))
          throw Error(Errc::InvalidArgument, "predictor '" + p + "' has no values");
      }
      models.push_back({spec.name, spec.family, spec.predictors,
                        ols_fixed_effects(table, "ln_gdp_pc", spec.predictors, true)});
    } catch (const Error& e) {
      report.failures.push_back("specification " + spec.name + " [" + spec.family + "]: " + e.what());
    }
  }
  if (models.empty()) return;
  const std::vector<std::string> rows = {"eci", "ln_population", "urbanization", "schooling", "ln_innovation",
                                         "ln_trade"};
  const std::vector<std::string> labels = {"ECI/Fitness", "ln(Population)", "Urbanization", "Schooling",
                                           "ln(Innovation)", "ln(Trade)"};
  writer.write("regression_table.txt", report::regression_text(models, rows, labels));
  writer.write("regression.csv", report::regression_csv(models));
  writer.write("regression_summary.csv", report::regression_summary_csv(models));
}

json config_json(const RunConfig& c) {
  json j;
  j["years"] = std::to_string(c.year_from) + ":" + std::to_string(c.year_to);
  j["window"] = std::to_string(c.window_from) + ":" + std::to_string(c.window_to);
  j["threshold"] = c.threshold;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["format"] = format_name(c.format);
  j["columns"] = c.columns;
  j["seed"] = c.seed;
  j["synth_regions"] = c.synth_regions;
  j["synth_industries"] = c.synth_industries;
  j["synth_noise"] = c.synth_noise;
  return j;
}

void write_manifest(const RunConfig& config, const Inputs& inputs, Writer& writer, CommandReport& report) {
  json j;
  j["tool"] = "ecomplex";
  j["version"] = ECOMPLEX_VERSION;
  j["command"] = report.command;
  j["config"] = config_json(config);
  j["inputs"] = json::array();
  for (std::size_t i = 0; i < inputs.checksums.size(); ++i)
    j["inputs"].push_back(
        {{"role", inputs.checksums[i].first}, {"file", inputs.names[i]}, {"fnv1a64", inputs.checksums[i].second}});
  j["outputs"] = json::array();
  for (const auto& [name, digest] : writer.digests()) j["outputs"].push_back({{"file", name}, {"fnv1a64", digest}});
  j["status"] = report.ok() ? "ok" : "partial";
  j["failures"] = report.failures;
  j["warnings"] = report.warnings;
  const auto content = j.dump(2) + "\n";
  const auto name = "manifest_" + report.command + ".json";
  csv::write_file_atomic(writer.dir() / name, content);
  report.outputs.push_back(writer.dir() / name);
}

template <class Body>
CommandReport run_command(const std::string& name, const RunConfig& config, bool firms, bool panel, Body body) {
  CommandReport report;
  report.command = name;
  config.validate();
  Writer writer(config.out, report);
  const auto inputs = load_inputs(config, firms, panel, report);
  body(inputs, writer, report);
  write_manifest(config, inputs, writer, report);
  return report;
}

double normal(harness::CellStream& s) {
  const double u1 = 1.0 - s.uniform();  // (0, 1]
  const double u2 = s.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

void RunConfig::validate() const {
  if (year_from > year_to) throw Error(Errc::InvalidArgument, "year range is empty");
  if (window_from > window_to) throw Error(Errc::InvalidArgument, "window range is empty");
  if (!(threshold > 0.0)) throw Error(Errc::InvalidArgument, "threshold must be positive");
  if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "tol must be positive");
  if (max_iter < 1) throw Error(Errc::InvalidArgument, "max-iter must be at least 1");
  if (columns.size() < 2) throw Error(Errc::InvalidArgument, "correlation needs at least two columns");
}

ScoreOptions RunConfig::score_options() const {
  ScoreOptions o;
  o.threshold = threshold;
  o.fitness.tol = tol;
  o.fitness.max_iter = max_iter;
  return o;
}

std::pair<int, int> parse_years(const std::string& text) {
  const auto colon = text.find(':');
  const auto a = csv::parse_int(text.substr(0, colon));
  const auto b = colon == std::string::npos ? a : csv::parse_int(text.substr(colon + 1));
  if (!a || !b) throw Error(Errc::InvalidArgument, "year range must look like 2000:2015, got '" + text + "'");
  return {static_cast<int>(*a), static_cast<int>(*b)};
}

RunConfig load_config(const fs::path& path) {
  RunConfig c;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(csv::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, "config " + path.string() + ": " + e.what());
  }
  const fs::path base = path.parent_path();
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "firms") c.firms = base / v.get<std::string>();
      else if (key == "panel") c.panel = base / v.get<std::string>();
      else if (key == "out") c.out = base / v.get<std::string>();
      else if (key == "years") std::tie(c.year_from, c.year_to) = parse_years(v.get<std::string>());
      else if (key == "window") std::tie(c.window_from, c.window_to) = parse_years(v.get<std::string>());
      else if (key == "threshold") c.threshold = v.get<double>();
      else if (key == "tol") c.tol = v.get<double>();
      else if (key == "max_iter") c.max_iter = v.get<int>();
      else if (key == "format") {
        const auto f = v.get<std::string>();
        if (f != "csv" && f != "structured") throw Error(Errc::InvalidArgument, "format must be csv or structured");
        c.format = f == "csv" ? OutputFormat::Csv : OutputFormat::Structured;
      } else if (key == "columns") c.columns = v.get<std::vector<std::string>>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "synth_regions") c.synth_regions = v.get<int>();
      else if (key == "synth_industries") c.synth_industries = v.get<int>();
      else if (key == "synth_noise") c.synth_noise = v.get<double>();
      else throw Error(Errc::InvalidArgument, "config " + path.string() + ": unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, "config " + path.string() + ": " + e.what());
  }
  return c;
}

void CommandReport::merge(const CommandReport& other) {
  outputs.insert(outputs.end(), other.outputs.begin(), other.outputs.end());
  failures.insert(failures.end(), other.failures.begin(), other.failures.end());
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

std::vector<Specification> table_specifications() {
  std::vector<Specification> out;
  const std::vector<std::vector<std::string>> controls = {
      {}, {"ln_population", "urbanization"}, {"schooling", "ln_innovation"}, {"ln_trade"}};
  int number = 1;
  for (const auto& [family, predictor] : {std::pair{"ECI", "eci"}, std::pair{"Fitness", "fitness"}})
    for (const auto& extra : controls) {
      Specification s{"(" + std::to_string(number++) + ")", family, {predictor}};
      s.predictors.insert(s.predictors.end(), extra.begin(), extra.end());
      out.push_back(std::move(s));
    }
  return out;
}

std::string checksum(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CommandReport cmd_metrics(const RunConfig& config) {
  return run_command("metrics", config, true, false, [&](const Inputs& in, Writer& w, CommandReport& r) {
    const auto scores = compute_years(config, in.firms, year_range(config.year_from, config.year_to), r, &w);
    rank_outputs(scores, w, r);
  });
}

CommandReport cmd_correlate(const RunConfig& config) {
  return run_command("correlate", config, true, true, [&](const Inputs& in, Writer& w, CommandReport& r) {
    const auto scores = compute_years(config, in.firms, year_range(config.year_from, config.year_to), r, nullptr);
    correlate_stage(config, *in.panel, scores, w, r);
  });
}

CommandReport cmd_regress(const RunConfig& config) {
  return run_command("regress", config, true, true, [&](const Inputs& in, Writer& w, CommandReport& r) {
    std::vector<int> years;
    for (int y = std::max(config.year_from, config.window_from); y <= std::min(config.year_to, config.window_to); ++y)
      years.push_back(y);
    const auto scores = compute_years(config, in.firms, years, r, nullptr);
    regress_stage(config, *in.panel, scores, w, r);
  });
}

CommandReport run_all(const RunConfig& config) {
  return run_command("run-all", config, true, true, [&](const Inputs& in, Writer& w, CommandReport& r) {
    const auto scores = compute_years(config, in.firms, year_range(config.year_from, config.year_to), r, &w);
    rank_outputs(scores, w, r);
    correlate_stage(config, *in.panel, scores, w, r);
    regress_stage(config, *in.panel, scores, w, r);
  });
}

CommandReport cmd_synth(const RunConfig& config) {
  CommandReport report;
  report.command = "synth";
  config.validate();
  harness::SynthSpec spec{config.synth_regions, config.synth_industries, config.synth_noise, config.seed};
  const auto base = harness::gen_noisy_nested(spec);

  std::vector<std::string> regions;
  if (spec.m <= static_cast<int>(kProvinces.size()))
    for (int p = 0; p < spec.m; ++p) regions.emplace_back(kProvinces[static_cast<std::size_t>(p)].code);
  else
    regions = harness::labels('R', spec.m);
  const auto industries = harness::labels('C', spec.n);

  // Each base count c yields 2c firms with listing years spread before and
  // through the range and a quarter of them delisted later.
  std::ostringstream firms;
  firms << "firm_id,region,industry,list_date,delist_date\n";
  int serial = 0;
  for (int p = 0; p < spec.m; ++p)
    for (int i = 0; i < spec.n; ++i) {
      const auto c = base.counts(static_cast<std::size_t>(p), static_cast<std::size_t>(i));
      for (int k = 0; k < 2 * c; ++k) {
        harness::CellStream s(spec.seed ^ 0xF1'F1'F1'F1ULL, static_cast<std::uint64_t>(p),
                              static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(k));
        const Date list{s.integer(config.year_from - 8, config.year_to), s.integer(1, 12), s.integer(1, 28)};
        std::string delist;
        if (s.uniform() < 0.25) {
          const Date d{s.integer(list.year + 1, config.year_to + 6), s.integer(1, 12), s.integer(1, 28)};
          delist = d.str();
        }
        char id[16];
        std::snprintf(id, sizeof id, "F%06d", ++serial);
        firms << id << ',' << regions[static_cast<std::size_t>(p)] << ',' << industries[static_cast<std::size_t>(i)]
              << ',' << list.str() << ',' << delist << '\n';
      }
    }

  // Panel indicators rise with the region's position in the staircase.
  std::ostringstream panel;
  panel << "region,year,gdp_pc,population,urbanization,schooling,innovation,trade,ricu,ricr\n";
  for (int p = 0; p < spec.m; ++p) {
    const double level = 1.0 - static_cast<double>(p) / static_cast<double>(spec.m - 1);
    harness::CellStream region(spec.seed ^ 0xBA'BE'BA'BEULL, static_cast<std::uint64_t>(p), 0, 1);
    const double size = 17.0 + 0.8 * normal(region);
    for (int year = config.year_from; year <= config.year_to; ++year) {
      harness::CellStream s(spec.seed ^ 0xBA'BE'BA'BEULL, static_cast<std::uint64_t>(p),
                            static_cast<std::uint64_t>(year), 0);
      const double t = year - config.year_from;
      const double gdp = std::round(std::exp(8.5 + 1.6 * level + 0.09 * t + 0.15 * normal(s)));
      const double population = std::round(std::exp(size + 0.006 * t + 0.01 * normal(s)));
      const double urban = std::clamp(0.3 + 0.35 * level + 0.01 * t + 0.05 * normal(s), 0.05, 0.95);
      const double school = std::clamp(0.008 + 0.012 * level + 0.0005 * t + 0.002 * normal(s), 0.001, 0.1);
      const double patents = std::round(std::exp(7.0 + 2.2 * level + 0.12 * t + 0.3 * normal(s)));
      const double trade = std::round(std::exp(22.0 + 2.5 * level + 0.08 * t + 0.4 * normal(s)));
      const double ricu = 0.8 + 0.5 * level + 0.05 * normal(s);
      const double ricr = 0.45 + 0.7 * level + 0.05 * normal(s);
      auto cell = [](double v, int digits) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*f", digits, v);
        return std::string(buf);
      };
      panel << regions[static_cast<std::size_t>(p)] << ',' << year << ',' << cell(gdp, 0) << ','
            << cell(population, 0) << ',' << cell(urban, 4) << ',' << cell(school, 5) << ',';
      // one deliberately blank innovation cell exercises listwise deletion
      if (!(p == spec.m - 1 && year == config.year_to)) panel << cell(patents, 0);
      panel << ',' << cell(trade, 0) << ',';
      if (year == 2010) panel << cell(ricu, 4) << ',' << cell(ricr, 4);
      else panel << ',';
      panel << '\n';
    }
  }

  json spec_json;
  spec_json["generator"] = "gen_noisy_nested";
  spec_json["m"] = spec.m;
  spec_json["n"] = spec.n;
  spec_json["noise"] = spec.noise;
  spec_json["seed"] = spec.seed;
  spec_json["years"] = std::to_string(config.year_from) + ":" + std::to_string(config.year_to);
  spec_json["version"] = ECOMPLEX_VERSION;

  Writer writer(config.out, report);
  writer.write("firms.csv", firms.str());
  writer.write("panel.csv", panel.str());
  writer.write("synth_spec.json", spec_json.dump(2) + "\n");
  return report;
}

}  // namespace ecomplex::pipeline
