#include "ecomplex/report.hpp"

#include <cstdio>
#include <sstream>

#include "ecomplex/csv.hpp"
#include "ecomplex/error.hpp"

namespace ecomplex::report {
namespace {

using csv::escape;
using csv::format_double;
using csv::format_optional;

nlohmann::ordered_json optional_array(const std::vector<std::optional<double>>& v) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& x : v) out.push_back(x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr));
  return out;
}

std::vector<std::optional<double>> optional_vector(const nlohmann::ordered_json& j) {
  std::vector<std::optional<double>> out;
  for (const auto& x : j) out.push_back(x.is_null() ? std::nullopt : std::optional<double>(x.get<double>()));
  return out;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string scores_csv(const ComplexityScores& s) {
  std::ostringstream os;
  os << "year,region,metric,value\n";
  const char* names[] = {"eci", "fitness", "diversity", "entropy", "avg_ubiquity"};
  for (std::size_t p = 0; p < s.regions.size(); ++p)
    for (const char* name : names)
      os << s.year << ',' << escape(s.regions[p]) << ',' << name << ','
         << format_optional(s.region_metric(name)[p]) << '\n';
  return os.str();
}

std::string industry_scores_csv(const ComplexityScores& s) {
  std::ostringstream os;
  os << "year,industry,metric,value\n";
  for (std::size_t i = 0; i < s.industries.size(); ++i) {
    os << s.year << ',' << escape(s.industries[i]) << ",q_complexity," << format_optional(s.q_complexity[i]) << '\n';
    os << s.year << ',' << escape(s.industries[i]) << ",ubiquity," << s.ubiquity[i] << '\n';
  }
  return os.str();
}

nlohmann::ordered_json scores_json(const ComplexityScores& s) {
  nlohmann::ordered_json j;
  j["year"] = s.year;
  j["parameters"] = {{"threshold", s.options.threshold},
                     {"tol", s.options.fitness.tol},
                     {"max_iter", s.options.fitness.max_iter},
                     {"eigen_gap_tol", s.options.eci.gap_tol}};
  j["iterations_used"] = s.iterations_used;
  j["fitness_residual"] = s.fitness_residual;
  j["lambda2"] = s.lambda2;
  j["regions"] = s.regions;
  j["industries"] = s.industries;
  j["eci"] = optional_array(s.eci);
  j["fitness"] = optional_array(s.fitness);
  j["diversity"] = s.diversity;
  j["entropy"] = optional_array(s.entropy);
  j["avg_ubiquity"] = optional_array(s.avg_ubiquity);
  j["q_complexity"] = optional_array(s.q_complexity);
  j["ubiquity"] = s.ubiquity;
  j["dropped_regions"] = s.dropped_regions;
  j["dropped_industries"] = s.dropped_industries;
  return j;
}

ComplexityScores scores_from_json(const nlohmann::ordered_json& j) {
  ComplexityScores s;
  try {
    s.year = j.at("year").get<int>();
    const auto& params = j.at("parameters");
    s.options.threshold = params.at("threshold").get<double>();
    s.options.fitness.tol = params.at("tol").get<double>();
    s.options.fitness.max_iter = params.at("max_iter").get<int>();
    s.options.eci.gap_tol = params.at("eigen_gap_tol").get<double>();
    s.iterations_used = j.at("iterations_used").get<int>();
    s.fitness_residual = j.at("fitness_residual").get<double>();
    s.lambda2 = j.at("lambda2").get<double>();
    s.regions = j.at("regions").get<std::vector<std::string>>();
    s.industries = j.at("industries").get<std::vector<std::string>>();
    s.eci = optional_vector(j.at("eci"));
    s.fitness = optional_vector(j.at("fitness"));
    s.diversity = j.at("diversity").get<std::vector<int>>();
    s.entropy = optional_vector(j.at("entropy"));
    s.avg_ubiquity = optional_vector(j.at("avg_ubiquity"));
    s.q_complexity = optional_vector(j.at("q_complexity"));
    s.ubiquity = j.at("ubiquity").get<std::vector<int>>();
    s.dropped_regions = j.at("dropped_regions").get<std::vector<std::string>>();
    s.dropped_industries = j.at("dropped_industries").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidValue, std::string("malformed scores document: ") + e.what());
  }
  return s;
}

std::string rca_csv(const RcaMatrix& rca) {
  std::ostringstream os;
  os << "region";
  for (const auto& i : rca.industries) os << ',' << escape(i);
  os << '\n';
  for (std::size_t p = 0; p < rca.regions.size(); ++p) {
    os << escape(rca.regions[p]);
    for (double v : rca.values.row(p)) os << ',' << format_double(v);
    os << '\n';
  }
  return os.str();
}

std::string advantage_csv(const AdvantageMatrix& m) {
  std::ostringstream os;
  os << "region";
  for (const auto& i : m.industries) os << ',' << escape(i);
  os << '\n';
  for (std::size_t p = 0; p < m.regions.size(); ++p) {
    os << escape(m.regions[p]);
    for (auto v : m.entries.row(p)) os << ',' << static_cast<int>(v);
    os << '\n';
  }
  return os.str();
}

std::string diversity_ubiquity_csv(const AdvantageMatrix& m) {
  const auto quads = quadrants(m);
  std::ostringstream os;
  os << "region,metric,value\n";
  for (std::size_t p = 0; p < m.regions.size(); ++p) {
    const auto r = escape(m.regions[p]);
    os << r << ",diversity," << m.diversity[p] << '\n';
    os << r << ",avg_ubiquity," << format_optional(m.avg_ubiquity[p]) << '\n';
    os << r << ",quadrant," << (quads[p] ? quads[p]->label() : std::string()) << '\n';
  }
  return os.str();
}

std::string rank_evolution_csv(const RankEvolution& r) {
  std::ostringstream os;
  os << "region";
  for (int y : r.years) os << ',' << y;
  os << '\n';
  for (std::size_t p = 0; p < r.regions.size(); ++p) {
    os << escape(r.regions[p]);
    for (const auto& v : r.ranks[p]) os << ',' << format_optional(v);
    os << '\n';
  }
  return os.str();
}

std::string correlation_csv(const CorrelationMatrix& c) {
  std::ostringstream os;
  os << "column_a,column_b,r,p,n,stars,error\n";
  for (std::size_t a = 0; a < c.columns.size(); ++a)
    for (std::size_t b = 0; b < c.columns.size(); ++b) {
      const auto& cell = c.cells[a][b];
      os << escape(c.columns[a]) << ',' << escape(c.columns[b]) << ',';
      if (cell.result)
        os << format_double(cell.result->r) << ',' << format_double(cell.result->p) << ',' << cell.result->n << ','
           << star_string(cell.result->p) << ",\n";
      else
        os << ",,,," << escape(cell.error) << '\n';
    }
  return os.str();
}

std::string metric_table_csv(const MetricTable& t, const std::vector<std::string>& columns) {
  std::ostringstream os;
  os << "region,year";
  for (const auto& c : columns) os << ',' << escape(c);
  os << '\n';
  for (const auto& key : t.keys()) {
    os << escape(key.region) << ',' << key.year;
    for (const auto& c : columns) os << ',' << format_optional(t.get(key, c));
    os << '\n';
  }
  return os.str();
}

std::string regression_text(const std::vector<NamedRegression>& models, const std::vector<std::string>& row_order,
                            const std::vector<std::string>& row_labels) {
  constexpr int kLabel = 18, kCell = 12;
  auto pad = [](std::string s, int width) {
    if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), ' ');
    return s;
  };
  auto label = [&](std::string s) {
    s.resize(std::max<std::size_t>(s.size(), kLabel), ' ');
    return s;
  };
  std::ostringstream os;
  const std::string dependent = models.empty() ? std::string() : models.front().result.dependent;
  os << "OLS with year fixed effects; dependent variable: " << dependent << '\n';
  std::string rule(kLabel + kCell * models.size(), '-');
  os << rule << '\n' << label("");
  for (const auto& m : models) os << pad(m.family, kCell);
  os << '\n' << label("");
  for (const auto& m : models) os << pad(m.name, kCell);
  os << '\n' << rule << '\n';

  auto find = [](const NamedRegression& m, const std::string& term) -> const Coefficient* {
    for (const auto& c : m.result.coefficients)
      if (c.term == term) return &c;
    return nullptr;
  };
  for (std::size_t r = 0; r < row_order.size(); ++r) {
    std::ostringstream est, se;
    est << label(row_labels[r]);
    se << label("");
    for (const auto& m : models) {
      // The first row holds the family's own complexity predictor.
      const std::string term = r == 0 ? m.predictors.front() : row_order[r];
      if (const auto* c = find(m, term)) {
        est << pad(fixed(c->estimate, 4) + std::string(static_cast<std::size_t>(c->stars), '*'), kCell);
        se << pad("(" + fixed(c->std_error, 4) + ")", kCell);
      } else {
        est << pad("", kCell);
        se << pad("", kCell);
      }
    }
    os << est.str() << '\n' << se.str() << '\n';
  }
  os << rule << '\n' << label("Year FE");
  for (std::size_t i = 0; i < models.size(); ++i) os << pad("Yes", kCell);
  os << '\n' << label("Observations");
  for (const auto& m : models) os << pad(std::to_string(m.result.n_observations), kCell);
  os << '\n' << label("Adjusted R^2");
  for (const auto& m : models) os << pad(fixed(m.result.adjusted_r2, 4), kCell);
  os << '\n' << label("RMSE");
  for (const auto& m : models) os << pad(fixed(m.result.rmse, 4), kCell);
  os << '\n' << rule << '\n' << "Standard errors in parentheses; * p<=0.1, ** p<=0.05, *** p<=0.01\n";
  return os.str();
}

std::string regression_csv(const std::vector<NamedRegression>& models) {
  std::ostringstream os;
  os << "specification,term,estimate,std_error,t,p,stars\n";
  for (const auto& m : models)
    for (const auto& c : m.result.coefficients)
      os << escape(m.name) << ',' << escape(c.term) << ',' << format_double(c.estimate) << ','
         << format_double(c.std_error) << ',' << format_double(c.t_stat) << ',' << format_double(c.p_value) << ','
         << std::string(static_cast<std::size_t>(c.stars), '*') << '\n';
  return os.str();
}

std::string regression_summary_csv(const std::vector<NamedRegression>& models) {
  std::ostringstream os;
  os << "specification,family,observations,parameters,r2,adjusted_r2,rmse\n";
  for (const auto& m : models)
    os << escape(m.name) << ',' << escape(m.family) << ',' << m.result.n_observations << ','
       << m.result.n_parameters << ',' << format_double(m.result.r2) << ',' << format_double(m.result.adjusted_r2)
       << ',' << format_double(m.result.rmse) << '\n';
  return os.str();
}

}  // namespace ecomplex::report
