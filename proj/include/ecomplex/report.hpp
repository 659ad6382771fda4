#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ecomplex/advantage.hpp"
#include "ecomplex/complexity.hpp"
#include "ecomplex/stats.hpp"

namespace ecomplex::report {

/// Tidy `year,region,metric,value` rows for the per-region scores.
std::string scores_csv(const ComplexityScores& s);
/// Tidy `year,industry,metric,value` rows for q_complexity and ubiquity.
std::string industry_scores_csv(const ComplexityScores& s);
/// Single JSON document with every vector, the parameters and the iteration
/// count.
nlohmann::ordered_json scores_json(const ComplexityScores& s);
ComplexityScores scores_from_json(const nlohmann::ordered_json& j);

/// Region rows, industry columns.
std::string rca_csv(const RcaMatrix& rca);
std::string advantage_csv(const AdvantageMatrix& m);
/// Tidy `region,metric,value` with diversity, avg_ubiquity and quadrant.
std::string diversity_ubiquity_csv(const AdvantageMatrix& m);

std::string rank_evolution_csv(const RankEvolution& r);
std::string correlation_csv(const CorrelationMatrix& c);
std::string metric_table_csv(const MetricTable& t, const std::vector<std::string>& columns);

struct NamedRegression {
  std::string name;     ///< e.g. "(1)"
  std::string family;   ///< "ECI" or "Fitness"
  std::vector<std::string> predictors;
  RegressionResult result;
};

/// Aligned text table: coefficient with stars, standard error in
/// parentheses below, then observations, adjusted R^2 and RMSE.
std::string regression_text(const std::vector<NamedRegression>& models, const std::vector<std::string>& row_order,
                            const std::vector<std::string>& row_labels);
std::string regression_csv(const std::vector<NamedRegression>& models);
std::string regression_summary_csv(const std::vector<NamedRegression>& models);

}  // namespace ecomplex::report
