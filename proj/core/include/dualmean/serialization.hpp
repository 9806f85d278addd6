#pragma once

#include <string>

#include "json.hpp"

#include "dualmean/analytics.hpp"
#include "dualmean/estimators.hpp"
#include "dualmean/population.hpp"
#include "dualmean/simulation.hpp"

namespace dualmean {

using json = nlohmann::json;

// PopulationParams uses the exact snake_case field names below; parsing
// validates types and invariants and reports the offending field.
//   {"N":5000,"n":500,"mean_y":...,"mean_x":...,"var_y":...,"var_x":...,
//    "var_ey":...,"var_ex":...,"rho":...}
void to_json(json& j, const PopulationParams& p);
void from_json(const json& j, PopulationParams& p);

void to_json(json& j, const DesignConstants& dc);

// EstimatorSpec carries a "family" discriminator plus a flat constants
// object. Member names "yp1".."yp7" are accepted as families; they expand to
// their (c1, c2, c3) shape and need "mu_x", "cx" and "rho" alongside.
void to_json(json& j, const EstimatorSpec& s);
void from_json(const json& j, EstimatorSpec& s);

void to_json(json& j, const SyntheticPopulationSpec& s);
void from_json(const json& j, SyntheticPopulationSpec& s);

void to_json(json& j, const MonteCarloConfig& c);
void from_json(const json& j, MonteCarloConfig& c);

void to_json(json& j, const EstimatorMoments& m);
void to_json(json& j, const MonteCarloResult& r);

void to_json(json& j, const CoefficientSet& cs);
void to_json(json& j, const AnalyticResult& r);
void to_json(json& j, const ConditionReport& c);

/// Parses a JSON document, wrapping syntax errors in ConfigError with the
/// source label.
json parse_json(const std::string& text, const std::string& source);
json load_json_file(const std::string& path);

}  // namespace dualmean
