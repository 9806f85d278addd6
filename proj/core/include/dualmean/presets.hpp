#pragma once

#include <string>
#include <vector>

#include "dualmean/population.hpp"
#include "dualmean/simulation.hpp"

namespace dualmean {

/// Embedded parameter sets:
///   "pop1"           first reference population exactly as published
///                    (its var_ex is internally inconsistent with the
///                    generator that produced the rest of the set; kept
///                    verbatim, see "pop1-corrected")
///   "pop1-corrected" same set with var_ex = 9, the value the generator
///                    (error sd 3) implies; reproduces the embedded
///                    reference table
///   "pop2"           second reference population
/// Throws ConfigError for unknown names.
PopulationParams population_preset(const std::string& name);

/// Generator specs behind the presets ("pop1"/"pop1-corrected" share one
/// generator, error sd 3; "pop2" uses error sd 5).
SyntheticPopulationSpec generator_preset(const std::string& name, std::uint64_t seed);

std::vector<std::string> population_preset_names();

/// One row of the embedded reference table of published PRE/MSE values.
struct ReferenceRow {
    std::string estimator;
    double pre = 0.0;
    double mse = 0.0;
};

/// Published reference values for "pop1" (first column set) or "pop2".
std::vector<ReferenceRow> reference_table(const std::string& population);

}  // namespace dualmean
