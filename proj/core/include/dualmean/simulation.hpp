#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dualmean/estimators.hpp"
#include "dualmean/population.hpp"
#include "dualmean/rng.hpp"

namespace dualmean {

/// Generator of a synthetic finite population:
///   X_i ~ Normal(x_mean, x_sd), Y_i = X_i + Normal(0, y_noise_sd),
/// with observation errors Normal(err_*_mean, err_*_sd) added at sampling
/// time. All sd parameters are standard deviations.
struct SyntheticPopulationSpec {
    std::int64_t N = 0;
    double x_mean = 0.0;
    double x_sd = 1.0;
    double y_noise_sd = 0.0;
    double err_y_mean = 0.0;
    double err_y_sd = 0.0;
    double err_x_mean = 0.0;
    double err_x_sd = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// A realized finite population. Moments use divisor N-1; the error
/// variances are the generator's, known by construction.
struct GeneratedPopulation {
    std::vector<double> true_x;
    std::vector<double> true_y;
    SyntheticPopulationSpec spec;

    std::int64_t size() const { return static_cast<std::int64_t>(true_x.size()); }
    double mean_true_y() const;

    /// Realized PopulationParams for a given sample size (the population
    /// alone does not fix n). Validates the result.
    PopulationParams realized_params(std::int64_t n) const;
};

/// Deterministic in the spec's seed. Throws ConfigError when the generated
/// population is degenerate (zero variance makes the correlation undefined).
GeneratedPopulation generate_population(const SyntheticPopulationSpec& spec);

/// n distinct indices in [0, N), uniform over all n-subsets (partial
/// Fisher-Yates). Deterministic given the stream state.
std::vector<std::int64_t> draw_srswor(std::int64_t N, std::int64_t n, StreamRng& rng);

/// Observed values for the selected units: true value plus an independent
/// normal error on each of y and x. zero_error_means forces both error means
/// to 0 regardless of the spec (the analytic formulas assume mean-zero
/// errors).
ObservedSample observe_with_error(const GeneratedPopulation& pop,
                                  const std::vector<std::int64_t>& indices,
                                  const SyntheticPopulationSpec& spec,
                                  bool zero_error_means, StreamRng& rng);

struct MonteCarloConfig {
    std::int64_t replications = 0;
    std::int64_t n = 0;
    std::vector<EstimatorSpec> estimators;  // constants already fixed
    std::uint64_t master_seed = 0;
    bool error_means_zeroed = true;
    int threads = 0;  // 0 = hardware concurrency

    void validate(std::int64_t population_size) const;
};

struct EstimatorMoments {
    std::string estimator;
    double empirical_bias = 0.0;  // mean(estimate - true mean)
    double empirical_mse = 0.0;   // mean(squared deviation)
    double monte_carlo_se = 0.0;  // standard error of the empirical MSE
    std::int64_t flagged_failures = 0;    // singular replications, excluded
    std::int64_t expansion_warnings = 0;  // validity flags, included
};

struct MonteCarloResult {
    std::vector<EstimatorMoments> estimators;
    std::int64_t replications = 0;
    std::int64_t n = 0;
    std::uint64_t master_seed = 0;
    bool error_means_zeroed = true;
    double true_mean = 0.0;  // the estimand: realized mean of true Y
    std::int64_t flagged_replications = 0;
};

/// R independent replications, each with a fresh sample and fresh errors.
/// Per-replication streams are derived from (master_seed, replication
/// index), so the result is bit-identical for any thread count. Estimator
/// singularities are excluded from the moments and counted; throws
/// McFailureError when more than 0.1% of replications flag.
MonteCarloResult run_monte_carlo(const GeneratedPopulation& pop, const MonteCarloConfig& cfg);

/// The default estimator battery for a population: ybar, e1, e2, y1, y2,
/// yp1..yp7, every tuning constant at its analytic optimum computed from the
/// realized parameters.
std::vector<EstimatorSpec> default_estimators(const PopulationParams& params);

}  // namespace dualmean
