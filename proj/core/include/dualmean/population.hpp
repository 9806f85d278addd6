#pragma once

#include <cstdint>

namespace dualmean {

/// Known population-level inputs: moments of the true (Y, X) pair, the
/// measurement-error variances of the observed values, and the sampling
/// design sizes. This is the unit of configuration for every analytic
/// operation.
struct PopulationParams {
    std::int64_t N = 0;   // population size
    std::int64_t n = 0;   // sample size, 2 <= n < N
    double mean_y = 0.0;  // population mean of true Y
    double mean_x = 0.0;  // population mean of true X, must be nonzero
    double var_y = 0.0;   // variance of true Y (divisor N-1)
    double var_x = 0.0;   // variance of true X
    double var_ey = 0.0;  // measurement-error variance on observed y
    double var_ex = 0.0;  // measurement-error variance on observed x
    double rho = 0.0;     // correlation of true Y and X, |rho| <= 1

    // Throws ConfigError naming the offending field.
    void validate() const;
};

/// Constants derived once from PopulationParams and consumed by every MSE
/// formula. r0/r1 are the gamma-scaled second moments of the observed
/// variables; r01 is their cross moment (measurement errors are
/// uncorrelated, so it carries no error variance).
struct DesignConstants {
    double gamma = 0.0;   // 1/n - 1/N
    double n1 = 0.0;      // n/(N - n)
    double R = 0.0;       // mean_y / mean_x
    double cy = 0.0;      // sqrt(var_y)/mean_y
    double cx = 0.0;      // sqrt(var_x)/mean_x
    double r0 = 0.0;      // gamma*(var_y + var_ey)
    double r1 = 0.0;      // gamma*(var_x + var_ex)
    double r01 = 0.0;     // gamma*rho*sqrt(var_y*var_x)
    double lambda = 1.0;  // (1 + gamma*rho*cy*cx)/(1 + gamma*cx^2)
};

/// Pure function of the inputs. Requires mean_y != 0 as well (cy and lambda
/// are always populated); throws ConfigError otherwise.
DesignConstants derive_constants(const PopulationParams& p);

}  // namespace dualmean
