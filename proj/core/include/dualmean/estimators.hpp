#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace dualmean {

/// One observed (error-contaminated) sample drawn from a population of N
/// units.
struct ObservedSample {
    std::vector<double> xs;
    std::vector<double> ys;
    std::int64_t N = 0;

    std::int64_t n() const { return static_cast<std::int64_t>(xs.size()); }
    void validate() const;  // len(xs)=len(ys)=n, 2 <= n < N
};

struct Means {
    double xbar = 0.0;
    double ybar = 0.0;
};

Means sample_means(const ObservedSample& s);

/// Reflection of the sample mean about the known population mean:
/// mu_x - n1*(xbar - mu_x), the affine form of (N*mu_x - n*xbar)/(N - n).
/// The affine form avoids cancellation when n << N.
double dual_transform(double xbar, double mu_x, std::int64_t N, std::int64_t n);

// --- estimator families ---------------------------------------------------

struct MeanPerUnit {};

struct DualRatio {};  // ybar * x**/mu_x

struct RatioCumDual {  // ybar * [alpha*mu_x/xbar + (1-alpha)*x**/mu_x]
    double alpha = 0.0;
};

struct WiderMember {  // members 1..4 of the generalized class g(ybar, u**)
    int k = 3;
    double eps = 1.0;
};

struct ModifiedDifference {  // (1-J)*ybar + J*lambda*ybar*x**/mu_x
    double j = 0.0;
};

struct DiffCumDual {  // d1*[ybar + beta*(mu_x - x**)] + d2*ybar*ratio^c3
    double d1 = 0.0;
    double d2 = 1.0;
    double c1 = 1.0;
    double c2 = 0.0;
    int c3 = 1;  // one of {-1, 0, +1}
};

using EstimatorFamily = std::variant<MeanPerUnit, DualRatio, RatioCumDual,
                                     WiderMember, ModifiedDifference, DiffCumDual>;

/// A fully resolved estimator: the family with its tuning constants plus the
/// shared known parameters. beta is used only by DiffCumDual, lambda only by
/// ModifiedDifference.
struct EstimatorSpec {
    EstimatorFamily family;
    double mu_x = 0.0;
    double beta = 0.0;
    double lambda = 1.0;
    std::string label;

    void validate() const;
};

struct Estimate {
    double value = 0.0;
    // Set when |tau*n1*(xbar - mu_x)| >= 1 for DiffCumDual: the point value
    // is exact but the series underlying its MSE is outside its validity
    // region.
    bool expansion_flagged = false;
};

/// Point estimate of the population mean of Y. Throws SingularityError on
/// vanishing denominators or a non-finite result.
Estimate estimate(const EstimatorSpec& spec, const ObservedSample& s);

/// tau = c1/(c1*mu_x + c2); throws SingularityError when the denominator
/// vanishes.
double member_tau(double c1, double c2, double mu_x);

/// The eight catalogued tau values. Throws SingularityError naming the first
/// index whose denominator vanishes.
std::array<double, 8> tau_values(double mu_x, double cx, double rho);

/// (c1, c2, c3) for the named DiffCumDual members "yp1".."yp7".
struct MemberShape {
    double c1 = 0.0;
    double c2 = 0.0;
    int c3 = 1;
};
MemberShape member_shape(const std::string& name, double mu_x, double cx, double rho);
bool is_member_name(const std::string& name);

/// Solves a generalized-class member's tuning constant so that the member's
/// derivative with respect to u** at (mean_y, 1) equals g1.
///   k=1: eps = 1 - g1/mean_y     k=2: eps = g1/mean_y
///   k=3: eps = g1/mean_y         k=4: eps = 1 + g1/mean_y
double member_constant_from_g1(int k, double g1, double mean_y);

}  // namespace dualmean
