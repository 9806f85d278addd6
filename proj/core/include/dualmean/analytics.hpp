#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dualmean/population.hpp"

namespace dualmean {

enum class CoeffKind { A, B, C, D };

/// Inputs that shaped a coefficient set: lambda for kind C; (tau, c3, beta)
/// for kind D. Unused members stay at their defaults.
struct CoeffContext {
    double lambda = 1.0;
    double tau = 0.0;
    int c3 = 0;
    double beta = 0.0;
};

struct CoefficientSet {
    CoeffKind kind = CoeffKind::A;
    std::array<double, 5> values{};  // v1..v5
    CoeffContext context;
};

/// Analytic properties of one estimator under one parameter set.
struct AnalyticResult {
    std::string estimator;
    double bias = 0.0;
    double mse = 0.0;      // at the constants reported below
    double min_mse = 0.0;  // at the optimum constants
    std::map<std::string, double> optimum_constants;
    std::optional<CoefficientSet> coefficients;
    std::vector<std::string> notes;  // logged cross-check discrepancies
};

/// Variance of the sample mean of observed y: gamma*(var_y + var_ey) = r0.
double var_mean(const DesignConstants& dc, const PopulationParams& p);

/// First-order MSE of the dual-to-ratio estimator. with_measurement_error
/// adds gamma*[var_ey + n1^2 R^2 var_ex]; the with-error form equals
/// r0 + n1^2 R^2 r1 - 2 n1 R r01.
double mse_dual_ratio(const DesignConstants& dc, const PopulationParams& p,
                      bool with_measurement_error);

/// The five coefficients of the requested kind. Kind A is the
/// no-measurement-error set (unit-scaled); B drives the ratio-cum-dual
/// quadratic, C the modified-difference quadratic (context.lambda), D the
/// difference-cum-dual bilinear form (context tau/c3/beta).
CoefficientSet coeffs(CoeffKind kind, const DesignConstants& dc,
                      const PopulationParams& p, const CoeffContext& ctx = {});

/// Evaluates the scalar quadratic
///   v2 + w^2 v1 + (1-w)^2 v2 ... : kind A scales the whole bracket by
/// ybar_sq; kinds B and C add ybar_sq as the constant term.
double mse_quadratic(const CoefficientSet& cs, double ybar_sq, double w);

/// MSE of the difference-cum-dual estimator at arbitrary (d1, d2), using a
/// kind-D coefficient set.
double mse_diff_cum_dual(const CoefficientSet& d, double ybar_sq, double d1, double d2);

/// Stationary point (v2 + v3 - v4 - v5)/(v1 + v2 - 2 v5) of the scalar
/// quadratic; the minimum when the leading coefficient is positive. Throws
/// SingularityError when the objective is flat (denominator below 1e-12
/// relative to the coefficient scale).
double optimum_scalar(const CoefficientSet& cs);

AnalyticResult mean_per_unit_analytics(const DesignConstants& dc, const PopulationParams& p);
AnalyticResult dual_ratio_analytics(const DesignConstants& dc, const PopulationParams& p);
AnalyticResult ratio_cum_dual_analytics(const DesignConstants& dc, const PopulationParams& p);

/// Class-level optimum of the generalized family plus the bias of the given
/// member (1..4) at the constant implied by the optimum slope. min_mse is
/// r0 - r01^2/r1; requires r1 > 0.
AnalyticResult wider_class_analytics(const DesignConstants& dc, const PopulationParams& p,
                                     int member = 3);

AnalyticResult modified_difference_analytics(const DesignConstants& dc, const PopulationParams& p);

/// Optimum (d1, d2), bias, and minimum MSE of the difference-cum-dual family
/// for one (tau, c3, beta). Throws SingularityError when the normal
/// equations are singular.
AnalyticResult diff_cum_dual_analytics(const DesignConstants& dc, const PopulationParams& p,
                                       double tau, int c3, double beta);

/// Percent relative efficiency: 100 * var_base / mse_min. Throws
/// SingularityError when mse_min <= 0.
double pre(double var_base, double mse_min);

/// Regression coefficient rho*S_Y*S_X/var_x used by the
/// difference-cum-dual family when the caller does not override it.
double regression_beta(const PopulationParams& p);

/// The canonical twelve-row analysis: ybar, e1, e2, y1, y2, yp1..yp7.
std::vector<AnalyticResult> analyze_all(const DesignConstants& dc, const PopulationParams& p);

/// Same rows, but singular rows are captured instead of thrown so a report
/// can surface them.
struct AnalyzeRow {
    AnalyticResult result;
    bool ok = true;
    std::string error;
};
std::vector<AnalyzeRow> analyze_table(const DesignConstants& dc, const PopulationParams& p);

// Forward declaration; full definition in estimators.hpp.
struct EstimatorSpec;

/// First-order MSE of an estimator at the constants held in its spec (not at
/// the optimum).
double analytic_mse(const EstimatorSpec& spec, const DesignConstants& dc,
                    const PopulationParams& p);

/// One efficiency-comparison predicate: does MSE(left) < MSE(right) hold?
/// lhs is the computed value whose sign decides the predicate; boundary is
/// set when the two MSEs agree to within 1e-12 relative (non-strict case).
struct ConditionReport {
    int index = 0;  // 1..7
    std::string left;
    std::string right;
    double lhs = 0.0;
    bool holds = false;
    bool boundary = false;
    double mse_left = 0.0;
    double mse_right = 0.0;
};

/// The seven efficiency predicates. `results` must contain rows labelled
/// "ybar", "e1", "e2", "y1", "y2" and "yp7" (the member used for the three
/// family-level comparisons).
std::array<ConditionReport, 7> efficiency_conditions(
    const DesignConstants& dc, const PopulationParams& p,
    const std::map<std::string, AnalyticResult>& results);

}  // namespace dualmean
