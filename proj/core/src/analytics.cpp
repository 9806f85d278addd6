#include "dualmean/analytics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dualmean/errors.hpp"
#include "dualmean/estimators.hpp"

namespace dualmean {

namespace {

double ybar_sq(const PopulationParams& p) { return p.mean_y * p.mean_y; }

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

// Relative agreement check for the cross-validated closed-form displays.
bool agrees(double a, double b, double rel) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1e-30});
    return std::fabs(a - b) <= rel * scale;
}

}  // namespace

double var_mean(const DesignConstants& dc, const PopulationParams&) {
    return dc.r0;
}

double mse_dual_ratio(const DesignConstants& dc, const PopulationParams& p,
                      bool with_measurement_error) {
    if (with_measurement_error)
        return dc.r0 + dc.n1 * dc.n1 * dc.R * dc.R * dc.r1 - 2.0 * dc.n1 * dc.R * dc.r01;
    const double y2 = ybar_sq(p);
    return dc.gamma * y2 *
           (dc.cy * dc.cy + dc.n1 * dc.n1 * dc.cx * dc.cx - 2.0 * dc.n1 * p.rho * dc.cy * dc.cx);
}

CoefficientSet coeffs(CoeffKind kind, const DesignConstants& dc, const PopulationParams& p,
                      const CoeffContext& ctx) {
    CoefficientSet cs;
    cs.kind = kind;
    cs.context = ctx;
    const double y2 = ybar_sq(p);
    const double n1 = dc.n1, R = dc.R, r0 = dc.r0, r1 = dc.r1, r01 = dc.r01;

    switch (kind) {
        case CoeffKind::A: {
            const double g = dc.gamma, cy = dc.cy, cx = dc.cx, rho = p.rho;
            cs.values = {
                1.0 + g * (cy * cy + 3.0 * cx * cx - 4.0 * rho * cy * cx),
                1.0 + g * (cy * cy + n1 * n1 * cx * cx - 4.0 * n1 * rho * cy * cx),
                1.0 + g * (cx * cx - rho * cy * cx),
                1.0 - n1 * g * rho * cy * cx,
                1.0 + g * (cy * cy + cx * cx * (1.0 + n1) - 2.0 * rho * cy * cx * (1.0 + n1)),
            };
            break;
        }
        case CoeffKind::B: {
            cs.values = {
                y2 + r0 + 3.0 * R * R * r1 - 4.0 * R * r01,
                y2 + r0 + n1 * n1 * R * R * r1 - 4.0 * n1 * R * r01,
                y2 + R * R * r1 - R * r01,
                y2 - n1 * R * r01,
                y2 + r0 + (1.0 + n1) * R * R * r1 - 2.0 * (n1 + 1.0) * R * r01,
            };
            break;
        }
        case CoeffKind::C: {
            const double lam = ctx.lambda;
            cs.values = {
                lam * lam * (y2 + r0 + n1 * n1 * R * R * r1 - 4.0 * n1 * R * r01),
                y2 + r0,
                lam * (y2 - n1 * R * r01),
                y2,
                lam * (y2 + r0 - 2.0 * n1 * R * r01),
            };
            break;
        }
        case CoeffKind::D: {
            const double tau = ctx.tau, beta = ctx.beta;
            const double c3 = static_cast<double>(ctx.c3);
            const double Y = p.mean_y;
            const double t2 = tau * tau * n1 * n1 * r1;  // tau^2 n1^2 r1
            const double half = 0.5 * c3 * (c3 - 1.0);
            cs.values = {
                y2 + r0 + beta * beta * n1 * n1 * r1 + 2.0 * beta * n1 * r01,
                y2 + r0 + c3 * c3 * t2 * y2 - 4.0 * c3 * tau * n1 * r01 * Y +
                    c3 * (c3 - 1.0) * t2 * y2,
                y2,
                Y * (Y - c3 * tau * n1 * r01 + half * t2 * Y),
                y2 + r0 - 2.0 * c3 * tau * n1 * Y * r01 + half * t2 * y2 + beta * n1 * r01 -
                    c3 * beta * tau * n1 * n1 * r1 * Y,
            };
            break;
        }
    }
    return cs;
}

double mse_quadratic(const CoefficientSet& cs, double ybar_sq_value, double w) {
    const auto& v = cs.values;
    const double bracket = w * w * v[0] + (1.0 - w) * (1.0 - w) * v[1] - 2.0 * w * v[2] -
                           2.0 * (1.0 - w) * v[3] + 2.0 * w * (1.0 - w) * v[4];
    if (cs.kind == CoeffKind::A) return ybar_sq_value * (1.0 + bracket);
    return ybar_sq_value + bracket;
}

double mse_diff_cum_dual(const CoefficientSet& d, double ybar_sq_value, double d1, double d2) {
    const auto& v = d.values;
    return ybar_sq_value + d1 * d1 * v[0] + d2 * d2 * v[1] - 2.0 * d1 * v[2] - 2.0 * d2 * v[3] +
           2.0 * d1 * d2 * v[4];
}

double optimum_scalar(const CoefficientSet& cs) {
    const auto& v = cs.values;
    const double num = v[1] + v[2] - v[3] - v[4];
    const double den = v[0] + v[1] - 2.0 * v[4];
    double scale = 1.0;
    for (double x : v) scale = std::max(scale, std::fabs(x));
    if (std::fabs(den) <= 1e-12 * scale)
        throw SingularityError("optimum: flat objective, quadratic term vanishes");
    return num / den;
}

AnalyticResult mean_per_unit_analytics(const DesignConstants& dc, const PopulationParams& p) {
    AnalyticResult r;
    r.estimator = "ybar";
    r.bias = 0.0;
    r.mse = r.min_mse = var_mean(dc, p);
    return r;
}

AnalyticResult dual_ratio_analytics(const DesignConstants& dc, const PopulationParams& p) {
    AnalyticResult r;
    r.estimator = "e1";
    r.bias = -dc.n1 * dc.r01 / p.mean_x;
    r.mse = r.min_mse = mse_dual_ratio(dc, p, true);
    return r;
}

AnalyticResult ratio_cum_dual_analytics(const DesignConstants& dc, const PopulationParams& p) {
    AnalyticResult r;
    r.estimator = "e2";
    const CoefficientSet b = coeffs(CoeffKind::B, dc, p);
    const double alpha = optimum_scalar(b);
    const double y2 = ybar_sq(p);
    r.mse = r.min_mse = mse_quadratic(b, y2, alpha);
    r.bias = (alpha * b.values[2] + (1.0 - alpha) * b.values[3] - y2) / p.mean_y;
    r.optimum_constants["alpha"] = alpha;
    r.coefficients = b;
    return r;
}

AnalyticResult wider_class_analytics(const DesignConstants& dc, const PopulationParams& p,
                                     int member) {
    if (!(dc.r1 > 0.0))
        throw SingularityError(
            "wider class: r1 must be positive (auxiliary variable carries no variation)");
    AnalyticResult r;
    r.estimator = "y1";
    const double g1 = dc.r01 * p.mean_x / (dc.n1 * dc.r1);
    const double eps = member_constant_from_g1(member, g1, p.mean_y);
    r.min_mse = dc.r0 - dc.r01 * dc.r01 / dc.r1;
    r.mse = r.min_mse;

    // Second derivatives of the member at (mean_y, 1); every member is
    // linear in ybar, so the pure-ybar term vanishes.
    double g2 = 0.0, g3 = 0.0;
    const double g4 = 0.0;
    switch (member) {
        case 1: g2 = 0.0; g3 = 1.0 - eps; break;
        case 2: g2 = -0.5 * p.mean_y * eps * (eps + 1.0); g3 = eps; break;
        case 3: g2 = 0.0; g3 = eps; break;
        default: g2 = p.mean_y * (1.0 - eps); g3 = eps - 1.0; break;
    }
    const double mx = p.mean_x;
    r.bias = (dc.n1 * dc.n1 * dc.r1 / (mx * mx)) * g2 - (dc.n1 * dc.r01 / mx) * g3 + dc.r0 * g4;
    r.optimum_constants["G1"] = g1;
    r.optimum_constants["eps"] = eps;
    r.optimum_constants["member"] = static_cast<double>(member);
    return r;
}

AnalyticResult modified_difference_analytics(const DesignConstants& dc,
                                             const PopulationParams& p) {
    AnalyticResult r;
    r.estimator = "y2";
    CoeffContext ctx;
    ctx.lambda = dc.lambda;
    const CoefficientSet c = coeffs(CoeffKind::C, dc, p, ctx);
    const double j = optimum_scalar(c);
    const double y2 = ybar_sq(p);
    r.mse = r.min_mse = mse_quadratic(c, y2, j);

    // Cross-check against the closed minimum display
    //   (C2 - 2C4) - (C2 + C3 - C4 - C5)^2 / (C1 + C2 - 2C5),
    // allowing for the display's own cancellation noise.
    const auto& v = c.values;
    const double num = v[1] + v[2] - v[3] - v[4];
    const double den = v[0] + v[1] - 2.0 * v[4];
    const double phi2 = (v[1] - 2.0 * v[3]) - num * num / den;
    double scale = 1.0;
    for (double x : v) scale = std::max(scale, std::fabs(x));
    const double display_err = 256.0 * std::numeric_limits<double>::epsilon() * scale *
                               (1.0 + (std::fabs(num) + num * num / std::fabs(den)) /
                                          std::fabs(den));
    if (std::fabs(r.min_mse - (y2 + phi2)) >
        std::max(display_err, 1e-9 * std::fabs(r.min_mse)))
        r.notes.push_back("closed minimum display disagrees with evaluated quadratic: " +
                          fmt(y2 + phi2) + " vs " + fmt(r.min_mse));

    r.bias = j * dc.lambda * (p.mean_y - dc.n1 * dc.r01 / p.mean_x) + (1.0 - j) * p.mean_y -
             p.mean_y;
    r.optimum_constants["J"] = j;
    r.optimum_constants["lambda"] = dc.lambda;
    r.coefficients = c;
    return r;
}

AnalyticResult diff_cum_dual_analytics(const DesignConstants& dc, const PopulationParams& p,
                                       double tau, int c3, double beta) {
    AnalyticResult r;
    r.estimator = "yp";
    CoeffContext ctx;
    ctx.tau = tau;
    ctx.c3 = c3;
    ctx.beta = beta;
    const CoefficientSet d = coeffs(CoeffKind::D, dc, p, ctx);
    const auto& v = d.values;
    const double det = v[0] * v[1] - v[4] * v[4];
    const double scale = std::max({std::fabs(v[0] * v[1]), v[4] * v[4], 1.0});
    if (std::fabs(det) <= 1e-12 * scale)
        throw SingularityError("difference-cum-dual: singular normal equations (D1*D2 = D5^2)");

    const double d1 = (v[1] * v[2] - v[3] * v[4]) / det;
    const double d2 = (v[0] * v[3] - v[2] * v[4]) / det;
    const double y2 = ybar_sq(p);
    r.mse = r.min_mse = mse_diff_cum_dual(d, y2, d1, d2);

    // Cross-check against the closed minimum display ybar^2 - phi_p. The
    // display divides near-cancelling quintic products by det^2, so its
    // forward roundoff bound (not a plain relative tolerance) is the
    // disagreement threshold.
    const double t1 = v[0] * v[1] * v[1] * v[2] * v[2];
    const double t2 = v[0] * v[3] * v[3] * v[4] * v[4];
    const double t3 = v[0] * v[0] * v[1] * v[3] * v[3];
    const double t4 = v[1] * v[2] * v[2] * v[4] * v[4];
    const double t5 = 2.0 * v[2] * v[3] * v[4] * v[4] * v[4];
    const double t6 = 2.0 * v[0] * v[1] * v[2] * v[3] * v[4];
    const double phi_p = (t1 - t2 + t3 - t4 + t5 - t6) / (det * det);
    const double term_scale = std::fabs(t1) + std::fabs(t2) + std::fabs(t3) + std::fabs(t4) +
                              std::fabs(t5) + std::fabs(t6);
    const double display_err =
        64.0 * std::numeric_limits<double>::epsilon() * term_scale / (det * det);
    if (std::fabs(r.min_mse - (y2 - phi_p)) >
        std::max(display_err, 1e-9 * std::fabs(r.min_mse)))
        r.notes.push_back("closed minimum display disagrees with evaluated quadratic: " +
                          fmt(y2 - phi_p) + " vs " + fmt(r.min_mse));

    r.bias = d1 * p.mean_y + d2 * v[3] / p.mean_y - p.mean_y;
    r.optimum_constants["d1"] = d1;
    r.optimum_constants["d2"] = d2;
    r.optimum_constants["tau"] = tau;
    r.optimum_constants["c3"] = static_cast<double>(c3);
    r.optimum_constants["beta"] = beta;
    r.coefficients = d;
    return r;
}

double pre(double var_base, double mse_min) {
    if (!(mse_min > 0.0))
        throw SingularityError("pre: MSE must be positive");
    return 100.0 * var_base / mse_min;
}

double regression_beta(const PopulationParams& p) {
    if (!(p.var_x > 0.0)) throw SingularityError("beta: var_x must be positive");
    return p.rho * std::sqrt(p.var_y * p.var_x) / p.var_x;
}

std::vector<AnalyticResult> analyze_all(const DesignConstants& dc, const PopulationParams& p) {
    std::vector<AnalyticResult> rows;
    rows.push_back(mean_per_unit_analytics(dc, p));
    rows.push_back(dual_ratio_analytics(dc, p));
    rows.push_back(ratio_cum_dual_analytics(dc, p));
    rows.push_back(wider_class_analytics(dc, p));
    rows.push_back(modified_difference_analytics(dc, p));
    const double beta = regression_beta(p);
    for (int i = 1; i <= 7; ++i) {
        const std::string name = "yp" + std::to_string(i);
        const MemberShape ms = member_shape(name, p.mean_x, dc.cx, p.rho);
        const double tau = member_tau(ms.c1, ms.c2, p.mean_x);
        AnalyticResult r = diff_cum_dual_analytics(dc, p, tau, ms.c3, beta);
        r.estimator = name;
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<AnalyzeRow> analyze_table(const DesignConstants& dc, const PopulationParams& p) {
    std::vector<AnalyzeRow> rows;
    auto push = [&](const std::string& name, auto&& make) {
        AnalyzeRow row;
        try {
            row.result = make();
        } catch (const SingularityError& e) {
            row.ok = false;
            row.error = e.what();
            row.result.estimator = name;
        }
        rows.push_back(std::move(row));
    };
    push("ybar", [&] { return mean_per_unit_analytics(dc, p); });
    push("e1", [&] { return dual_ratio_analytics(dc, p); });
    push("e2", [&] { return ratio_cum_dual_analytics(dc, p); });
    push("y1", [&] { return wider_class_analytics(dc, p); });
    push("y2", [&] { return modified_difference_analytics(dc, p); });
    for (int i = 1; i <= 7; ++i) {
        const std::string name = "yp" + std::to_string(i);
        push(name, [&] {
            const double beta = regression_beta(p);
            const MemberShape ms = member_shape(name, p.mean_x, dc.cx, p.rho);
            const double tau = member_tau(ms.c1, ms.c2, p.mean_x);
            AnalyticResult r = diff_cum_dual_analytics(dc, p, tau, ms.c3, beta);
            r.estimator = name;
            return r;
        });
    }
    return rows;
}

double analytic_mse(const EstimatorSpec& spec, const DesignConstants& dc,
                    const PopulationParams& p) {
    const double y2 = ybar_sq(p);
    return std::visit(
        [&](const auto& fam) -> double {
            using F = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<F, MeanPerUnit>) {
                return var_mean(dc, p);
            } else if constexpr (std::is_same_v<F, DualRatio>) {
                return mse_dual_ratio(dc, p, true);
            } else if constexpr (std::is_same_v<F, RatioCumDual>) {
                return mse_quadratic(coeffs(CoeffKind::B, dc, p), y2, fam.alpha);
            } else if constexpr (std::is_same_v<F, WiderMember>) {
                // Slope of the member at (mean_y, 1) implied by its constant.
                double g1 = 0.0;
                switch (fam.k) {
                    case 1: g1 = (1.0 - fam.eps) * p.mean_y; break;
                    case 2: g1 = fam.eps * p.mean_y; break;
                    case 3: g1 = fam.eps * p.mean_y; break;
                    default: g1 = (fam.eps - 1.0) * p.mean_y; break;
                }
                const double mx = p.mean_x;
                return dc.r0 + (dc.n1 * dc.n1 * dc.r1 / (mx * mx)) * g1 * g1 -
                       (2.0 * dc.n1 * dc.r01 / mx) * g1;
            } else if constexpr (std::is_same_v<F, ModifiedDifference>) {
                CoeffContext ctx;
                ctx.lambda = spec.lambda;
                return mse_quadratic(coeffs(CoeffKind::C, dc, p, ctx), y2, fam.j);
            } else {
                CoeffContext ctx;
                ctx.tau = member_tau(fam.c1, fam.c2, spec.mu_x);
                ctx.c3 = fam.c3;
                ctx.beta = spec.beta;
                return mse_diff_cum_dual(coeffs(CoeffKind::D, dc, p, ctx), y2, fam.d1, fam.d2);
            }
        },
        spec.family);
}

std::array<ConditionReport, 7> efficiency_conditions(
    const DesignConstants&, const PopulationParams&,
    const std::map<std::string, AnalyticResult>& results) {
    auto mse_of = [&](const std::string& name) {
        auto it = results.find(name);
        if (it == results.end())
            throw ConfigError("efficiency conditions: missing analytic result for " + name);
        return it->second.min_mse;
    };

    const double v_ybar = mse_of("ybar");
    const double m_e1 = mse_of("e1");
    const double m_e2 = mse_of("e2");
    const double m_y1 = mse_of("y1");
    const double m_y2 = mse_of("y2");
    const double m_yp = mse_of("yp7");

    // Each predicate tests MSE(left) < MSE(right); lhs is oriented so that
    // the predicate holds when lhs > 0.
    struct Spec {
        const char* left;
        const char* right;
        double ml;
        double mr;
    };
    const Spec table[7] = {
        {"y1", "ybar", m_y1, v_ybar},
        {"y2", "ybar", m_y2, v_ybar},
        {"y1", "e1", m_y1, m_e1},
        {"y2", "e1", m_y2, m_e1},
        {"yp7", "ybar", m_yp, v_ybar},
        {"yp7", "e1", m_yp, m_e1},
        {"yp7", "e2", m_yp, m_e2},
    };

    std::array<ConditionReport, 7> out{};
    for (int i = 0; i < 7; ++i) {
        const Spec& s = table[static_cast<std::size_t>(i)];
        ConditionReport& c = out[static_cast<std::size_t>(i)];
        c.index = i + 1;
        c.left = s.left;
        c.right = s.right;
        c.mse_left = s.ml;
        c.mse_right = s.mr;
        c.lhs = s.mr - s.ml;
        c.boundary = agrees(s.ml, s.mr, 1e-12);
        c.holds = !c.boundary && s.ml < s.mr;
    }
    return out;
}

}  // namespace dualmean
