#include "doctest.h"

#include <cmath>
#include <map>

#include "dualmean/analytics.hpp"
#include "dualmean/errors.hpp"
#include "dualmean/estimators.hpp"
#include "dualmean/population.hpp"
#include "dualmean/presets.hpp"
#include "dualmean/rng.hpp"
#include "support/numeric_opt.hpp"

using namespace dualmean;

namespace {

PopulationParams random_params(StreamRng& rng) {
    PopulationParams p;
    p.N = 200 + static_cast<std::int64_t>(rng.next_below(20000));
    p.n = 2 + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(p.N / 2)));
    p.mean_y = 1.0 + rng.next_unit() * 9.0;
    p.mean_x = 1.0 + rng.next_unit() * 9.0;
    p.var_y = 0.5 + rng.next_unit() * 150.0;
    p.var_x = 0.5 + rng.next_unit() * 150.0;
    p.var_ey = rng.next_unit() * 25.0;
    p.var_ex = rng.next_unit() * 25.0;
    p.rho = 1.9 * rng.next_unit() - 0.95;
    return p;
}

}  // namespace

TEST_CASE("variance of the sample mean matches the reference populations") {
    const PopulationParams p1 = population_preset("pop1");
    const PopulationParams p2 = population_preset("pop2");
    CHECK(var_mean(derive_constants(p1), p1) == doctest::Approx(0.19956).epsilon(1e-4));
    CHECK(var_mean(derive_constants(p2), p2) == doctest::Approx(0.217946).epsilon(1e-5));

    PopulationParams p = p1;
    p.var_ey = 0.0;
    const DesignConstants dc = derive_constants(p);
    CHECK(var_mean(dc, p) == doctest::Approx(dc.gamma * p.var_y).epsilon(1e-14));
}

TEST_CASE("dual-ratio MSE with and without measurement error") {
    const PopulationParams p1 = population_preset("pop1");
    const DesignConstants dc1 = derive_constants(p1);
    CHECK(mse_dual_ratio(dc1, p1, true) == doctest::Approx(0.161853593541).epsilon(1e-9));
    CHECK(mse_dual_ratio(dc1, p1, true) > mse_dual_ratio(dc1, p1, false));

    const PopulationParams p1c = population_preset("pop1-corrected");
    CHECK(mse_dual_ratio(derive_constants(p1c), p1c, true) ==
          doctest::Approx(0.161515582673).epsilon(1e-9));

    const PopulationParams p2 = population_preset("pop2");
    CHECK(mse_dual_ratio(derive_constants(p2), p2, true) ==
          doctest::Approx(0.182305).epsilon(1e-4));

    // Without correlation the auxiliary variable only adds variance.
    PopulationParams p = p1;
    p.rho = 0.0;
    p.var_ey = p.var_ex = 0.0;
    const DesignConstants dc = derive_constants(p);
    CHECK(mse_dual_ratio(dc, p, true) > var_mean(dc, p));
}

TEST_CASE("coefficient-set special cases") {
    const PopulationParams p = population_preset("pop1");
    const DesignConstants dc = derive_constants(p);
    const double y2 = p.mean_y * p.mean_y;

    SUBCASE("D with c3 = 0 drops every tau term") {
        CoeffContext ctx;
        ctx.tau = 0.37;
        ctx.c3 = 0;
        ctx.beta = 0.9;
        const CoefficientSet d = coeffs(CoeffKind::D, dc, p, ctx);
        CHECK(d.values[1] == doctest::Approx(y2 + dc.r0).epsilon(1e-14));
        CHECK(d.values[3] == doctest::Approx(y2).epsilon(1e-14));
        CHECK(d.values[4] ==
              doctest::Approx(y2 + dc.r0 + 0.9 * dc.n1 * dc.r01).epsilon(1e-14));
    }

    SUBCASE("A is the error-free B set up to the ybar^2 scaling") {
        PopulationParams q = p;
        q.var_ey = 0.0;
        q.var_ex = 0.0;
        const DesignConstants dcq = derive_constants(q);
        const CoefficientSet a = coeffs(CoeffKind::A, dcq, q);
        const CoefficientSet b = coeffs(CoeffKind::B, dcq, q);
        const double yy = q.mean_y * q.mean_y;
        for (double w : {-0.4, 0.0, 0.31, 1.0, 1.7})
            CHECK(mse_quadratic(a, yy, w) ==
                  doctest::Approx(mse_quadratic(b, yy, w)).epsilon(1e-11));
    }

    SUBCASE("A with cx = 0 collapses to the no-information pattern") {
        PopulationParams q = p;
        q.var_x = 0.0;
        const DesignConstants dcq = derive_constants(q);
        const CoefficientSet a = coeffs(CoeffKind::A, dcq, q);
        const double expected = 1.0 + dcq.gamma * dcq.cy * dcq.cy;
        CHECK(a.values[0] == doctest::Approx(expected).epsilon(1e-14));
        CHECK(a.values[1] == doctest::Approx(expected).epsilon(1e-14));
        CHECK(a.values[4] == doctest::Approx(expected).epsilon(1e-14));
        CHECK(a.values[2] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(a.values[3] == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("D-set reduction identities hold for arbitrary parameters") {
    StreamRng rng(555);
    for (int i = 0; i < 300; ++i) {
        const PopulationParams p = random_params(rng);
        const DesignConstants dc = derive_constants(p);
        const double y2 = p.mean_y * p.mean_y;
        const double beta = regression_beta(p);

        CoeffContext ctx;
        ctx.tau = 1.0 / p.mean_x;
        ctx.c3 = 1;
        ctx.beta = beta;
        const CoefficientSet d = coeffs(CoeffKind::D, dc, p, ctx);

        // (d1, d2) = (0, 1) with the plain ratio shape is the dual-ratio MSE.
        // The quadratic evaluates through ybar^2-scale cancellation, so the
        // tolerance is anchored to that scale.
        const double reduced = mse_diff_cum_dual(d, y2, 0.0, 1.0);
        const double target = mse_dual_ratio(dc, p, true);
        CHECK(std::fabs(reduced - target) <= 1e-12 * (y2 + std::fabs(target)));

        // (d1, d2) = (1, 0) is the dual-regression component's MSE.
        const double reg = mse_diff_cum_dual(d, y2, 1.0, 0.0);
        const double expected = dc.r0 + beta * beta * dc.n1 * dc.n1 * dc.r1 +
                                2.0 * beta * dc.n1 * dc.r01;
        CHECK(std::fabs(reg - expected) <= 1e-12 * (y2 + std::fabs(expected)));
    }
}

TEST_CASE("scalar quadratic endpoints and symmetry") {
    const PopulationParams p = population_preset("pop2");
    const DesignConstants dc = derive_constants(p);
    const double y2 = p.mean_y * p.mean_y;
    const CoefficientSet b = coeffs(CoeffKind::B, dc, p);
    const auto& v = b.values;
    CHECK(mse_quadratic(b, y2, 1.0) == doctest::Approx(y2 + v[0] - 2.0 * v[2]).epsilon(1e-14));
    CHECK(mse_quadratic(b, y2, 0.0) == doctest::Approx(y2 + v[1] - 2.0 * v[3]).epsilon(1e-14));

    CoefficientSet sym = b;
    sym.values[1] = sym.values[0];
    sym.values[3] = sym.values[2];
    CHECK(mse_quadratic(sym, y2, 0.3) == doctest::Approx(mse_quadratic(sym, y2, 0.7)).epsilon(1e-12));
    CHECK(optimum_scalar(sym) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("without correlation the modified-difference optimum brings no gain") {
    PopulationParams p = population_preset("pop1");
    p.rho = 0.0;
    const DesignConstants dc = derive_constants(p);
    CoeffContext ctx;
    ctx.lambda = 1.0;
    const CoefficientSet c = coeffs(CoeffKind::C, dc, p, ctx);
    const double j = optimum_scalar(c);
    CHECK(j == doctest::Approx(0.0));
    const double y2 = p.mean_y * p.mean_y;
    CHECK(mse_quadratic(c, y2, j) == doctest::Approx(var_mean(dc, p)).epsilon(1e-10));
}

TEST_CASE("flat objective raises") {
    CoefficientSet flat;
    flat.kind = CoeffKind::B;
    flat.values = {1.0, 1.0, 0.7, 0.3, 1.0};  // v1 + v2 - 2 v5 = 0
    CHECK_THROWS_AS(optimum_scalar(flat), SingularityError);
}

TEST_CASE("closed-form optima agree with numeric minimizers") {
    for (const char* preset : {"pop1", "pop1-corrected", "pop2"}) {
        CAPTURE(preset);
        const PopulationParams p = population_preset(preset);
        const DesignConstants dc = derive_constants(p);
        const double y2 = p.mean_y * p.mean_y;

        const CoefficientSet b = coeffs(CoeffKind::B, dc, p);
        const double a_closed = optimum_scalar(b);
        const double a_numeric = testsupport::minimize_scalar(
            [&](double w) { return mse_quadratic(b, y2, w); }, -10.0, 10.0);
        CHECK(a_numeric == doctest::Approx(a_closed).epsilon(1e-8));
        CHECK(mse_quadratic(b, y2, a_numeric) ==
              doctest::Approx(mse_quadratic(b, y2, a_closed)).epsilon(1e-10));

        CoeffContext cc;
        cc.lambda = dc.lambda;
        const CoefficientSet c = coeffs(CoeffKind::C, dc, p, cc);
        const double j_closed = optimum_scalar(c);
        const double j_numeric = testsupport::minimize_scalar(
            [&](double w) { return mse_quadratic(c, y2, w); }, -50.0, 50.0);
        CHECK(j_numeric == doctest::Approx(j_closed).epsilon(1e-8));

        const AnalyticResult y1 = wider_class_analytics(dc, p);
        const double g1_closed = y1.optimum_constants.at("G1");
        auto wider_mse = [&](double g1) {
            const double mx = p.mean_x;
            return dc.r0 + (dc.n1 * dc.n1 * dc.r1 / (mx * mx)) * g1 * g1 -
                   (2.0 * dc.n1 * dc.r01 / mx) * g1;
        };
        const double g1_numeric = testsupport::minimize_scalar(wider_mse, -500.0, 500.0);
        CHECK(g1_numeric == doctest::Approx(g1_closed).epsilon(1e-8));
        CHECK(wider_mse(g1_numeric) == doctest::Approx(y1.min_mse).epsilon(1e-10));

        const double beta = regression_beta(p);
        for (int i = 1; i <= 7; ++i) {
            const std::string name = "yp" + std::to_string(i);
            CAPTURE(name);
            const MemberShape ms = member_shape(name, p.mean_x, dc.cx, p.rho);
            const double tau = member_tau(ms.c1, ms.c2, p.mean_x);
            const AnalyticResult r = diff_cum_dual_analytics(dc, p, tau, ms.c3, beta);
            CoeffContext ctx;
            ctx.tau = tau;
            ctx.c3 = ms.c3;
            ctx.beta = beta;
            const CoefficientSet d = coeffs(CoeffKind::D, dc, p, ctx);
            const auto [d1n, d2n] = testsupport::minimize_quadratic_2d(
                [&](double a, double bb) { return mse_diff_cum_dual(d, y2, a, bb); });
            const double d1c = r.optimum_constants.at("d1");
            const double d2c = r.optimum_constants.at("d2");
            CHECK(d1n == doctest::Approx(d1c).epsilon(1e-8));
            CHECK(d2n == doctest::Approx(d2c).epsilon(1e-8));
            // Minima agree relative to the term scale of the quadratic; the
            // large opposite-sign optima put a plain relative match below
            // the double-precision cancellation floor.
            const double term_scale = y2 + d1c * d1c * std::fabs(d.values[0]) +
                                      d2c * d2c * std::fabs(d.values[1]) +
                                      2.0 * std::fabs(d1c * d2c * d.values[4]);
            CHECK(std::fabs(mse_diff_cum_dual(d, y2, d1n, d2n) - r.min_mse) <=
                  1e-10 * term_scale);
        }
    }
}

TEST_CASE("generalized-class analytics") {
    SUBCASE("no correlation leaves only the pure variance") {
        PopulationParams p = population_preset("pop1");
        p.rho = 0.0;
        const DesignConstants dc = derive_constants(p);
        const AnalyticResult r = wider_class_analytics(dc, p);
        CHECK(r.optimum_constants.at("G1") == doctest::Approx(0.0));
        CHECK(r.min_mse == doctest::Approx(dc.r0).epsilon(1e-14));
        CHECK(r.bias == doctest::Approx(0.0));  // member 3 has no curvature terms
    }

    SUBCASE("reference value and the minimum identity") {
        const PopulationParams p = population_preset("pop1");
        const DesignConstants dc = derive_constants(p);
        const AnalyticResult r = wider_class_analytics(dc, p);
        CHECK(r.min_mse == doctest::Approx(0.0527791707784).epsilon(1e-9));
        CHECK(r.min_mse ==
              doctest::Approx(dc.r0 - dc.r01 * dc.r01 / dc.r1).epsilon(1e-12));
        CHECK(r.optimum_constants.at("G1") == doctest::Approx(35.7101072699).epsilon(1e-9));

        // Local-minimum probe around the optimum.
        auto wider_mse = [&](double g1) {
            const double mx = p.mean_x;
            return dc.r0 + (dc.n1 * dc.n1 * dc.r1 / (mx * mx)) * g1 * g1 -
                   (2.0 * dc.n1 * dc.r01 / mx) * g1;
        };
        const double g1 = r.optimum_constants.at("G1");
        const double h = 1e-3 * std::fabs(g1);
        CHECK(wider_mse(g1 + h) > r.min_mse);
        CHECK(wider_mse(g1 - h) > r.min_mse);
    }

    SUBCASE("zero r1 is rejected") {
        PopulationParams p = population_preset("pop1");
        p.var_x = 0.0;
        p.var_ex = 0.0;
        p.rho = 0.0;
        CHECK_THROWS_AS(wider_class_analytics(derive_constants(p), p), SingularityError);
    }

    SUBCASE("bounds: 0 <= min <= r0 for arbitrary parameters") {
        StreamRng rng(808);
        for (int i = 0; i < 300; ++i) {
            const PopulationParams p = random_params(rng);
            const DesignConstants dc = derive_constants(p);
            if (!(dc.r1 > 0.0)) continue;
            const AnalyticResult r = wider_class_analytics(dc, p);
            CHECK(r.min_mse >= -1e-12);
            CHECK(r.min_mse <= dc.r0 * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("ratio-cum-dual minimum equals the generalized-class bound") {
    StreamRng rng(313);
    for (int i = 0; i < 200; ++i) {
        const PopulationParams p = random_params(rng);
        const DesignConstants dc = derive_constants(p);
        if (!(dc.r1 > 0.0)) continue;
        // Near n1 = 1 the quadratic flattens and the optimum constant blows
        // up, which amplifies evaluation roundoff past the identity check.
        if (dc.n1 > 0.5) continue;
        const double bound = dc.r0 - dc.r01 * dc.r01 / dc.r1;
        AnalyticResult e2;
        try {
            e2 = ratio_cum_dual_analytics(dc, p);
        } catch (const SingularityError&) {
            continue;  // flat quadratic (n1 = 1 style corner)
        }
        const double y2 = p.mean_y * p.mean_y;
        CHECK(std::fabs(e2.min_mse - bound) <= 1e-11 * (y2 + std::fabs(bound)));
    }
}

TEST_CASE("frozen optima and minima for the reference populations") {
    const PopulationParams p1c = population_preset("pop1-corrected");
    const DesignConstants dc1 = derive_constants(p1c);
    const AnalyticResult e2 = ratio_cum_dual_analytics(dc1, p1c);
    CHECK(e2.optimum_constants.at("alpha") == doctest::Approx(0.905609381438).epsilon(1e-9));
    CHECK(e2.min_mse == doctest::Approx(0.0325811592758).epsilon(1e-9));
    CHECK(e2.bias == doctest::Approx(0.00268040853192).epsilon(1e-8));

    const AnalyticResult y2 = modified_difference_analytics(dc1, p1c);
    CHECK(y2.optimum_constants.at("J") == doctest::Approx(8.24130006514).epsilon(1e-9));
    CHECK(y2.min_mse == doctest::Approx(0.0326248371689).epsilon(1e-9));
    CHECK(y2.bias == doctest::Approx(-0.0346644988419).epsilon(1e-8));
    CHECK(y2.notes.empty());  // closed display agrees with the evaluation

    const AnalyticResult y1 = wider_class_analytics(dc1, p1c, 3);
    CHECK(y1.optimum_constants.at("G1") == doctest::Approx(40.6238762729).epsilon(1e-9));
    CHECK(y1.optimum_constants.at("eps") == doctest::Approx(8.2448750515).epsilon(1e-9));
    CHECK(y1.bias == doctest::Approx(-0.0338904985206).epsilon(1e-8));

    // Members with curvature pick up the second-derivative bias term.
    const AnalyticResult y1m2 = wider_class_analytics(dc1, p1c, 2);
    CHECK(y1m2.optimum_constants.at("eps") == doctest::Approx(8.2448750515).epsilon(1e-9));
    CHECK(y1m2.bias == doctest::Approx(-0.0528909941193).epsilon(1e-8));
    const AnalyticResult y1m4 = wider_class_analytics(dc1, p1c, 4);
    CHECK(y1m4.optimum_constants.at("eps") == doctest::Approx(9.2448750515).epsilon(1e-9));
    CHECK(y1m4.bias == doctest::Approx(-0.0380009911974).epsilon(1e-8));
    CHECK(y1m4.min_mse == y1.min_mse);  // the class minimum is member-independent

    const double beta1 = regression_beta(p1c);
    CHECK(beta1 == doctest::Approx(0.997977735876).epsilon(1e-9));
    const MemberShape m7 = member_shape("yp7", p1c.mean_x, dc1.cx, p1c.rho);
    const AnalyticResult yp7 =
        diff_cum_dual_analytics(dc1, p1c, member_tau(m7.c1, m7.c2, p1c.mean_x), m7.c3, beta1);
    CHECK(yp7.optimum_constants.at("d1") == doctest::Approx(15.0736618421).epsilon(1e-8));
    CHECK(yp7.optimum_constants.at("d2") == doctest::Approx(-14.0503085493).epsilon(1e-8));
    CHECK(yp7.min_mse == doctest::Approx(0.0206789642507).epsilon(1e-9));
    CHECK(yp7.bias == doctest::Approx(-0.00419692784664).epsilon(1e-7));
    CHECK(yp7.notes.empty());

    const PopulationParams p2 = population_preset("pop2");
    const DesignConstants dc2 = derive_constants(p2);
    CHECK(ratio_cum_dual_analytics(dc2, p2).optimum_constants.at("alpha") ==
          doctest::Approx(0.777251163771).epsilon(1e-9));
    CHECK(modified_difference_analytics(dc2, p2).min_mse ==
          doctest::Approx(0.0797480896558).epsilon(1e-9));
    const MemberShape m2 = member_shape("yp2", p2.mean_x, dc2.cx, p2.rho);
    const AnalyticResult yp2 = diff_cum_dual_analytics(
        dc2, p2, member_tau(m2.c1, m2.c2, p2.mean_x), m2.c3, regression_beta(p2));
    CHECK(yp2.optimum_constants.at("d1") == doctest::Approx(-28.652994073).epsilon(1e-8));
    CHECK(yp2.min_mse == doctest::Approx(0.0691005486515).epsilon(1e-9));
}

TEST_CASE("difference-cum-dual corner cases") {
    const PopulationParams p = population_preset("pop1");
    const DesignConstants dc = derive_constants(p);
    const double beta = regression_beta(p);

    SUBCASE("c3 = 0 makes the minimum independent of tau") {
        const AnalyticResult a = diff_cum_dual_analytics(dc, p, 0.11, 0, beta);
        const AnalyticResult b = diff_cum_dual_analytics(dc, p, 0.77, 0, beta);
        CHECK(a.min_mse == doctest::Approx(b.min_mse).epsilon(1e-13));
    }

    SUBCASE("singular normal equations") {
        PopulationParams q = p;
        q.rho = 0.0;
        const DesignConstants dcq = derive_constants(q);
        CHECK_THROWS_AS(diff_cum_dual_analytics(dcq, q, 0.0, 0, 0.0), SingularityError);
    }
}

TEST_CASE("percent relative efficiency") {
    CHECK(pre(0.19956, 0.19956) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(pre(0.19956, 0.16151) == doctest::Approx(123.56).epsilon(1e-4));
    CHECK(pre(0.217946, 0.182305) == doctest::Approx(119.55).epsilon(1e-4));
    CHECK_THROWS_AS(pre(0.1, 0.0), SingularityError);
    CHECK_THROWS_AS(pre(0.1, -0.5), SingularityError);
}

TEST_CASE("efficiency predicates match the direct MSE comparisons") {
    for (const char* preset : {"pop1", "pop1-corrected", "pop2"}) {
        CAPTURE(preset);
        const PopulationParams p = population_preset(preset);
        const DesignConstants dc = derive_constants(p);
        std::map<std::string, AnalyticResult> rows;
        for (const auto& r : analyze_all(dc, p)) rows[r.estimator] = r;
        const auto conds = efficiency_conditions(dc, p, rows);
        for (const auto& c : conds) {
            CAPTURE(c.index);
            const bool direct = rows.at(c.left).min_mse < rows.at(c.right).min_mse;
            CHECK(c.holds == direct);
            CHECK((c.lhs > 0.0) == direct);
            CHECK(!c.boundary);
        }
        // On these populations every comparison favors the tuned classes.
        for (const auto& c : conds) CHECK(c.holds);
    }
}

TEST_CASE("degenerate comparison is a flagged boundary, not a strict win") {
    PopulationParams p = population_preset("pop1");
    p.rho = 0.0;
    p.var_ey = 0.0;
    p.var_ex = 0.0;
    const DesignConstants dc = derive_constants(p);
    std::map<std::string, AnalyticResult> rows;
    for (const auto& row : analyze_table(dc, p))
        if (row.ok) rows[row.result.estimator] = row.result;
    REQUIRE(rows.count("yp7") == 1);
    const auto conds = efficiency_conditions(dc, p, rows);
    // min MSE of the generalized class collapses onto the plain variance.
    CHECK(conds[0].boundary);
    CHECK(!conds[0].holds);

    // Comparing an estimator with itself is never a strict improvement.
    std::map<std::string, AnalyticResult> self = rows;
    self["yp7"] = rows.at("ybar");
    self["yp7"].estimator = "yp7";
    const auto self_conds = efficiency_conditions(dc, p, self);
    CHECK(self_conds[4].boundary);
    CHECK(!self_conds[4].holds);
}

TEST_CASE("error variance on y moves every base MSE up") {
    PopulationParams p = population_preset("pop1");
    double prev_v = -1.0, prev_e1 = -1.0, prev_r0 = -1.0;
    for (double ve : {0.0, 4.0, 9.0, 25.0}) {
        p.var_ey = ve;
        const DesignConstants dc = derive_constants(p);
        CHECK(var_mean(dc, p) > prev_v);
        CHECK(mse_dual_ratio(dc, p, true) > prev_e1);
        CHECK(dc.r0 > prev_r0);
        prev_v = var_mean(dc, p);
        prev_e1 = mse_dual_ratio(dc, p, true);
        prev_r0 = dc.r0;
    }
}

TEST_CASE("analytic MSE at given constants matches the optimum path at the optimum") {
    const PopulationParams p = population_preset("pop2");
    const DesignConstants dc = derive_constants(p);
    const AnalyticResult e2 = ratio_cum_dual_analytics(dc, p);

    EstimatorSpec s;
    s.mu_x = p.mean_x;
    s.family = RatioCumDual{e2.optimum_constants.at("alpha")};
    CHECK(analytic_mse(s, dc, p) == doctest::Approx(e2.min_mse).epsilon(1e-12));

    s.family = RatioCumDual{e2.optimum_constants.at("alpha") + 0.25};
    CHECK(analytic_mse(s, dc, p) > e2.min_mse);
}
