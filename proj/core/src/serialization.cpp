#include "dualmean/serialization.hpp"

#include <fstream>
#include <sstream>

#include "dualmean/errors.hpp"

namespace dualmean {

namespace {

template <typename T>
T require(const json& j, const char* key, const char* context) {
    if (!j.contains(key))
        throw ConfigError(std::string(context) + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string(context) + ": field '" + key + "' has the wrong type");
    }
}

template <typename T>
T optional_field(const json& j, const char* key, T fallback, const char* context) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string(context) + ": field '" + key + "' has the wrong type");
    }
}

}  // namespace

void to_json(json& j, const PopulationParams& p) {
    j = json{{"N", p.N},         {"n", p.n},           {"mean_y", p.mean_y},
             {"mean_x", p.mean_x}, {"var_y", p.var_y},   {"var_x", p.var_x},
             {"var_ey", p.var_ey}, {"var_ex", p.var_ex}, {"rho", p.rho}};
}

void from_json(const json& j, PopulationParams& p) {
    const char* ctx = "population params";
    p.N = require<std::int64_t>(j, "N", ctx);
    p.n = require<std::int64_t>(j, "n", ctx);
    p.mean_y = require<double>(j, "mean_y", ctx);
    p.mean_x = require<double>(j, "mean_x", ctx);
    p.var_y = require<double>(j, "var_y", ctx);
    p.var_x = require<double>(j, "var_x", ctx);
    p.var_ey = require<double>(j, "var_ey", ctx);
    p.var_ex = require<double>(j, "var_ex", ctx);
    p.rho = require<double>(j, "rho", ctx);
    p.validate();
}

void to_json(json& j, const DesignConstants& dc) {
    j = json{{"gamma", dc.gamma}, {"n1", dc.n1},   {"R", dc.R},
             {"cy", dc.cy},       {"cx", dc.cx},   {"r0", dc.r0},
             {"r1", dc.r1},       {"r01", dc.r01}, {"lambda", dc.lambda}};
}

void to_json(json& j, const EstimatorSpec& s) {
    j = json::object();
    std::visit(
        [&](const auto& fam) {
            using F = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<F, MeanPerUnit>) {
                j["family"] = "mean_per_unit";
            } else if constexpr (std::is_same_v<F, DualRatio>) {
                j["family"] = "dual_ratio";
            } else if constexpr (std::is_same_v<F, RatioCumDual>) {
                j["family"] = "ratio_cum_dual";
                j["alpha"] = fam.alpha;
            } else if constexpr (std::is_same_v<F, WiderMember>) {
                j["family"] = "wider_member";
                j["k"] = fam.k;
                j["eps"] = fam.eps;
            } else if constexpr (std::is_same_v<F, ModifiedDifference>) {
                j["family"] = "modified_difference";
                j["j"] = fam.j;
            } else {
                j["family"] = "diff_cum_dual";
                j["d1"] = fam.d1;
                j["d2"] = fam.d2;
                j["c1"] = fam.c1;
                j["c2"] = fam.c2;
                j["c3"] = fam.c3;
            }
        },
        s.family);
    j["mu_x"] = s.mu_x;
    j["beta"] = s.beta;
    j["lambda"] = s.lambda;
    if (!s.label.empty()) j["label"] = s.label;
}

void from_json(const json& j, EstimatorSpec& s) {
    const char* ctx = "estimator spec";
    const auto family = require<std::string>(j, "family", ctx);
    s.mu_x = require<double>(j, "mu_x", ctx);
    s.beta = optional_field<double>(j, "beta", 0.0, ctx);
    s.lambda = optional_field<double>(j, "lambda", 1.0, ctx);
    s.label = optional_field<std::string>(j, "label", family, ctx);

    if (family == "mean_per_unit") {
        s.family = MeanPerUnit{};
    } else if (family == "dual_ratio") {
        s.family = DualRatio{};
    } else if (family == "ratio_cum_dual") {
        s.family = RatioCumDual{require<double>(j, "alpha", ctx)};
    } else if (family == "wider_member") {
        s.family = WiderMember{require<int>(j, "k", ctx), require<double>(j, "eps", ctx)};
    } else if (family == "modified_difference") {
        s.family = ModifiedDifference{require<double>(j, "j", ctx)};
    } else if (family == "diff_cum_dual") {
        s.family = DiffCumDual{require<double>(j, "d1", ctx), require<double>(j, "d2", ctx),
                               require<double>(j, "c1", ctx), require<double>(j, "c2", ctx),
                               require<int>(j, "c3", ctx)};
    } else if (is_member_name(family)) {
        // Named members expand to their (c1, c2, c3) shape; the shape needs
        // cx and rho alongside the shared knowns.
        const double cx = require<double>(j, "cx", ctx);
        const double rho = require<double>(j, "rho", ctx);
        const MemberShape ms = member_shape(family, s.mu_x, cx, rho);
        s.family = DiffCumDual{require<double>(j, "d1", ctx), require<double>(j, "d2", ctx),
                               ms.c1, ms.c2, ms.c3};
    } else {
        throw ConfigError(std::string(ctx) + ": unknown family '" + family + "'");
    }
    s.validate();
}

void to_json(json& j, const SyntheticPopulationSpec& s) {
    j = json{{"N", s.N},
             {"x_mean", s.x_mean},
             {"x_sd", s.x_sd},
             {"y_noise_sd", s.y_noise_sd},
             {"err_y_mean", s.err_y_mean},
             {"err_y_sd", s.err_y_sd},
             {"err_x_mean", s.err_x_mean},
             {"err_x_sd", s.err_x_sd},
             {"seed", s.seed}};
}

void from_json(const json& j, SyntheticPopulationSpec& s) {
    const char* ctx = "population spec";
    s.N = require<std::int64_t>(j, "N", ctx);
    s.x_mean = require<double>(j, "x_mean", ctx);
    s.x_sd = require<double>(j, "x_sd", ctx);
    s.y_noise_sd = require<double>(j, "y_noise_sd", ctx);
    s.err_y_mean = require<double>(j, "err_y_mean", ctx);
    s.err_y_sd = require<double>(j, "err_y_sd", ctx);
    s.err_x_mean = require<double>(j, "err_x_mean", ctx);
    s.err_x_sd = require<double>(j, "err_x_sd", ctx);
    s.seed = require<std::uint64_t>(j, "seed", ctx);
    s.validate();
}

void to_json(json& j, const MonteCarloConfig& c) {
    // threads is an execution knob, not a statistical input: results do not
    // depend on it, so the echo omits it.
    j = json{{"replications", c.replications},
             {"n", c.n},
             {"estimators", c.estimators},
             {"master_seed", c.master_seed},
             {"error_means_zeroed", c.error_means_zeroed}};
}

void from_json(const json& j, MonteCarloConfig& c) {
    const char* ctx = "monte carlo config";
    c.replications = require<std::int64_t>(j, "replications", ctx);
    c.n = require<std::int64_t>(j, "n", ctx);
    c.master_seed = require<std::uint64_t>(j, "master_seed", ctx);
    c.error_means_zeroed = optional_field<bool>(j, "error_means_zeroed", true, ctx);
    c.threads = optional_field<int>(j, "threads", 0, ctx);
    c.estimators.clear();
    if (j.contains("estimators")) {
        if (!j.at("estimators").is_array())
            throw ConfigError(std::string(ctx) + ": field 'estimators' must be an array");
        for (const auto& e : j.at("estimators")) c.estimators.push_back(e.get<EstimatorSpec>());
    }
}

void to_json(json& j, const EstimatorMoments& m) {
    j = json{{"estimator", m.estimator},
             {"empirical_bias", m.empirical_bias},
             {"empirical_mse", m.empirical_mse},
             {"monte_carlo_se", m.monte_carlo_se},
             {"flagged_failures", m.flagged_failures},
             {"expansion_warnings", m.expansion_warnings}};
}

void to_json(json& j, const MonteCarloResult& r) {
    j = json{{"estimators", r.estimators},
             {"replications", r.replications},
             {"n", r.n},
             {"master_seed", r.master_seed},
             {"error_means_zeroed", r.error_means_zeroed},
             {"true_mean", r.true_mean},
             {"flagged_replications", r.flagged_replications}};
}

void to_json(json& j, const CoefficientSet& cs) {
    static const char* names[] = {"A", "B", "C", "D"};
    j = json{{"kind", names[static_cast<int>(cs.kind)]},
             {"values", cs.values},
             {"context",
              json{{"lambda", cs.context.lambda},
                   {"tau", cs.context.tau},
                   {"c3", cs.context.c3},
                   {"beta", cs.context.beta}}}};
}

void to_json(json& j, const AnalyticResult& r) {
    j = json{{"estimator", r.estimator},
             {"bias", r.bias},
             {"mse", r.mse},
             {"min_mse", r.min_mse},
             {"optimum_constants", r.optimum_constants}};
    if (r.coefficients) j["coefficients"] = *r.coefficients;
    if (!r.notes.empty()) j["notes"] = r.notes;
}

void to_json(json& j, const ConditionReport& c) {
    j = json{{"index", c.index},   {"left", c.left},
             {"right", c.right},   {"lhs", c.lhs},
             {"holds", c.holds},   {"boundary", c.boundary},
             {"mse_left", c.mse_left}, {"mse_right", c.mse_right}};
}

json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(source + ": invalid JSON (" + e.what() + ")");
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_json(buf.str(), path);
}

}  // namespace dualmean
