#include "dualmean/presets.hpp"

#include "dualmean/errors.hpp"

namespace dualmean {

namespace {

PopulationParams make_pop1(double var_ex) {
    PopulationParams p;
    p.N = 5000;
    p.n = 500;
    p.mean_y = 4.927167;
    p.mean_x = 4.924306;
    p.var_y = 102.0075;
    p.var_x = 101.4117;
    p.var_ey = 8.862114;
    p.var_ex = var_ex;
    p.rho = 0.995059;
    return p;
}

PopulationParams make_pop2() {
    PopulationParams p;
    p.N = 5000;
    p.n = 500;
    p.mean_y = 4.996681;
    p.mean_x = 5.013507;
    p.var_y = 97.12064;
    p.var_x = 95.95803;
    p.var_ey = 23.96055;
    p.var_ex = 24.19283;
    p.rho = 0.994822;
    return p;
}

}  // namespace

PopulationParams population_preset(const std::string& name) {
    if (name == "pop1") return make_pop1(24.19283);
    if (name == "pop1-corrected" || name == "pop1_corrected") return make_pop1(9.0);
    if (name == "pop2") return make_pop2();
    throw ConfigError("unknown preset: " + name + " (expected pop1, pop1-corrected or pop2)");
}

std::vector<std::string> population_preset_names() {
    return {"pop1", "pop1-corrected", "pop2"};
}

SyntheticPopulationSpec generator_preset(const std::string& name, std::uint64_t seed) {
    SyntheticPopulationSpec s;
    s.N = 5000;
    s.x_mean = 5.0;
    s.x_sd = 10.0;
    s.y_noise_sd = 1.0;
    s.err_y_mean = 1.0;
    s.err_x_mean = 1.0;
    s.seed = seed;
    if (name == "pop1" || name == "pop1-corrected" || name == "pop1_corrected") {
        s.err_y_sd = 3.0;
        s.err_x_sd = 3.0;
        return s;
    }
    if (name == "pop2") {
        s.err_y_sd = 5.0;
        s.err_x_sd = 5.0;
        return s;
    }
    throw ConfigError("unknown generator preset: " + name);
}

std::vector<ReferenceRow> reference_table(const std::string& population) {
    if (population == "pop1" || population == "pop1-corrected" || population == "pop1_corrected") {
        return {
            {"ybar", 100.0, 0.19956},   {"e1", 123.56, 0.16151},
            {"e2", 612.48, 0.03258},    {"y1", 612.48, 0.03258},
            {"y2", 611.66, 0.03263},    {"yp1", 618.29, 0.032276},
            {"yp2", 940.53, 0.021218},  {"yp3", 959.49, 0.020799},
            {"yp4", 834.3038, 0.02392}, {"yp5", 822.301, 0.024269},
            {"yp6", 945.54, 0.021106},  {"yp7", 964.96, 0.020681},
        };
    }
    if (population == "pop2") {
        return {
            {"ybar", 100.0, 0.217946},    {"e1", 119.55, 0.182305},
            {"e2", 273.214, 0.079771},    {"y1", 273.214, 0.079771},
            {"y2", 273.2932, 0.079748},   {"yp1", 273.2585, 0.079758},
            {"yp2", 315.404, 0.069101},   {"yp3", 302.231, 0.072112},
            {"yp4", 288.736, 0.075483},   {"yp5", 298.442, 0.073028},
            {"yp6", 315.8539, 0.069},     {"yp7", 302.6126, 0.072021},
        };
    }
    throw ConfigError("no reference table for: " + population);
}

}  // namespace dualmean
