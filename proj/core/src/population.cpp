#include "dualmean/population.hpp"

#include <cmath>
#include <string>

#include "dualmean/errors.hpp"

namespace dualmean {

void PopulationParams::validate() const {
    if (N < 2) throw ConfigError("N: population size must be at least 2");
    if (n < 2) throw ConfigError("n: sample size must be at least 2");
    if (n >= N) throw ConfigError("n: degenerate design, sample size must be smaller than N");
    if (!(mean_x != 0.0)) throw ConfigError("mean_x: must be nonzero");
    if (!std::isfinite(mean_x) || !std::isfinite(mean_y))
        throw ConfigError("mean_x/mean_y: must be finite");
    if (!(var_y >= 0.0)) throw ConfigError("var_y: must be nonnegative");
    if (!(var_x >= 0.0)) throw ConfigError("var_x: must be nonnegative");
    if (!(var_ey >= 0.0)) throw ConfigError("var_ey: must be nonnegative");
    if (!(var_ex >= 0.0)) throw ConfigError("var_ex: must be nonnegative");
    if (!(std::fabs(rho) <= 1.0)) throw ConfigError("rho: must lie in [-1, 1]");
}

DesignConstants derive_constants(const PopulationParams& p) {
    p.validate();
    if (p.mean_y == 0.0)
        throw ConfigError("mean_y: must be nonzero (cy and lambda are undefined)");

    DesignConstants dc;
    const double nd = static_cast<double>(p.n);
    const double Nd = static_cast<double>(p.N);
    dc.gamma = 1.0 / nd - 1.0 / Nd;
    dc.n1 = nd / (Nd - nd);
    dc.R = p.mean_y / p.mean_x;
    dc.cy = std::sqrt(p.var_y) / p.mean_y;
    dc.cx = std::sqrt(p.var_x) / p.mean_x;
    dc.r0 = dc.gamma * (p.var_y + p.var_ey);
    dc.r1 = dc.gamma * (p.var_x + p.var_ex);
    dc.r01 = dc.gamma * p.rho * std::sqrt(p.var_y * p.var_x);
    const double cyx = p.rho * dc.cy * dc.cx;
    dc.lambda = (1.0 + dc.gamma * cyx) / (1.0 + dc.gamma * dc.cx * dc.cx);
    return dc;
}

}  // namespace dualmean
