#include "dualmean/estimators.hpp"

#include <cmath>
#include <numeric>

#include "dualmean/errors.hpp"

namespace dualmean {

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

constexpr double kDenTol = 1e-12;

double checked_div(double num, double den, const char* what) {
    if (std::fabs(den) <= kDenTol * std::max(1.0, std::fabs(num)))
        throw SingularityError(std::string("division by zero in ") + what);
    return num / den;
}

}  // namespace

void ObservedSample::validate() const {
    if (xs.size() != ys.size()) throw ConfigError("sample: xs and ys must have equal length");
    if (xs.size() < 2) throw ConfigError("sample: needs at least 2 observations");
    if (n() >= N) throw ConfigError("sample: degenerate design, n must be smaller than N");
}

Means sample_means(const ObservedSample& s) {
    if (s.xs.empty() || s.ys.empty()) throw ConfigError("sample: empty");
    return {mean_of(s.xs), mean_of(s.ys)};
}

double dual_transform(double xbar, double mu_x, std::int64_t N, std::int64_t n) {
    if (n >= N) throw ConfigError("dual_transform: degenerate design, n must be smaller than N");
    const double n1 = static_cast<double>(n) / static_cast<double>(N - n);
    return mu_x - n1 * (xbar - mu_x);
}

void EstimatorSpec::validate() const {
    if (!(mu_x != 0.0)) throw ConfigError("estimator: mu_x must be nonzero");
    if (const auto* d = std::get_if<DiffCumDual>(&family)) {
        if (d->c3 != -1 && d->c3 != 0 && d->c3 != 1)
            throw ConfigError("estimator: c3 must be one of {-1, 0, +1}");
        if (d->c1 * mu_x + d->c2 == 0.0)
            throw ConfigError("estimator: c1*mu_x + c2 must be nonzero");
    }
    if (const auto* w = std::get_if<WiderMember>(&family)) {
        if (w->k < 1 || w->k > 4) throw ConfigError("estimator: member index must be 1..4");
    }
}

Estimate estimate(const EstimatorSpec& spec, const ObservedSample& s) {
    spec.validate();
    s.validate();
    const Means m = sample_means(s);
    const double xss = dual_transform(m.xbar, spec.mu_x, s.N, s.n());
    const double n1 = static_cast<double>(s.n()) / static_cast<double>(s.N - s.n());

    Estimate out;
    out.value = std::visit(
        [&](const auto& fam) -> double {
            using F = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<F, MeanPerUnit>) {
                return m.ybar;
            } else if constexpr (std::is_same_v<F, DualRatio>) {
                return m.ybar * xss / spec.mu_x;
            } else if constexpr (std::is_same_v<F, RatioCumDual>) {
                const double direct = checked_div(spec.mu_x, m.xbar, "ratio component (xbar)");
                return m.ybar * (fam.alpha * direct + (1.0 - fam.alpha) * xss / spec.mu_x);
            } else if constexpr (std::is_same_v<F, WiderMember>) {
                const double u = xss / spec.mu_x;
                switch (fam.k) {
                    case 1: return m.ybar * (fam.eps + (1.0 - fam.eps) * u);
                    case 2:
                        if (u <= 0.0)
                            throw SingularityError("member 2: nonpositive u** under a real power");
                        return m.ybar * (2.0 - std::pow(u, -fam.eps));
                    case 3: return m.ybar * (1.0 + fam.eps * (u - 1.0));
                    default: {
                        const double inv = checked_div(1.0, u, "member 4 (u**)");
                        return m.ybar * (inv + fam.eps * (1.0 - inv));
                    }
                }
            } else if constexpr (std::is_same_v<F, ModifiedDifference>) {
                const double tb = m.ybar * xss * spec.lambda;
                return (1.0 - fam.j) * m.ybar + fam.j * tb / spec.mu_x;
            } else {
                const double den = fam.c1 * spec.mu_x + fam.c2;
                const double ratio = checked_div(fam.c1 * xss + fam.c2, den, "member ratio");
                const double tau = fam.c1 / den;
                if (fam.c3 != 0 && std::fabs(tau * n1 * (m.xbar - spec.mu_x)) >= 1.0)
                    out.expansion_flagged = true;
                double power = 1.0;
                if (fam.c3 == 1) power = ratio;
                else if (fam.c3 == -1) power = checked_div(1.0, ratio, "member ratio inverse");
                const double reg = m.ybar + spec.beta * (spec.mu_x - xss);
                return fam.d1 * reg + fam.d2 * m.ybar * power;
            }
        },
        spec.family);

    if (!std::isfinite(out.value)) throw SingularityError("estimate: non-finite result");
    return out;
}

double member_tau(double c1, double c2, double mu_x) {
    const double den = c1 * mu_x + c2;
    if (std::fabs(den) <= kDenTol * std::max(1.0, std::fabs(mu_x)))
        throw SingularityError("tau: denominator c1*mu_x + c2 vanishes");
    return c1 / den;
}

std::array<double, 8> tau_values(double mu_x, double cx, double rho) {
    struct Entry {
        double num;
        double den;
    };
    const Entry entries[8] = {
        {rho, rho * mu_x - cx},        // 1
        {1.0, mu_x - cx * cx},         // 2
        {rho, rho * mu_x + cx},        // 3
        {rho, rho * mu_x - cx},        // 4
        {cx, mu_x * (cx - 1.0)},       // 5
        {cx, mu_x * (cx + 1.0)},       // 6
        {1.0, mu_x + cx},              // 7
        {1.0, mu_x - cx},              // 8
    };
    std::array<double, 8> out{};
    for (int i = 0; i < 8; ++i) {
        if (std::fabs(entries[i].den) <= kDenTol * std::max(1.0, std::fabs(mu_x)))
            throw SingularityError("tau_" + std::to_string(i + 1) + ": denominator vanishes");
        out[static_cast<std::size_t>(i)] = entries[i].num / entries[i].den;
    }
    return out;
}

bool is_member_name(const std::string& name) {
    return name.size() == 3 && name[0] == 'y' && name[1] == 'p' && name[2] >= '1' && name[2] <= '7';
}

MemberShape member_shape(const std::string& name, double mu_x, double cx, double rho) {
    if (!is_member_name(name)) throw ConfigError("unknown member name: " + name);
    switch (name[2]) {
        case '1': return {-rho, cx, 1};
        case '2': return {rho, cx, -1};
        case '3': return {-rho, cx, -1};
        case '4': return {-cx, mu_x, -1};
        case '5': return {cx, mu_x, -1};
        case '6': return {1.0, cx, -1};
        default:  return {1.0, -cx, -1};
    }
}

double member_constant_from_g1(int k, double g1, double mean_y) {
    if (mean_y == 0.0) throw ConfigError("member constant: mean_y must be nonzero");
    switch (k) {
        case 1: return 1.0 - g1 / mean_y;
        case 2: return g1 / mean_y;
        case 3: return g1 / mean_y;
        case 4: return 1.0 + g1 / mean_y;
        default: throw ConfigError("member constant: member index must be 1..4");
    }
}

}  // namespace dualmean
