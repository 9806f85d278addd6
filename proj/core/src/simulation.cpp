#include "dualmean/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "dualmean/analytics.hpp"
#include "dualmean/errors.hpp"

namespace dualmean {

void SyntheticPopulationSpec::validate() const {
    if (N < 2) throw ConfigError("N: population size must be at least 2");
    if (!(x_sd >= 0.0)) throw ConfigError("x_sd: must be nonnegative");
    if (!(y_noise_sd >= 0.0)) throw ConfigError("y_noise_sd: must be nonnegative");
    if (!(err_y_sd >= 0.0)) throw ConfigError("err_y_sd: must be nonnegative");
    if (!(err_x_sd >= 0.0)) throw ConfigError("err_x_sd: must be nonnegative");
}

double GeneratedPopulation::mean_true_y() const {
    return std::accumulate(true_y.begin(), true_y.end(), 0.0) /
           static_cast<double>(true_y.size());
}

namespace {

struct Moments {
    double mean_x, mean_y, var_x, var_y, rho;
};

Moments finite_population_moments(const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    const double var_x = sxx / (n - 1.0);
    const double var_y = syy / (n - 1.0);
    if (!(var_x > 0.0) || !(var_y > 0.0))
        throw ConfigError("population: degenerate (zero variance), correlation undefined");
    const double rho = sxy / std::sqrt(sxx * syy);
    return {mx, my, var_x, var_y, rho};
}

}  // namespace

PopulationParams GeneratedPopulation::realized_params(std::int64_t n) const {
    const Moments m = finite_population_moments(true_x, true_y);
    PopulationParams p;
    p.N = size();
    p.n = n;
    p.mean_x = m.mean_x;
    p.mean_y = m.mean_y;
    p.var_x = m.var_x;
    p.var_y = m.var_y;
    p.var_ex = spec.err_x_sd * spec.err_x_sd;
    p.var_ey = spec.err_y_sd * spec.err_y_sd;
    p.rho = m.rho;
    p.validate();
    return p;
}

GeneratedPopulation generate_population(const SyntheticPopulationSpec& spec) {
    spec.validate();
    GeneratedPopulation pop;
    pop.spec = spec;
    pop.true_x.resize(static_cast<std::size_t>(spec.N));
    pop.true_y.resize(static_cast<std::size_t>(spec.N));
    StreamRng rng(stream_seed(spec.seed, 0));
    for (std::size_t i = 0; i < pop.true_x.size(); ++i)
        pop.true_x[i] = rng.next_normal(spec.x_mean, spec.x_sd);
    for (std::size_t i = 0; i < pop.true_y.size(); ++i)
        pop.true_y[i] = pop.true_x[i] + rng.next_normal(0.0, spec.y_noise_sd);
    // Surfaces the degenerate case (zero variance) right away.
    finite_population_moments(pop.true_x, pop.true_y);
    return pop;
}

std::vector<std::int64_t> draw_srswor(std::int64_t N, std::int64_t n, StreamRng& rng) {
    if (n > N) throw ConfigError("srswor: sample size exceeds population size");
    if (n < 0) throw ConfigError("srswor: sample size must be nonnegative");
    std::vector<std::int64_t> pool(static_cast<std::size_t>(N));
    std::iota(pool.begin(), pool.end(), std::int64_t{0});
    for (std::int64_t i = 0; i < n; ++i) {
        const std::uint64_t j =
            static_cast<std::uint64_t>(i) + rng.next_below(static_cast<std::uint64_t>(N - i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(n));
    return pool;
}

ObservedSample observe_with_error(const GeneratedPopulation& pop,
                                  const std::vector<std::int64_t>& indices,
                                  const SyntheticPopulationSpec& spec,
                                  bool zero_error_means, StreamRng& rng) {
    const double my = zero_error_means ? 0.0 : spec.err_y_mean;
    const double mx = zero_error_means ? 0.0 : spec.err_x_mean;
    ObservedSample s;
    s.N = pop.size();
    s.ys.reserve(indices.size());
    s.xs.reserve(indices.size());
    for (std::int64_t idx : indices) {
        if (idx < 0 || idx >= pop.size()) throw ConfigError("observe: index out of range");
        s.ys.push_back(pop.true_y[static_cast<std::size_t>(idx)] +
                       rng.next_normal(my, spec.err_y_sd));
    }
    for (std::int64_t idx : indices)
        s.xs.push_back(pop.true_x[static_cast<std::size_t>(idx)] +
                       rng.next_normal(mx, spec.err_x_sd));
    return s;
}

void MonteCarloConfig::validate(std::int64_t population_size) const {
    if (replications < 1) throw ConfigError("replications: must be at least 1");
    if (n < 2) throw ConfigError("n: sample size must be at least 2");
    if (n >= population_size)
        throw ConfigError("n: degenerate design, sample size must be smaller than N");
    if (estimators.empty()) throw ConfigError("estimators: list must not be empty");
    if (threads < 0) throw ConfigError("threads: must be nonnegative");
}

namespace {

// Status of one (replication, estimator) cell.
enum : std::uint8_t { kOk = 0, kSingular = 1, kWarned = 2 };

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

}  // namespace

MonteCarloResult run_monte_carlo(const GeneratedPopulation& pop, const MonteCarloConfig& cfg) {
    cfg.validate(pop.size());
    const auto reps = static_cast<std::size_t>(cfg.replications);
    const std::size_t n_est = cfg.estimators.size();
    const double true_mean = pop.mean_true_y();

    std::vector<double> values(reps * n_est, 0.0);
    std::vector<std::uint8_t> status(reps * n_est, kOk);

    auto worker = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t rep = lo; rep < hi; ++rep) {
            StreamRng rng(stream_seed(cfg.master_seed, static_cast<std::uint64_t>(rep)));
            const auto idx = draw_srswor(pop.size(), cfg.n, rng);
            const ObservedSample sample =
                observe_with_error(pop, idx, pop.spec, cfg.error_means_zeroed, rng);
            for (std::size_t e = 0; e < n_est; ++e) {
                const std::size_t slot = rep * n_est + e;
                try {
                    const Estimate est = estimate(cfg.estimators[e], sample);
                    values[slot] = est.value;
                    status[slot] = est.expansion_flagged ? kWarned : kOk;
                } catch (const SingularityError&) {
                    status[slot] = kSingular;
                }
            }
        }
    };

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const auto n_threads =
        std::min<std::size_t>(cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads) : hw, reps);
    if (n_threads <= 1) {
        worker(0, reps);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        const std::size_t chunk = (reps + n_threads - 1) / n_threads;
        for (std::size_t t = 0; t < n_threads; ++t) {
            const std::size_t lo = t * chunk;
            const std::size_t hi = std::min(reps, lo + chunk);
            if (lo < hi) pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    // Sequential reduction in replication order keeps the result independent
    // of the thread count.
    MonteCarloResult out;
    out.replications = cfg.replications;
    out.n = cfg.n;
    out.master_seed = cfg.master_seed;
    out.error_means_zeroed = cfg.error_means_zeroed;
    out.true_mean = true_mean;
    out.estimators.resize(n_est);

    std::int64_t flagged_reps = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        bool any = false;
        for (std::size_t e = 0; e < n_est; ++e) any |= status[rep * n_est + e] == kSingular;
        flagged_reps += any ? 1 : 0;
    }
    out.flagged_replications = flagged_reps;

    for (std::size_t e = 0; e < n_est; ++e) {
        EstimatorMoments& m = out.estimators[e];
        m.estimator = cfg.estimators[e].label;
        KahanSum dev, sq, sq2;
        std::int64_t valid = 0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const std::size_t slot = rep * n_est + e;
            if (status[slot] == kSingular) {
                ++m.flagged_failures;
                continue;
            }
            if (status[slot] == kWarned) ++m.expansion_warnings;
            const double d = values[slot] - true_mean;
            const double q = d * d;
            dev.add(d);
            sq.add(q);
            sq2.add(q * q);
            ++valid;
        }
        if (valid == 0) continue;
        const double k = static_cast<double>(valid);
        m.empirical_bias = dev.sum / k;
        m.empirical_mse = sq.sum / k;
        if (valid >= 2) {
            const double var_q =
                std::max(0.0, (sq2.sum - k * m.empirical_mse * m.empirical_mse) / (k - 1.0));
            m.monte_carlo_se = std::sqrt(var_q / k);
        }
    }

    const double rate =
        static_cast<double>(flagged_reps) / static_cast<double>(cfg.replications);
    if (rate > 0.001)
        throw McFailureError("monte carlo: " + std::to_string(flagged_reps) + " of " +
                             std::to_string(cfg.replications) +
                             " replications hit estimator singularities (rate above 0.1%)");
    return out;
}

std::vector<EstimatorSpec> default_estimators(const PopulationParams& params) {
    const DesignConstants dc = derive_constants(params);
    std::vector<EstimatorSpec> list;
    auto base = [&](EstimatorFamily fam, std::string label) {
        EstimatorSpec s;
        s.family = std::move(fam);
        s.mu_x = params.mean_x;
        s.lambda = dc.lambda;
        s.beta = regression_beta(params);
        s.label = std::move(label);
        return s;
    };

    list.push_back(base(MeanPerUnit{}, "ybar"));
    list.push_back(base(DualRatio{}, "e1"));

    const AnalyticResult e2 = ratio_cum_dual_analytics(dc, params);
    list.push_back(base(RatioCumDual{e2.optimum_constants.at("alpha")}, "e2"));

    const AnalyticResult y1 = wider_class_analytics(dc, params, 3);
    list.push_back(base(WiderMember{3, y1.optimum_constants.at("eps")}, "y1"));

    const AnalyticResult y2 = modified_difference_analytics(dc, params);
    list.push_back(base(ModifiedDifference{y2.optimum_constants.at("J")}, "y2"));

    const double beta = regression_beta(params);
    for (int i = 1; i <= 7; ++i) {
        const std::string name = "yp" + std::to_string(i);
        const MemberShape ms = member_shape(name, params.mean_x, dc.cx, params.rho);
        const double tau = member_tau(ms.c1, ms.c2, params.mean_x);
        const AnalyticResult r = diff_cum_dual_analytics(dc, params, tau, ms.c3, beta);
        list.push_back(base(DiffCumDual{r.optimum_constants.at("d1"),
                                        r.optimum_constants.at("d2"), ms.c1, ms.c2, ms.c3},
                            name));
    }
    return list;
}

}  // namespace dualmean
