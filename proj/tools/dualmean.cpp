#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dualmean/analytics.hpp"
#include "dualmean/errors.hpp"
#include "dualmean/io.hpp"
#include "dualmean/presets.hpp"
#include "dualmean/serialization.hpp"
#include "dualmean/simulation.hpp"
#include "dualmean/version.hpp"

namespace dm = dualmean;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kDefaultSeed = 20250810;

struct CommonOpts {
    std::string out_dir;
    std::string format = "both";
    std::uint64_t seed = kDefaultSeed;
    std::string preset;
    std::string params_path;
    std::int64_t n_override = 0;
};

std::string default_out_dir() {
    if (const char* env = std::getenv("DUALMEAN_OUT")) return env;
    return "out";
}

bool want_csv(const CommonOpts& o) { return o.format == "csv" || o.format == "both"; }
bool want_json(const CommonOpts& o) { return o.format == "json" || o.format == "both"; }

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

dm::PopulationParams load_params(const CommonOpts& o, std::vector<std::string>& inputs) {
    dm::PopulationParams p;
    if (!o.params_path.empty()) {
        p = dm::load_json_file(o.params_path).get<dm::PopulationParams>();
        inputs.push_back(o.params_path);
    } else {
        const std::string name = o.preset.empty() ? "pop1" : o.preset;
        p = dm::population_preset(name);
        inputs.push_back("preset:" + name);
    }
    if (o.n_override > 0) p.n = o.n_override;
    p.validate();
    return p;
}

std::string constants_cell(const std::map<std::string, double>& constants) {
    std::string out;
    for (const auto& [k, v] : constants) {
        if (!out.empty()) out += ';';
        out += k + "=" + dm::format_table(v);
    }
    return out;
}

std::string join_path(const std::string& dir, const std::string& file) {
    return (fs::path(dir) / file).string();
}

void emit(const CommonOpts& o, dm::RunManifest& manifest, const std::string& file,
          const std::string& content) {
    dm::write_text_file(join_path(o.out_dir, file), content);
    manifest.outputs.push_back(file);
}

// Result files reference the manifest that produced them; for CSV that is a
// leading comment line.
void emit_csv(const CommonOpts& o, dm::RunManifest& manifest, const std::string& file,
              const std::string& content) {
    emit(o, manifest, file,
         "# manifest: " + dm::manifest_filename(manifest.command) + "\n" + content);
}

// Condition summary attached to the analyze rows that the predicates order.
std::map<std::string, std::string> condition_cells(
    const std::array<dm::ConditionReport, 7>& conds) {
    std::map<std::string, std::string> cells;
    for (const auto& c : conds) {
        std::string& cell = cells[c.left];
        if (!cell.empty()) cell += ';';
        cell += std::to_string(c.index) + ":";
        cell += c.boundary ? "boundary" : (c.holds ? "yes" : "no");
    }
    return cells;
}

int cmd_analyze(const CommonOpts& o) {
    Timer timer;
    dm::RunManifest manifest;
    manifest.command = "analyze";
    manifest.seed = o.seed;
    manifest.artifact_version = dm::kVersion;

    const dm::PopulationParams p = load_params(o, manifest.inputs);
    const dm::DesignConstants dc = dm::derive_constants(p);
    const auto rows = dm::analyze_table(dc, p);

    std::map<std::string, dm::AnalyticResult> ok_rows;
    for (const auto& row : rows)
        if (row.ok) ok_rows[row.result.estimator] = row.result;

    std::optional<std::array<dm::ConditionReport, 7>> conds;
    if (ok_rows.count("yp7") && ok_rows.count("e2"))
        conds = dm::efficiency_conditions(dc, p, ok_rows);
    const auto cond_cells = conds ? condition_cells(*conds)
                                  : std::map<std::string, std::string>{};

    const double v_base = dm::var_mean(dc, p);
    std::string csv = "estimator,mse,pre,constants,conditions,status\n";
    dm::json jrows = dm::json::array();
    std::printf("%-6s %12s %10s  %s\n", "est", "mse", "pre", "constants");
    for (const auto& row : rows) {
        const std::string& name = row.result.estimator;
        if (!row.ok) {
            csv += name + ",,,,," + "singular\n";
            jrows.push_back({{"estimator", name}, {"status", "singular"}, {"error", row.error}});
            std::printf("%-6s %12s %10s  %s\n", name.c_str(), "-", "-", row.error.c_str());
            continue;
        }
        const double pre_v = dm::pre(v_base, row.result.min_mse);
        const auto cond_it = cond_cells.find(name);
        const std::string cond = cond_it == cond_cells.end() ? "" : cond_it->second;
        csv += name + ',' + dm::format_table(row.result.min_mse) + ',' +
               dm::format_table(pre_v) + ',' + constants_cell(row.result.optimum_constants) +
               ',' + cond + ",ok\n";
        dm::json jr = row.result;
        jr["pre"] = pre_v;
        jr["status"] = "ok";
        jrows.push_back(std::move(jr));
        std::printf("%-6s %12s %10s  %s\n", name.c_str(),
                    dm::format_table(row.result.min_mse).c_str(),
                    dm::format_table(pre_v).c_str(),
                    constants_cell(row.result.optimum_constants).c_str());
    }

    if (want_csv(o)) emit_csv(o, manifest, "analyze.csv", csv);
    if (want_json(o)) {
        dm::json j{{"population", p},
                   {"design_constants", dc},
                   {"rows", jrows},
                   {"manifest", dm::manifest_filename("analyze")}};
        if (conds) j["conditions"] = *conds;
        emit(o, manifest, "analyze.json", j.dump(2) + "\n");
    }
    manifest.wall_clock_ms = timer.ms();
    dm::write_manifest(o.out_dir, manifest);
    return 0;
}

int cmd_table1(const CommonOpts& o) {
    Timer timer;
    dm::RunManifest manifest;
    manifest.command = "table1";
    manifest.seed = o.seed;
    manifest.artifact_version = dm::kVersion;
    manifest.inputs = {"preset:pop1", "preset:pop2", "preset:pop1-corrected"};

    std::string csv =
        "population,estimator,mse_computed,mse_reference,mse_rel_diff,"
        "pre_computed,pre_reference,pre_rel_diff,flagged\n";
    dm::json jrows = dm::json::array();
    int flagged_cells = 0;

    // pop1 and pop2 are the published parameter sets; pop1-corrected is
    // appended to show which discrepancies the corrected var_ex resolves.
    for (const std::string pop : {"pop1", "pop2", "pop1-corrected"}) {
        const dm::PopulationParams p = dm::population_preset(pop);
        const dm::DesignConstants dc = dm::derive_constants(p);
        const auto rows = dm::analyze_table(dc, p);
        const double v_base = dm::var_mean(dc, p);
        const auto ref = dm::reference_table(pop);

        std::map<std::string, dm::ReferenceRow> ref_by_name;
        for (const auto& r : ref) ref_by_name[r.estimator] = r;

        for (const auto& row : rows) {
            const std::string& name = row.result.estimator;
            if (!row.ok)
                throw dm::SingularityError("table1: unexpected singular row " + name + " (" +
                                           row.error + ")");
            const auto& r = ref_by_name.at(name);
            const double mse_c = row.result.min_mse;
            const double pre_c = dm::pre(v_base, mse_c);
            const double mse_rd = (mse_c - r.mse) / r.mse;
            const double pre_rd = (pre_c - r.pre) / r.pre;
            const bool flag = std::fabs(mse_rd) > 0.05 || std::fabs(pre_rd) > 0.05;
            flagged_cells += flag ? 1 : 0;
            csv += pop + ',' + name + ',' + dm::format_table(mse_c) + ',' +
                   dm::format_table(r.mse) + ',' + dm::format_table(mse_rd) + ',' +
                   dm::format_table(pre_c) + ',' + dm::format_table(r.pre) + ',' +
                   dm::format_table(pre_rd) + ',' + (flag ? "yes" : "no") + '\n';
            jrows.push_back({{"population", pop},
                             {"estimator", name},
                             {"mse_computed", mse_c},
                             {"mse_reference", r.mse},
                             {"mse_rel_diff", mse_rd},
                             {"pre_computed", pre_c},
                             {"pre_reference", r.pre},
                             {"pre_rel_diff", pre_rd},
                             {"flagged", flag}});
        }
    }

    std::printf("reference comparison: %d flagged cell group(s) (relative difference > 5%%)\n",
                flagged_cells);
    std::printf("flags on pop1 trace to its published var_ex; the pop1-corrected rows show "
                "them resolve at var_ex = 9\n");

    if (want_csv(o)) emit_csv(o, manifest, "table1.csv", csv);
    if (want_json(o)) {
        dm::json j{{"rows", jrows},
                   {"flagged_cells", flagged_cells},
                   {"manifest", dm::manifest_filename("table1")}};
        emit(o, manifest, "table1.json", j.dump(2) + "\n");
    }
    manifest.wall_clock_ms = timer.ms();
    dm::write_manifest(o.out_dir, manifest);
    return 0;
}

struct McOpts {
    std::string pop_spec_path;
    std::string mc_config_path;
    std::int64_t reps = 20000;
    std::int64_t n = 500;
    bool literal = false;
    int threads = 0;
};

int cmd_mc(const CommonOpts& o, const McOpts& mo) {
    Timer timer;
    dm::RunManifest manifest;
    manifest.command = "mc";
    manifest.seed = o.seed;
    manifest.artifact_version = dm::kVersion;

    dm::SyntheticPopulationSpec spec;
    if (!mo.pop_spec_path.empty()) {
        spec = dm::load_json_file(mo.pop_spec_path).get<dm::SyntheticPopulationSpec>();
        manifest.inputs.push_back(mo.pop_spec_path);
    } else {
        const std::string name = o.preset.empty() ? "pop1" : o.preset;
        spec = dm::generator_preset(name, o.seed);
        manifest.inputs.push_back("generator:" + name);
    }

    const dm::GeneratedPopulation pop = dm::generate_population(spec);

    dm::MonteCarloConfig cfg;
    if (!mo.mc_config_path.empty()) {
        cfg = dm::load_json_file(mo.mc_config_path).get<dm::MonteCarloConfig>();
        manifest.inputs.push_back(mo.mc_config_path);
    } else {
        cfg.replications = mo.reps;
        cfg.n = mo.n;
        cfg.master_seed = o.seed;
        cfg.error_means_zeroed = !mo.literal;
    }
    cfg.threads = mo.threads;

    const dm::PopulationParams realized = pop.realized_params(cfg.n);
    if (cfg.estimators.empty()) cfg.estimators = dm::default_estimators(realized);

    const dm::MonteCarloResult result = dm::run_monte_carlo(pop, cfg);

    const dm::DesignConstants dc = dm::derive_constants(realized);
    std::string result_csv =
        "estimator,empirical_bias,empirical_mse,monte_carlo_se,flagged_failures,"
        "expansion_warnings\n";
    std::string cmp_csv =
        "estimator,analytic_mse,empirical_mse,ratio,empirical_bias,monte_carlo_se\n";
    dm::json jcmp = dm::json::array();
    std::printf("%-6s %13s %13s %8s %12s\n", "est", "analytic", "empirical", "ratio", "mc_se");
    for (std::size_t i = 0; i < result.estimators.size(); ++i) {
        const auto& m = result.estimators[i];
        const double ana = dm::analytic_mse(cfg.estimators[i], dc, realized);
        const double ratio = m.empirical_mse / ana;
        result_csv += m.estimator + ',' + dm::format_full(m.empirical_bias) + ',' +
                      dm::format_full(m.empirical_mse) + ',' + dm::format_full(m.monte_carlo_se) +
                      ',' + std::to_string(m.flagged_failures) + ',' +
                      std::to_string(m.expansion_warnings) + '\n';
        cmp_csv += m.estimator + ',' + dm::format_table(ana) + ',' +
                   dm::format_table(m.empirical_mse) + ',' + dm::format_table(ratio) + ',' +
                   dm::format_table(m.empirical_bias) + ',' + dm::format_table(m.monte_carlo_se) +
                   '\n';
        jcmp.push_back({{"estimator", m.estimator},
                        {"analytic_mse", ana},
                        {"empirical_mse", m.empirical_mse},
                        {"ratio", ratio},
                        {"empirical_bias", m.empirical_bias},
                        {"monte_carlo_se", m.monte_carlo_se},
                        {"flagged_failures", m.flagged_failures},
                        {"expansion_warnings", m.expansion_warnings}});
        std::printf("%-6s %13s %13s %8s %12s\n", m.estimator.c_str(),
                    dm::format_table(ana).c_str(), dm::format_table(m.empirical_mse).c_str(),
                    dm::format_table(ratio).c_str(), dm::format_table(m.monte_carlo_se).c_str());
    }

    if (want_csv(o)) {
        emit_csv(o, manifest, "mc_result.csv", result_csv);
        emit_csv(o, manifest, "mc_compare.csv", cmp_csv);
    }
    if (want_json(o)) {
        dm::json jr = result;
        jr["config"] = cfg;
        jr["population_spec"] = spec;
        jr["realized_params"] = realized;
        jr["manifest"] = dm::manifest_filename("mc");
        emit(o, manifest, "mc_result.json", jr.dump(2) + "\n");
        dm::json jc{{"rows", jcmp},
                    {"realized_params", realized},
                    {"manifest", dm::manifest_filename("mc")}};
        emit(o, manifest, "mc_compare.json", jc.dump(2) + "\n");
    }
    manifest.wall_clock_ms = timer.ms();
    dm::write_manifest(o.out_dir, manifest);
    return 0;
}

int cmd_gen_pop(const CommonOpts& o, const std::string& pop_spec_path, std::int64_t n) {
    Timer timer;
    dm::RunManifest manifest;
    manifest.command = "gen-pop";
    manifest.seed = o.seed;
    manifest.artifact_version = dm::kVersion;

    dm::SyntheticPopulationSpec spec;
    if (!pop_spec_path.empty()) {
        spec = dm::load_json_file(pop_spec_path).get<dm::SyntheticPopulationSpec>();
        manifest.inputs.push_back(pop_spec_path);
    } else {
        const std::string name = o.preset.empty() ? "pop1" : o.preset;
        spec = dm::generator_preset(name, o.seed);
        manifest.inputs.push_back("generator:" + name);
    }

    const dm::GeneratedPopulation pop = dm::generate_population(spec);
    const dm::PopulationParams realized = pop.realized_params(n);

    emit_csv(o, manifest, "population.csv", dm::population_csv(pop));
    dm::json sidecar{{"realized_params", realized},
                     {"spec", spec},
                     {"manifest", dm::manifest_filename("gen-pop")}};
    emit(o, manifest, "population_params.json", sidecar.dump(2) + "\n");

    std::printf("N=%lld  mean_x=%s mean_y=%s var_x=%s var_y=%s rho=%s\n",
                static_cast<long long>(realized.N), dm::format_table(realized.mean_x).c_str(),
                dm::format_table(realized.mean_y).c_str(),
                dm::format_table(realized.var_x).c_str(),
                dm::format_table(realized.var_y).c_str(),
                dm::format_table(realized.rho).c_str());

    manifest.wall_clock_ms = timer.ms();
    dm::write_manifest(o.out_dir, manifest);
    return 0;
}

int cmd_check_conditions(const CommonOpts& o) {
    Timer timer;
    dm::RunManifest manifest;
    manifest.command = "check-conditions";
    manifest.seed = o.seed;
    manifest.artifact_version = dm::kVersion;

    const dm::PopulationParams p = load_params(o, manifest.inputs);
    const dm::DesignConstants dc = dm::derive_constants(p);
    std::map<std::string, dm::AnalyticResult> all_rows;
    for (const auto& r : dm::analyze_all(dc, p)) all_rows[r.estimator] = r;
    const auto conds = dm::efficiency_conditions(dc, p, all_rows);

    std::string csv = "index,left,right,lhs,holds,boundary,mse_left,mse_right\n";
    std::printf("%-5s %-5s %-5s %13s %7s %9s\n", "cond", "left", "right", "lhs", "holds",
                "boundary");
    for (const auto& c : conds) {
        csv += std::to_string(c.index) + ',' + c.left + ',' + c.right + ',' +
               dm::format_table(c.lhs) + ',' + (c.holds ? "yes" : "no") + ',' +
               (c.boundary ? "yes" : "no") + ',' + dm::format_table(c.mse_left) + ',' +
               dm::format_table(c.mse_right) + '\n';
        std::printf("%-5d %-5s %-5s %13s %7s %9s\n", c.index, c.left.c_str(), c.right.c_str(),
                    dm::format_table(c.lhs).c_str(), c.holds ? "yes" : "no",
                    c.boundary ? "yes" : "no");
    }

    if (want_csv(o)) emit_csv(o, manifest, "conditions.csv", csv);
    if (want_json(o)) {
        dm::json j{{"conditions", conds},
                   {"population", p},
                   {"manifest", dm::manifest_filename("check-conditions")}};
        emit(o, manifest, "conditions.json", j.dump(2) + "\n");
    }
    manifest.wall_clock_ms = timer.ms();
    dm::write_manifest(o.out_dir, manifest);
    return 0;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_params = true) {
    cmd->add_option("--out", o.out_dir, "output directory (env DUALMEAN_OUT, default ./out)");
    cmd->add_option("--format", o.format, "csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}))
        ->default_val("both");
    cmd->add_option("--seed", o.seed, "64-bit seed")->default_val(kDefaultSeed);
    if (with_params) {
        cmd->add_option("--preset", o.preset, "embedded parameter set: pop1, pop1-corrected, pop2");
        cmd->add_option("--params", o.params_path, "population parameters JSON file");
        cmd->add_option("--n", o.n_override, "sample size override");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-population mean estimators under measurement error"};
    app.set_version_flag("--version", dm::kVersion);
    app.require_subcommand(1);

    CommonOpts analyze_o;
    auto* analyze = app.add_subcommand("analyze", "analytic MSE/PRE table for a parameter set");
    add_common(analyze, analyze_o);

    CommonOpts table1_o;
    auto* table1 = app.add_subcommand("table1", "compare computed values with the embedded reference table");
    add_common(table1, table1_o, false);

    CommonOpts mc_o;
    McOpts mc_extra;
    auto* mc = app.add_subcommand("mc", "Monte Carlo validation of the analytic values");
    add_common(mc, mc_o);
    mc->add_option("--pop-spec", mc_extra.pop_spec_path, "population generator spec JSON");
    mc->add_option("--mc-config", mc_extra.mc_config_path, "Monte Carlo config JSON");
    mc->add_option("--reps", mc_extra.reps, "replications")->default_val(20000);
    bool theory_flag = false;
    auto* literal_opt = mc->add_flag("--literal", mc_extra.literal,
                                     "keep the generator's error means (default zeroes them)");
    mc->add_flag("--theory-conformant", theory_flag, "zero the error means (the default)")
        ->excludes(literal_opt);
    mc->add_option("--threads", mc_extra.threads, "worker threads (0 = hardware)");

    CommonOpts gen_o;
    std::string gen_spec_path;
    std::int64_t gen_n = 500;
    auto* gen = app.add_subcommand("gen-pop", "generate a synthetic population");
    add_common(gen, gen_o);
    gen->add_option("--pop-spec", gen_spec_path, "population generator spec JSON");

    CommonOpts cond_o;
    auto* cond = app.add_subcommand("check-conditions", "efficiency-ordering predicate report");
    add_common(cond, cond_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    auto finish = [&](CommonOpts& o) {
        if (o.out_dir.empty()) o.out_dir = default_out_dir();
    };

    try {
        if (analyze->parsed()) {
            finish(analyze_o);
            return cmd_analyze(analyze_o);
        }
        if (table1->parsed()) {
            finish(table1_o);
            return cmd_table1(table1_o);
        }
        if (mc->parsed()) {
            finish(mc_o);
            mc_extra.n = mc_o.n_override > 0 ? mc_o.n_override : 500;
            return cmd_mc(mc_o, mc_extra);
        }
        if (gen->parsed()) {
            finish(gen_o);
            gen_n = gen_o.n_override > 0 ? gen_o.n_override : 500;
            return cmd_gen_pop(gen_o, gen_spec_path, gen_n);
        }
        if (cond->parsed()) {
            finish(cond_o);
            return cmd_check_conditions(cond_o);
        }
    } catch (const dm::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const dm::SingularityError& e) {
        std::fprintf(stderr, "numerical singularity: %s\n", e.what());
        return 3;
    } catch (const dm::McFailureError& e) {
        std::fprintf(stderr, "monte carlo failure: %s\n", e.what());
        return 4;
    }
    return 0;
}
