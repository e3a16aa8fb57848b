// pfopt: run parameter-free optimizer experiments from a JSON config.
//
//   pfopt run <config.json>
//   pfopt grid <config.json> --param optimizer.lr --values 1e-4,1e-3,1e-2
//   pfopt ablate-eta0 <config.json> [--values ...]
//   pfopt ablate-base <config.json> [--values ...]
//   pfopt rates <config.json> --steps 100,1000,10000 [--seeds 5]
//
// Every subcommand accepts --set key=value (dotted keys, repeatable),
// --threads N and --strict (exit 3 when any run diverged).

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pfopt/harness.hpp"
#include "pfopt/kernels.hpp"

namespace {

using nlohmann::json;

constexpr int kExitDiverged = 3;

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) parts.push_back(item);
    return parts;
}

struct Common {
    std::string config;
    std::vector<std::string> sets;
    unsigned threads = 1;
    bool strict = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--set", sets, "override a config key, e.g. --set optimizer.eta0=1e-3");
        cmd->add_option("--threads", threads, "parallel runs for sweeps (0 = all cores)");
        cmd->add_flag("--strict", strict, "exit nonzero when a run diverges");
    }

    json load() const {
        json j = pfopt::load_json_file(config);
        for (const auto& s : sets) pfopt::apply_override(j, s);
        return j;
    }
};

std::string optional_str(const std::optional<double>& v) { return v ? pfopt::format_double(*v) : "n/a"; }

int emit_rows(const std::vector<pfopt::SweepRow>& rows, bool strict) {
    bool any_diverged = false;
    for (const auto& r : rows) any_diverged |= r.summary.diverged;
    return strict && any_diverged ? kExitDiverged : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parameter-free adaptive optimizer experiments"};
    app.require_subcommand(1);
    std::string kernels = "auto";
    app.add_option("--kernels", kernels, "vector kernel backend: auto, scalar, avx2")
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

    Common run_opts, grid_opts, eta_opts, base_opts, rate_opts;
    std::string param, values_csv, eta_values, base_values, steps_csv;
    unsigned seeds = 1;

    auto* run_cmd = app.add_subcommand("run", "execute one run; writes the configured trace CSV and summary JSON");
    run_opts.attach(run_cmd);

    auto* grid_cmd = app.add_subcommand("grid", "one run per value of a config key, ranked by final gap");
    grid_opts.attach(grid_cmd);
    grid_cmd->add_option("--param", param, "dotted config key")->required();
    grid_cmd->add_option("--values", values_csv, "comma-separated values")->required();

    auto* eta_cmd = app.add_subcommand("ablate-eta0", "sweep the initial eta in absolute mode");
    eta_opts.attach(eta_cmd);
    eta_cmd->add_option("--values", eta_values, "comma-separated eta0 values (default 1e-6..1)");

    auto* base_cmd = app.add_subcommand("ablate-base", "sweep the base factor c");
    base_opts.attach(base_cmd);
    base_cmd->add_option("--values", base_values, "comma-separated c values (default 0.25..8)");

    auto* rates_cmd = app.add_subcommand("rates", "run at several horizons and fit the log-log gap slope");
    rate_opts.attach(rates_cmd);
    rates_cmd->add_option("--steps", steps_csv, "comma-separated horizons T")->required();
    rates_cmd->add_option("--seeds", seeds, "seeds per horizon (median is fitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (kernels == "scalar") pfopt::kernels::select_backend(pfopt::kernels::Backend::scalar);
        if (kernels == "avx2") pfopt::kernels::select_backend(pfopt::kernels::Backend::avx2);

        if (*run_cmd) {
            const auto cfg = pfopt::experiment_config_from_json(run_opts.load());
            const auto result = pfopt::run(cfg);
            std::cout << pfopt::to_json(result.summary).dump(2) << '\n';
            std::cerr << "wall_seconds " << result.summary.wall_seconds << " (kernels "
                      << pfopt::kernels::backend_name(pfopt::kernels::active_backend()) << ")\n";
            return run_opts.strict && result.summary.diverged ? kExitDiverged : 0;
        }
        if (*grid_cmd) {
            std::vector<json> values;
            for (const auto& v : split_csv(values_csv)) values.push_back(pfopt::parse_loose_value(v));
            const auto rows = pfopt::grid_search(grid_opts.load(), param, values, {grid_opts.threads});
            std::cout << pfopt::sweep_table_csv(param, rows);
            return emit_rows(rows, grid_opts.strict);
        }
        if (*eta_cmd || *base_cmd) {
            const bool eta = eta_cmd->parsed();
            const Common& c = eta ? eta_opts : base_opts;
            std::vector<double> values = eta ? pfopt::default_eta0_values() : pfopt::default_base_factor_values();
            const std::string& given = eta ? eta_values : base_values;
            if (!given.empty()) {
                values.clear();
                for (const auto& v : split_csv(given)) values.push_back(std::stod(v));
            }
            const auto table = eta ? pfopt::ablation_eta0(c.load(), values, {c.threads})
                                   : pfopt::ablation_base_factor(c.load(), values, {c.threads});
            std::cout << pfopt::ablation_table_csv(table);
            return emit_rows(table.rows, c.strict);
        }
        if (*rates_cmd) {
            std::vector<std::uint64_t> horizons;
            for (const auto& v : split_csv(steps_csv)) horizons.push_back(std::stoull(v));
            const auto res = pfopt::rates(rate_opts.load(), horizons, seeds, {rate_opts.threads});
            std::cout << "T,median_gap_avg\n";
            for (std::size_t i = 0; i < res.horizons.size(); ++i)
                std::cout << res.horizons[i] << ',' << pfopt::format_double(res.median_gaps[i]) << '\n';
            if (res.fit) {
                std::cout << "# slope " << pfopt::format_double(res.fit->slope) << " intercept "
                          << pfopt::format_double(res.fit->intercept) << " alpha_hat "
                          << pfopt::format_double(res.fit->alpha_hat) << '\n';
            } else {
                std::cout << "# fit unavailable (need >= 3 horizons with positive finite gaps)\n";
            }
            bool diverged = false;
            for (const auto& row : res.gaps)
                for (double g : row) diverged |= !std::isfinite(g);
            return rate_opts.strict && diverged ? kExitDiverged : 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "pfopt: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
