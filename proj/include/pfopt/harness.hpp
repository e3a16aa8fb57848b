#pragma once

// Seeded experiment runs (problem x optimizer x schedule), trace/summary
// emission, grid searches and the eta0 / base-factor ablation sweeps.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pfopt/config.hpp"
#include "pfopt/diagnostics.hpp"

namespace pfopt {

// Loss or any coordinate beyond this magnitude counts as divergence.
inline constexpr double kDivergenceThreshold = 1e30;

struct TraceRecord {
    std::uint64_t step = 0;
    double loss = 0.0;
    double eta = 0.0;
    double r = 0.0;
    double grad_l2 = 0.0;
    double s_l2 = 0.0;
    double dist_x0 = 0.0;
    std::optional<double> dist_xstar_inf;
    double lr_mult = 1.0;
};

struct RunSummary {
    std::string config_hash;
    std::uint64_t total_steps = 0;
    double final_loss = 0.0;
    std::optional<double> f_star;
    std::optional<double> gap_final;   // f(x_T) - f*
    std::optional<double> gap_avg;     // f(x_bar_tau) - f*
    std::optional<std::uint64_t> tau;
    std::optional<TheoremReport> report;
    bool diverged = false;
    std::optional<std::uint64_t> diverged_step;
    double wall_seconds = 0.0;
    std::vector<std::string> warnings;
};

struct RunResult {
    std::vector<TraceRecord> trace;
    RunSummary summary;
    StepLog log;
    ParamVector x_final;
    std::optional<ParamVector> x_bar;
};

// Builds (or loads) the configured problem.
Problem build_problem(const ExperimentConfig& cfg);
ParamVector initial_point(const ExperimentConfig& cfg, std::size_t dim);

// Executes the run and writes the configured output files. Deterministic in cfg.
RunResult run(const ExperimentConfig& cfg);
// Same, reusing an already-built problem and minimizer.
RunResult run(const ExperimentConfig& cfg, const Problem& problem, const std::optional<Minimizer>& minimizer);

void write_trace_csv(const std::vector<TraceRecord>& trace, const std::filesystem::path& path);
std::string trace_csv(const std::vector<TraceRecord>& trace);
void write_summary_json(const RunSummary& summary, const std::filesystem::path& path, bool include_timing = false);
nlohmann::json to_json(const RunSummary& summary, bool include_timing = false);

// Final gap when a minimizer exists, otherwise the final loss.
double ranking_score(const RunSummary& s);

struct SweepRow {
    nlohmann::json value;
    RunSummary summary;
};

struct SweepOptions {
    // 0 = hardware concurrency
    unsigned threads = 1;
};

// One run per value of `param_name` (dotted key), each configuration derived
// from `base`. Output paths get a "_<n>" suffix per value. Rows keep input order.
std::vector<SweepRow> sweep(const nlohmann::json& base, const std::string& param_name,
                            const std::vector<nlohmann::json>& values, const SweepOptions& opts = {});

// sweep() sorted by ranking_score, diverged runs last.
std::vector<SweepRow> grid_search(const nlohmann::json& base, const std::string& param_name,
                                  const std::vector<nlohmann::json>& values, const SweepOptions& opts = {});

struct AblationTable {
    std::string parameter;
    std::vector<SweepRow> rows;
    // max/min of the final-iterate gaps over rows passing the footer filter
    std::optional<double> gap_ratio;
    std::string footer_note;
};

std::vector<double> default_eta0_values();
std::vector<double> default_base_factor_values();

// Sweeps eps in absolute mode; the footer covers eps <= 0.1.
AblationTable ablation_eta0(const nlohmann::json& base, const std::vector<double>& values,
                            const SweepOptions& opts = {});
// Sweeps c; the footer covers 0.5 <= c <= 4.
AblationTable ablation_base_factor(const nlohmann::json& base, const std::vector<double>& values,
                                   const SweepOptions& opts = {});

std::string ablation_table_csv(const AblationTable& table);
std::string sweep_table_csv(const std::string& parameter, const std::vector<SweepRow>& rows);

struct RatesResult {
    std::vector<std::uint64_t> horizons;
    // per horizon, the median over seeds of gap(x_bar_tau)
    std::vector<double> median_gaps;
    std::vector<std::vector<double>> gaps;
    std::optional<RateFit> fit;
};

// Runs the config at each horizon T (schedule length follows T) for `seeds`
// noise/run seeds offset from the configured ones, then fits the log-log slope.
RatesResult rates(const nlohmann::json& base, const std::vector<std::uint64_t>& horizons, unsigned seeds = 1,
                  const SweepOptions& opts = {});

// Renders a double with 17 significant digits.
std::string format_double(double v);

}  // namespace pfopt
