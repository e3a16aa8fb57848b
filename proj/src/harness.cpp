#include "pfopt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pfopt/rng.hpp"

namespace pfopt {

using nlohmann::json;

namespace {

bool out_of_bounds(std::span<const double> x) {
    return !all_finite(x) || linf_norm(x) > kDivergenceThreshold;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::filesystem::path suffixed(const std::string& path, std::size_t index) {
    std::filesystem::path p(path);
    const std::string stem = p.stem().string() + "_" + std::to_string(index);
    return p.parent_path() / (stem + p.extension().string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Problem build_problem(const ExperimentConfig& cfg) {
    if (!cfg.problem.path.empty()) return load_problem(cfg.problem.path);
    return make_synthetic(cfg.problem.kind, cfg.problem.d, cfg.problem.m, cfg.problem.seed, cfg.problem.synthetic);
}

ParamVector initial_point(const ExperimentConfig& cfg, std::size_t dim) {
    switch (cfg.init.kind) {
        case InitKind::zeros:
            return ParamVector(dim, 0.0);
        case InitKind::constant:
            return ParamVector(dim, cfg.init.value);
        case InitKind::gaussian: {
            auto gen = stream_engine(cfg.run_seed, 0xA11CE);
            std::normal_distribution<double> z(0.0, cfg.init.value);
            std::vector<double> x(dim);
            for (double& e : x) e = z(gen);
            return ParamVector(std::move(x));
        }
    }
    return ParamVector(dim, 0.0);
}

RunResult run(const ExperimentConfig& cfg) {
    const Problem problem = build_problem(cfg);
    std::optional<Minimizer> minimizer;
    std::string note;
    if (problem.kind != ProblemKind::tiny_mlp) {
        try {
            minimizer = solve_minimizer(problem);
        } catch (const std::exception& e) {
            note = std::string("minimizer unavailable: ") + e.what();
        }
    }
    RunResult r = run(cfg, problem, minimizer);
    if (!note.empty()) r.summary.warnings.push_back(note);
    return r;
}

RunResult run(const ExperimentConfig& cfg, const Problem& problem, const std::optional<Minimizer>& minimizer) {
    validate(cfg);
    const auto started = std::chrono::steady_clock::now();
    const std::size_t d = problem.dim;
    const std::uint64_t T = cfg.total_steps;
    const Schedule sched = cfg.schedule_spec();

    RunResult out;
    RunSummary& summary = out.summary;
    summary.config_hash = config_hash(cfg);
    summary.total_steps = T;
    summary.warnings = validate(cfg.optimizer);
    if (minimizer) summary.f_star = minimizer->f_star;

    OptimizerState state = init_state(cfg.optimizer, initial_point(cfg, d));
    AverageTracker tracker(d);
    StepLog& log = out.log;
    log.dim = d;
    log.eta.reserve(T + 1);
    log.grad_sq.reserve(T);
    log.s_l2.reserve(T);

    auto log_distance = [&](std::span<const double> x) {
        if (!minimizer) return;
        log.dist_star_inf.push_back(linf_distance(x, minimizer->x_star.span()));
        log.dist_star_l2.push_back(l2_distance(x, minimizer->x_star.span()));
    };

    ParamVector g(d);
    ParamVector x_prev(d);
    for (std::uint64_t t = 0; t < T; ++t) {
        const double lr_mult = multiplier(sched, t);
        stochastic_gradient_into(problem, cfg.noise, state.x.span(), t, g.span());
        log_distance(state.x.span());

        TraceRecord rec;
        const bool eval = t % cfg.eval_every == 0;
        if (eval) {
            rec.step = t;
            rec.loss = loss(problem, state.x.span());
            rec.dist_x0 = l2_distance(state.x.span(), state.x0.span());
            if (minimizer) rec.dist_xstar_inf = log.dist_star_inf.back();
            rec.lr_mult = lr_mult;
            if (!std::isfinite(rec.loss) || std::fabs(rec.loss) > kDivergenceThreshold) {
                summary.diverged = true;
                summary.diverged_step = t;
                break;
            }
        }
        if (!all_finite(g.span())) {
            summary.diverged = true;
            summary.diverged_step = t;
            break;
        }

        x_prev = state.x;
        step(state, cfg.optimizer, g, lr_mult);

        const double grad_sq = squared_l2_norm(g.span());
        log.grad_sq.push_back(grad_sq);
        log.eta.push_back(state.eta);
        log.s_l2.push_back(l2_norm(state.s.span()));
        tracker.observe(x_prev.span(), state.eta);

        if (eval) {
            rec.eta = state.eta;
            rec.r = state.r;
            rec.grad_l2 = std::sqrt(grad_sq);
            rec.s_l2 = log.s_l2.back();
            out.trace.push_back(rec);
        }
        if (out_of_bounds(state.x.span())) {
            summary.diverged = true;
            summary.diverged_step = t;
            break;
        }
    }

    out.x_final = state.x;
    summary.final_loss = loss(problem, state.x.span());
    if (!summary.diverged && (!std::isfinite(summary.final_loss) || std::fabs(summary.final_loss) > kDivergenceThreshold)) {
        summary.diverged = true;
        summary.diverged_step = T;
    }

    if (!summary.diverged) {
        const double eta_T = peek_eta(state, cfg.optimizer);
        log.eta.push_back(eta_T);
        log_distance(state.x.span());
        tracker.observe(state.x.span(), eta_T);
        if (minimizer) summary.gap_final = summary.final_loss - minimizer->f_star;
        if (tracker.has_average()) {
            auto avg = tracker.current_average();
            summary.tau = avg.tau;
            summary.report = theorem_report(problem, log, minimizer, avg, cfg.delta_conf);
            if (minimizer) summary.gap_avg = summary.report->gap;
            out.x_bar = std::move(avg.x_bar);
        }
    }

    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    if (!cfg.output.trace_csv.empty()) write_trace_csv(out.trace, cfg.output.trace_csv);
    if (!cfg.output.summary_json.empty()) write_summary_json(summary, cfg.output.summary_json, cfg.output.timing);
    return out;
}

std::string trace_csv(const std::vector<TraceRecord>& trace) {
    std::string s = "step,loss,eta,r,grad_l2,s_l2,dist_x0,dist_xstar_inf,lr_mult\n";
    for (const auto& r : trace) {
        s += std::to_string(r.step);
        for (double v : {r.loss, r.eta, r.r, r.grad_l2, r.s_l2, r.dist_x0}) {
            s += ',';
            s += format_double(v);
        }
        s += ',';
        if (r.dist_xstar_inf) s += format_double(*r.dist_xstar_inf);
        s += ',';
        s += format_double(r.lr_mult);
        s += '\n';
    }
    return s;
}

void write_trace_csv(const std::vector<TraceRecord>& trace, const std::filesystem::path& path) {
    write_text(path, trace_csv(trace));
}

json to_json(const RunSummary& s, bool include_timing) {
    json j;
    j["config_hash"] = s.config_hash;
    j["total_steps"] = s.total_steps;
    j["final_loss"] = std::isfinite(s.final_loss) ? json(s.final_loss) : json(nullptr);
    j["f_star"] = optional_json(s.f_star);
    j["gap_final"] = optional_json(s.gap_final);
    j["gap_avg"] = optional_json(s.gap_avg);
    j["tau"] = s.tau ? json(*s.tau) : json(nullptr);
    j["diverged"] = s.diverged;
    j["diverged_step"] = s.diverged_step ? json(*s.diverged_step) : json(nullptr);
    j["report"] = s.report ? to_json(*s.report) : json(nullptr);
    j["warnings"] = s.warnings;
    if (include_timing) j["wall_seconds"] = s.wall_seconds;
    return j;
}

void write_summary_json(const RunSummary& summary, const std::filesystem::path& path, bool include_timing) {
    write_text(path, to_json(summary, include_timing).dump(2) + "\n");
}

double ranking_score(const RunSummary& s) {
    if (s.diverged) return std::numeric_limits<double>::infinity();
    return s.gap_final ? *s.gap_final : s.final_loss;
}

std::vector<SweepRow> sweep(const json& base, const std::string& param_name, const std::vector<json>& values,
                            const SweepOptions& opts) {
    if (values.empty()) throw std::invalid_argument("sweep: no values given");
    std::vector<ExperimentConfig> configs;
    configs.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        json j = base;
        set_dotted(j, param_name, values[i]);
        ExperimentConfig c = experiment_config_from_json(j);
        if (values.size() > 1) {
            if (!c.output.trace_csv.empty()) c.output.trace_csv = suffixed(c.output.trace_csv, i).string();
            if (!c.output.summary_json.empty()) c.output.summary_json = suffixed(c.output.summary_json, i).string();
        }
        configs.push_back(std::move(c));
    }
    std::vector<SweepRow> rows(values.size());
    parallel_for(values.size(), opts.threads, [&](std::size_t i) {
        rows[i].value = values[i];
        rows[i].summary = run(configs[i]).summary;
    });
    return rows;
}

std::vector<SweepRow> grid_search(const json& base, const std::string& param_name, const std::vector<json>& values,
                                  const SweepOptions& opts) {
    auto rows = sweep(base, param_name, values, opts);
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return ranking_score(a.summary) < ranking_score(b.summary);
    });
    return rows;
}

std::vector<double> default_eta0_values() { return {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0}; }

std::vector<double> default_base_factor_values() { return {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}; }

namespace {

AblationTable ablate(const json& base, const std::string& key, const std::vector<double>& values,
                     const SweepOptions& opts, bool (*in_footer)(double), std::string note) {
    const ExperimentConfig probe = experiment_config_from_json(base);
    if (!is_parameter_free(probe.optimizer.algorithm))
        throw std::invalid_argument("ablation requires adagrad++, adam++ or adamw++");
    std::vector<json> js(values.begin(), values.end());
    AblationTable table;
    table.parameter = key;
    table.rows = sweep(base, key, js, opts);
    table.footer_note = std::move(note);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    bool any = false;
    for (const auto& row : table.rows) {
        if (!in_footer(row.value.get<double>())) continue;
        if (row.summary.diverged || !row.summary.gap_final) continue;
        lo = std::min(lo, *row.summary.gap_final);
        hi = std::max(hi, *row.summary.gap_final);
        any = true;
    }
    if (any && lo > 0.0) table.gap_ratio = hi / lo;
    return table;
}

}  // namespace

AblationTable ablation_eta0(const json& base, const std::vector<double>& values, const SweepOptions& opts) {
    json j = base;
    set_dotted(j, "optimizer.eta0_rule", "absolute");
    return ablate(j, "optimizer.eta0", values, opts, [](double v) { return v <= 0.1; },
                  "max/min gap_final over eta0 <= 0.1");
}

AblationTable ablation_base_factor(const json& base, const std::vector<double>& values, const SweepOptions& opts) {
    return ablate(base, "optimizer.base_factor", values, opts, [](double v) { return v >= 0.5 && v <= 4.0; },
                  "max/min gap_final over 0.5 <= c <= 4");
}

std::string sweep_table_csv(const std::string& parameter, const std::vector<SweepRow>& rows) {
    std::string s = parameter + ",final_loss,gap_final,gap_avg,tau,diverged,diverged_step\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const auto& row : rows) {
        const auto& sm = row.summary;
        s += row.value.is_number() ? format_double(row.value.get<double>()) : row.value.dump();
        s += ',' + (std::isfinite(sm.final_loss) ? format_double(sm.final_loss) : std::string("nan"));
        s += ',' + opt(sm.gap_final) + ',' + opt(sm.gap_avg) + ',';
        if (sm.tau) s += std::to_string(*sm.tau);
        s += ',' + std::string(sm.diverged ? "true" : "false") + ',';
        if (sm.diverged_step) s += std::to_string(*sm.diverged_step);
        s += '\n';
    }
    return s;
}

std::string ablation_table_csv(const AblationTable& table) {
    std::string s = sweep_table_csv(table.parameter, table.rows);
    s += "# " + table.footer_note + ": " + (table.gap_ratio ? format_double(*table.gap_ratio) : std::string("n/a")) +
         "\n";
    return s;
}

RatesResult rates(const json& base, const std::vector<std::uint64_t>& horizons, unsigned seeds,
                  const SweepOptions& opts) {
    if (horizons.empty()) throw std::invalid_argument("rates: no horizons given");
    if (seeds == 0) throw std::invalid_argument("rates: seeds must be >= 1");
    const ExperimentConfig probe = experiment_config_from_json(base);

    RatesResult res;
    res.horizons = horizons;
    res.gaps.assign(horizons.size(), std::vector<double>(seeds, 0.0));
    const std::size_t jobs = horizons.size() * seeds;
    std::vector<ExperimentConfig> configs;
    configs.reserve(jobs);
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        for (unsigned k = 0; k < seeds; ++k) {
            json j = base;
            set_dotted(j, "total_steps", horizons[h]);
            set_dotted(j, "noise.seed", probe.noise.seed + k);
            set_dotted(j, "run_seed", probe.run_seed + k);
            set_dotted(j, "output.trace_csv", "");
            set_dotted(j, "output.summary_json", "");
            configs.push_back(experiment_config_from_json(j));
        }
    }
    const Problem problem = build_problem(probe);
    const std::optional<Minimizer> minimizer = solve_minimizer(problem);
    parallel_for(jobs, opts.threads, [&](std::size_t i) {
        const RunSummary s = run(configs[i], problem, minimizer).summary;
        const double gap = (s.diverged || !s.gap_avg) ? std::numeric_limits<double>::infinity() : *s.gap_avg;
        res.gaps[i / seeds][i % seeds] = gap;
    });

    std::vector<std::pair<double, double>> points;
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        std::vector<double> g = res.gaps[h];
        std::sort(g.begin(), g.end());
        const std::size_t n = g.size();
        const double med = n % 2 ? g[n / 2] : 0.5 * (g[n / 2 - 1] + g[n / 2]);
        res.median_gaps.push_back(med);
        points.emplace_back(static_cast<double>(horizons[h]), med);
    }
    const bool usable = points.size() >= 3 && std::all_of(points.begin(), points.end(), [](const auto& p) {
                            return std::isfinite(p.second) && p.second > 0.0;
                        });
    if (usable) res.fit = rate_fit(points);
    return res;
}

}  // namespace pfopt
