#pragma once

// Quantities from the AdaGrad++/Adam++ convergence bounds, evaluated on a
// recorded run, and log-log rate fitting.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pfopt/averaging.hpp"
#include "pfopt/problems.hpp"

namespace pfopt {

/// Per-step scalars of one run at full resolution. Vectors indexed by t;
/// eta and the distance logs carry one extra entry for the final iterate x_T.
struct StepLog {
    std::size_t dim = 0;
    std::vector<double> eta;             // eta_0 .. eta_T
    std::vector<double> grad_sq;         // |g_t|_2^2, t < T
    std::vector<double> s_l2;            // |s_t|_2 after step t, t < T
    std::vector<double> dist_star_inf;   // |x_t - x*|_inf, t <= T (empty without x*)
    std::vector<double> dist_star_l2;    // |x_t - x*|_2, t <= T

    std::size_t steps() const { return grad_sq.size(); }
};

struct TheoremReport {
    bool has_minimizer = false;
    std::uint64_t tau = 0;
    std::uint64_t total_steps = 0;
    double d_tau = 0.0;         // max_{t<=tau} |x_t - x*|_inf
    double d_bar_tau = 0.0;     // max_{t<=tau} |x_t - x*|_2
    double s_tau_l2 = 0.0;      // |s_tau|_2
    double sum_grad_sq_tau = 0.0;  // sum_{t<=tau} |g_t|_2^2
    double theta = 0.0;
    double l_hat = 0.0;         // max observed |g_t|_2
    std::optional<double> l_analytic;  // sqrt(d) for abs_sum
    double eta0 = 0.0;
    double eta_T = 0.0;
    double log_eta_ratio = 0.0;
    double gap = 0.0;           // f(x_bar_tau) - f*
    double bound_core = 0.0;
};

// log(60 log(6t) / delta). Throws std::invalid_argument unless t >= 1 and delta in (0, 1].
double theta(std::uint64_t t, double delta_conf);

// s_tau is read at min(tau, T - 1): the last step whose gradient exists.
// Without a minimizer the distance, gap and bound fields stay zero and
// has_minimizer is false.
TheoremReport theorem_report(const Problem& problem, const StepLog& log, const std::optional<Minimizer>& minimizer,
                             const AverageTracker::Average& average, double delta_conf);

nlohmann::json to_json(const TheoremReport& r);

struct RateFit {
    std::vector<std::pair<double, double>> points;  // (T, gap)
    double slope = 0.0;
    double intercept = 0.0;
    double alpha_hat = 0.0;  // -slope - 1/2
};

// Least-squares line through (log T, log gap). Requires >= 3 points with
// strictly increasing T and positive gaps.
RateFit rate_fit(std::vector<std::pair<double, double>> points);

}  // namespace pfopt
