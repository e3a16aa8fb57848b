#include "pfopt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pfopt {

double theta(std::uint64_t t, double delta_conf) {
    if (t < 1) throw std::invalid_argument("theta: t must be >= 1");
    if (!(delta_conf > 0.0 && delta_conf <= 1.0)) throw std::invalid_argument("theta: delta must lie in (0, 1]");
    return std::log(60.0 * std::log(6.0 * static_cast<double>(t)) / delta_conf);
}

TheoremReport theorem_report(const Problem& problem, const StepLog& log, const std::optional<Minimizer>& minimizer,
                             const AverageTracker::Average& average, double delta_conf) {
    const std::size_t T = log.steps();
    if (T == 0) throw std::invalid_argument("theorem_report: empty log");
    if (log.eta.size() != T + 1 || log.s_l2.size() != T)
        throw std::invalid_argument("theorem_report: inconsistent step log");
    if (average.tau < 1 || average.tau > T) throw std::invalid_argument("theorem_report: tau outside [1, T]");

    TheoremReport r;
    r.tau = average.tau;
    r.total_steps = T;
    const std::size_t s_index = std::min<std::size_t>(average.tau, T - 1);
    r.s_tau_l2 = log.s_l2[s_index];
    for (std::size_t t = 0; t <= s_index; ++t) r.sum_grad_sq_tau += log.grad_sq[t];
    r.theta = theta(average.tau, delta_conf);
    for (double gsq : log.grad_sq) r.l_hat = std::max(r.l_hat, std::sqrt(gsq));
    if (problem.kind == ProblemKind::abs_sum) r.l_analytic = std::sqrt(static_cast<double>(problem.dim));
    r.eta0 = log.eta.front();
    r.eta_T = log.eta.back();
    r.log_eta_ratio = std::log(r.eta_T / r.eta0);

    if (!minimizer) return r;
    if (log.dist_star_inf.size() != T + 1 || log.dist_star_l2.size() != T + 1)
        throw std::invalid_argument("theorem_report: distance log missing");

    r.has_minimizer = true;
    for (std::size_t t = 0; t <= average.tau; ++t) {
        r.d_tau = std::max(r.d_tau, log.dist_star_inf[t]);
        r.d_bar_tau = std::max(r.d_bar_tau, log.dist_star_l2[t]);
    }
    r.gap = loss(problem, average.x_bar.span()) - minimizer->f_star;

    const double sqrt_d = std::sqrt(static_cast<double>(log.dim));
    const double s2 = r.s_tau_l2 * r.s_tau_l2;
    const double noise_term = std::sqrt(r.theta * s2 + r.l_hat * r.l_hat * r.theta * r.theta);
    const double numerator = r.d_tau * r.d_tau * sqrt_d * r.s_tau_l2 + r.d_bar_tau * r.eta0 * noise_term;
    r.bound_core = numerator / (static_cast<double>(T) * r.eta0) * r.log_eta_ratio;
    return r;
}

nlohmann::json to_json(const TheoremReport& r) {
    nlohmann::json j;
    j["has_minimizer"] = r.has_minimizer;
    j["tau"] = r.tau;
    j["total_steps"] = r.total_steps;
    j["d_tau"] = r.d_tau;
    j["d_bar_tau"] = r.d_bar_tau;
    j["s_tau_l2"] = r.s_tau_l2;
    j["sum_grad_sq_tau"] = r.sum_grad_sq_tau;
    j["theta"] = r.theta;
    j["l_hat"] = r.l_hat;
    j["l_analytic"] = r.l_analytic ? nlohmann::json(*r.l_analytic) : nlohmann::json(nullptr);
    j["eta0"] = r.eta0;
    j["eta_T"] = r.eta_T;
    j["log_eta_ratio"] = r.log_eta_ratio;
    j["gap"] = r.gap;
    j["bound_core"] = r.bound_core;
    return j;
}

RateFit rate_fit(std::vector<std::pair<double, double>> points) {
    if (points.size() < 3) throw std::invalid_argument("rate_fit: need at least 3 points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].second > 0.0)) throw std::invalid_argument("rate_fit: gaps must be positive");
        if (!(points[i].first > 0.0)) throw std::invalid_argument("rate_fit: horizons must be positive");
        if (i > 0 && !(points[i].first > points[i - 1].first))
            throw std::invalid_argument("rate_fit: horizons must be strictly increasing");
    }
    const auto n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [T, gap] : points) {
        mx += std::log(T);
        my += std::log(gap);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [T, gap] : points) {
        const double dx = std::log(T) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(gap) - my);
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.alpha_hat = -fit.slope - 0.5;
    fit.points = std::move(points);
    return fit;
}

}  // namespace pfopt
