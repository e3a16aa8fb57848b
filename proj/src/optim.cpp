#include "pfopt/optim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pfopt/kernels.hpp"

namespace pfopt {
namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const Enum (&all)[N], const char* what) {
    for (Enum e : all)
        if (to_string(e) == s) return e;
    throw std::invalid_argument(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

void require_gradient(const OptimizerState& state, const ParamVector& g) {
    require_same_length(state.dim(), g.size(), "optimizer step");
    if (!all_finite(g.span())) throw std::domain_error("optimizer step: non-finite gradient");
}

double require_lr(const OptimizerConfig& cfg) {
    if (!cfg.lr) throw std::invalid_argument(std::string(to_string(cfg.algorithm)) + " requires lr");
    return *cfg.lr;
}

// Gradient after optional coupled decay (g + wd * x). Returns g itself when
// no decay is configured.
const ParamVector& effective_gradient(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g) {
    if (cfg.decay_mode != DecayMode::coupled || cfg.weight_decay == 0.0) return g;
    state.scratch = g;
    axpy(cfg.weight_decay, state.x.span(), state.scratch.span());
    return state.scratch;
}

// x <- x - rate * wd * x_old
void decoupled_decay(OptimizerState& state, double rate, double weight_decay) {
    if (weight_decay == 0.0) return;
    const double shrink = rate * weight_decay;
    auto& k = kernels::active();
    k.axpy(-shrink, state.x.data(), state.x.data(), state.dim());
}

}  // namespace

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::sgd: return "sgd";
        case Algorithm::adagrad: return "adagrad";
        case Algorithm::adagrad_norm: return "adagrad_norm";
        case Algorithm::dog: return "dog";
        case Algorithm::adam: return "adam";
        case Algorithm::adamw: return "adamw";
        case Algorithm::adagradpp: return "adagrad++";
        case Algorithm::adampp: return "adam++";
        case Algorithm::adamwpp: return "adamw++";
    }
    return "?";
}

std::string_view to_string(AdamCase c) { return c == AdamCase::case1 ? "case1" : "case2"; }

std::string_view to_string(Eta0Rule r) { return r == Eta0Rule::absolute ? "absolute" : "scaled_by_init"; }

std::string_view to_string(DecayMode m) {
    switch (m) {
        case DecayMode::none: return "none";
        case DecayMode::coupled: return "coupled";
        case DecayMode::decoupled: return "decoupled";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view s) {
    static constexpr Algorithm all[] = {Algorithm::sgd,  Algorithm::adagrad, Algorithm::adagrad_norm,
                                        Algorithm::dog,  Algorithm::adam,    Algorithm::adamw,
                                        Algorithm::adagradpp, Algorithm::adampp, Algorithm::adamwpp};
    return parse_enum(s, all, "algorithm");
}

AdamCase parse_adam_case(std::string_view s) {
    static constexpr AdamCase all[] = {AdamCase::case1, AdamCase::case2};
    return parse_enum(s, all, "adam case");
}

Eta0Rule parse_eta0_rule(std::string_view s) {
    static constexpr Eta0Rule all[] = {Eta0Rule::absolute, Eta0Rule::scaled_by_init};
    return parse_enum(s, all, "eta0 rule");
}

DecayMode parse_decay_mode(std::string_view s) {
    static constexpr DecayMode all[] = {DecayMode::none, DecayMode::coupled, DecayMode::decoupled};
    return parse_enum(s, all, "decay mode");
}

bool is_parameter_free(Algorithm a) {
    return a == Algorithm::adagradpp || a == Algorithm::adampp || a == Algorithm::adamwpp;
}

std::vector<std::string> validate(const OptimizerConfig& cfg) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("invalid optimizer config: " + msg); };
    if (!(cfg.eta0 > 0.0) || !std::isfinite(cfg.eta0)) fail("eta0 must be positive");
    if (!(cfg.delta >= 0.0)) fail("delta must be nonnegative");
    if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0)) fail("beta1 must lie in [0, 1)");
    if (!(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) fail("beta2 must lie in [0, 1)");
    if (!(cfg.lambda > 0.0 && cfg.lambda <= 1.0)) fail("lambda must lie in (0, 1]");
    if (!(cfg.base_factor > 0.0)) fail("base_factor must be positive");
    if (!(cfg.weight_decay >= 0.0)) fail("weight_decay must be nonnegative");
    if (cfg.lr && !(*cfg.lr > 0.0)) fail("lr must be positive");

    switch (cfg.algorithm) {
        case Algorithm::sgd:
        case Algorithm::adagrad:
        case Algorithm::adagrad_norm:
        case Algorithm::adam:
        case Algorithm::adamw:
            if (!cfg.lr) fail(std::string(to_string(cfg.algorithm)) + " requires lr");
            break;
        default:
            break;
    }

    std::vector<std::string> warnings;
    if ((cfg.algorithm == Algorithm::adampp || cfg.algorithm == Algorithm::adamwpp) &&
        !(cfg.beta1 < std::sqrt(cfg.beta2))) {
        warnings.emplace_back("beta1 >= sqrt(beta2): outside the Adam++ convergence guarantee");
    }
    if (cfg.delta == 0.0) warnings.emplace_back("delta = 0: the first gradient must be nonzero in every coordinate");
    return warnings;
}

double initial_eta(const OptimizerConfig& cfg, const ParamVector& x0) {
    if (cfg.eta0_rule == Eta0Rule::scaled_by_init) return cfg.eta0 * (1.0 + squared_l2_norm(x0.span()));
    return cfg.eta0;
}

OptimizerState init_state(const OptimizerConfig& cfg, const ParamVector& x0) {
    validate(cfg);
    if (x0.empty()) throw std::invalid_argument("init_state: x0 must be nonempty");
    const std::size_t d = x0.size();
    OptimizerState st;
    st.x = x0;
    st.x0 = x0;
    st.sum_sq = ParamVector(d);
    st.s = ParamVector(d);
    st.m = ParamVector(d);
    st.v = ParamVector(d);
    st.v_max = ParamVector(d);
    switch (cfg.algorithm) {
        case Algorithm::adagradpp:
        case Algorithm::adampp:
        case Algorithm::adamwpp:
        case Algorithm::dog:
            st.eta = initial_eta(cfg, x0);
            break;
        default:
            st.eta = cfg.lr.value_or(0.0);
            break;
    }
    return st;
}

double update_eta(OptimizerState& state, double c) {
    const double dist = l2_distance(state.x.span(), state.x0.span());
    state.r = dist / std::sqrt(static_cast<double>(state.dim()));
    state.eta = std::max(state.eta, c * state.r);
    return state.eta;
}

double peek_eta(const OptimizerState& state, const OptimizerConfig& cfg) {
    const double dist = l2_distance(state.x.span(), state.x0.span());
    if (is_parameter_free(cfg.algorithm))
        return std::max(state.eta, cfg.base_factor * (dist / std::sqrt(static_cast<double>(state.dim()))));
    if (cfg.algorithm == Algorithm::dog) return std::max(state.eta, dist);
    return state.eta;
}

const ParamVector& step_adagradpp(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g,
                                  double lr_mult) {
    require_gradient(state, g);
    const auto& k = kernels::active();
    const std::size_t d = state.dim();
    const ParamVector& grad = effective_gradient(state, cfg, g);

    const double eta = update_eta(state, cfg.base_factor);
    k.accumulate_square(grad.data(), state.sum_sq.data(), d);
    k.sqrt(state.sum_sq.data(), state.s.data(), d);
    if (cfg.decay_mode == DecayMode::decoupled) decoupled_decay(state, lr_mult * eta, cfg.weight_decay);
    k.adaptive_step(lr_mult * eta, grad.data(), state.s.data(), cfg.delta, state.x.data(), d);
    ++state.t;
    return state.x;
}

const ParamVector& step_adampp(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g,
                               AdamCase which, double lr_mult) {
    require_gradient(state, g);
    const auto& k = kernels::active();
    const std::size_t d = state.dim();
    const ParamVector& grad = effective_gradient(state, cfg, g);

    const double eta = update_eta(state, cfg.base_factor);
    state.beta1t = cfg.lambda == 1.0 ? cfg.beta1 : cfg.beta1 * std::pow(cfg.lambda, static_cast<double>(state.t));
    k.ema(state.beta1t, grad.data(), state.m.data(), d);

    if (which == AdamCase::case1) {
        k.accumulate_square(grad.data(), state.sum_sq.data(), d);
        k.sqrt(state.sum_sq.data(), state.s.data(), d);
    } else {
        k.ema_square(cfg.beta2, grad.data(), state.v.data(), d);
        if (cfg.amsgrad_max)
            k.max(state.v_max.data(), state.v.data(), state.v_max.data(), d);
        else
            state.v_max = state.v;
        k.scaled_sqrt(static_cast<double>(state.t + 1), state.v_max.data(), state.s.data(), d);
    }

    const bool decoupled = cfg.algorithm == Algorithm::adamwpp || cfg.decay_mode == DecayMode::decoupled;
    if (decoupled) decoupled_decay(state, lr_mult * eta, cfg.weight_decay);
    k.adaptive_step(lr_mult * eta, state.m.data(), state.s.data(), cfg.delta, state.x.data(), d);
    ++state.t;
    return state.x;
}

const ParamVector& step_sgd(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g,
                            double lr_mult) {
    require_gradient(state, g);
    const double lr = require_lr(cfg);
    const ParamVector& grad = effective_gradient(state, cfg, g);
    if (cfg.decay_mode == DecayMode::decoupled) decoupled_decay(state, lr_mult * lr, cfg.weight_decay);
    axpy(-lr_mult * lr, grad.span(), state.x.span());
    ++state.t;
    return state.x;
}

const ParamVector& step_adagrad(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g,
                                double lr_mult) {
    require_gradient(state, g);
    const double lr = require_lr(cfg);
    const auto& k = kernels::active();
    const std::size_t d = state.dim();
    const ParamVector& grad = effective_gradient(state, cfg, g);
    k.accumulate_square(grad.data(), state.sum_sq.data(), d);
    k.sqrt(state.sum_sq.data(), state.s.data(), d);
    if (cfg.decay_mode == DecayMode::decoupled) decoupled_decay(state, lr_mult * lr, cfg.weight_decay);
    k.adaptive_step(lr_mult * lr, grad.data(), state.s.data(), cfg.delta, state.x.data(), d);
    ++state.t;
    return state.x;
}

namespace {

const ParamVector& adam_update(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& grad,
                               double lr_mult, bool decoupled) {
    const double lr = require_lr(cfg);
    const auto& k = kernels::active();
    const std::size_t d = state.dim();
    k.ema(cfg.beta1, grad.data(), state.m.data(), d);
    k.ema_square(cfg.beta2, grad.data(), state.v.data(), d);

    const double step_no = static_cast<double>(state.t + 1);
    const double bc1 = cfg.bias_correction ? 1.0 - std::pow(cfg.beta1, step_no) : 1.0;
    const double bc2 = cfg.bias_correction ? 1.0 - std::pow(cfg.beta2, step_no) : 1.0;
    k.scaled_sqrt(1.0 / bc2, state.v.data(), state.s.data(), d);

    if (decoupled) decoupled_decay(state, lr_mult * lr, cfg.weight_decay);
    if (bc1 == 1.0) {
        k.adaptive_step(lr_mult * lr, state.m.data(), state.s.data(), cfg.delta, state.x.data(), d);
    } else {
        state.scratch = ParamVector(d);
        for (std::size_t i = 0; i < d; ++i) state.scratch[i] = state.m[i] / bc1;
        k.adaptive_step(lr_mult * lr, state.scratch.data(), state.s.data(), cfg.delta, state.x.data(), d);
    }
    ++state.t;
    return state.x;
}

}  // namespace

const ParamVector& step_adam(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g,
                             double lr_mult) {
    require_gradient(state, g);
    const ParamVector grad = effective_gradient(state, cfg, g);
    return adam_update(state, cfg, grad, lr_mult, cfg.decay_mode == DecayMode::decoupled);
}

const ParamVector& step_adamw(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g,
                              double lr_mult) {
    require_gradient(state, g);
    return adam_update(state, cfg, g, lr_mult, true);
}

const ParamVector& step_dog(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g,
                            double lr_mult) {
    require_gradient(state, g);
    const ParamVector& grad = effective_gradient(state, cfg, g);
    const double dist = l2_distance(state.x.span(), state.x0.span());
    state.r = dist;
    state.eta = std::max(state.eta, dist);
    state.grad_sq_sum += squared_l2_norm(grad.span());
    state.s = ParamVector(1, std::sqrt(state.grad_sq_sum));
    if (state.grad_sq_sum > 0.0) {
        const double step_size = state.eta / std::sqrt(state.grad_sq_sum);
        if (cfg.decay_mode == DecayMode::decoupled) decoupled_decay(state, lr_mult * step_size, cfg.weight_decay);
        axpy(-lr_mult * step_size, grad.span(), state.x.span());
    } else if (state.eta == 0.0) {
        throw std::domain_error("step_dog: zero gradient accumulator with zero initial distance");
    }
    ++state.t;
    return state.x;
}

const ParamVector& step_adagrad_norm(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g,
                                     double lr_mult) {
    require_gradient(state, g);
    const double scale = require_lr(cfg);
    const ParamVector& grad = effective_gradient(state, cfg, g);
    state.grad_sq_sum += squared_l2_norm(grad.span());
    state.s = ParamVector(1, std::sqrt(state.grad_sq_sum));
    if (state.grad_sq_sum > 0.0) {
        state.eta = scale / std::sqrt(state.grad_sq_sum);
        if (cfg.decay_mode == DecayMode::decoupled) decoupled_decay(state, lr_mult * state.eta, cfg.weight_decay);
        axpy(-lr_mult * state.eta, grad.span(), state.x.span());
    }
    ++state.t;
    return state.x;
}

const ParamVector& step(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g, double lr_mult) {
    switch (cfg.algorithm) {
        case Algorithm::sgd: return step_sgd(state, cfg, g, lr_mult);
        case Algorithm::adagrad: return step_adagrad(state, cfg, g, lr_mult);
        case Algorithm::adagrad_norm: return step_adagrad_norm(state, cfg, g, lr_mult);
        case Algorithm::dog: return step_dog(state, cfg, g, lr_mult);
        case Algorithm::adam: return step_adam(state, cfg, g, lr_mult);
        case Algorithm::adamw: return step_adamw(state, cfg, g, lr_mult);
        case Algorithm::adagradpp: return step_adagradpp(state, cfg, g, lr_mult);
        case Algorithm::adampp:
        case Algorithm::adamwpp: return step_adampp(state, cfg, g, cfg.adam_case, lr_mult);
    }
    throw std::logic_error("step: unknown algorithm");
}

}  // namespace pfopt
