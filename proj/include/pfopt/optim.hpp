#pragma once

// Optimizer kernels: AdaGrad++, Adam++ (cumulative and EMA second moment),
// AdamW++, and the baselines SGD, AdaGrad, AdaGrad-Norm, DoG, Adam, AdamW.
//
// The ++ methods replace the learning rate with
//     r_t   = |x_t - x_0|_2 / sqrt(d)
//     eta_t = max(eta_{t-1}, c * r_t),   eta_{-1} = eps
// and divide the (momentum) gradient entrywise by delta + s_t.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pfopt/vecmath.hpp"

namespace pfopt {

enum class Algorithm { sgd, adagrad, adagrad_norm, dog, adam, adamw, adagradpp, adampp, adamwpp };
enum class AdamCase { case1, case2 };
enum class Eta0Rule { absolute, scaled_by_init };
enum class DecayMode { none, coupled, decoupled };

std::string_view to_string(Algorithm a);
std::string_view to_string(AdamCase c);
std::string_view to_string(Eta0Rule r);
std::string_view to_string(DecayMode m);
Algorithm parse_algorithm(std::string_view s);
AdamCase parse_adam_case(std::string_view s);
Eta0Rule parse_eta0_rule(std::string_view s);
DecayMode parse_decay_mode(std::string_view s);

// True for AdaGrad++, Adam++ and AdamW++.
bool is_parameter_free(Algorithm a);

struct OptimizerConfig {
    Algorithm algorithm = Algorithm::adagradpp;
    // eps; the initial eta (and DoG's initial distance surrogate)
    double eta0 = 1e-6;
    Eta0Rule eta0_rule = Eta0Rule::scaled_by_init;
    double delta = 1e-8;
    double beta1 = 0.9;
    double beta2 = 0.999;
    // beta1 decay: beta_{1t} = beta1 * lambda^t
    double lambda = 1.0;
    // c in eta_t = max(eta_{t-1}, c * r_t)
    double base_factor = 1.0;
    // tuned baselines only; AdaGrad-Norm reads it as D
    std::optional<double> lr;
    double weight_decay = 0.0;
    DecayMode decay_mode = DecayMode::none;
    AdamCase adam_case = AdamCase::case2;
    // Case 2: keep the running max of v (off gives s = sqrt((t+1) v))
    bool amsgrad_max = true;
    // baseline Adam/AdamW; off reproduces the uncorrected update
    bool bias_correction = true;

    friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

// Throws std::invalid_argument on an unusable config; returns warnings
// (e.g. beta1 >= sqrt(beta2) for Adam++, outside the convergence theory).
std::vector<std::string> validate(const OptimizerConfig& cfg);

struct OptimizerState {
    std::uint64_t t = 0;
    ParamVector x;
    ParamVector x0;
    // ++ methods: eta_t of the last step (eps before the first).
    // DoG: running max of eps and |x_i - x_0|_2. AdaGrad-Norm: D / sqrt(sum |g|^2).
    // Other baselines: lr.
    double eta = 0.0;
    // r_t of the last step
    double r = 0.0;
    // beta_{1t} of the last Adam++ step
    double beta1t = 0.0;
    // sum of g^2, entrywise (AdaGrad, AdaGrad++, Adam++ Case 1)
    ParamVector sum_sq;
    // current preconditioner denominator (without delta)
    ParamVector s;
    ParamVector m;
    ParamVector v;
    ParamVector v_max;
    // sum of |g|_2^2 (DoG, AdaGrad-Norm)
    double grad_sq_sum = 0.0;

    // not part of the logical state
    ParamVector scratch;

    std::size_t dim() const { return x.size(); }
};

// Initial eps after applying the eta0 rule.
double initial_eta(const OptimizerConfig& cfg, const ParamVector& x0);

OptimizerState init_state(const OptimizerConfig& cfg, const ParamVector& x0);

// r_t = |x_t - x_0|_2 / sqrt(d); eta_t = max(eta_{t-1}, c * r_t). Stores and returns eta_t.
double update_eta(OptimizerState& state, double c);

// The eta the next step would use, without mutating the state.
double peek_eta(const OptimizerState& state, const OptimizerConfig& cfg);

// Each step consumes g_t evaluated at the current x, advances t, and returns
// the new iterate. lr_mult scales the applied step only (schedules).
const ParamVector& step_adagradpp(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g,
                                  double lr_mult = 1.0);
const ParamVector& step_adampp(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g,
                               AdamCase which, double lr_mult = 1.0);
const ParamVector& step_sgd(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g,
                            double lr_mult = 1.0);
const ParamVector& step_adagrad(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g,
                                double lr_mult = 1.0);
const ParamVector& step_adam(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g,
                             double lr_mult = 1.0);
const ParamVector& step_adamw(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g,
                              double lr_mult = 1.0);
const ParamVector& step_dog(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g,
                            double lr_mult = 1.0);
const ParamVector& step_adagrad_norm(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g,
                                     double lr_mult = 1.0);

// Dispatches on cfg.algorithm.
const ParamVector& step(OptimizerState& state, const OptimizerConfig& cfg, const ParamVector& g,
                        double lr_mult = 1.0);

nlohmann::json to_json(const OptimizerConfig& cfg);
// Missing keys keep their defaults.
OptimizerConfig optimizer_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const OptimizerState& state);
OptimizerState optimizer_state_from_json(const nlohmann::json& j);

void save_snapshot(const std::filesystem::path& path, const OptimizerConfig& cfg, const OptimizerState& state);
std::pair<OptimizerConfig, OptimizerState> load_snapshot(const std::filesystem::path& path);

}  // namespace pfopt
