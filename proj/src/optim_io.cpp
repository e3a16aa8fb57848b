#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pfopt/optim.hpp"

namespace pfopt {

using nlohmann::json;

json to_json(const OptimizerConfig& cfg) {
    json j;
    j["algorithm"] = std::string(to_string(cfg.algorithm));
    j["eta0"] = cfg.eta0;
    j["eta0_rule"] = std::string(to_string(cfg.eta0_rule));
    j["delta"] = cfg.delta;
    j["beta1"] = cfg.beta1;
    j["beta2"] = cfg.beta2;
    j["lambda"] = cfg.lambda;
    j["base_factor"] = cfg.base_factor;
    j["lr"] = cfg.lr ? json(*cfg.lr) : json(nullptr);
    j["weight_decay"] = cfg.weight_decay;
    j["decay_mode"] = std::string(to_string(cfg.decay_mode));
    j["adam_case"] = std::string(to_string(cfg.adam_case));
    j["amsgrad_max"] = cfg.amsgrad_max;
    j["bias_correction"] = cfg.bias_correction;
    return j;
}

OptimizerConfig optimizer_config_from_json(const json& j) {
    OptimizerConfig cfg;
    if (j.contains("algorithm")) cfg.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    cfg.eta0 = j.value("eta0", cfg.eta0);
    if (j.contains("eta0_rule")) cfg.eta0_rule = parse_eta0_rule(j.at("eta0_rule").get<std::string>());
    cfg.delta = j.value("delta", cfg.delta);
    cfg.beta1 = j.value("beta1", cfg.beta1);
    cfg.beta2 = j.value("beta2", cfg.beta2);
    cfg.lambda = j.value("lambda", cfg.lambda);
    cfg.base_factor = j.value("base_factor", cfg.base_factor);
    if (j.contains("lr") && !j.at("lr").is_null()) cfg.lr = j.at("lr").get<double>();
    cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
    if (j.contains("decay_mode")) cfg.decay_mode = parse_decay_mode(j.at("decay_mode").get<std::string>());
    if (j.contains("adam_case")) cfg.adam_case = parse_adam_case(j.at("adam_case").get<std::string>());
    cfg.amsgrad_max = j.value("amsgrad_max", cfg.amsgrad_max);
    cfg.bias_correction = j.value("bias_correction", cfg.bias_correction);
    return cfg;
}

json to_json(const OptimizerState& st) {
    json j;
    j["t"] = st.t;
    j["x"] = st.x.values();
    j["x0"] = st.x0.values();
    j["eta"] = st.eta;
    j["r"] = st.r;
    j["beta1t"] = st.beta1t;
    j["sum_sq"] = st.sum_sq.values();
    j["s"] = st.s.values();
    j["m"] = st.m.values();
    j["v"] = st.v.values();
    j["v_max"] = st.v_max.values();
    j["grad_sq_sum"] = st.grad_sq_sum;
    return j;
}

OptimizerState optimizer_state_from_json(const json& j) {
    OptimizerState st;
    auto vec = [&](const char* key) { return ParamVector(j.at(key).get<std::vector<double>>()); };
    st.t = j.at("t").get<std::uint64_t>();
    st.x = vec("x");
    st.x0 = vec("x0");
    st.eta = j.at("eta").get<double>();
    st.r = j.at("r").get<double>();
    st.beta1t = j.at("beta1t").get<double>();
    st.sum_sq = vec("sum_sq");
    st.s = vec("s");
    st.m = vec("m");
    st.v = vec("v");
    st.v_max = vec("v_max");
    st.grad_sq_sum = j.at("grad_sq_sum").get<double>();
    const std::size_t d = st.x.size();
    for (const ParamVector* p : {&st.x0, &st.sum_sq, &st.m, &st.v, &st.v_max})
        require_same_length(d, p->size(), "optimizer snapshot");
    return st;
}

void save_snapshot(const std::filesystem::path& path, const OptimizerConfig& cfg, const OptimizerState& state) {
    json j;
    j["config"] = to_json(cfg);
    j["state"] = to_json(state);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << j.dump(1) << '\n';
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::pair<OptimizerConfig, OptimizerState> load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const json j = json::parse(buf.str());
    return {optimizer_config_from_json(j.at("config")), optimizer_state_from_json(j.at("state"))};
}

}  // namespace pfopt
