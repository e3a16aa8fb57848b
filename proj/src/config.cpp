#include "pfopt/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pfopt {

using nlohmann::json;

namespace {

std::string_view to_string(InitKind k) {
    switch (k) {
        case InitKind::zeros: return "zeros";
        case InitKind::constant: return "constant";
        case InitKind::gaussian: return "gaussian";
    }
    return "?";
}

InitKind parse_init_kind(std::string_view s) {
    for (auto k : {InitKind::zeros, InitKind::constant, InitKind::gaussian})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown init kind '" + std::string(s) + "'");
}

const json& section(const json& j, const char* key) {
    static const json empty = json::object();
    return j.contains(key) ? j.at(key) : empty;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig c;
    const json& p = section(j, "problem");
    c.problem.path = p.value("path", std::string{});
    if (p.contains("kind")) c.problem.kind = parse_problem_kind(p.at("kind").get<std::string>());
    c.problem.d = p.value("d", c.problem.d);
    c.problem.m = p.value("m", c.problem.m);
    c.problem.seed = p.value("seed", c.problem.seed);
    c.problem.l2_reg = p.value("l2_reg", c.problem.l2_reg);
    auto& syn = c.problem.synthetic;
    syn.mu = p.value("mu", syn.mu);
    syn.condition = p.value("condition", syn.condition);
    syn.margin = p.value("margin", syn.margin);
    syn.label_noise = p.value("label_noise", syn.label_noise);
    syn.hidden = p.value("hidden", syn.hidden);
    syn.l2_reg = c.problem.l2_reg;

    const json& n = section(j, "noise");
    if (n.contains("kind")) c.noise.kind = parse_noise_kind(n.at("kind").get<std::string>());
    c.noise.sigma = n.value("sigma", c.noise.sigma);
    c.noise.batch_size = n.value("batch_size", c.noise.batch_size);
    c.noise.seed = n.value("seed", c.noise.seed);

    c.optimizer = optimizer_config_from_json(section(j, "optimizer"));

    const json& s = section(j, "schedule");
    if (s.contains("kind")) c.schedule = parse_schedule_kind(s.at("kind").get<std::string>());
    c.warmup_steps = s.value("warmup_steps", c.warmup_steps);
    c.schedule_floor = s.value("floor", c.schedule_floor);

    const json& init = section(j, "init");
    if (init.contains("kind")) c.init.kind = parse_init_kind(init.at("kind").get<std::string>());
    c.init.value = init.value("value", c.init.value);

    c.total_steps = j.value("total_steps", c.total_steps);
    c.eval_every = j.value("eval_every", c.eval_every);
    c.run_seed = j.value("run_seed", c.run_seed);
    c.delta_conf = j.value("delta_conf", c.delta_conf);

    const json& o = section(j, "output");
    c.output.trace_csv = o.value("trace_csv", std::string{});
    c.output.summary_json = o.value("summary_json", std::string{});
    c.output.timing = o.value("timing", false);

    validate(c);
    return c;
}

json to_json(const ExperimentConfig& c) {
    json j;
    json& p = j["problem"];
    p["path"] = c.problem.path;
    p["kind"] = std::string(to_string(c.problem.kind));
    p["d"] = c.problem.d;
    p["m"] = c.problem.m;
    p["seed"] = c.problem.seed;
    p["l2_reg"] = c.problem.l2_reg;
    p["mu"] = c.problem.synthetic.mu;
    p["condition"] = c.problem.synthetic.condition;
    p["margin"] = c.problem.synthetic.margin;
    p["label_noise"] = c.problem.synthetic.label_noise;
    p["hidden"] = c.problem.synthetic.hidden;

    j["noise"] = {{"kind", std::string(to_string(c.noise.kind))},
                  {"sigma", c.noise.sigma},
                  {"batch_size", c.noise.batch_size},
                  {"seed", c.noise.seed}};
    j["optimizer"] = to_json(c.optimizer);
    j["schedule"] = {{"kind", std::string(to_string(c.schedule))},
                     {"warmup_steps", c.warmup_steps},
                     {"floor", c.schedule_floor}};
    j["init"] = {{"kind", std::string(to_string(c.init.kind))}, {"value", c.init.value}};
    j["total_steps"] = c.total_steps;
    j["eval_every"] = c.eval_every;
    j["run_seed"] = c.run_seed;
    j["delta_conf"] = c.delta_conf;
    j["output"] = {{"trace_csv", c.output.trace_csv},
                   {"summary_json", c.output.summary_json},
                   {"timing", c.output.timing}};
    return j;
}

void validate(const ExperimentConfig& c) {
    if (c.total_steps < 2) throw std::invalid_argument("config: total_steps must be >= 2");
    if (c.eval_every < 1) throw std::invalid_argument("config: eval_every must be >= 1");
    if (!(c.delta_conf > 0.0 && c.delta_conf <= 1.0)) throw std::invalid_argument("config: delta_conf must lie in (0, 1]");
    validate(c.optimizer);
    validate(c.schedule_spec());
}

std::string config_hash(const ExperimentConfig& cfg) {
    json j = to_json(cfg);
    j.erase("output");
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw std::runtime_error("'" + path.string() + "': " + e.what());
    }
}

void set_dotted(json& j, std::string_view dotted_key, json value) {
    if (dotted_key.empty()) throw std::invalid_argument("empty override key");
    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = dotted_key.find('.', start);
        const std::string part(dotted_key.substr(start, dot == std::string_view::npos ? dotted_key.npos : dot - start));
        if (part.empty()) throw std::invalid_argument("malformed override key '" + std::string(dotted_key) + "'");
        if (!node->is_object()) *node = json::object();
        if (dot == std::string_view::npos) {
            (*node)[part] = std::move(value);
            return;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

json parse_loose_value(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return json(std::string(text));
    }
}

void apply_override(json& j, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw std::invalid_argument("override must look like key=value, got '" + std::string(assignment) + "'");
    set_dotted(j, assignment.substr(0, eq), parse_loose_value(assignment.substr(eq + 1)));
}

}  // namespace pfopt
