#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "pfopt/optim.hpp"
#include "pfopt/problems.hpp"
#include "pfopt/schedule.hpp"

namespace pfopt {

struct ProblemSpec {
    // loaded from this JSON file when set; otherwise generated
    std::string path;
    ProblemKind kind = ProblemKind::quadratic;
    std::size_t d = 10;
    std::size_t m = 100;
    std::uint64_t seed = 0;
    double l2_reg = 0.0;
    SyntheticOptions synthetic;
};

enum class InitKind { zeros, constant, gaussian };

struct InitSpec {
    InitKind kind = InitKind::zeros;
    // constant fill, or the gaussian standard deviation
    double value = 1.0;
};

struct OutputSpec {
    std::string trace_csv;
    std::string summary_json;
    // include wall-clock seconds in the summary JSON (breaks byte-identity)
    bool timing = false;
};

struct ExperimentConfig {
    ProblemSpec problem;
    NoiseModel noise;
    OptimizerConfig optimizer;
    ScheduleKind schedule = ScheduleKind::constant;
    std::uint64_t warmup_steps = 0;
    double schedule_floor = 0.0;
    InitSpec init;
    std::uint64_t total_steps = 1000;
    std::uint64_t eval_every = 1;
    std::uint64_t run_seed = 0;
    // confidence level delta in theta
    double delta_conf = 0.1;
    OutputSpec output;

    Schedule schedule_spec() const { return {schedule, total_steps, warmup_steps, schedule_floor}; }
};

// Throws std::invalid_argument on unknown enum names or violated invariants
// (T >= 2, eval_every >= 1).
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);

void validate(const ExperimentConfig& cfg);

// FNV-1a over the canonical JSON of everything except the output block.
std::string config_hash(const ExperimentConfig& cfg);

nlohmann::json load_json_file(const std::filesystem::path& path);

// Sets j[a][b][c] for key "a.b.c", creating objects along the way.
void set_dotted(nlohmann::json& j, std::string_view dotted_key, nlohmann::json value);
// "key=value" with value parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& j, std::string_view assignment);
nlohmann::json parse_loose_value(std::string_view text);

}  // namespace pfopt
