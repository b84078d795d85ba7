#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>

#include "sl2limits/tower.hpp"

namespace sl2limits {

/// Shared experiment configuration; defaults are filled deterministically
/// and echoed into every report.
struct ExperimentConfig {
    long p = 5;
    ExtensionKind ext = ExtensionKind::Unramified;
    int precision = 40;
    std::uint64_t seed = 20240601;
    int samples = 500;
    long n_min = 1;
    long n_max = 10;
    int rounds = 30;
    int cap = 400;
    long ball_radius = 6;
    int bfs_radius = 12;
    int dot_radius = 2;

    TowerContextPtr tower() const;
    nlohmann::json echo() const;

    static ExperimentConfig from_json(const nlohmann::json& j);
};

ExtensionKind parse_extension(const std::string& name);

/// Each experiment returns a machine-readable report: experiment name, the
/// claim it checks, the config echo, per-item records and verdicts, and an
/// overall "pass" flag derived only from the recorded data.
nlohmann::json run_classify(const ExperimentConfig& cfg, const nlohmann::json& params);
nlohmann::json run_fixed_group(const ExperimentConfig& cfg);
nlohmann::json run_orbits(const ExperimentConfig& cfg);
nlohmann::json run_polar(const ExperimentConfig& cfg);
nlohmann::json run_limits_padic(const ExperimentConfig& cfg);
nlohmann::json run_limits_real(const ExperimentConfig& cfg);
nlohmann::json run_tree_dot(const ExperimentConfig& cfg);

}  // namespace sl2limits
