#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cutofflab/cutoff.hpp"
#include "cutofflab/sde.hpp"
#include "cutofflab/types.hpp"

namespace cutofflab {

struct RunConfig {
    SystemSpec system;
    double pPrime = 2.0;
    std::vector<double> epsilons = {1e-2, 1e-3};
    std::vector<double> rGrid = {-1.0, 0.0, 1.0, 2.0};
    std::vector<double> deltaGrid = {0.5, 2.0};
    double window = 1.0;
    int samples = 1000;
    double dt = 0.0;
    std::uint64_t seed = 1;
    int threads = 0;  // 0: available parallelism
    double horizonT = 0.0;
    double eta = 0.1;
    std::string outDir = ".";
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

std::string report_json(const RunConfig& config, const Analysis& analysis);

std::string curve_r_csv(const std::vector<CurveRow>& rows);
std::string curve_delta_csv(const std::vector<CurveRow>& rows);
std::string plot_script();

void write_file(const std::string& path, const std::string& content);

}  // namespace cutofflab
