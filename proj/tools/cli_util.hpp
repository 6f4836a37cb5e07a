#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hybran/box.hpp"
#include "hybran/reach.hpp"

namespace hybran::cli {

/// Parses the box grammar "lo1,hi1;lo2,hi2;...". Throws std::invalid_argument.
Box parse_box(const std::string& text);

/// Parses "v1,v2,...".
std::vector<double> parse_vector(const std::string& text);

std::string default_box_text(const Box& b);

/// ISO 8601 UTC timestamp.
std::string timestamp_utc();

/// One manifest JSON per run, written next to the primary output.
struct Manifest {
    std::string command;
    std::uint64_t seed = 0;
    nlohmann::json config;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    nlohmann::json timings;

    void write(const std::filesystem::path& path) const;
};

/// Reach-set plot: one rectangle per fragment, optional simulated
/// trajectories as polylines. The data->pixel affine transform is recorded in
/// the SVG metadata element.
std::string render_reach_svg(const ReachSet& rs,
                             const std::vector<std::vector<std::vector<double>>>& overlays);

}  // namespace hybran::cli
