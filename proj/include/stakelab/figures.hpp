#pragma once
// Config-driven experiment runner. Each figure name maps to a pinned
// configuration grid; the runner emits an estimates CSV plus a JSON
// manifest. --scale thins grids and replicate counts for desk-scale runs.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace stakelab {

struct UnknownFigure : std::invalid_argument {
    explicit UnknownFigure(const std::string& name)
        : std::invalid_argument("unknown figure: " + name) {}
};

inline constexpr std::uint64_t kDefaultMasterSeed = 20240817ULL;

struct FigureOverrides {
    double scale = 1.0;
    std::optional<std::int64_t> replicates;
    std::uint64_t seed = kDefaultMasterSeed;
    std::string out_dir = ".";
};

struct FigureResult {
    std::string name;
    nlohmann::json config;
    std::vector<std::string> outputs;
};

const std::vector<std::string>& figure_names();

FigureResult run_figure(const std::string& name, const FigureOverrides& overrides);

// Grid/replicate thinning used by --scale (kept public for the CLI and tests).
std::vector<double> thin_grid(const std::vector<double>& grid, double scale);
std::int64_t scale_replicates(std::int64_t replicates, double scale);

}  // namespace stakelab
