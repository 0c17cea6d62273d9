#pragma once

/**
 * @file presets.hpp
 * @brief Named simulation designs and their JSON form.
 *
 *   main-homogeneous   100 x 100, sizes 3,6,6,8,10,10,12,12,14,19 on both axes,
 *   main-proportional  U = toeplitz(-0.4), V = toeplitz(0.3), noise mean 15
 *   main-random        (random: h = 0.87)
 *   supp-table1        30 x 30, sizes 4,6,9,11, decays -0.2 / 0.2, proportional
 *   tensor-g32         15 x 10 x 10, sizes 3,3,4,5 / 2,3,5 / 3,3,4,
 *                      decays -0.4, 0.3, -0.2, noise variance 15
 *   nested-g23         40 x 100; rows 3,4,5,8,3,4,5,8 inside two mean blocks of
 *                      20; columns 3,4,5,5,5,5,5,6,6,6 twice inside two mean
 *                      blocks of 50; block means [[2,-2],[-2,2]]; decays
 *                      -0.4 / 0.3; homogeneous noise 15
 */

#include <optional>
#include <string>
#include <vector>

#include "covclust/cli/dataset_io.hpp"
#include "covclust/simulate.hpp"

namespace covclust::cli {

struct Preset {
    std::string name;
    bool tensor = false;
    SimConfig matrix;
    TensorSimConfig tensor_config;
};

std::vector<std::string> preset_names();

/// Throws ArgumentError for an unknown name.
Preset find_preset(const std::string& name);

Json to_json(const SimConfig& config);
Json to_json(const TensorSimConfig& config);

/// Fields present in `overrides` replace those of `base`; unknown keys throw ArgumentError.
SimConfig apply_overrides(SimConfig base, const Json& overrides);
TensorSimConfig apply_overrides(TensorSimConfig base, const Json& overrides);

/// Simulates a preset and packages data, truth and provenance.
DatasetFile simulate_preset(const Preset& preset);

}  // namespace covclust::cli
