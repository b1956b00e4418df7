#pragma once

#include <vector>

#include "pbgsim/config.hpp"

namespace pbgsim {

// Preset scan configurations, addressable from the CLI as `figure <id>`.
// Ids 2..12 cover the standard squeezing and photon-statistics maps of the
// band-gap device; anything else throws std::invalid_argument.
Config figure_recipe(int id);

const std::vector<int>& figure_ids();

}  // namespace pbgsim
