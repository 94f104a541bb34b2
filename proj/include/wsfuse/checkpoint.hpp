#pragma once

#include <string>

#include "wsfuse/orchestrator.hpp"

namespace wsfuse {

// Length-prefixed binary container: magic, format version, TrainConfig, all
// network parameters, optimizer moments, epoch counter, RNG state, and the
// frozen training subset. save(load(p)) is byte-identical to p.
void save_checkpoint(const TrainState& state, const std::string& path);
TrainState load_checkpoint(const std::string& path);

}  // namespace wsfuse
