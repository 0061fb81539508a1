#ifndef RACER_CHECKPOINT_HPP_
#define RACER_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include "racer/nn.hpp"

namespace racer {

inline constexpr uint32_t kCheckpointVersion = 1;

// Binary "RDNN" file (magic, version, tensor count, per-tensor dims + f32
// little-endian data) with a JSON sidecar (same path + ".json") recording the
// architecture spec and the RNG seed the net was created from.
void save_checkpoint(const PolicyNet& net, const std::filesystem::path& path, uint64_t rng_seed);

PolicyNet load_checkpoint(const std::filesystem::path& path, uint64_t* rng_seed_out = nullptr);

}  // namespace racer

#endif  // RACER_CHECKPOINT_HPP_
