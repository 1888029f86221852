#pragma once

#include <filesystem>
#include <string>

#include "csbss/separator.hpp"

namespace csbss {

/// "CSNN" checkpoint: magic, u16 version, u32 input_dim, u32 latent_dim, the
/// three network descriptors (u32 layer count, then per layer u32 in, u32 out,
/// u8 activation), u8 standardizer flag with 2*d f32 statistics, u64 parameter
/// count and the f32 parameter payload (encoder | decoder 1 | decoder 2).
/// All integers little-endian.
void save_checkpoint(const std::filesystem::path& path, const SeparatorModel& model);
SeparatorModel load_checkpoint(const std::filesystem::path& path);

}  // namespace csbss
