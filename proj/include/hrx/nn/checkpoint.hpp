// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hrx/nn/params.hpp"

namespace hrx::nn {

/// On-disk layout: "HRXM", version byte 1, one JSON header line
/// {"kind","config_hash","data_bytes","tensors":[{"name","shape","offset","trainable"}]}
/// terminated by '\n', then the tensors as little-endian float32 in manifest order.
struct Checkpoint {
    std::string kind;
    std::string config_hash;
    LayerParams params;
};

std::vector<unsigned char> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::vector<unsigned char>& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// Throws LoadError on bad magic, bad manifest or truncated data.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// FNV-1a of the serialized checkpoint; equal hashes mean bit-identical weights.
std::uint64_t checkpoint_hash(const Checkpoint& ckpt);

}  // namespace hrx::nn
