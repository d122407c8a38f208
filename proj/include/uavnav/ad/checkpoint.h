#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "uavnav/ad/tensor.h"

namespace uavnav::ad {

// File layout (all integers little-endian):
//   magic    8 bytes  "UAVNTNSR"
//   version  u32
//   count    u32
//   count x { name_len u32, name bytes, rank u32, dims u64[rank],
//             payload float32[prod(dims)] }
inline constexpr char kCheckpointMagic[8] = {'U', 'A', 'V', 'N', 'T', 'N', 'S', 'R'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

struct StoredTensor {
  std::string name;
  Shape shape;
  std::vector<float> values;
};

void save_tensors(const std::filesystem::path& path, std::span<const NamedTensor> tensors);

// Throws CheckpointError on missing files, bad magic, version mismatch or
// truncation.
std::vector<StoredTensor> read_tensors(const std::filesystem::path& path);

// Copies stored values into `targets` in place. Every target name must be
// present with an identical shape; extra stored tensors are an error too.
void load_tensors_into(const std::filesystem::path& path, std::span<const NamedTensor> targets);

std::uint32_t read_checkpoint_version(const std::filesystem::path& path);

}  // namespace uavnav::ad
