#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sgn/numerics/adam.hpp"
#include "sgn/numerics/tensor.hpp"

namespace sgn {

inline constexpr char kCheckpointMagic[] = "SGNCKPT1";
inline constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
struct Checkpoint {
  std::string config_text;  // resolved run configuration, echoed verbatim
  std::uint64_t epoch = 0;  // last completed epoch
  std::string metrics;      // metrics CSV up to `epoch`
  std::vector<NamedTensor<T>> tensors;
  std::optional<AdamState<T>> optimizer;
};

// Binary container: magic, version, element width, config, epoch, metrics,
// named tensors, optional optimizer moments, then the SHA-256 of all preceding
// bytes as 64 hex characters.
template <typename T>
std::string serialize_checkpoint(const Checkpoint<T>& ckpt);

// Verifies the digest and schema; a truncated or altered file is a SchemaError.
template <typename T>
Checkpoint<T> deserialize_checkpoint(const std::string& bytes);

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const Checkpoint<T>& ckpt);

template <typename T>
Checkpoint<T> load_checkpoint(const std::filesystem::path& path);

// One line per tensor: name, shape, element count, trainable flag. For diffing.
template <typename T>
std::string parameter_manifest(const std::vector<NamedTensor<T>>& tensors);

}  // namespace sgn
