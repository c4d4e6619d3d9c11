#ifndef ANCHORREFINE_DIFFNET_CHECKPOINT_H_
#define ANCHORREFINE_DIFFNET_CHECKPOINT_H_

// Checkpoint file layout (all text lines end in '\n'):
//
//   ARCKPT
//   <format version>
//   <config hash, 16 lowercase hex digits>
//   <name> <shape, dims joined by 'x'> <byte offset> <byte length>   (1/param)
//   ---
//   <blob: little-endian IEEE-754 binary64 values, manifest order>
//
// Offsets are relative to the first blob byte. Parameters appear in
// lexicographic name order.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anchorrefine/diffnet/param_store.h"

namespace anchorrefine::diffnet {

inline constexpr std::string_view kCheckpointMagic = "ARCKPT";
inline constexpr int kCheckpointVersion = 1;
inline constexpr std::string_view kCheckpointSeparator = "---";

struct CheckpointEntry {
  std::string name;
  std::vector<int64_t> shape;
  int64_t offset = 0;
  int64_t length = 0;
};

struct Checkpoint {
  int version = kCheckpointVersion;
  uint64_t config_hash = 0;
  std::vector<CheckpointEntry> manifest;
  ParamStore params;
};

// Serializes every tensor whose name starts with one of `prefixes`.
std::string SerializeCheckpoint(const ParamStore& params,
                                const std::vector<std::string>& prefixes,
                                uint64_t config_hash);
void SaveCheckpoint(const std::string& path, const ParamStore& params,
                    const std::vector<std::string>& prefixes,
                    uint64_t config_hash);

// Parses a checkpoint; throws ConfigError on malformed input.
Checkpoint ParseCheckpoint(std::string_view bytes);
Checkpoint ReadCheckpoint(const std::string& path);

// Copies checkpoint values into `into`. Every checkpoint entry must exist in
// `into` with an identical shape, and every entry of `into` under each of
// `required_prefixes` must be present in the checkpoint. When
// `expected_hash` is set the stored hash must match. Violations throw
// ConfigError.
void LoadCheckpoint(const Checkpoint& ckpt, ParamStore& into,
                    const std::vector<std::string>& required_prefixes,
                    std::optional<uint64_t> expected_hash = std::nullopt);

}  // namespace anchorrefine::diffnet

#endif  // ANCHORREFINE_DIFFNET_CHECKPOINT_H_
