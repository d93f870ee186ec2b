#pragma once

#include "idl/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace idl {

struct PcmAudio {
  std::uint32_t sample_rate = 0;
  std::vector<double> samples; // scaled to [-1, 1) by 1/32768
};

/// Reads a mono 16-bit PCM RIFF/WAVE file.
PcmAudio read_wav(const std::filesystem::path& path);

/// N frames of D consecutive samples at seeded uniform offsets. Frames with
/// norm below 1e-8 are redrawn; after 100 N draws in total the call fails.
DataMatrix frames_from_samples(std::span<const double> samples, Index frame_len, Index num_frames,
                               std::uint64_t seed);

DataMatrix ingest_wav(const std::filesystem::path& path, Index frame_len, Index num_frames, std::uint64_t seed);

} // namespace idl
