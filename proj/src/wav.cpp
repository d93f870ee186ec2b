#include "idl/wav.hpp"

#include "idl/errors.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <random>
#include <string>

namespace idl {
namespace {

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

} // namespace

PcmAudio read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  const std::string name = path.string();

  std::array<unsigned char, 12> riff{};
  if (!in.read(reinterpret_cast<char*>(riff.data()), riff.size()) || std::memcmp(riff.data(), "RIFF", 4) != 0 ||
      std::memcmp(riff.data() + 8, "WAVE", 4) != 0)
    throw ValidationError(name + ": not a RIFF/WAVE file");

  PcmAudio audio;
  bool have_format = false;
  std::array<unsigned char, 8> header{};
  while (in.read(reinterpret_cast<char*>(header.data()), header.size())) {
    const std::uint32_t size = le32(header.data() + 4);
    if (std::memcmp(header.data(), "fmt ", 4) == 0) {
      if (size < 16)
        throw ValidationError(name + ": malformed fmt chunk");
      std::vector<unsigned char> fmt(size);
      if (!in.read(reinterpret_cast<char*>(fmt.data()), size))
        throw ValidationError(name + ": truncated fmt chunk");
      const std::uint16_t encoding = le16(fmt.data());
      const std::uint16_t channels = le16(fmt.data() + 2);
      const std::uint16_t bits = le16(fmt.data() + 14);
      if (encoding != 1 || channels != 1 || bits != 16)
        throw ValidationError(name + ": only mono 16-bit PCM is supported (format " + std::to_string(encoding) +
                              ", " + std::to_string(channels) + " channels, " + std::to_string(bits) + " bits)");
      audio.sample_rate = le32(fmt.data() + 4);
      have_format = true;
    } else if (std::memcmp(header.data(), "data", 4) == 0) {
      if (!have_format)
        throw ValidationError(name + ": data chunk precedes fmt chunk");
      std::vector<unsigned char> bytes(size);
      in.read(reinterpret_cast<char*>(bytes.data()), size);
      // Tolerate a data size field that overstates a truncated payload.
      const auto got = static_cast<std::size_t>(in.gcount()) / 2;
      audio.samples.resize(got);
      for (std::size_t i = 0; i < got; ++i)
        audio.samples[i] = static_cast<std::int16_t>(le16(bytes.data() + 2 * i)) / 32768.0;
      return audio;
    } else {
      in.seekg(size, std::ios::cur);
    }
    if (size & 1u)
      in.seekg(1, std::ios::cur);
  }
  throw ValidationError(name + ": no data chunk");
}

DataMatrix frames_from_samples(std::span<const double> samples, Index frame_len, Index num_frames,
                               std::uint64_t seed) {
  if (frame_len < 1 || num_frames < 1)
    throw ValidationError("frame length and frame count must be positive");
  if (static_cast<Index>(samples.size()) < frame_len)
    throw ValidationError("audio has " + std::to_string(samples.size()) + " samples, fewer than the frame length " +
                          std::to_string(frame_len));

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> offset(0, samples.size() - static_cast<std::size_t>(frame_len));
  Matrix frames(frame_len, num_frames);
  const Index budget = 100 * num_frames;
  Index draws = 0;
  for (Index n = 0; n < num_frames; ++n) {
    while (true) {
      if (draws++ >= budget)
        throw ValidationError("audio is silent: no frame with nonzero energy after " + std::to_string(budget) +
                              " draws");
      const std::size_t at = offset(rng);
      for (Index i = 0; i < frame_len; ++i)
        frames(i, n) = samples[at + static_cast<std::size_t>(i)];
      if (frames.col(n).norm() >= 1e-8)
        break;
    }
  }
  return DataMatrix(std::move(frames));
}

DataMatrix ingest_wav(const std::filesystem::path& path, Index frame_len, Index num_frames, std::uint64_t seed) {
  const PcmAudio audio = read_wav(path);
  return frames_from_samples(audio.samples, frame_len, num_frames, seed);
}

} // namespace idl
