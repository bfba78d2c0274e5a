#pragma once

// Mono waveforms, sample-accurate mixing, linear resampling and PCM16 WAV I/O.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace diarkit {

inline constexpr int kDefaultSampleRate = 16000;
inline constexpr float kMixPeakLimit = 0.99f;

struct Waveform {
  std::vector<float> samples;
  int sample_rate = kDefaultSampleRate;

  double duration() const noexcept {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
  float peak() const noexcept;

  bool operator==(const Waveform&) const = default;
};

// Throws Error(InvalidArgument) on a non-positive rate or a sample outside
// [-1, 1] (or NaN).
void validate_waveform(const Waveform& waveform);

struct PlacedWaveform {
  Waveform waveform;
  double onset = 0.0;
};

// Sums the inputs at their onsets (rounded to the nearest sample). If the sum
// peaks above 0.99 the whole mix is scaled by 0.99 / peak. The result does not
// depend on input order. Throws Error(SampleRateMismatch).
Waveform mix(std::span<const PlacedWaveform> placed, int session_rate);

Waveform resample_linear(const Waveform& waveform, int target_rate);

// RIFF/WAVE PCM signed 16-bit little-endian mono. Quantization rounds half
// away from zero on the 32767 grid.
std::vector<std::uint8_t> encode_wav(const Waveform& waveform);
// Throws Error(UnsupportedWavLayout) for anything but PCM16 mono.
Waveform decode_wav(std::span<const std::uint8_t> bytes);

void write_wav(const Waveform& waveform, const std::filesystem::path& path);
Waveform read_wav(const std::filesystem::path& path);

}  // namespace diarkit
