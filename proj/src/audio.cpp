#include "diarkit/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "diarkit/error.hpp"

namespace diarkit {

float Waveform::peak() const noexcept {
  float p = 0.0f;
  for (float s : samples) p = std::max(p, std::abs(s));
  return p;
}

void validate_waveform(const Waveform& waveform) {
  if (waveform.sample_rate <= 0) {
    throw Error(Errc::InvalidArgument, "sample rate must be positive");
  }
  for (float s : waveform.samples) {
    if (!(s >= -1.0f && s <= 1.0f)) {
      throw Error(Errc::InvalidArgument, "sample outside [-1, 1]");
    }
  }
}

Waveform mix(std::span<const PlacedWaveform> placed, int session_rate) {
  if (session_rate <= 0) {
    throw Error(Errc::InvalidArgument, "session rate must be positive");
  }
  struct Item {
    std::size_t offset;
    const std::vector<float>* samples;
  };
  std::vector<Item> items;
  items.reserve(placed.size());
  std::size_t length = 0;
  for (const auto& p : placed) {
    if (p.waveform.sample_rate != session_rate) {
      throw Error(Errc::SampleRateMismatch,
                  "input at " + std::to_string(p.waveform.sample_rate) + " Hz, session at " +
                      std::to_string(session_rate) + " Hz");
    }
    if (p.onset < 0.0) {
      throw Error(Errc::InvalidArgument, "negative onset");
    }
    const auto offset = static_cast<std::size_t>(std::llround(p.onset * session_rate));
    items.push_back({offset, &p.waveform.samples});
    length = std::max(length, offset + p.waveform.samples.size());
  }
  // Canonical summation order.
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.offset != b.offset) return a.offset < b.offset;
    if (a.samples->size() != b.samples->size()) return a.samples->size() < b.samples->size();
    return std::lexicographical_compare(a.samples->begin(), a.samples->end(),
                                        b.samples->begin(), b.samples->end());
  });

  std::vector<double> acc(length, 0.0);
  for (const auto& item : items) {
    for (std::size_t i = 0; i < item.samples->size(); ++i) {
      acc[item.offset + i] += (*item.samples)[i];
    }
  }
  double peak = 0.0;
  for (double v : acc) peak = std::max(peak, std::abs(v));
  const double scale = peak > kMixPeakLimit ? static_cast<double>(kMixPeakLimit) / peak : 1.0;

  Waveform out;
  out.sample_rate = session_rate;
  out.samples.resize(length);
  for (std::size_t i = 0; i < length; ++i) {
    out.samples[i] = static_cast<float>(acc[i] * scale);
  }
  return out;
}

Waveform resample_linear(const Waveform& waveform, int target_rate) {
  if (waveform.sample_rate <= 0 || target_rate <= 0) {
    throw Error(Errc::InvalidArgument, "sample rates must be positive");
  }
  if (waveform.sample_rate == target_rate) return waveform;
  Waveform out;
  out.sample_rate = target_rate;
  const auto& in = waveform.samples;
  if (in.empty()) return out;
  const auto n_out = static_cast<std::size_t>(std::llround(
      static_cast<double>(in.size()) * target_rate / waveform.sample_rate));
  out.samples.resize(n_out);
  const double step = static_cast<double>(waveform.sample_rate) / target_rate;
  for (std::size_t i = 0; i < n_out; ++i) {
    const double pos = static_cast<double>(i) * step;
    const auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= in.size()) {
      out.samples[i] = in.back();
      continue;
    }
    const double frac = pos - static_cast<double>(k);
    out.samples[i] = static_cast<float>(in[k] + (static_cast<double>(in[k + 1]) - in[k]) * frac);
  }
  return out;
}

// ---------------------------------------------------------------------------
// WAV

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

}  // namespace

std::vector<std::uint8_t> encode_wav(const Waveform& waveform) {
  if (waveform.sample_rate <= 0) {
    throw Error(Errc::InvalidArgument, "sample rate must be positive");
  }
  const auto data_bytes = static_cast<std::uint32_t>(waveform.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(waveform.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(waveform.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (float s : waveform.samples) {
    const double clamped = std::clamp(static_cast<double>(s), -1.0, 1.0);
    const auto q = static_cast<std::int16_t>(std::lround(clamped * 32767.0));
    put_u16(out, static_cast<std::uint16_t>(q));
  }
  return out;
}

Waveform decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    throw Error(Errc::UnsupportedWavLayout, "not a RIFF/WAVE stream");
  }
  bool have_fmt = false;
  Waveform out;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = get_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      throw Error(Errc::UnsupportedWavLayout, "truncated chunk");
    }
    if (tag_is(bytes, pos, "fmt ")) {
      if (size < 16) throw Error(Errc::UnsupportedWavLayout, "short fmt chunk");
      const auto format = get_u16(bytes, body);
      const auto channels = get_u16(bytes, body + 2);
      const auto rate = get_u32(bytes, body + 4);
      const auto bits = get_u16(bytes, body + 14);
      if (format != 1 || channels != 1 || bits != 16) {
        throw Error(Errc::UnsupportedWavLayout,
                    "need PCM16 mono, got format " + std::to_string(format) + ", " +
                        std::to_string(channels) + " channel(s), " + std::to_string(bits) + " bits");
      }
      if (rate == 0) throw Error(Errc::UnsupportedWavLayout, "zero sample rate");
      out.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      if (!have_fmt) throw Error(Errc::UnsupportedWavLayout, "data chunk before fmt chunk");
      out.samples.resize(size / 2);
      for (std::size_t i = 0; i < out.samples.size(); ++i) {
        const auto q = static_cast<std::int16_t>(get_u16(bytes, body + 2 * i));
        out.samples[i] = std::max(-1.0f, static_cast<float>(q / 32767.0));
      }
      return out;
    }
    pos = body + size + (size & 1u);
  }
  throw Error(Errc::UnsupportedWavLayout, have_fmt ? "missing data chunk" : "missing fmt chunk");
}

void write_wav(const Waveform& waveform, const std::filesystem::path& path) {
  const auto bytes = encode_wav(waveform);
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::IoFailure, "short write to " + path.string());
}

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

}  // namespace diarkit
