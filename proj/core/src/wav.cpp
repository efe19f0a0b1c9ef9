// Copyright (c) 2026 The ovkws Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ovkws/wav.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "ovkws/error.hpp"

namespace ovkws {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T load(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
void store(std::string& out, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  out.append(bytes, sizeof(T));
}

[[noreturn]] void malformed(const std::filesystem::path& path,
                            const std::string& what) {
  throw DataError("malformed header: " + path.string() + ": " + what);
}

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in),
                          std::istreambuf_iterator<char>()};
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0) {
    malformed(path, "not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  const char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const auto size = load<std::uint32_t>(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      // Tolerate a truncated data chunk the way most readers do.
      if (id != "data") malformed(path, "chunk overruns file");
    }
    if (id == "fmt ") {
      if (size < 16) malformed(path, "short fmt chunk");
      format = load<std::uint16_t>(bytes.data() + body);
      channels = load<std::uint16_t>(bytes.data() + body + 2);
      rate = load<std::uint32_t>(bytes.data() + body + 4);
      bits = load<std::uint16_t>(bytes.data() + body + 14);
      if (format == kFormatExtensible && size >= 26) {
        format = load<std::uint16_t>(bytes.data() + body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      data = bytes.data() + body;
      data_size = std::min<std::size_t>(size, bytes.size() - body);
      break;
    }
    pos = body + size + (size & 1u);
  }

  if (!have_fmt) malformed(path, "missing fmt chunk");
  if (data == nullptr) malformed(path, "missing data chunk");
  if (channels != 1) throw DataError("unsupported channel count");
  if (rate == 0) malformed(path, "zero sample rate");

  AudioBuffer out;
  out.sample_rate = static_cast<int>(rate);
  if (format == kFormatPcm && bits == 16) {
    const std::size_t n = data_size / 2;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.samples[i] = load<std::int16_t>(data + 2 * i) / 32768.0;
    }
  } else if (format == kFormatFloat && bits == 32) {
    const std::size_t n = data_size / 4;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.samples[i] = load<float>(data + 4 * i);
    }
  } else {
    malformed(path, "unsupported sample format (format " +
                        std::to_string(format) + ", " + std::to_string(bits) +
                        " bits)");
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio,
               WavFormat format) {
  if (audio.sample_rate <= 0) throw ConfigError("sample rate must be positive");
  const bool pcm = format == WavFormat::kPcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint16_t block_align = bits / 8;
  const auto data_size =
      static_cast<std::uint32_t>(audio.samples.size() * block_align);

  std::string out;
  out.reserve(44 + data_size);
  out.append("RIFF");
  store<std::uint32_t>(out, 36 + data_size);
  out.append("WAVE");
  out.append("fmt ");
  store<std::uint32_t>(out, 16);
  store<std::uint16_t>(out, pcm ? kFormatPcm : kFormatFloat);
  store<std::uint16_t>(out, 1);
  store<std::uint32_t>(out, static_cast<std::uint32_t>(audio.sample_rate));
  store<std::uint32_t>(out, static_cast<std::uint32_t>(audio.sample_rate) *
                                block_align);
  store<std::uint16_t>(out, block_align);
  store<std::uint16_t>(out, bits);
  out.append("data");
  store<std::uint32_t>(out, data_size);
  for (double s : audio.samples) {
    if (pcm) {
      const double scaled = std::nearbyint(std::clamp(s, -1.0, 1.0) * 32768.0);
      store<std::int16_t>(
          out, static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0)));
    } else {
      store<float>(out, static_cast<float>(s));
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw DataError("short write to " + path.string());
}

}  // namespace ovkws
