// odo/src/wav.cpp

// Copyright 2026  The odo authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "odo/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "odo/error.hpp"

namespace odo {

namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

std::uint32_t get_u32(const char *p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

std::uint16_t get_u16(const char *p) {
  std::uint16_t v;
  std::memcpy(&v, p, 2);
  return v;
}

template <typename T>
void put(std::ofstream &os, T v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

}  // namespace

AudioClip read_wav(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::io, "cannot open " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(is)),
                          std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw Error(Errc::format, path + ": not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const char *data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char *chunk = bytes.data() + pos;
    const std::size_t size = get_u32(chunk + 4);
    const std::size_t avail = std::min(size, bytes.size() - pos - 8);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw Error(Errc::format, path + ": short fmt chunk");
      format = get_u16(chunk + 8);
      channels = get_u16(chunk + 10);
      rate = get_u32(chunk + 12);
      bits = get_u16(chunk + 22);
      if (format == 0xFFFE && avail >= 26) format = get_u16(chunk + 32);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = avail;
    }
    pos += 8 + size + (size & 1);
  }
  if (format == 0 || data == nullptr)
    throw Error(Errc::format, path + ": missing fmt or data chunk");
  if (channels != 1)
    throw Error(Errc::format, path + ": " + std::to_string(channels) +
                                  " channels; downmix to mono first");
  if (rate == 0) throw Error(Errc::format, path + ": zero sample rate");

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  if (format == 1 && bits == 16) {
    clip.samples.resize(data_size / 2);
    for (std::size_t i = 0; i < clip.samples.size(); ++i)
      clip.samples[i] = static_cast<std::int16_t>(get_u16(data + 2 * i)) / 32768.0f;
  } else if (format == 3 && bits == 32) {
    clip.samples.resize(data_size / 4);
    std::memcpy(clip.samples.data(), data, clip.samples.size() * 4);
  } else {
    throw Error(Errc::format, path + ": unsupported encoding (format " +
                                  std::to_string(format) + ", " +
                                  std::to_string(bits) +
                                  " bits); use 16-bit PCM or 32-bit float");
  }
  return clip;
}

void write_wav(const std::string &path, const AudioClip &clip,
               WavFormat format) {
  if (clip.sample_rate <= 0)
    throw Error(Errc::invalid_argument, "write_wav: sample rate must be positive");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::io, "cannot write " + path);
  const std::uint16_t bits = format == WavFormat::pcm16 ? 16 : 32;
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(clip.samples.size() * (bits / 8));
  os.write("RIFF", 4);
  put<std::uint32_t>(os, 36 + data_size);
  os.write("WAVEfmt ", 8);
  put<std::uint32_t>(os, 16);
  put<std::uint16_t>(os, format == WavFormat::pcm16 ? 1 : 3);
  put<std::uint16_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(clip.sample_rate));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(clip.sample_rate) * (bits / 8));
  put<std::uint16_t>(os, bits / 8);
  put<std::uint16_t>(os, bits);
  os.write("data", 4);
  put<std::uint32_t>(os, data_size);
  if (format == WavFormat::float32) {
    os.write(reinterpret_cast<const char *>(clip.samples.data()),
             static_cast<std::streamsize>(clip.samples.size() * 4));
  } else {
    std::vector<std::int16_t> pcm(clip.samples.size());
    for (std::size_t i = 0; i < pcm.size(); ++i) {
      const double v = std::clamp(double(clip.samples[i]), -1.0, 32767.0 / 32768.0);
      pcm[i] = static_cast<std::int16_t>(std::lround(v * 32768.0));
    }
    os.write(reinterpret_cast<const char *>(pcm.data()),
             static_cast<std::streamsize>(pcm.size() * 2));
  }
  if (!os) throw Error(Errc::io, "write failed: " + path);
}

}  // namespace odo
