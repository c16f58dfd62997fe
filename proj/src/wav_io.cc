// src/wav_io.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vigas/wav_io.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "vigas/common.h"

static_assert(std::endian::native == std::endian::little,
              "wav i/o assumes a little-endian host");

namespace vigas {

namespace {

constexpr double kPcmScale = 32767.0;

template <typename T>
void put(std::vector<uint8_t>* out, T v) {
  uint8_t bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  out->insert(out->end(), bytes, bytes + sizeof(T));
}

template <typename T>
T get(const std::vector<uint8_t>& buf, size_t off, const std::string& path) {
  if (off + sizeof(T) > buf.size()) throw IoError(path + ": truncated wav file");
  T v;
  std::memcpy(&v, buf.data() + off, sizeof(T));
  return v;
}

}  // namespace

Waveform read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path + ": cannot open for reading");
  std::vector<uint8_t> buf((std::istreambuf_iterator<char>(f)),
                           std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw IoError(path + ": not a RIFF/WAVE file");

  int channels = 0, sample_rate = 0, bits = 0, format = 0;
  size_t data_off = 0, data_len = 0;
  size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    char id[5] = {0};
    std::memcpy(id, buf.data() + pos, 4);
    uint32_t len = get<uint32_t>(buf, pos + 4, path);
    size_t body = pos + 8;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      format = get<uint16_t>(buf, body + 0, path);
      channels = get<uint16_t>(buf, body + 2, path);
      sample_rate = static_cast<int>(get<uint32_t>(buf, body + 4, path));
      bits = get<uint16_t>(buf, body + 14, path);
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = len;
    }
    pos = body + len + (len & 1);  // chunks are word-aligned
  }

  if (format != 1) throw IoError(path + ": only PCM wav is supported");
  if (bits != 16) throw IoError(path + ": only 16-bit wav is supported");
  if (channels < 1 || channels > 2)
    throw IoError(path + ": only mono or stereo wav is supported");
  if (sample_rate != kSampleRate)
    throw IoError(path + ": sample rate must be 16000, got " +
                  std::to_string(sample_rate));
  if (data_off == 0 || data_len == 0) throw IoError(path + ": missing data chunk");
  if (data_off + data_len > buf.size()) throw IoError(path + ": truncated data chunk");

  size_t n_frames = data_len / (2 * channels);
  if (n_frames == 0) throw IoError(path + ": empty data chunk");
  Waveform w = Waveform::zeros(channels, static_cast<Eigen::Index>(n_frames), sample_rate);
  for (size_t i = 0; i < n_frames; ++i) {
    for (int c = 0; c < channels; ++c) {
      int16_t s = get<int16_t>(buf, data_off + 2 * (i * channels + c), path);
      w.ch[c][static_cast<Eigen::Index>(i)] = static_cast<double>(s) / kPcmScale;
    }
  }
  return w;
}

void write_wav(const std::string& path, const Waveform& w) {
  w.validate("write_wav");
  const int channels = w.channels();
  const auto n_frames = static_cast<uint32_t>(w.frames());
  const uint32_t data_len = n_frames * channels * 2;

  std::vector<uint8_t> out;
  out.reserve(44 + data_len);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put<uint32_t>(&out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put<uint32_t>(&out, 16);
  put<uint16_t>(&out, 1);  // PCM
  put<uint16_t>(&out, static_cast<uint16_t>(channels));
  put<uint32_t>(&out, static_cast<uint32_t>(w.sample_rate));
  put<uint32_t>(&out, static_cast<uint32_t>(w.sample_rate * channels * 2));
  put<uint16_t>(&out, static_cast<uint16_t>(channels * 2));
  put<uint16_t>(&out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put<uint32_t>(&out, data_len);

  for (uint32_t i = 0; i < n_frames; ++i) {
    for (int c = 0; c < channels; ++c) {
      double v = std::lround(w.ch[c][static_cast<Eigen::Index>(i)] * kPcmScale);
      v = std::min(32767.0, std::max(-32768.0, v));
      put<int16_t>(&out, static_cast<int16_t>(v));
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path + ": cannot open for writing");
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError(path + ": write failed");
}

}  // namespace vigas
