// src/checkpoint.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vigas/checkpoint.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "vigas/common.h"

static_assert(std::endian::native == std::endian::little,
              "checkpoint i/o assumes a little-endian host");

namespace vigas {

namespace {

constexpr char kMagic[8] = {'V', 'G', 'A', 'S', 'N', 'E', 'T', '1'};
constexpr uint32_t kVersion = 1;

uint64_t fnv1a(const uint8_t* data, size_t n) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
void put(std::vector<uint8_t>* out, T v) {
  uint8_t bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  out->insert(out->end(), bytes, bytes + sizeof(T));
}

template <typename T>
T get(const std::vector<uint8_t>& buf, size_t* pos, const std::string& path) {
  if (*pos + sizeof(T) > buf.size()) throw IoError(path + ": truncated checkpoint");
  T v;
  std::memcpy(&v, buf.data() + *pos, sizeof(T));
  *pos += sizeof(T);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const NetParams& params) {
  params.config.validate();
  if (params.flat.size() != param_count(params.config))
    throw InvalidConfig("save_checkpoint: parameter vector does not match config");

  std::vector<uint8_t> buf;
  buf.insert(buf.end(), kMagic, kMagic + 8);
  put<uint32_t>(&buf, kVersion);
  const NetConfig& c = params.config;
  for (int32_t v : {c.channels, c.num_layers, c.num_blocks, c.dilation_base, c.kernel,
                    c.fusion_hidden, c.fusion_out, c.visual_reduce_channels,
                    c.image_size, c.pose_dim, c.bbox_dim})
    put<int32_t>(&buf, v);
  put<uint8_t>(&buf, c.use_visual ? 1 : 0);
  put<uint8_t>(&buf, c.use_bbox ? 1 : 0);
  put<uint64_t>(&buf, static_cast<uint64_t>(params.flat.size()));
  size_t data_off = buf.size();
  buf.resize(buf.size() + sizeof(double) * params.flat.size());
  std::memcpy(buf.data() + data_off, params.flat.data(),
              sizeof(double) * params.flat.size());
  put<uint64_t>(&buf, fnv1a(buf.data(), buf.size()));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path + ": cannot open for writing");
  f.write(reinterpret_cast<const char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (!f) throw IoError(path + ": write failed");
}

NetParams load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path + ": cannot open for reading");
  std::vector<uint8_t> buf((std::istreambuf_iterator<char>(f)),
                           std::istreambuf_iterator<char>());
  if (buf.size() < 8 + 4 + 8 || std::memcmp(buf.data(), kMagic, 8) != 0)
    throw IoError(path + ": not a checkpoint file");

  // Verify the trailing checksum before trusting any field.
  size_t payload = buf.size() - sizeof(uint64_t);
  uint64_t stored;
  std::memcpy(&stored, buf.data() + payload, sizeof(uint64_t));
  if (fnv1a(buf.data(), payload) != stored)
    throw IoError(path + ": checkpoint checksum mismatch");

  size_t pos = 8;
  uint32_t version = get<uint32_t>(buf, &pos, path);
  if (version != kVersion)
    throw IoError(path + ": unsupported checkpoint version " + std::to_string(version));

  NetConfig c;
  c.channels = get<int32_t>(buf, &pos, path);
  c.num_layers = get<int32_t>(buf, &pos, path);
  c.num_blocks = get<int32_t>(buf, &pos, path);
  c.dilation_base = get<int32_t>(buf, &pos, path);
  c.kernel = get<int32_t>(buf, &pos, path);
  c.fusion_hidden = get<int32_t>(buf, &pos, path);
  c.fusion_out = get<int32_t>(buf, &pos, path);
  c.visual_reduce_channels = get<int32_t>(buf, &pos, path);
  c.image_size = get<int32_t>(buf, &pos, path);
  c.pose_dim = get<int32_t>(buf, &pos, path);
  c.bbox_dim = get<int32_t>(buf, &pos, path);
  c.use_visual = get<uint8_t>(buf, &pos, path) != 0;
  c.use_bbox = get<uint8_t>(buf, &pos, path) != 0;
  c.validate();

  auto n = static_cast<Eigen::Index>(get<uint64_t>(buf, &pos, path));
  if (n != param_count(c))
    throw IoError(path + ": parameter count does not match config");
  if (pos + sizeof(double) * n != payload)
    throw IoError(path + ": checkpoint size mismatch");

  NetParams params;
  params.config = c;
  params.flat.resize(n);
  std::memcpy(params.flat.data(), buf.data() + pos, sizeof(double) * n);
  return params;
}

}  // namespace vigas
