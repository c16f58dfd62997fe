// include/vigas/checkpoint.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_CHECKPOINT_H_
#define VIGAS_CHECKPOINT_H_

#include <string>

#include "vigas/net.h"

namespace vigas {

// Checkpoint format: magic "VGASNET1", u32 version, the NetConfig fields,
// u64 parameter count, the flat parameter vector as 64-bit LE floats, and a
// trailing FNV-1a checksum of everything before it. Save/load round trips
// are bit-exact.
void save_checkpoint(const std::string& path, const NetParams& params);
NetParams load_checkpoint(const std::string& path);

}  // namespace vigas

#endif  // VIGAS_CHECKPOINT_H_
