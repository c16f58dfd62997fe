// include/vigas/wav_io.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_WAV_IO_H_
#define VIGAS_WAV_IO_H_

#include <string>

#include "vigas/waveform.h"

namespace vigas {

// RIFF/WAVE, PCM 16-bit little-endian, 16 kHz, 1 or 2 channels. Anything
// else is rejected with a descriptive IoError naming the file.
Waveform read_wav(const std::string& path);
void write_wav(const std::string& path, const Waveform& w);

}  // namespace vigas

#endif  // VIGAS_WAV_IO_H_
