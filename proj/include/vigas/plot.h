// include/vigas/plot.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_PLOT_H_
#define VIGAS_PLOT_H_

#include <string>
#include <utility>
#include <vector>

#include "vigas/stft.h"
#include "vigas/waveform.h"

namespace vigas {

// Minimal RGB raster with PNG output (zlib-deflated, filter 0 scanlines).
struct Canvas {
  int height = 0, width = 0;
  std::vector<uint8_t> rgb;

  Canvas(int h, int w, uint8_t fill = 255);
  void set(int y, int x, uint8_t r, uint8_t g, uint8_t b);
  void line(int y0, int x0, int y1, int x1, uint8_t r, uint8_t g, uint8_t b);
  void save_png(const std::string& path) const;
};

// One row per waveform, left- and right-channel panels side by side.
void plot_waveforms(const std::string& path,
                    const std::vector<std::pair<std::string, Waveform>>& waves);

// Log-magnitude spectrogram heatmaps, one panel per channel.
void plot_spectrogram(const std::string& path, const Waveform& w, const StftConfig& cfg);

// Train/val loss curves from a loss_log.csv.
void plot_loss_curves(const std::string& path, const std::string& csv_path);

}  // namespace vigas

#endif  // VIGAS_PLOT_H_
