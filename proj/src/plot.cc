// src/plot.cc
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vigas/plot.h"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vigas/common.h"

namespace vigas {

Canvas::Canvas(int h, int w, uint8_t fill)
    : height(h), width(w), rgb(static_cast<size_t>(h) * w * 3, fill) {}

void Canvas::set(int y, int x, uint8_t r, uint8_t g, uint8_t b) {
  if (y < 0 || y >= height || x < 0 || x >= width) return;
  size_t i = (static_cast<size_t>(y) * width + x) * 3;
  rgb[i] = r;
  rgb[i + 1] = g;
  rgb[i + 2] = b;
}

void Canvas::line(int y0, int x0, int y1, int x1, uint8_t r, uint8_t g, uint8_t b) {
  int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    set(y0, x0, r, g, b);
    if (x0 == x1 && y0 == y1) break;
    int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

namespace {

void put_u32(std::vector<uint8_t>* out, uint32_t v) {
  out->push_back(static_cast<uint8_t>(v >> 24));
  out->push_back(static_cast<uint8_t>(v >> 16));
  out->push_back(static_cast<uint8_t>(v >> 8));
  out->push_back(static_cast<uint8_t>(v));
}

void put_chunk(std::vector<uint8_t>* out, const char type[4],
               const std::vector<uint8_t>& data) {
  put_u32(out, static_cast<uint32_t>(data.size()));
  size_t start = out->size();
  out->insert(out->end(), type, type + 4);
  out->insert(out->end(), data.begin(), data.end());
  uint32_t crc = crc32(0L, out->data() + start, static_cast<uInt>(out->size() - start));
  put_u32(out, crc);
}

}  // namespace

void Canvas::save_png(const std::string& path) const {
  // Raw scanlines, filter byte 0 per row.
  std::vector<uint8_t> raw;
  raw.reserve(static_cast<size_t>(height) * (width * 3 + 1));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);
    raw.insert(raw.end(), rgb.begin() + static_cast<size_t>(y) * width * 3,
               rgb.begin() + static_cast<size_t>(y + 1) * width * 3);
  }
  uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<uint8_t> comp(comp_len);
  if (compress2(comp.data(), &comp_len, raw.data(), static_cast<uLong>(raw.size()), 9) !=
      Z_OK)
    throw IoError(path + ": png deflate failed");
  comp.resize(comp_len);

  std::vector<uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<uint8_t> ihdr;
  put_u32(&ihdr, static_cast<uint32_t>(width));
  put_u32(&ihdr, static_cast<uint32_t>(height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // truecolor
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  put_chunk(&out, "IHDR", ihdr);
  put_chunk(&out, "IDAT", comp);
  put_chunk(&out, "IEND", {});

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path + ": cannot open for writing");
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError(path + ": write failed");
}

void plot_waveforms(const std::string& path,
                    const std::vector<std::pair<std::string, Waveform>>& waves) {
  if (waves.empty()) throw InvalidInput("plot_waveforms: nothing to plot");
  const int panel_w = 480, panel_h = 120, margin = 10;
  const int rows = static_cast<int>(waves.size());
  Canvas canvas(rows * (panel_h + margin) + margin, 2 * panel_w + 3 * margin);

  const uint8_t colors[][3] = {{40, 90, 200}, {200, 80, 40}, {40, 160, 80}};
  for (int row = 0; row < rows; ++row) {
    const Waveform& w = waves[static_cast<size_t>(row)].second;
    double pk = std::max(peak(w), 1e-9);
    const auto& col = colors[row % 3];
    for (int c = 0; c < std::min(2, w.channels()); ++c) {
      int ox = margin + c * (panel_w + margin);
      int oy = margin + row * (panel_h + margin);
      // Panel frame and midline.
      canvas.line(oy, ox, oy, ox + panel_w, 0, 0, 0);
      canvas.line(oy + panel_h, ox, oy + panel_h, ox + panel_w, 0, 0, 0);
      canvas.line(oy, ox, oy + panel_h, ox, 0, 0, 0);
      canvas.line(oy, ox + panel_w, oy + panel_h, ox + panel_w, 0, 0, 0);
      canvas.line(oy + panel_h / 2, ox, oy + panel_h / 2, ox + panel_w, 220, 220, 220);

      int prev_y = oy + panel_h / 2;
      for (int x = 0; x < panel_w; ++x) {
        auto idx = static_cast<Eigen::Index>(
            static_cast<double>(x) / panel_w * static_cast<double>(w.frames()));
        double v = w.ch[c][std::min(idx, w.frames() - 1)] / pk;
        int y = oy + panel_h / 2 - static_cast<int>(v * (panel_h / 2 - 2));
        canvas.line(prev_y, ox + std::max(0, x - 1), y, ox + x, col[0], col[1], col[2]);
        prev_y = y;
      }
    }
  }
  canvas.save_png(path);
}

void plot_spectrogram(const std::string& path, const Waveform& w, const StftConfig& cfg) {
  Spectrogram s = stft(w, cfg);
  const int panels = s.channels();
  const auto bins = static_cast<int>(s.bins());
  const auto frames = static_cast<int>(s.time_frames());
  const int margin = 10;
  Canvas canvas(bins + 2 * margin, panels * frames + (panels + 1) * margin);

  for (int c = 0; c < panels; ++c) {
    Eigen::ArrayXXd db = (s.ch[c].abs() + 1e-10).log10() * 20.0;
    double lo = db.maxCoeff() - 80.0, hi = db.maxCoeff();
    int ox = margin + c * (frames + margin);
    for (int t = 0; t < frames; ++t) {
      for (int f = 0; f < bins; ++f) {
        double v = (db(f, t) - lo) / (hi - lo);
        v = std::min(1.0, std::max(0.0, v));
        // Dark blue -> yellow ramp.
        auto r = static_cast<uint8_t>(255 * v);
        auto g = static_cast<uint8_t>(220 * v * v);
        auto b = static_cast<uint8_t>(90 + 100 * (1.0 - v));
        canvas.set(margin + bins - 1 - f, ox + t, r, g, b);
      }
    }
  }
  canvas.save_png(path);
}

void plot_loss_curves(const std::string& path, const std::string& csv_path) {
  std::ifstream f(csv_path);
  if (!f) throw IoError(csv_path + ": cannot open loss log");
  std::vector<double> train, val;
  std::string line;
  while (std::getline(f, line)) {
    if (line.rfind("epoch", 0) == 0 || line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    std::vector<std::string> parts;
    while (std::getline(ss, tok, ',')) parts.push_back(tok);
    if (parts.size() < 3) continue;
    train.push_back(std::stod(parts[1]));
    val.push_back(std::stod(parts[2]));
  }
  if (train.empty()) throw InvalidInput(csv_path + ": no loss rows to plot");

  const int h = 300, w = 600, margin = 20;
  Canvas canvas(h + 2 * margin, w + 2 * margin);
  double hi = 0.0;
  for (double v : train) hi = std::max(hi, v);
  for (double v : val) hi = std::max(hi, v);
  if (hi <= 0.0) hi = 1.0;

  canvas.line(margin + h, margin, margin + h, margin + w, 0, 0, 0);
  canvas.line(margin, margin, margin + h, margin, 0, 0, 0);

  auto draw = [&](const std::vector<double>& ys, uint8_t r, uint8_t g, uint8_t b) {
    int prev_x = margin, prev_y = margin + h - static_cast<int>(ys[0] / hi * h);
    for (size_t i = 1; i < ys.size(); ++i) {
      int x = margin + static_cast<int>(static_cast<double>(i) / (ys.size() - 1) * w);
      int y = margin + h - static_cast<int>(ys[i] / hi * h);
      canvas.line(prev_y, prev_x, y, x, r, g, b);
      prev_x = x;
      prev_y = y;
    }
  };
  draw(train, 40, 90, 200);
  if (val.size() > 1) draw(val, 200, 80, 40);
  canvas.save_png(path);
}

}  // namespace vigas
